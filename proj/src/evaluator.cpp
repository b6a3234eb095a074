#include "relocnet/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "relocnet/errors.hpp"
#include "relocnet/net.hpp"

namespace relocnet {

namespace {

void mean_std(const std::vector<double>& v, double& mean, double& stddev) {
  mean = 0.0;
  stddev = 0.0;
  if (v.empty()) return;
  for (double x : v) mean += x;
  mean /= double(v.size());
  double s = 0;
  for (double x : v) s += (x - mean) * (x - mean);
  stddev = std::sqrt(s / double(v.size()));  // population std
}

}  // namespace

void EvalReport::recompute_aggregates() {
  std::vector<double> ep, ea;
  ep.reserve(frames.size());
  ea.reserve(frames.size());
  for (const auto& f : frames) {
    ep.push_back(f.position_error_m);
    ea.push_back(f.angle_error_deg);
  }
  mean_std(ep, mean_position_error, std_position_error);
  mean_std(ea, mean_angle_error, std_angle_error);
}

EvalReport evaluate_with(const Predictor& predict, const Trajectory& test) {
  if (test.frames.empty())
    throw ContractViolation("evaluate on empty trajectory");
  EvalReport r;
  r.dataset = test.name;
  for (const auto& f : test.frames) {
    FrameEval fe;
    fe.frame_id = f.frame_id;
    fe.predicted_raw = predict(f);
    fe.predicted = fe.predicted_raw;
    const Quaternion qhat = quat_normalize(
        {fe.predicted_raw[3], fe.predicted_raw[4], fe.predicted_raw[5],
         fe.predicted_raw[6]});
    fe.predicted[3] = qhat.w;
    fe.predicted[4] = qhat.x;
    fe.predicted[5] = qhat.y;
    fe.predicted[6] = qhat.z;
    fe.position_error_m = position_error(
        f.pose.position, {fe.predicted[0], fe.predicted[1], fe.predicted[2]});
    fe.angle_error_deg = angular_error(f.pose.orientation, qhat);
    r.frames.push_back(std::move(fe));
  }
  r.recompute_aggregates();
  return r;
}

EvalReport evaluate(Model& model, const Trajectory& test,
                    const ModalitySpec& modality, std::size_t side,
                    const Normalizer& norm) {
  Net net(model);
  const Intrinsics intr = test.intrinsics;
  EvalReport r = evaluate_with(
      [&](const FrameRecord& f) {
        const NetInput in = assemble_input(f, modality, intr, side, norm);
        return predict_pose(net, in.data);
      },
      test);
  r.arch_name = model.arch.name;
  r.modality = modality.name();
  r.param_count = model.param_count();
  return r;
}

std::string EvalReport::to_json() const {
  nlohmann::json j;
  j["arch"] = arch_name;
  j["modality"] = modality;
  j["dataset"] = dataset;
  j["stage_index"] = stage_index;
  j["param_count"] = param_count;
  j["aggregates"] = {{"mean_position_error", mean_position_error},
                     {"std_position_error", std_position_error},
                     {"mean_angle_error", mean_angle_error},
                     {"std_angle_error", std_angle_error}};
  j["frames"] = nlohmann::json::array();
  for (const auto& f : frames) {
    j["frames"].push_back(
        {{"id", f.frame_id},
         {"position_error_m", f.position_error_m},
         {"angle_error_deg", f.angle_error_deg},
         {"predicted", std::vector<double>(f.predicted.begin(),
                                           f.predicted.end())},
         {"predicted_raw", std::vector<double>(f.predicted_raw.begin(),
                                               f.predicted_raw.end())}});
  }
  return j.dump(2);
}

EvalReport EvalReport::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  EvalReport r;
  r.arch_name = j.value("arch", "");
  r.modality = j.value("modality", "");
  r.dataset = j.value("dataset", "");
  r.stage_index = j.value("stage_index", -1);
  r.param_count = j.value("param_count", std::size_t(0));
  const auto& a = j.at("aggregates");
  r.mean_position_error = a.at("mean_position_error");
  r.std_position_error = a.at("std_position_error");
  r.mean_angle_error = a.at("mean_angle_error");
  r.std_angle_error = a.at("std_angle_error");
  for (const auto& fj : j.at("frames")) {
    FrameEval f;
    f.frame_id = fj.at("id").get<std::string>();
    f.position_error_m = fj.at("position_error_m");
    f.angle_error_deg = fj.at("angle_error_deg");
    const auto p = fj.at("predicted").get<std::vector<double>>();
    const auto pr = fj.at("predicted_raw").get<std::vector<double>>();
    std::copy_n(p.begin(), 7, f.predicted.begin());
    std::copy_n(pr.begin(), 7, f.predicted_raw.begin());
    r.frames.push_back(std::move(f));
  }
  return r;
}

std::vector<ReferenceRow> load_reference_rows(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IngestionError("cannot open reference data: " + path);
  nlohmann::json j;
  f >> j;
  std::vector<ReferenceRow> rows;
  for (const auto& rj : j.at("rows")) {
    ReferenceRow r;
    r.name = rj.at("name").get<std::string>();
    if (rj.contains("position"))
      for (const auto& [k, v] : rj["position"].items())
        r.position[k] = v.get<double>();
    if (rj.contains("angle"))
      for (const auto& [k, v] : rj["angle"].items())
        r.angle[k] = v.get<double>();
    rows.push_back(std::move(r));
  }
  return rows;
}

ComparisonTable build_comparison(const std::vector<EvalReport>& reports,
                                 const std::vector<ReferenceRow>& references) {
  ComparisonTable t;
  // collect unique rows (archs) and columns (datasets), first-seen order
  for (const auto& r : reports) {
    if (std::find(t.rows.begin(), t.rows.end(), r.arch_name) == t.rows.end()) {
      t.rows.push_back(r.arch_name);
      t.is_reference.push_back(false);
    }
    if (std::find(t.columns.begin(), t.columns.end(), r.dataset) ==
        t.columns.end())
      t.columns.push_back(r.dataset);
  }
  for (const auto& ref : references) {
    t.rows.push_back(ref.name);
    t.is_reference.push_back(true);
  }
  const std::size_t nr = t.rows.size(), nc = t.columns.size();
  t.position_cells.assign(nr, std::vector<ComparisonTable::Cell>(nc));
  t.angle_cells.assign(nr, std::vector<ComparisonTable::Cell>(nc));

  auto row_index = [&](const std::string& name) {
    return std::size_t(std::find(t.rows.begin(), t.rows.end(), name) -
                       t.rows.begin());
  };
  auto col_index = [&](const std::string& name) {
    return std::size_t(std::find(t.columns.begin(), t.columns.end(), name) -
                       t.columns.begin());
  };

  for (const auto& r : reports) {
    const std::size_t i = row_index(r.arch_name), j = col_index(r.dataset);
    if (t.position_cells[i][j].present)
      throw ContractViolation("duplicate comparison cell: " + r.arch_name +
                              " / " + r.dataset);
    t.position_cells[i][j] = {true, true, r.mean_position_error,
                              r.std_position_error};
    t.angle_cells[i][j] = {true, true, r.mean_angle_error, r.std_angle_error};
  }
  for (const auto& ref : references) {
    const std::size_t i = row_index(ref.name);
    for (const auto& [ds, v] : ref.position) {
      const auto cit = std::find(t.columns.begin(), t.columns.end(), ds);
      if (cit == t.columns.end()) continue;  // column not in this table
      t.position_cells[i][std::size_t(cit - t.columns.begin())] = {true, false,
                                                                   v, 0.0};
    }
    for (const auto& [ds, v] : ref.angle) {
      const auto cit = std::find(t.columns.begin(), t.columns.end(), ds);
      if (cit == t.columns.end()) continue;
      t.angle_cells[i][std::size_t(cit - t.columns.begin())] = {true, false, v,
                                                                0.0};
    }
  }
  return t;
}

std::string ComparisonTable::render(bool angles) const {
  const auto& cells = angles ? angle_cells : position_cells;
  std::ostringstream os;
  os << std::fixed << std::setprecision(3);
  os << std::setw(16) << "";
  for (const auto& c : columns) os << std::setw(22) << c;
  os << "\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::string label = rows[i];
    if (is_reference[i]) label = "[" + label + "]";  // external, never computed
    os << std::setw(16) << label;
    for (std::size_t j = 0; j < columns.size(); ++j) {
      const auto& c = cells[i][j];
      std::ostringstream cell;
      cell << std::fixed << std::setprecision(3);
      if (!c.present)
        cell << "NA";
      else if (c.has_std)
        cell << c.mean << " +- " << c.stddev;
      else
        cell << c.mean;
      os << std::setw(22) << cell.str();
    }
    os << "\n";
  }
  return os.str();
}

void export_trajectory_plot_data(const EvalReport& report,
                                 const std::vector<const Trajectory*>& train,
                                 const Trajectory& test,
                                 const std::string& out_path) {
  std::ofstream f(out_path);
  if (!f) throw IngestionError("cannot write plot data: " + out_path);
  f << "x,y,z,role\n";
  f << std::setprecision(17);
  for (const auto* tr : train)
    for (const auto& fr : tr->frames)
      f << fr.pose.position[0] << ',' << fr.pose.position[1] << ','
        << fr.pose.position[2] << ",train\n";
  for (const auto& fr : test.frames)
    f << fr.pose.position[0] << ',' << fr.pose.position[1] << ','
      << fr.pose.position[2] << ",test\n";
  for (const auto& fe : report.frames)
    f << fe.predicted[0] << ',' << fe.predicted[1] << ',' << fe.predicted[2]
      << ",predicted\n";
}

std::vector<CurriculumPoint> curriculum_curve(
    const std::vector<EvalReport>& stage_reports) {
  if (stage_reports.empty())
    throw ContractViolation("curriculum_curve needs at least one stage");
  std::vector<CurriculumPoint> out;
  const std::size_t params = stage_reports.front().param_count;
  for (std::size_t i = 0; i < stage_reports.size(); ++i) {
    const auto& r = stage_reports[i];
    if (r.param_count != params)
      throw ContractViolation(
          "parameter count differs across curriculum stages");
    CurriculumPoint p;
    p.stage = r.stage_index >= 0 ? std::size_t(r.stage_index) : i + 1;
    p.mean_position_error = r.mean_position_error;
    p.mean_angle_error = r.mean_angle_error;
    p.param_count = r.param_count;
    out.push_back(p);
  }
  return out;
}

}  // namespace relocnet
