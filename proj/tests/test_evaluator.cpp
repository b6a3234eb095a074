#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "relocnet/evaluator.hpp"
#include "relocnet/synthetic.hpp"

using namespace relocnet;
namespace fs = std::filesystem;

namespace {

Trajectory tiny_trajectory() {
  SceneSpec spec;
  spec.trajectories = 1;
  spec.frames_per_trajectory = 5;
  auto b = generate_synthetic_scene(spec, 19);
  return b.trajectories[0];
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("the ground-truth oracle predictor scores zero errors") {
  Trajectory t = tiny_trajectory();
  EvalReport r = evaluate_with(
      [](const FrameRecord& f) { return pose_to_vector(f.pose); }, t);
  REQUIRE(r.frames.size() == 5);
  CHECK(r.mean_position_error == 0.0);
  CHECK(r.std_position_error == 0.0);
  CHECK(r.mean_angle_error == doctest::Approx(0.0).epsilon(1e-6));
  for (const auto& f : r.frames) {
    CHECK(f.position_error_m == 0.0);
    CHECK(f.angle_error_deg < 1e-5);
  }
}

TEST_CASE("predicted quaternion is normalized, raw output is kept") {
  Trajectory t = tiny_trajectory();
  EvalReport r = evaluate_with(
      [](const FrameRecord& f) {
        PoseVector p = pose_to_vector(f.pose);
        for (int i = 3; i < 7; ++i) p[i] *= 10.0;  // un-normalized output
        return p;
      },
      t);
  for (const auto& f : r.frames) {
    const double n = std::sqrt(f.predicted[3] * f.predicted[3] +
                               f.predicted[4] * f.predicted[4] +
                               f.predicted[5] * f.predicted[5] +
                               f.predicted[6] * f.predicted[6]);
    CHECK(n == doctest::Approx(1.0).epsilon(1e-12));
    const double nraw = std::sqrt(f.predicted_raw[3] * f.predicted_raw[3] +
                                  f.predicted_raw[4] * f.predicted_raw[4] +
                                  f.predicted_raw[5] * f.predicted_raw[5] +
                                  f.predicted_raw[6] * f.predicted_raw[6]);
    CHECK(nraw == doctest::Approx(10.0).epsilon(1e-9));
    CHECK(f.angle_error_deg < 1e-5);  // same rotation after normalization
  }
}

TEST_CASE("population statistics on a known sample") {
  // frames with position errors {3, 4, 5}: mean 4, std sqrt(2/3)
  EvalReport r;
  for (double e : {3.0, 4.0, 5.0}) {
    FrameEval f;
    f.position_error_m = e;
    f.angle_error_deg = 2.0 * e;
    r.frames.push_back(f);
  }
  r.recompute_aggregates();
  CHECK(r.mean_position_error == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(r.std_position_error ==
        doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-15));
  CHECK(r.mean_angle_error == doctest::Approx(8.0).epsilon(1e-15));
}

TEST_CASE("stored aggregates match recomputation to 1e-12") {
  Trajectory t = tiny_trajectory();
  EvalReport r = evaluate_with(
      [](const FrameRecord& f) {
        PoseVector p = pose_to_vector(f.pose);
        p[0] += 0.25;  // constant position offset
        return p;
      },
      t);
  const double m = r.mean_position_error, s = r.std_position_error;
  const double ma = r.mean_angle_error, sa = r.std_angle_error;
  r.recompute_aggregates();
  CHECK(std::abs(r.mean_position_error - m) < 1e-12);
  CHECK(std::abs(r.std_position_error - s) < 1e-12);
  CHECK(std::abs(r.mean_angle_error - ma) < 1e-12);
  CHECK(std::abs(r.std_angle_error - sa) < 1e-12);
  CHECK(m == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("eval report json round trip") {
  Trajectory t = tiny_trajectory();
  EvalReport r = evaluate_with(
      [](const FrameRecord& f) { return pose_to_vector(f.pose); }, t);
  r.arch_name = "reduced";
  r.modality = "rgb";
  r.stage_index = 2;
  r.param_count = 12345;
  EvalReport back = EvalReport::from_json(r.to_json());
  CHECK(back.arch_name == r.arch_name);
  CHECK(back.modality == r.modality);
  CHECK(back.dataset == r.dataset);
  CHECK(back.stage_index == 2);
  CHECK(back.param_count == 12345);
  REQUIRE(back.frames.size() == r.frames.size());
  CHECK(back.frames[0].frame_id == r.frames[0].frame_id);
  CHECK(back.mean_position_error == r.mean_position_error);
  CHECK(back.to_json() == r.to_json());
}

TEST_CASE("evaluate throws on an empty trajectory") {
  Trajectory t;
  t.name = "empty";
  CHECK_THROWS_AS(
      evaluate_with([](const FrameRecord&) { return PoseVector{}; }, t),
      ContractViolation);
}

TEST_CASE("plot export: roles, row counts, byte determinism") {
  SceneSpec spec;
  spec.trajectories = 3;
  spec.frames_per_trajectory = 4;
  auto b = generate_synthetic_scene(spec, 23);
  std::vector<const Trajectory*> train{&b.trajectories[0], &b.trajectories[1]};
  const Trajectory& test = b.trajectories[2];
  EvalReport r = evaluate_with(
      [](const FrameRecord& f) { return pose_to_vector(f.pose); }, test);

  auto dir = fs::temp_directory_path() /
             ("relocnet_plot_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string p1 = (dir / "a.csv").string();
  const std::string p2 = (dir / "b.csv").string();
  export_trajectory_plot_data(r, train, test, p1);
  export_trajectory_plot_data(r, train, test, p2);
  const std::string text = slurp(p1);
  CHECK(text == slurp(p2));

  std::istringstream is(text);
  std::string line;
  std::getline(is, line);
  CHECK(line == "x,y,z,role");
  std::size_t n_train = 0, n_test = 0, n_pred = 0;
  while (std::getline(is, line)) {
    if (line.ends_with(",train")) ++n_train;
    else if (line.ends_with(",test")) ++n_test;
    else if (line.ends_with(",predicted")) ++n_pred;
    else FAIL("unknown role in line: " << line);
  }
  CHECK(n_train == 8);
  CHECK(n_test == 4);
  CHECK(n_pred == 4);
  fs::remove_all(dir);
}

TEST_CASE("reference rows load from the shipped data file") {
  const std::string path =
      std::string(RELOCNET_DATA_DIR) + "/reference_errors.json";
  auto rows = load_reference_rows(path);
  REQUIRE(!rows.empty());
  const ReferenceRow* posenet = nullptr;
  for (const auto& r : rows)
    if (r.name == "PoseNet") posenet = &r;
  REQUIRE(posenet != nullptr);
  CHECK(posenet->position.at("St Marys Church") == 2.65);
  CHECK(posenet->angle.at("St Marys Church") == 4.24);
}

TEST_CASE("comparison table: NA cells, reference rows, exact spot values") {
  EvalReport a;
  a.arch_name = "VGG-F";
  a.dataset = "St Marys Church";
  a.mean_position_error = 0.5;
  a.std_position_error = 0.1;
  a.mean_angle_error = 5.0;
  a.std_angle_error = 1.0;
  EvalReport b = a;
  b.dataset = "Office";
  b.mean_position_error = 0.75;
  EvalReport c = a;
  c.arch_name = "VGG-M";  // only evaluated on Chess -> Office cell is NA

  auto refs = load_reference_rows(std::string(RELOCNET_DATA_DIR) +
                                  "/reference_errors.json");
  ComparisonTable t = build_comparison({a, b, c}, refs);

  REQUIRE(t.columns.size() == 2);
  const std::size_t stm = t.columns[0] == "St Marys Church" ? 0 : 1;
  const std::size_t office = 1 - stm;

  // computed rows come first and carry std values
  CHECK(t.rows[0] == "VGG-F");
  CHECK_FALSE(t.is_reference[0]);
  CHECK(t.position_cells[0][stm].mean == 0.5);
  CHECK(t.position_cells[0][stm].has_std);
  CHECK(t.position_cells[1][office].present == false);  // VGG-M / Office

  // the PoseNet reference row carries the shipped numbers without std
  std::size_t pn = 0;
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    if (t.rows[i] == "PoseNet") pn = i;
  CHECK(t.is_reference[pn]);
  CHECK(t.position_cells[pn][stm].present);
  CHECK(t.position_cells[pn][stm].mean == 2.65);
  CHECK_FALSE(t.position_cells[pn][stm].has_std);
  CHECK(t.angle_cells[pn][stm].mean == 4.24);

  const std::string pos = t.render(false);
  CHECK(pos.find("NA") != std::string::npos);
  CHECK(pos.find("[PoseNet]") != std::string::npos);
  CHECK(pos.find("2.650") != std::string::npos);
  const std::string ang = t.render(true);
  CHECK(ang.find("4.240") != std::string::npos);

  // duplicate (arch, dataset) pairs are rejected
  CHECK_THROWS_AS(build_comparison({a, a}, {}), ContractViolation);
}

TEST_CASE("curriculum curve enforces the constant-size contract") {
  EvalReport s1;
  s1.stage_index = 1;
  s1.param_count = 1000;
  s1.mean_position_error = 0.8;
  EvalReport s2 = s1;
  s2.stage_index = 2;
  s2.mean_position_error = 0.5;

  auto curve = curriculum_curve({s1, s2});
  REQUIRE(curve.size() == 2);
  CHECK(curve[0].stage == 1);
  CHECK(curve[1].stage == 2);
  CHECK(curve[0].mean_position_error == 0.8);
  CHECK(curve[1].param_count == 1000);

  s2.param_count = 2000;  // network silently grew: contract violation
  CHECK_THROWS_AS(curriculum_curve({s1, s2}), ContractViolation);
  CHECK_THROWS_AS(curriculum_curve({}), ContractViolation);
}
