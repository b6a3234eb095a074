// relocnet: scene maps as fixed-size pose-regression networks.
// Subcommands tie dataset ingestion, training, sweeps, curricula and
// evaluation into reproducible experiment recipes.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "relocnet/dataset.hpp"
#include "relocnet/errors.hpp"
#include "relocnet/evaluator.hpp"
#include "relocnet/kernels.hpp"
#include "relocnet/net.hpp"
#include "relocnet/pipeline.hpp"
#include "relocnet/synthetic.hpp"
#include "relocnet/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace relocnet;

namespace {

// Exit codes: 0 success, 1 usage, 2 ingestion, 3 training divergence,
// 4 internal contract violation.
constexpr int kExitUsage = 1;
constexpr int kExitIngestion = 2;
constexpr int kExitDiverged = 3;
constexpr int kExitContract = 4;

std::string output_root() {
  if (const char* env = std::getenv("RELOCNET_OUTPUT_ROOT")) return env;
  return ".";
}

json load_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IngestionError("cannot open config: " + path);
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw IngestionError("malformed JSON in " + path + ": " + e.what());
  }
  // experiment manifests embed the config under "config"; accept both
  if (j.contains("config")) return j["config"];
  return j;
}

struct ExperimentConfig {
  json raw;

  // dataset
  std::string family = "synthetic";  // synthetic|tum|7scenes|cambridge|manifest
  std::string root;
  std::vector<std::string> sequences;  // manifests / sequence dirs / splits
  std::string test_name;
  double assoc_tolerance = 0.02;
  // synthetic scene
  SceneSpec scene;
  std::uint64_t scene_seed = 7;

  std::string modality = "rgb";
  std::string arch = "reduced";
  std::size_t side = 32;
  double scene_scale = 1.0;
  HyperParams hp;
  std::string output_dir;

  static ExperimentConfig parse(const json& j) {
    ExperimentConfig c;
    c.raw = j;
    if (j.contains("dataset")) {
      const auto& d = j["dataset"];
      c.family = d.value("family", c.family);
      c.root = d.value("root", c.root);
      c.sequences = d.value("sequences", c.sequences);
      c.test_name = d.value("test", c.test_name);
      c.assoc_tolerance = d.value("assoc_tolerance", c.assoc_tolerance);
      c.scene_seed = d.value("seed", c.scene_seed);
      c.scene.image_side = d.value("image_side", c.scene.image_side);
      c.scene.trajectories = d.value("trajectories", c.scene.trajectories);
      c.scene.frames_per_trajectory =
          d.value("frames_per_trajectory", c.scene.frames_per_trajectory);
    }
    c.modality = j.value("modality", c.modality);
    c.arch = j.value("arch", c.arch);
    c.side = j.value("side", c.side);
    c.scene_scale = j.value("scene_scale", c.scene_scale);
    if (j.contains("hyperparams")) {
      const auto& h = j["hyperparams"];
      c.hp.batch_size = h.value("batch_size", c.hp.batch_size);
      c.hp.learning_rate = h.value("learning_rate", c.hp.learning_rate);
      c.hp.weight_decay = h.value("weight_decay", c.hp.weight_decay);
      c.hp.beta = h.value("beta", c.hp.beta);
      c.hp.epochs = h.value("epochs", c.hp.epochs);
      c.hp.seed = h.value("seed", c.hp.seed);
      c.hp.momentum = h.value("momentum", c.hp.momentum);
      c.hp.init_std = h.value("init_std", c.hp.init_std);
    }
    c.output_dir = j.value("output_dir", std::string());
    return c;
  }
};

ArchSpec arch_for(const ExperimentConfig& c, std::size_t channels) {
  if (c.arch == "reduced") return reduced_arch(channels, c.side);
  return preset(c.arch, channels);
}

DatasetBundle load_bundle(const ExperimentConfig& c) {
  DatasetBundle b;
  if (c.family == "synthetic") {
    b = generate_synthetic_scene(c.scene, c.scene_seed);
  } else if (c.family == "manifest") {
    b.scene = c.root;
    for (const auto& m : c.sequences)
      b.trajectories.push_back(
          load_trajectory_manifest(c.root + "/" + m + "/manifest.json"));
  } else if (c.family == "tum") {
    b.scene = c.root;
    b.trajectories.push_back(load_tum_sequence(c.root, c.assoc_tolerance));
  } else if (c.family == "7scenes") {
    b.scene = c.root;
    for (const auto& s : c.sequences)
      b.trajectories.push_back(load_7scenes_sequence(c.root + "/" + s));
  } else if (c.family == "cambridge") {
    b.scene = c.root;
    for (const auto& s : c.sequences)
      b.trajectories.push_back(load_cambridge_sequence(c.root, s));
  } else {
    throw IngestionError("unknown dataset family: " + c.family);
  }
  return b;
}

std::uint64_t bundle_hash(const DatasetBundle& b) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix64 = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 0x100000001b3ull;
    }
  };
  for (const auto& t : b.trajectories) {
    for (const auto& f : t.frames) {
      const PoseVector p = pose_to_vector(f.pose);
      for (double d : p) {
        std::uint64_t bits;
        std::memcpy(&bits, &d, 8);
        mix64(bits);
      }
      if (f.rgb) mix64(f.rgb->fnv1a());
      if (f.depth) mix64(f.depth->fnv1a());
    }
  }
  return h;
}

void write_manifest(const ExperimentConfig& c, const std::string& dir,
                    const DatasetBundle& bundle) {
  json m;
  m["config"] = c.raw;
  m["dataset_hash"] = bundle_hash(bundle);
  m["kernel"] = kernels::active_name();
  std::ofstream f(dir + "/manifest.json");
  f << m.dump(2) << "\n";
}

struct PreparedData {
  ModalitySpec modality;
  Normalizer norm;
  TrainData train, val;
  const Trajectory* test = nullptr;
  std::vector<const Trajectory*> train_trajs;
  Intrinsics intr;
};

PreparedData prepare(const ExperimentConfig& c, const DatasetBundle& bundle) {
  PreparedData p;
  p.modality = ModalitySpec::from_name(c.modality);
  const std::string test_name =
      c.test_name.empty() ? bundle.trajectories.back().name : c.test_name;
  for (const auto& t : bundle.trajectories) {
    if (t.name == test_name)
      p.test = &t;
    else if (t.role == Role::Validation)
      ;  // handled below
    else
      p.train_trajs.push_back(&t);
  }
  if (!p.test) throw IngestionError("test trajectory not found: " + test_name);
  p.intr = p.test->intrinsics;

  std::vector<const FrameRecord*> frames;
  for (const auto* t : p.train_trajs)
    for (const auto& f : t->frames) frames.push_back(&f);
  p.norm.scene_scale = c.scene_scale;
  p.norm.channel_means =
      compute_channel_means(frames, p.modality, p.intr, c.side, c.scene_scale);
  p.train = make_train_data(p.train_trajs, p.modality, p.intr, c.side, p.norm);

  std::vector<const Trajectory*> vals;
  for (const auto& t : bundle.trajectories)
    if (t.role == Role::Validation && t.name != test_name)
      vals.push_back(&t);
  if (!vals.empty())
    p.val = make_train_data(vals, p.modality, p.intr, c.side, p.norm);
  return p;
}

void save_checkpoint(const Model& m, const TrainHistory& h,
                     const std::string& path_base) {
  WeightContainer c = export_weights(m);
  c.save(path_base + ".rwc");
  std::ofstream f(path_base + ".history.json");
  f << h.to_json() << "\n";
}

int cmd_validate(const std::string& path, const std::string& family,
                 const std::string& split, double tolerance) {
  if (family == "tum") {
    IngestStats stats;
    Trajectory t = load_tum_sequence(path, tolerance, &stats);
    std::cout << t.name << ": " << stats.frames << " frames, " << stats.dropped
              << " dropped\n";
  } else if (family == "7scenes") {
    Trajectory t = load_7scenes_sequence(path);
    std::cout << t.name << ": " << t.frames.size() << " frames, 0 dropped\n";
  } else if (family == "cambridge") {
    for (const auto& s :
         split.empty() ? std::vector<std::string>{"dataset_train.txt",
                                                  "dataset_test.txt"}
                       : std::vector<std::string>{split}) {
      Trajectory t = load_cambridge_sequence(path, s);
      std::cout << t.name << ": " << t.frames.size() << " frames\n";
    }
  } else if (family == "manifest") {
    Trajectory t = load_trajectory_manifest(path);
    std::cout << t.name << ": " << t.frames.size() << " frames\n";
  } else {
    throw IngestionError("unknown dataset family: " + family);
  }
  return 0;
}

int cmd_synth(const std::string& out, std::uint64_t seed, std::size_t side,
              std::size_t trajectories, std::size_t frames) {
  SceneSpec spec;
  spec.image_side = side;
  spec.trajectories = trajectories;
  spec.frames_per_trajectory = frames;
  DatasetBundle b = generate_synthetic_scene(spec, seed);
  fs::create_directories(out);
  for (const auto& t : b.trajectories)
    save_trajectory_manifest(t, out + "/" + t.name);
  std::cout << "scene " << b.scene << ": " << b.trajectories.size()
            << " trajectories, hash " << std::hex << bundle_hash(b) << std::dec
            << "\n";
  return 0;
}

int run_train(const ExperimentConfig& c, const std::string& pretrained) {
  DatasetBundle bundle = load_bundle(c);
  PreparedData p = prepare(c, bundle);
  const ArchSpec arch = arch_for(c, p.modality.channels());

  const std::string dir = c.output_dir.empty()
                              ? output_root() + "/run"
                              : output_root() + "/" + c.output_dir;
  fs::create_directories(dir);
  write_manifest(c, dir, bundle);

  TrainResult tr;
  if (pretrained.empty()) {
    Model init = build_model(arch, c.hp.seed, c.hp.init_std);
    init.channel_means = p.norm.channel_means;
    tr = train(init, p.train, p.val, c.hp);
  } else {
    tr = finetune(WeightContainer::load(pretrained), arch, p.train, p.val,
                  c.hp);
  }
  save_checkpoint(tr.best_model, tr.history, dir + "/best");
  save_checkpoint(tr.final_model, tr.history, dir + "/final");
  if (tr.history.diverged) {
    std::cerr << tr.history.diagnostic << "\n";
    return kExitDiverged;
  }

  EvalReport report =
      evaluate(tr.best_model, *p.test, p.modality, c.side, p.norm);
  std::ofstream rf(dir + "/report.json");
  rf << report.to_json() << "\n";
  export_trajectory_plot_data(report, p.train_trajs, *p.test,
                              dir + "/trajectories.csv");
  std::cout << "mean position error [m]: " << report.mean_position_error
            << " +- " << report.std_position_error << "\n"
            << "mean angle error [deg]:  " << report.mean_angle_error << " +- "
            << report.std_angle_error << "\n"
            << "outputs under " << dir << "\n";
  return 0;
}

int run_eval(const ExperimentConfig& c, const std::string& checkpoint) {
  DatasetBundle bundle = load_bundle(c);
  PreparedData p = prepare(c, bundle);
  const ArchSpec arch = arch_for(c, p.modality.channels());
  WeightContainer wc = WeightContainer::load(checkpoint);
  Model m = import_weights(wc, arch);
  Normalizer norm = p.norm;
  if (!m.channel_means.empty()) norm.channel_means = m.channel_means;
  EvalReport report = evaluate(m, *p.test, p.modality, c.side, norm);
  const std::string dir = c.output_dir.empty()
                              ? output_root() + "/eval"
                              : output_root() + "/" + c.output_dir;
  fs::create_directories(dir);
  write_manifest(c, dir, bundle);
  std::ofstream rf(dir + "/report.json");
  rf << report.to_json() << "\n";
  std::cout << report.mean_position_error << " +- "
            << report.std_position_error << " m, "
            << report.mean_angle_error << " +- " << report.std_angle_error
            << " deg\n";
  return 0;
}

int run_sweep(const ExperimentConfig& c, std::size_t combos) {
  DatasetBundle bundle = load_bundle(c);
  PreparedData p = prepare(c, bundle);
  const ArchSpec arch = arch_for(c, p.modality.channels());

  SweepGrid grid;
  grid.seed = c.hp.seed;
  if (c.raw.contains("sweep")) {
    const auto& s = c.raw["sweep"];
    grid.batch_sizes = s.value("batch_sizes", grid.batch_sizes);
    grid.weight_decays = s.value("weight_decays", grid.weight_decays);
    grid.betas = s.value("betas", grid.betas);
    grid.lr_min = s.value("lr_min", grid.lr_min);
    grid.lr_max = s.value("lr_max", grid.lr_max);
  }
  SweepResult res =
      sweep(arch, p.train, p.val, grid, combos, c.hp.epochs, c.hp.seed);

  const std::string dir = c.output_dir.empty()
                              ? output_root() + "/sweep"
                              : output_root() + "/" + c.output_dir;
  fs::create_directories(dir);
  write_manifest(c, dir, bundle);
  json j = json::array();
  for (const auto& e : res.entries)
    j.push_back({{"learning_rate", e.hp.learning_rate},
                 {"batch_size", e.hp.batch_size},
                 {"weight_decay", e.hp.weight_decay},
                 {"beta", e.hp.beta},
                 {"val_position_error", e.val_position_error},
                 {"val_angle_error", e.val_angle_error}});
  std::ofstream f(dir + "/sweep.json");
  f << j.dump(2) << "\n";
  std::cout << "best lr " << res.entries.front().hp.learning_rate
            << " -> val e_p " << res.entries.front().val_position_error
            << " m\n";
  return 0;
}

int run_curriculum_cmd(const ExperimentConfig& c) {
  DatasetBundle bundle = load_bundle(c);
  const std::string test_name =
      c.test_name.empty() ? bundle.trajectories.back().name : c.test_name;
  Curriculum cur = make_leave_one_out(bundle, test_name);
  const ModalitySpec modality = ModalitySpec::from_name(c.modality);
  const ArchSpec arch = arch_for(c, modality.channels());
  auto stages = run_curriculum(arch, bundle, cur, c.hp, modality, c.side,
                               c.scene_scale);

  const std::string dir = c.output_dir.empty()
                              ? output_root() + "/curriculum"
                              : output_root() + "/" + c.output_dir;
  fs::create_directories(dir);
  write_manifest(c, dir, bundle);
  std::vector<EvalReport> reports;
  for (const auto& s : stages) {
    std::ofstream f(dir + "/stage" + std::to_string(s.stage) + ".json");
    f << s.report.to_json() << "\n";
    reports.push_back(s.report);
  }
  const auto curve = curriculum_curve(reports);
  std::ofstream cf(dir + "/curve.csv");
  cf << "trajectories,mean_position_error,mean_angle_error,param_count\n";
  for (const auto& pt : curve)
    cf << pt.stage << ',' << pt.mean_position_error << ','
       << pt.mean_angle_error << ',' << pt.param_count << "\n";
  for (const auto& pt : curve)
    std::cout << pt.stage << " trajectories -> e_p "
              << pt.mean_position_error << " m, e_a " << pt.mean_angle_error
              << " deg (params " << pt.param_count << ")\n";
  return 0;
}

int run_report(const std::vector<std::string>& run_dirs,
               const std::string& reference_file, const std::string& out) {
  std::vector<EvalReport> reports;
  for (const auto& d : run_dirs) {
    for (const auto& name : {"/report.json", ""}) {
      const std::string path = d + name;
      if (fs::is_regular_file(path) && path.ends_with(".json")) {
        std::ifstream f(path);
        std::stringstream ss;
        ss << f.rdbuf();
        reports.push_back(EvalReport::from_json(ss.str()));
        break;
      }
    }
  }
  const auto refs = load_reference_rows(reference_file);
  const ComparisonTable table = build_comparison(reports, refs);
  const std::string pos = table.render(false), ang = table.render(true);
  std::cout << "Relocalisation mean error [m]\n"
            << pos << "\nRelocalisation mean error [deg]\n"
            << ang;
  if (!out.empty()) {
    std::ofstream f(out);
    f << "Relocalisation mean error [m]\n"
      << pos << "\nRelocalisation mean error [deg]\n"
      << ang;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"relocnet: pose-regression network scene maps"};
  app.require_subcommand(1);

  // validate-dataset
  auto* validate = app.add_subcommand("validate-dataset",
                                      "parse a dataset and print sanity stats");
  std::string v_path, v_family = "tum", v_split;
  double v_tol = 0.02;
  validate->add_option("path", v_path)->required();
  validate->add_option("--family", v_family);
  validate->add_option("--split", v_split);
  validate->add_option("--tolerance", v_tol);

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic scene");
  std::string s_out = "synthetic_scene";
  std::uint64_t s_seed = 7;
  std::size_t s_side = 32, s_trajs = 4, s_frames = 60;
  synth->add_option("--out", s_out);
  synth->add_option("--seed", s_seed);
  synth->add_option("--side", s_side);
  synth->add_option("--trajectories", s_trajs);
  synth->add_option("--frames", s_frames);

  // shared config option helper
  auto add_config = [](CLI::App* cmd, std::string& path) {
    cmd->add_option("--config", path, "experiment config JSON")->required();
  };

  auto* traincmd = app.add_subcommand("train", "train a model");
  std::string t_config, t_seed_override;
  add_config(traincmd, t_config);
  std::int64_t t_epochs = -1;
  std::uint64_t t_seed = 0;
  bool t_has_seed = false;
  traincmd->add_option("--epochs", t_epochs, "override epochs");
  traincmd->add_option("--seed", t_seed, "override seed")
      ->each([&](const std::string&) { t_has_seed = true; });
  std::string t_outdir;
  traincmd->add_option("--output-dir", t_outdir, "override output dir");

  auto* finetunecmd = app.add_subcommand("finetune",
                                         "train from a pretrained container");
  std::string f_config, f_weights;
  add_config(finetunecmd, f_config);
  finetunecmd->add_option("--weights", f_weights)->required();

  auto* sweepcmd = app.add_subcommand("sweep", "hyperparameter random search");
  std::string sw_config;
  std::size_t sw_combos = 20;
  add_config(sweepcmd, sw_config);
  sweepcmd->add_option("--combos", sw_combos);

  auto* curcmd = app.add_subcommand("curriculum",
                                    "leave-one-out incremental training");
  std::string cu_config;
  add_config(curcmd, cu_config);

  auto* evalcmd = app.add_subcommand("eval", "evaluate a checkpoint");
  std::string e_config, e_checkpoint;
  add_config(evalcmd, e_config);
  evalcmd->add_option("--checkpoint", e_checkpoint)->required();

  auto* reportcmd = app.add_subcommand("report", "comparison table from runs");
  std::vector<std::string> r_dirs;
  std::string r_refs = std::string(RELOCNET_DATA_DIR) + "/reference_errors.json";
  std::string r_out;
  reportcmd->add_option("runs", r_dirs)->required();
  reportcmd->add_option("--references", r_refs);
  reportcmd->add_option("--out", r_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*validate) return cmd_validate(v_path, v_family, v_split, v_tol);
    if (*synth) return cmd_synth(s_out, s_seed, s_side, s_trajs, s_frames);
    if (*traincmd) {
      ExperimentConfig c = ExperimentConfig::parse(load_json_file(t_config));
      if (t_epochs >= 0) c.hp.epochs = std::size_t(t_epochs);
      if (t_has_seed) c.hp.seed = t_seed;
      if (!t_outdir.empty()) c.output_dir = t_outdir;
      return run_train(c, "");
    }
    if (*finetunecmd)
      return run_train(ExperimentConfig::parse(load_json_file(f_config)),
                       f_weights);
    if (*sweepcmd)
      return run_sweep(ExperimentConfig::parse(load_json_file(sw_config)),
                       sw_combos);
    if (*curcmd)
      return run_curriculum_cmd(
          ExperimentConfig::parse(load_json_file(cu_config)));
    if (*evalcmd)
      return run_eval(ExperimentConfig::parse(load_json_file(e_config)),
                      e_checkpoint);
    if (*reportcmd) return run_report(r_dirs, r_refs, r_out);
  } catch (const IngestionError& e) {
    std::cerr << "ingestion error: " << e.what() << "\n";
    return kExitIngestion;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitIngestion;
  } catch (const ContractViolation& e) {
    std::cerr << "contract violation: " << e.what() << "\n";
    return kExitContract;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitContract;
  }
  return kExitUsage;
}
