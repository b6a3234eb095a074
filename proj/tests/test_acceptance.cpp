// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Runs end to end in minutes on a laptop; the heavyweight
// checks (desk-scale learning, curriculum trend, CLI determinism) use the
// synthetic scene at the scales pinned below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "relocnet/dataset.hpp"
#include "relocnet/evaluator.hpp"
#include "relocnet/model.hpp"
#include "relocnet/net.hpp"
#include "relocnet/pipeline.hpp"
#include "relocnet/pose.hpp"
#include "relocnet/synthetic.hpp"
#include "relocnet/trainer.hpp"

using namespace relocnet;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

void run_criterion(int number, const std::string& title,
                   const std::function<void(Check&)>& body) {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.ok = false;
    c.detail = std::string("exception: ") + e.what();
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  std::printf("criterion %2d [%s] %s (%.1fs)%s%s\n", number,
              c.ok ? "PASS" : "FAIL", title.c_str(), secs,
              c.detail.empty() ? "" : " -- ", c.detail.c_str());
  std::fflush(stdout);
  if (!c.ok) ++g_failures;
}

std::mt19937_64 g_rng(20240817);

PoseVector random_pose_vec() {
  std::normal_distribution<double> d(0.0, 1.0);
  PoseVector p;
  for (auto& v : p) v = d(g_rng);
  const double n =
      std::sqrt(p[3] * p[3] + p[4] * p[4] + p[5] * p[5] + p[6] * p[6]);
  if (n < 0.3) p[3] += 1.0;
  return p;
}

Quaternion random_unit_quat() {
  std::normal_distribution<double> d(0.0, 1.0);
  return quat_normalize({d(g_rng), d(g_rng), d(g_rng), d(g_rng)});
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// ---- criterion bodies -------------------------------------------------

void c1_gradients(Check& c) {
  // analytic loss gradient vs central differences, 100 probes
  std::uniform_real_distribution<double> betas(0.5, 300.0);
  for (int probe = 0; probe < 100 && c.ok; ++probe) {
    const PoseVector p_hat = random_pose_vec(), p_true = random_pose_vec();
    const double beta = betas(g_rng);
    const PoseVector g = loss_gradient(p_hat, p_true, beta);
    for (std::size_t i = 0; i < 7; ++i) {
      PoseVector lo = p_hat, hi = p_hat;
      const double h = 1e-6;
      lo[i] -= h;
      hi[i] += h;
      const double fd =
          (posenet_loss(hi, p_true, beta) - posenet_loss(lo, p_true, beta)) /
          (2 * h);
      const double scale = std::max({1.0, std::abs(fd), std::abs(g[i])});
      c.require(std::abs(g[i] - fd) / scale < 1e-4,
                "loss gradient probe " + std::to_string(probe));
    }
  }

  // end-to-end weight gradients through a toy net, 20 probes
  const ArchSpec arch = oracles::toy_archs()[1];
  Model m = build_model(arch, 3, 0.3);
  Net net(m);
  const PoseVector target = random_pose_vec();
  const double beta = 3.0;
  const Tensor x = oracles::random_input(
      {arch.in_channels, arch.input_side, arch.input_side}, g_rng);

  net.zero_grads();
  Tensor out = net.forward(x, Mode::Eval);
  PoseVector p;
  for (int i = 0; i < 7; ++i) p[i] = out[i];
  const PoseVector g = loss_gradient(p, target, beta);
  Tensor gout(out.shape());
  for (int i = 0; i < 7; ++i) gout[i] = g[i];
  net.backward(gout);

  auto loss_now = [&] {
    Net n(m);
    Tensor o = n.forward(x, Mode::Eval);
    PoseVector q;
    for (int i = 0; i < 7; ++i) q[i] = o[i];
    return posenet_loss(q, target, beta);
  };
  std::uniform_int_distribution<std::size_t> lp(0, m.weights.size() - 1);
  for (int probe = 0; probe < 20 && c.ok; ++probe) {
    const std::size_t li = lp(g_rng);
    std::uniform_int_distribution<std::size_t> ip(0, m.weights[li].size() - 1);
    const std::size_t wi = ip(g_rng);
    const double orig = m.weights[li][wi], h = 1e-5;
    m.weights[li][wi] = orig + h;
    const double hi = loss_now();
    m.weights[li][wi] = orig - h;
    const double lo = loss_now();
    m.weights[li][wi] = orig;
    const double fd = (hi - lo) / (2 * h);
    const double an = net.weight_grads()[li][wi];
    const double scale = std::max({1.0, std::abs(fd), std::abs(an)});
    c.require(std::abs(fd - an) / scale < 1e-3,
              "weight gradient probe " + std::to_string(probe));
  }
}

void c2_metrics(Check& c) {
  for (int i = 0; i < 1000 && c.ok; ++i) {
    const Quaternion a = random_unit_quat(), b = random_unit_quat();
    const double e = angular_error(a, b);
    c.require(e >= 0.0 && e <= 90.0 + 1e-12, "angular range");
    c.require(std::abs(angular_error(a, b) - angular_error(b, a)) < 1e-12,
              "angular symmetry");
    c.require(angular_error(a, a.negated()) < 1e-5, "double cover");
    std::normal_distribution<double> d(0.0, 1.0);
    const Vec3 x{d(g_rng), d(g_rng), d(g_rng)}, y{d(g_rng), d(g_rng), d(g_rng)},
        z{d(g_rng), d(g_rng), d(g_rng)};
    c.require(position_error(x, z) <=
                  position_error(x, y) + position_error(y, z) + 1e-12,
              "triangle inequality");
  }
  c.require(position_error({0, 0, 0}, {3, 4, 0}) == 5.0, "e_p exact");
  const double s = std::sqrt(0.5);
  c.require(std::abs(angular_error({1, 0, 0, 0}, {s, 0, 0, s}) - 45.0) < 1e-9,
            "e_a exact 45");
  c.require(std::abs(angular_error({1, 0, 0, 0}, {0, 1, 0, 0}) - 90.0) < 1e-9,
            "e_a exact 90");
}

void c3_param_counts(Check& c) {
  auto band = [&](const char* name, double center, double tol) {
    const double n = double(count_params(preset(name, 3, 1000)));
    c.require(n >= center * (1 - tol) && n <= center * (1 + tol),
              std::string(name) + " count " + std::to_string(n));
  };
  band("VGG-F", 61e6, 0.02);
  band("VGG-M", 100e6, 0.03);
  band("VGG-S", 100e6, 0.03);
  band("VGG-16", 138e6, 0.01);
  const double v19 = double(count_params(preset("VGG-19", 3, 1000)));
  c.require(v19 >= 138e6 && v19 <= 148e6, "VGG-19 band");
  for (const char* name : {"VGG-F", "VGG-M", "VGG-S", "VGG-16", "VGG-19"})
    c.require(count_params(preset(name, 3)) < count_params(preset(name, 3, 1000)),
              std::string(name) + " 7-head shrink");
}

void c4_channel_adaptation(Check& c) {
  for (const char* name : {"VGG-F", "VGG-M", "VGG-S", "VGG-16", "VGG-19"}) {
    const ArchSpec base = preset(name, 3);
    const LayerSpec& c1 = base.layers.front();
    for (std::size_t n : {1, 3, 4, 6}) {
      const ArchSpec a = preset(name, n);
      a.validate();
      c.require(a.output_shape().count() == 7,
                std::string(name) + " n=" + std::to_string(n) + " head");
      const long long delta = (long long)count_params(a) -
                              (long long)count_params(base);
      const long long expect = ((long long)n - 3) *
                               (long long)(c1.kernel * c1.kernel * c1.out_depth);
      c.require(delta == expect, std::string(name) + " conv1 delta");
    }
  }
  // one real forward at 224x224 to show the geometry executes end to end
  const ArchSpec f4 = preset("VGG-F", 4);
  Model m = build_model(f4, 1);
  Net net(m);
  Tensor x = oracles::random_input({4, 224, 224}, g_rng, 0.1);
  const Tensor out = net.forward(x, Mode::Eval);
  c.require(out.size() == 7, "VGG-F forward output length");
}

void c5_conv_oracle(Check& c) {
  for (const auto& arch : oracles::toy_archs()) {
    Model m = build_model(arch, 29, 0.4);
    Net net(m);
    for (int trial = 0; trial < 2; ++trial) {
      const Tensor x = oracles::random_input(
          {arch.in_channels, arch.input_side, arch.input_side}, g_rng);
      const Tensor got = net.forward(x, Mode::Eval);
      const Tensor want = oracles::forward_oracle(m, x);
      c.require(got.size() == want.size(), arch.name + " shape");
      for (std::size_t i = 0; i < got.size() && c.ok; ++i)
        c.require(std::abs(got[i] - want[i]) < 1e-10, arch.name + " value");
    }
  }
}

void c6_parsers(Check& c) {
  auto dir = fs::temp_directory_path() / "relocnet_acceptance_parsers";
  fs::remove_all(dir);
  fs::create_directories(dir);

  // TUM: exact poses + drop rule vs brute force
  {
    std::ofstream(dir / "rgb.txt") << "0.00 rgb/0.png\n0.50 rgb/1.png\n"
                                      "1.00 rgb/2.png\n";
    std::ofstream(dir / "depth.txt") << "0.01 d/0.png\n1.01 d/2.png\n";
    std::ofstream(dir / "groundtruth.txt")
        << "0.005 1 2 3 0 0 0 1\n0.995 4 5 6 0 0 0.6 0.8\n";
    IngestStats st;
    Trajectory t = load_tum_sequence(dir.string(), 0.02, &st);
    c.require(t.frames.size() == 2 && st.dropped == 1, "TUM drop rule");
    c.require(t.frames[0].pose.position == Vec3{1, 2, 3}, "TUM pose 0");
    // file order qx qy qz qw -> w=0.8, z=0.6
    c.require(std::abs(t.frames[1].pose.orientation.w - 0.8) < 1e-12 &&
                  std::abs(t.frames[1].pose.orientation.z - 0.6) < 1e-12,
              "TUM quaternion reorder");
  }

  // brute-force nearest-timestamp oracle on a jittered grid
  {
    auto d2 = dir / "oracle";
    fs::create_directories(d2);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> jitter(-0.4, 0.4);
    std::vector<double> gt_ts, rgb_ts;
    std::ofstream gt(d2 / "groundtruth.txt"), rgb(d2 / "rgb.txt"),
        dep(d2 / "depth.txt");
    gt.precision(12);
    rgb.precision(12);
    for (int i = 0; i < 30; ++i) {
      gt_ts.push_back(i + jitter(rng));
      gt << gt_ts.back() << " " << i << " 0 0 0 0 0 1\n";
      rgb_ts.push_back(i + jitter(rng));
      rgb << rgb_ts.back() << " rgb/" << i << ".png\n";
    }
    gt.close();
    rgb.close();
    dep.close();
    const double tol = 0.3;
    Trajectory t = load_tum_sequence(d2.string(), tol);
    std::size_t fi = 0;
    for (double ts : rgb_ts) {
      double best = 1e18;
      std::size_t bi = 0;
      for (std::size_t g = 0; g < gt_ts.size(); ++g)
        if (std::abs(gt_ts[g] - ts) < best) {
          best = std::abs(gt_ts[g] - ts);
          bi = g;
        }
      if (best > tol) continue;
      c.require(fi < t.frames.size() &&
                    std::abs(t.frames[fi].pose.position[0] - double(bi)) < 1e-9,
                "nearest-timestamp oracle");
      ++fi;
    }
    c.require(fi == t.frames.size(), "oracle frame count");
  }

  // 7-Scenes 4x4 pose + rotation round trip
  {
    auto d7 = dir / "seven";
    fs::create_directories(d7);
    std::ofstream(d7 / "frame-000000.pose.txt")
        << "1 0 0 0.5\n0 1 0 -0.25\n0 0 1 2\n0 0 0 1\n";
    Trajectory t = load_7scenes_sequence(d7.string());
    c.require(t.frames.size() == 1 &&
                  t.frames[0].pose.position == Vec3{0.5, -0.25, 2.0},
              "7-Scenes pose");
  }
  for (int i = 0; i < 100 && c.ok; ++i) {
    Quaternion q = random_unit_quat();
    if (q.w < 0) q = q.negated();
    const Quaternion back = rotmat_to_quat(quat_to_rotmat(q));
    c.require(std::abs(back.w - q.w) < 1e-9 && std::abs(back.x - q.x) < 1e-9 &&
                  std::abs(back.y - q.y) < 1e-9 && std::abs(back.z - q.z) < 1e-9,
              "rotmat round trip");
  }

  // Cambridge split
  {
    auto dc = dir / "cam";
    fs::create_directories(dc);
    std::ofstream(dc / "split.txt")
        << "header line\nmore header\n"
           "s/f1.png 1 2 3 1 0 0 0\ns/f2.png 4 5 6 0.6 0.8 0 0\n";
    Trajectory t = load_cambridge_sequence(dc.string(), "split.txt");
    c.require(t.frames.size() == 2 &&
                  t.frames[1].pose.orientation.w == 0.6 &&
                  t.frames[1].pose.orientation.x == 0.8,
              "Cambridge split");
  }
  fs::remove_all(dir);
}

void c7_backprojection(Check& c) {
  Intrinsics intr{585.0, 585.0, 320.0, 240.0};
  Tensor depth({48, 64});
  std::uniform_real_distribution<double> d(0.3, 6.0);
  for (std::size_t i = 0; i < depth.size(); ++i) depth[i] = d(g_rng);
  depth.at2(5, 7) = 0.0;
  const Tensor xyz = depth_to_pointcloud(depth, intr);
  for (std::size_t v = 0; v < 48 && c.ok; ++v)
    for (std::size_t u = 0; u < 64; ++u) {
      const double z = depth.at2(v, u);
      if (z == 0.0) {
        c.require(xyz.at3(0, v, u) == 0.0 && xyz.at3(1, v, u) == 0.0 &&
                      xyz.at3(2, v, u) == 0.0,
                  "invalid depth sentinel");
        continue;
      }
      c.require(xyz.at3(0, v, u) == (double(u) - intr.cx) * z / intr.fx &&
                    xyz.at3(1, v, u) == (double(v) - intr.cy) * z / intr.fy &&
                    xyz.at3(2, v, u) == z,
                "scalar-loop equality");
      const double up = intr.fx * xyz.at3(0, v, u) / z + intr.cx;
      const double vp = intr.fy * xyz.at3(1, v, u) / z + intr.cy;
      c.require(std::abs(up - double(u)) < 1e-6 &&
                    std::abs(vp - double(v)) < 1e-6,
                "reprojection");
    }
}

struct SmokeSetup {
  DatasetBundle bundle;
  TrainData train, test;
  Normalizer norm;
  double diameter = 0.0;
  ModalitySpec modality = ModalitySpec::from_name("rgb");
};

SmokeSetup smoke_setup(std::uint64_t scene_seed) {
  SmokeSetup s;
  SceneSpec spec;
  spec.trajectories = 4;
  spec.frames_per_trajectory = 120;
  s.bundle = generate_synthetic_scene(spec, scene_seed);
  s.diameter = scene_diameter(s.bundle);
  std::vector<const Trajectory*> trains, tests;
  std::vector<const FrameRecord*> train_frames;
  for (const auto& t : s.bundle.trajectories)
    (t.role == Role::Test ? tests : trains).push_back(&t);
  for (const auto* t : trains)
    for (const auto& f : t->frames) train_frames.push_back(&f);
  const Intrinsics intr = synthetic_intrinsics(spec);
  s.norm.channel_means =
      compute_channel_means(train_frames, s.modality, intr, 32);
  s.train = make_train_data(trains, s.modality, intr, 32, s.norm);
  s.test = make_train_data(tests, s.modality, intr, 32, s.norm);
  return s;
}

HyperParams smoke_hp() {
  HyperParams hp;
  hp.batch_size = 30;
  hp.learning_rate = 0.003;
  hp.weight_decay = 1e-4;
  hp.beta = 1.0;
  hp.epochs = 300;
  hp.seed = 7;
  hp.momentum = 0.9;
  hp.init_std = -1;
  return hp;
}

double test_position_error(Model& model, const SmokeSetup& s) {
  Net net(model);
  double ep = 0;
  for (std::size_t i = 0; i < s.test.size(); ++i) {
    const PoseVector out = predict_pose(net, s.test.inputs[i].data);
    const auto& t = s.test.targets[i];
    ep += position_error({out[0], out[1], out[2]}, {t[0], t[1], t[2]});
  }
  return ep / double(s.test.size());
}

void c8_desk_scale_learning(Check& c) {
  SmokeSetup s = smoke_setup(7);
  const HyperParams hp = smoke_hp();
  Model init = build_model(reduced_arch(3, 32), hp.seed, hp.init_std);

  // sanity gap: untouched initialization is far off
  HyperParams zero = hp;
  zero.epochs = 0;
  TrainResult r0 = train(init, s.train, s.test, zero);
  const double ep0 = test_position_error(r0.final_model, s);
  c.require(ep0 > 0.25 * s.diameter,
            "epochs=0 gap: e_p " + std::to_string(ep0) + " vs diameter " +
                std::to_string(s.diameter));

  const auto t0 = std::chrono::steady_clock::now();
  TrainResult r = train(init, s.train, s.test, hp);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  c.require(!r.history.diverged, "training diverged");
  const double ep = test_position_error(r.best_model, s);
  c.require(ep < 0.10 * s.diameter,
            "held-out e_p " + std::to_string(ep) + " vs 10% of diameter " +
                std::to_string(0.10 * s.diameter));
  c.require(secs < 600.0, "training took " + std::to_string(secs) + "s");
}

void c9_curriculum_trend(Check& c) {
  SceneSpec spec;  // 4 training trajectories + 1 fixed test trajectory
  spec.trajectories = 5;
  spec.frames_per_trajectory = 60;
  HyperParams hp = smoke_hp();
  hp.epochs = 80;

  double stage1_sum = 0.0, stage4_sum = 0.0;
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    DatasetBundle b = generate_synthetic_scene(spec, seed);
    Curriculum cur = make_leave_one_out(b, b.trajectories.back().name);
    hp.seed = seed;
    auto stages = run_curriculum(reduced_arch(3, 32), b, cur, hp,
                                 ModalitySpec::from_name("rgb"), 32);
    c.require(stages.size() == 4, "stage count");
    if (!c.ok) return;
    std::uint64_t params0 = stages[0].report.param_count;
    for (const auto& st : stages)
      c.require(st.report.param_count == params0 &&
                    st.param_count == params0,
                "constant parameter count");
    stage1_sum += stages.front().report.mean_position_error;
    stage4_sum += stages.back().report.mean_position_error;
  }
  c.require(stage4_sum / 3.0 <= stage1_sum / 3.0,
            "stage-4 mean e_p " + std::to_string(stage4_sum / 3.0) +
                " vs stage-1 " + std::to_string(stage1_sum / 3.0));
}

void c10_cli_determinism(Check& c) {
  const std::string cli = RELOCNET_CLI_PATH;
  const std::string recipe =
      std::string(RELOCNET_DATA_DIR) + "/recipes/smoke_det.json";
  const auto root = fs::temp_directory_path() / "relocnet_acceptance_det";
  fs::remove_all(root);
  for (const char* run : {"run1", "run2"}) {
    fs::create_directories(root / run);
    const std::string cmd = "RELOCNET_OUTPUT_ROOT=" + (root / run).string() +
                            " " + cli + " train --config " + recipe +
                            " > /dev/null 2>&1";
    c.require(std::system(cmd.c_str()) == 0, std::string("cli run ") + run);
  }
  if (!c.ok) return;
  for (const char* file :
       {"best.history.json", "final.history.json", "best.rwc", "final.rwc"}) {
    const std::string a = slurp((root / "run1" / "smoke_det" / file).string());
    const std::string b = slurp((root / "run2" / "smoke_det" / file).string());
    c.require(!a.empty() && a == b, std::string(file) + " differs");
  }
  fs::remove_all(root);
}

void c11_container_round_trip(Check& c) {
  const auto dir = fs::temp_directory_path() / "relocnet_acceptance_wc";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const ArchSpec arch = reduced_arch(4, 32);
  Model m = build_model(arch, 99);
  m.channel_means = {0.5, 0.5, 0.5, 1.0};
  const std::string path = (dir / "w.rwc").string();
  export_weights(m).save(path);
  Model back = import_weights(WeightContainer::load(path), arch);
  c.require(back.weight_checksum() == m.weight_checksum(), "round trip bits");
  c.require(back.channel_means == m.channel_means, "channel means");

  // corrupt one payload byte
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekg(-17, std::ios::end);
    char b;
    f.read(&b, 1);
    b = char(b ^ 0x01);
    f.seekp(-17, std::ios::end);
    f.write(&b, 1);
  }
  bool rejected = false;
  try {
    WeightContainer::load(path);
  } catch (const IngestionError&) {
    rejected = true;
  }
  c.require(rejected, "corruption rejected");
  fs::remove_all(dir);
}

void c12_report_arithmetic(Check& c) {
  SceneSpec spec;
  spec.trajectories = 1;
  spec.frames_per_trajectory = 7;
  auto b = generate_synthetic_scene(spec, 31);
  EvalReport r = evaluate_with(
      [&](const FrameRecord& f) {
        PoseVector p = pose_to_vector(f.pose);
        p[0] += 0.1 * double(f.frame_id.back() - '0');
        return p;
      },
      b.trajectories[0]);
  const double m = r.mean_position_error, s = r.std_position_error;
  r.recompute_aggregates();
  c.require(std::abs(r.mean_position_error - m) < 1e-12 &&
                std::abs(r.std_position_error - s) < 1e-12,
            "aggregate recomputation");

  auto refs = load_reference_rows(std::string(RELOCNET_DATA_DIR) +
                                  "/reference_errors.json");
  EvalReport mine;
  mine.arch_name = "reduced";
  mine.dataset = "St Marys Church";
  mine.mean_position_error = 1.0;
  EvalReport other = mine;
  other.dataset = "synthetic";
  ComparisonTable t = build_comparison({mine, other}, refs);
  const std::string pos = t.render(false);
  const std::string ang = t.render(true);
  c.require(pos.find("NA") != std::string::npos, "NA rendering");
  c.require(pos.find("[PoseNet]") != std::string::npos, "reference row");
  c.require(pos.find("2.650") != std::string::npos, "PoseNet 2.65 m");
  c.require(ang.find("4.240") != std::string::npos, "PoseNet 4.24 deg");
}

}  // namespace

int main() {
  run_criterion(1, "loss and end-to-end gradients match finite differences",
                c1_gradients);
  run_criterion(2, "metric properties and exact values", c2_metrics);
  run_criterion(3, "preset parameter counts sit in the published bands",
                c3_param_counts);
  run_criterion(4, "channel adaptation across modalities and presets",
                c4_channel_adaptation);
  run_criterion(5, "network forward equals the scalar convolution oracle",
                c5_conv_oracle);
  run_criterion(6, "dataset parsers against fixtures and oracles", c6_parsers);
  run_criterion(7, "backprojection oracle and reprojection", c7_backprojection);
  run_criterion(8, "desk-scale learning with a sanity gap",
                c8_desk_scale_learning);
  run_criterion(9, "curriculum error drops at constant network size",
                c9_curriculum_trend);
  run_criterion(10, "CLI smoke recipe is bitwise deterministic",
                c10_cli_determinism);
  run_criterion(11, "weight container round trip and corruption rejection",
                c11_container_round_trip);
  run_criterion(12, "report arithmetic and comparison table rendering",
                c12_report_arithmetic);

  if (g_failures) {
    std::printf("%d criterion(s) FAILED\n", g_failures);
    return 1;
  }
  std::printf("all 12 criteria passed\n");
  return 0;
}
