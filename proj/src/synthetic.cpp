#include "relocnet/synthetic.hpp"

#include <cmath>
#include <random>

#include "relocnet/errors.hpp"

namespace relocnet {

namespace {

// Per-channel texture: mean 0.5 plus a few random sinusoids over the plane.
struct Texture {
  struct Wave {
    double fx, fy, phase, amp;
  };
  std::array<std::vector<Wave>, 3> waves;

  static Texture make(std::mt19937_64& rng) {
    Texture t;
    std::uniform_real_distribution<double> freq(1.5, 6.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
    std::uniform_real_distribution<double> sign(-1.0, 1.0);
    for (auto& ch : t.waves) {
      for (int i = 0; i < 3; ++i) {
        Wave w;
        w.fx = freq(rng) * (sign(rng) < 0 ? -1.0 : 1.0);
        w.fy = freq(rng) * (sign(rng) < 0 ? -1.0 : 1.0);
        w.phase = phase(rng);
        w.amp = 0.5 / 3.0;
        ch.push_back(w);
      }
    }
    return t;
  }

  double sample(int channel, double x, double y) const {
    double v = 0.5;
    for (const auto& w : waves[channel])
      v += w.amp * std::sin(w.fx * x + w.fy * y + w.phase);
    return std::clamp(v, 0.0, 1.0);
  }
};

// Camera-to-world rotation: yaw about world z composed with a 180-degree
// flip about x, so the optical axis points at -z (straight down).
std::array<double, 9> camera_rotation(double yaw) {
  const double c = std::cos(yaw), s = std::sin(yaw);
  // Rz(yaw) * diag(1,-1,-1)
  return {c, s, 0, s, -c, 0, 0, 0, -1};
}

}  // namespace

Intrinsics synthetic_intrinsics(const SceneSpec& spec) {
  const double side = double(spec.image_side);
  return {0.8 * side, 0.8 * side, side / 2.0 - 0.5, side / 2.0 - 0.5};
}

double synthetic_ray_depth(const Pose& pose, const Intrinsics& intr, double u,
                           double v) {
  const auto r = quat_to_rotmat(pose.orientation);
  const double dc[3] = {(u - intr.cx) / intr.fx, (v - intr.cy) / intr.fy, 1.0};
  const double dz = r[6] * dc[0] + r[7] * dc[1] + r[8] * dc[2];
  if (dz >= 0) throw DomainError("ray does not hit the plane");
  return -pose.position[2] / dz;
}

DatasetBundle generate_synthetic_scene(const SceneSpec& spec,
                                       std::uint64_t seed) {
  if (spec.frames_per_trajectory == 0 || spec.trajectories == 0 ||
      spec.image_side == 0)
    throw ContractViolation("degenerate synthetic scene spec");

  DatasetBundle bundle;
  bundle.scene = "synthetic-" + std::to_string(seed);
  const Intrinsics intr = synthetic_intrinsics(spec);

  std::mt19937_64 rng(seed);
  const Texture tex = Texture::make(rng);
  std::uniform_real_distribution<double> freq(0.5, 1.5);
  std::uniform_real_distribution<double> freq_hi(2.5, 4.5);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);

  for (std::size_t ti = 0; ti < spec.trajectories; ++ti) {
    Trajectory traj;
    traj.name = "traj" + std::to_string(ti);
    traj.role = Role::Train;
    traj.intrinsics = intr;
    // Two harmonics per axis so one trajectory wanders through the volume
    // instead of tracing a planar ellipse; a single curve then covers enough
    // of the scene for held-out evaluation to be meaningful.
    struct Axis {
      double w1, w2, p1, p2;
      double eval(double t) const {
        return 0.7 * std::sin(w1 * t + p1) + 0.3 * std::sin(w2 * t + p2);
      }
    };
    auto make_axis = [&] {
      return Axis{freq(rng), freq_hi(rng), phase(rng), phase(rng)};
    };
    const Axis ax = make_axis(), ay = make_axis(), az = make_axis(),
               ayaw = make_axis();
    for (std::size_t fi = 0; fi < spec.frames_per_trajectory; ++fi) {
      const double t =
          2.0 * M_PI * double(fi) / double(spec.frames_per_trajectory);
      const Vec3 pos = {spec.lateral_amplitude * ax.eval(t),
                        spec.lateral_amplitude * ay.eval(t),
                        spec.base_height + spec.height_amplitude * az.eval(t)};
      const double yaw = spec.yaw_amplitude * ayaw.eval(t);
      const auto r = camera_rotation(yaw);

      FrameRecord fr;
      fr.frame_id = traj.name + "/frame" + std::to_string(fi);
      fr.timestamp = double(fi) * 0.1;
      fr.pose = Pose(pos, rotmat_to_quat(r));

      const std::size_t side = spec.image_side;
      Tensor rgb({3, side, side});
      Tensor depth({side, side});
      for (std::size_t py_ = 0; py_ < side; ++py_) {
        for (std::size_t px_ = 0; px_ < side; ++px_) {
          const double dc[3] = {(double(px_) - intr.cx) / intr.fx,
                                (double(py_) - intr.cy) / intr.fy, 1.0};
          double dw[3];
          for (int i = 0; i < 3; ++i)
            dw[i] = r[i * 3 + 0] * dc[0] + r[i * 3 + 1] * dc[1] +
                    r[i * 3 + 2] * dc[2];
          const double tt = -pos[2] / dw[2];
          const double X = pos[0] + tt * dw[0];
          const double Y = pos[1] + tt * dw[1];
          depth.at2(py_, px_) = tt;
          for (int c = 0; c < 3; ++c)
            rgb.at3(c, py_, px_) = tex.sample(c, X, Y);
        }
      }
      fr.rgb = std::move(rgb);
      fr.depth = std::move(depth);
      traj.frames.push_back(std::move(fr));
    }
    bundle.trajectories.push_back(std::move(traj));
  }
  if (!bundle.trajectories.empty())
    bundle.trajectories.back().role = Role::Test;
  return bundle;
}

double scene_diameter(const DatasetBundle& bundle) {
  std::vector<Vec3> pts;
  for (const auto& t : bundle.trajectories)
    for (const auto& f : t.frames) pts.push_back(f.pose.position);
  double best = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      best = std::max(best, position_error(pts[i], pts[j]));
  return best;
}

}  // namespace relocnet
