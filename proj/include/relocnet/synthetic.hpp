#pragma once

#include <cstdint>

#include "relocnet/dataset.hpp"

namespace relocnet {

/// Desk-scale procedural scene: a smoothly textured plane at z = 0 viewed by
/// a downward-looking pinhole camera on smooth random paths. Poses and depth
/// are exact by construction; generation is a pure function of (spec, seed).
struct SceneSpec {
  std::size_t image_side = 32;
  std::size_t trajectories = 4;
  std::size_t frames_per_trajectory = 60;
  double base_height = 1.4;   // meters above the plane
  double lateral_amplitude = 0.4;
  double height_amplitude = 0.2;
  double yaw_amplitude = 0.3;  // radians
};

Intrinsics synthetic_intrinsics(const SceneSpec& spec);

DatasetBundle generate_synthetic_scene(const SceneSpec& spec,
                                       std::uint64_t seed);

/// Analytic z-depth of the ray through pixel (u, v) for a synthetic pose
/// (plane z = 0); the rendering oracle.
double synthetic_ray_depth(const Pose& pose, const Intrinsics& intr, double u,
                           double v);

/// Maximum pairwise distance between ground-truth camera positions.
double scene_diameter(const DatasetBundle& bundle);

}  // namespace relocnet
