#pragma once

#include <optional>
#include <string>
#include <vector>

#include "relocnet/pose.hpp"
#include "relocnet/tensor.hpp"

namespace relocnet {

/// Pinhole camera parameters, pixels.
struct Intrinsics {
  double fx = 525.0, fy = 525.0, cx = 319.5, cy = 239.5;
};

/// One observation: image payloads (by path or in memory), ground-truth pose
/// (camera-to-world), optional timestamp.
struct FrameRecord {
  std::string frame_id;
  std::string rgb_path;
  std::optional<Tensor> rgb;    // (3, H, W), values in [0, 1]
  std::string depth_path;
  std::optional<Tensor> depth;  // (H, W), meters; 0 marks invalid pixels
  double depth_scale = 1.0;     // divisor for integer depth images
  Pose pose;
  std::optional<double> timestamp;

  bool has_depth() const { return depth.has_value() || !depth_path.empty(); }
  bool has_rgb() const { return rgb.has_value() || !rgb_path.empty(); }
};

enum class Role { Train, Validation, Test };
std::string role_name(Role r);
Role role_from_name(const std::string& s);

struct Trajectory {
  std::string name;
  std::vector<FrameRecord> frames;
  Role role = Role::Train;
  Intrinsics intrinsics;
};

struct DatasetBundle {
  std::string scene;
  std::vector<Trajectory> trajectories;

  const Trajectory* find(const std::string& name) const;
};

/// Statistics reported by loaders (association drops etc).
struct IngestStats {
  std::size_t frames = 0;
  std::size_t dropped = 0;
};

/// TUM RGB-D layout: rgb.txt / depth.txt / groundtruth.txt under root, lines
/// "timestamp value(s)", ground-truth quaternion given qx qy qz qw.
/// rgb frames are matched to nearest depth and ground-truth timestamps;
/// frames without a match within assoc_tolerance seconds are dropped.
Trajectory load_tum_sequence(const std::string& root,
                             double assoc_tolerance = 0.02,
                             IngestStats* stats = nullptr);

/// 7-Scenes layout: frame-NNNNNN.color.png / .depth.png / .pose.txt, pose as
/// a row-major 4x4 camera-to-world matrix.
Trajectory load_7scenes_sequence(const std::string& root);

/// Cambridge layout: split file lines "image_path x y z qw qx qy qz" after a
/// free-form header; images relative to root. No depth.
Trajectory load_cambridge_sequence(const std::string& root,
                                   const std::string& split_file);

/// Leave-one-out curriculum: the named trajectory is the fixed test set;
/// stage i trains on the first i remaining trajectories in bundle order.
struct Curriculum {
  std::vector<std::vector<std::size_t>> stages;  // indices into bundle
  std::size_t test_index = 0;
};
Curriculum make_leave_one_out(const DatasetBundle& bundle,
                              const std::string& test_name);

/// Artifact-native manifest: one JSON document per trajectory. Poses
/// round-trip bit-exactly. In-memory payloads are written next to the
/// manifest as .bin tensors.
void save_trajectory_manifest(const Trajectory& t, const std::string& dir);
Trajectory load_trajectory_manifest(const std::string& manifest_path);

/// Loads rgb/depth payloads into memory if they are path references.
void materialize_frame(FrameRecord& f);

}  // namespace relocnet
