#pragma once

#include <string>
#include <vector>

#include "relocnet/dataset.hpp"
#include "relocnet/tensor.hpp"

namespace relocnet {

enum class Modality { Depth, Gray, Rgb, PointCloud, RgbDepth, RgbPointCloud };

struct ModalitySpec {
  Modality kind = Modality::Rgb;

  std::size_t channels() const;
  std::string name() const;
  bool needs_depth() const;
  static ModalitySpec from_name(const std::string& name);
};

/// Fixed-size network input; data stored (channels, side, side).
struct NetInput {
  Tensor data;
  ModalitySpec modality;
  std::string frame_id;

  std::size_t channels() const { return data.dim(0); }
  std::size_t height() const { return data.dim(1); }
  std::size_t width() const { return data.dim(2); }
};

/// Per-channel mean subtraction plus a scene scale divisor for metric
/// channels (depth / XYZ), applied as the last pipeline step.
struct Normalizer {
  std::vector<double> channel_means;  // one per channel; empty = zeros
  double scene_scale = 1.0;
};

/// Crops the largest centered square and resizes to side x side.
/// `bilinear` false selects nearest-neighbor (used for depth/XYZ channels).
Tensor center_crop_resize(const Tensor& image, std::size_t side,
                          bool bilinear = true);

/// Backprojects a depth map to an organized XYZ image (3, H, W):
/// X = (u - cx) Z / fx, Y = (v - cy) Z / fy, Z = depth. Invalid depth (0)
/// yields (0, 0, 0).
Tensor depth_to_pointcloud(const Tensor& depth, const Intrinsics& intr);

/// Luma 0.299 R + 0.587 G + 0.114 B, (3,H,W) -> (1,H,W).
Tensor to_gray(const Tensor& rgb);

/// Builds the n-channel network input for a frame: channels stacked RGB
/// first, then depth or XYZ; backprojection runs at full resolution with the
/// original intrinsics before crop/resize.
NetInput assemble_input(const FrameRecord& frame, const ModalitySpec& modality,
                        const Intrinsics& intr, std::size_t side,
                        const Normalizer& norm = {});

/// Per-channel means of assembled (un-normalized) inputs over a training set;
/// stored in the experiment manifest and reused at evaluation time.
std::vector<double> compute_channel_means(
    const std::vector<const FrameRecord*>& frames, const ModalitySpec& modality,
    const Intrinsics& intr, std::size_t side, double scene_scale = 1.0);

}  // namespace relocnet
