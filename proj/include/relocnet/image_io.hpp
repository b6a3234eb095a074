#pragma once

#include <string>

#include "relocnet/tensor.hpp"

namespace relocnet {

/// Decodes an 8-bit color image to (3, H, W) doubles in [0, 1].
Tensor load_rgb_image(const std::string& path);

/// Decodes a 16-bit (or 8-bit) single-channel depth image to (H, W) meters,
/// dividing stored values by `scale` (5000 for TUM, 1000 for 7-Scenes).
Tensor load_depth_image(const std::string& path, double scale);

/// Writes (3, H, W) values in [0, 1] as an 8-bit PNG.
void save_rgb_image(const Tensor& rgb, const std::string& path);

/// Writes (H, W) meters as 16-bit PNG of round(value * scale).
void save_depth_image(const Tensor& depth, const std::string& path,
                      double scale);

/// Raw tensor files for lossless payload storage (shape header + f64 data).
void save_tensor(const Tensor& t, const std::string& path);
Tensor load_tensor(const std::string& path);

}  // namespace relocnet
