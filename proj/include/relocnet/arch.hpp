#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "relocnet/errors.hpp"

namespace relocnet {

enum class LayerKind { Conv, Relu, Lrn, MaxPool, FullyConnected, Dropout };

struct LayerSpec {
  LayerKind kind;
  std::string name;

  // conv / fullyconnected
  std::size_t out_depth = 0;
  std::size_t kernel = 0;   // square kernels; fc kernel == input spatial side
  std::size_t stride = 1;
  std::size_t pad = 0;
  std::size_t in_depth = 0;

  // maxpool
  bool ceil_mode = false;

  // dropout
  double rate = 0.0;

  // lrn (across channels)
  std::size_t lrn_size = 5;
  double lrn_kappa = 2.0, lrn_alpha = 1e-4, lrn_beta = 0.75;

  bool has_params() const {
    return kind == LayerKind::Conv || kind == LayerKind::FullyConnected;
  }
  /// Weight elements (kernel volume x out_depth), excluding bias.
  std::size_t weight_count() const {
    return kernel * kernel * in_depth * out_depth;
  }
};

struct Shape3 {
  std::size_t c = 0, h = 0, w = 0;
  std::size_t count() const { return c * h * w; }
};

struct ArchSpec {
  std::string name;
  std::vector<LayerSpec> layers;
  std::size_t in_channels = 3;
  std::size_t input_side = 224;

  std::size_t conv_count() const;
  std::size_t fc_count() const;
  /// Validates depth chaining and spatial geometry; throws ContractViolation.
  void validate() const;
  /// Output shape after layer index i (exclusive prefix), given the input.
  Shape3 shape_after(std::size_t layer_end) const;
  Shape3 output_shape() const { return shape_after(layers.size()); }
};

/// Parameter count (weights + biases) over all conv/fc layers.
std::size_t count_params(const ArchSpec& arch);

/// Named VGG-family preset with the first conv adapted to in_channels and the
/// final fc producing head_dim outputs (7 for pose, 1000 for the original
/// classifier heads). Known names: VGG-F, VGG-M, VGG-S, VGG-16, VGG-19.
ArchSpec preset(const std::string& name, std::size_t in_channels,
                std::size_t head_dim = 7);

/// Small architecture for desk-scale experiments: 3 conv + 2 fc on
/// side x side inputs (default 32).
ArchSpec reduced_arch(std::size_t in_channels, std::size_t side = 32);

ArchSpec arch_from_json(const std::string& json_text);
std::string arch_to_json(const ArchSpec& arch);

/// Layer geometry output side: floor or ceil mode.
std::size_t conv_out_side(std::size_t in, std::size_t k, std::size_t s,
                          std::size_t p, bool ceil_mode = false);

}  // namespace relocnet
