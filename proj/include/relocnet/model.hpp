#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "relocnet/arch.hpp"
#include "relocnet/tensor.hpp"

namespace relocnet {

/// Named weight arrays plus normalization metadata, as stored in a weight
/// container file.
struct WeightContainer {
  std::string arch_name;
  std::map<std::string, Tensor> arrays;   // "<layer>.weight" / "<layer>.bias"
  std::vector<double> channel_means;      // per input channel
  std::string provenance;

  void save(const std::string& path) const;
  /// Throws IngestionError on checksum mismatch or malformed file.
  static WeightContainer load(const std::string& path);
};

struct Model {
  ArchSpec arch;
  // Parallel to the parameterized layers of arch, in layer order.
  // Conv/fc weights are stored (out_depth, in_depth, k, k).
  std::vector<Tensor> weights;
  std::vector<Tensor> biases;
  std::vector<std::string> param_names;  // layer names
  std::string init_provenance;
  std::vector<double> channel_means;

  std::size_t param_count() const;
  /// FNV-1a over all weight and bias bytes, in layer order.
  std::uint64_t weight_checksum() const;
};

/// Gaussian(0, std) weights, zero biases, fully determined by seed.
/// init_std <= 0 selects fan-in scaled std = sqrt(2 / fan_in) per layer,
/// used by the desk-scale recipes where a fixed 0.01 stalls learning.
Model build_model(const ArchSpec& arch, std::uint64_t seed,
                  double init_std = 0.01);

/// Copies matching-shape arrays from the container; the first conv and the
/// final fc may be reshaped (different in_channels / head) and are then
/// randomly re-initialized. Any other mismatch or absence is an error.
/// `extras` (when given) receives names of unused container arrays.
Model build_model_pretrained(const ArchSpec& arch, const WeightContainer& c,
                             std::uint64_t seed, double init_std = 0.01,
                             std::vector<std::string>* extras = nullptr);

WeightContainer export_weights(const Model& model);
Model import_weights(const WeightContainer& c, const ArchSpec& arch);

}  // namespace relocnet
