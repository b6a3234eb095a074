#pragma once

#include <memory>
#include <random>
#include <vector>

#include "relocnet/model.hpp"
#include "relocnet/pose.hpp"
#include "relocnet/tensor.hpp"

namespace relocnet {

enum class Mode { Train, Eval };

namespace detail {
class LayerImpl;
}

/// Executable network bound to a Model's weights. Forward caches activations
/// for a subsequent backward; gradients accumulate until zero_grads().
/// Not thread-safe; one Net per worker, sharing the Model read-only in Eval.
class Net {
 public:
  explicit Net(Model& model);
  ~Net();
  Net(Net&&) noexcept;
  Net& operator=(Net&&) noexcept;

  /// Input is (channels, side, side). In Train mode `rng` drives dropout;
  /// Eval mode ignores it (dropout disabled).
  Tensor forward(const Tensor& input, Mode mode, std::mt19937_64* rng = nullptr);

  /// Backpropagates grad w.r.t. the network output, accumulating weight and
  /// bias gradients; returns grad w.r.t. the input.
  Tensor backward(const Tensor& grad_output);

  void zero_grads();
  std::vector<Tensor>& weight_grads() { return wgrads_; }
  std::vector<Tensor>& bias_grads() { return bgrads_; }

  Model& model() { return *model_; }

 private:
  Model* model_;
  std::vector<std::unique_ptr<detail::LayerImpl>> layers_;
  std::vector<Tensor> wgrads_, bgrads_;
};

/// Convenience: forward through an eval-mode net and read the 7-vector.
PoseVector predict_pose(Net& net, const Tensor& input);

}  // namespace relocnet
