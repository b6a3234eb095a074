#include "relocnet/net.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "relocnet/errors.hpp"
#include "relocnet/kernels.hpp"

namespace relocnet {
namespace detail {

class LayerImpl {
 public:
  virtual ~LayerImpl() = default;
  virtual Tensor forward(const Tensor& x, Mode mode, std::mt19937_64* rng) = 0;
  virtual Tensor backward(const Tensor& gout) = 0;
};

namespace {

// Shared by conv and fc layers (fc is a conv covering the full extent).
class ConvImpl : public LayerImpl {
 public:
  ConvImpl(const LayerSpec& spec, Tensor* w, Tensor* b, Tensor* gw, Tensor* gb)
      : spec_(spec), w_(w), b_(b), gw_(gw), gb_(gb) {}

  Tensor forward(const Tensor& x, Mode, std::mt19937_64*) override {
    const std::size_t c = x.dim(0), ih = x.dim(1), iw = x.dim(2);
    if (c != spec_.in_depth)
      throw ContractViolation("conv '" + spec_.name + "': input depth " +
                              std::to_string(c) + " expected " +
                              std::to_string(spec_.in_depth));
    oh_ = conv_out_side(ih, spec_.kernel, spec_.stride, spec_.pad);
    ow_ = conv_out_side(iw, spec_.kernel, spec_.stride, spec_.pad);
    ih_ = ih;
    iw_ = iw;
    im2col(x);
    const std::size_t kdim = patch_size(), p = oh_ * ow_;
    Tensor out({spec_.out_depth, oh_, ow_});
    kernels::gemm(spec_.out_depth, p, kdim, w_->data(), col_.data(),
                  out.data(), false);
    for (std::size_t o = 0; o < spec_.out_depth; ++o) {
      const double bv = (*b_)[o];
      double* row = out.data() + o * p;
      for (std::size_t i = 0; i < p; ++i) row[i] += bv;
    }
    return out;
  }

  Tensor backward(const Tensor& gout) override {
    const std::size_t kdim = patch_size(), p = oh_ * ow_;
    // bias grads
    for (std::size_t o = 0; o < spec_.out_depth; ++o) {
      const double* row = gout.data() + o * p;
      double s = 0;
      for (std::size_t i = 0; i < p; ++i) s += row[i];
      (*gb_)[o] += s;
    }
    // weight grads: dW(out x kdim) += gout(out x p) * col^T(p x kdim)
    colT_.assign(p * kdim, 0.0);
    for (std::size_t r = 0; r < kdim; ++r)
      for (std::size_t q = 0; q < p; ++q) colT_[q * kdim + r] = col_[r * p + q];
    kernels::gemm(spec_.out_depth, kdim, p, gout.data(), colT_.data(),
                  gw_->data(), true);
    // input grads: dcol(kdim x p) = W^T(kdim x out) * gout(out x p)
    wT_.assign(kdim * spec_.out_depth, 0.0);
    const double* w = w_->data();
    for (std::size_t o = 0; o < spec_.out_depth; ++o)
      for (std::size_t r = 0; r < kdim; ++r)
        wT_[r * spec_.out_depth + o] = w[o * kdim + r];
    dcol_.assign(kdim * p, 0.0);
    kernels::gemm(kdim, p, spec_.out_depth, wT_.data(), gout.data(),
                  dcol_.data(), false);
    return col2im();
  }

 private:
  std::size_t patch_size() const {
    return spec_.in_depth * spec_.kernel * spec_.kernel;
  }

  void im2col(const Tensor& x) {
    const std::size_t k = spec_.kernel, p = oh_ * ow_;
    col_.assign(patch_size() * p, 0.0);
    for (std::size_t c = 0; c < spec_.in_depth; ++c) {
      for (std::size_t ky = 0; ky < k; ++ky) {
        for (std::size_t kx = 0; kx < k; ++kx) {
          const std::size_t row = (c * k + ky) * k + kx;
          double* dst = col_.data() + row * p;
          for (std::size_t oy = 0; oy < oh_; ++oy) {
            const long y =
                long(oy * spec_.stride + ky) - long(spec_.pad);
            if (y < 0 || y >= long(ih_)) continue;
            for (std::size_t ox = 0; ox < ow_; ++ox) {
              const long xx =
                  long(ox * spec_.stride + kx) - long(spec_.pad);
              if (xx < 0 || xx >= long(iw_)) continue;
              dst[oy * ow_ + ox] = x.at3(c, y, xx);
            }
          }
        }
      }
    }
  }

  Tensor col2im() const {
    const std::size_t k = spec_.kernel, p = oh_ * ow_;
    Tensor gx({spec_.in_depth, ih_, iw_});
    for (std::size_t c = 0; c < spec_.in_depth; ++c) {
      for (std::size_t ky = 0; ky < k; ++ky) {
        for (std::size_t kx = 0; kx < k; ++kx) {
          const std::size_t row = (c * k + ky) * k + kx;
          const double* src = dcol_.data() + row * p;
          for (std::size_t oy = 0; oy < oh_; ++oy) {
            const long y = long(oy * spec_.stride + ky) - long(spec_.pad);
            if (y < 0 || y >= long(ih_)) continue;
            for (std::size_t ox = 0; ox < ow_; ++ox) {
              const long xx = long(ox * spec_.stride + kx) - long(spec_.pad);
              if (xx < 0 || xx >= long(iw_)) continue;
              gx.at3(c, y, xx) += src[oy * ow_ + ox];
            }
          }
        }
      }
    }
    return gx;
  }

  LayerSpec spec_;
  Tensor *w_, *b_, *gw_, *gb_;
  std::size_t ih_ = 0, iw_ = 0, oh_ = 0, ow_ = 0;
  std::vector<double> col_, colT_, wT_, dcol_;
};

class ReluImpl : public LayerImpl {
 public:
  Tensor forward(const Tensor& x, Mode, std::mt19937_64*) override {
    mask_.assign(x.size(), 0);
    Tensor y(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] > 0) {
        y[i] = x[i];
        mask_[i] = 1;
      }
    }
    return y;
  }
  Tensor backward(const Tensor& gout) override {
    Tensor gx(gout.shape());
    for (std::size_t i = 0; i < gout.size(); ++i)
      gx[i] = mask_[i] ? gout[i] : 0.0;
    return gx;
  }

 private:
  std::vector<unsigned char> mask_;
};

// Cross-channel local response normalization:
//   y_c = x_c * (kappa + (alpha/size) * sum_{c' in win(c)} x_{c'}^2)^(-beta)
class LrnImpl : public LayerImpl {
 public:
  explicit LrnImpl(const LayerSpec& spec) : spec_(spec) {}

  Tensor forward(const Tensor& x, Mode, std::mt19937_64*) override {
    x_ = x;
    const std::size_t c = x.dim(0), hw = x.dim(1) * x.dim(2);
    scale_.assign(x.size(), 0.0);
    Tensor y(x.shape());
    const long half = long(spec_.lrn_size) / 2;
    const double a = spec_.lrn_alpha / double(spec_.lrn_size);
    for (std::size_t i = 0; i < hw; ++i) {
      for (std::size_t ch = 0; ch < c; ++ch) {
        double s = 0;
        const long lo = std::max<long>(0, long(ch) - half);
        const long hi = std::min<long>(long(c) - 1, long(ch) + half);
        for (long cc = lo; cc <= hi; ++cc) {
          const double v = x[cc * hw + i];
          s += v * v;
        }
        scale_[ch * hw + i] = spec_.lrn_kappa + a * s;
        y[ch * hw + i] =
            x[ch * hw + i] * std::pow(scale_[ch * hw + i], -spec_.lrn_beta);
      }
    }
    return y;
  }

  Tensor backward(const Tensor& gout) override {
    const std::size_t c = x_.dim(0), hw = x_.dim(1) * x_.dim(2);
    Tensor gx(x_.shape());
    const long half = long(spec_.lrn_size) / 2;
    const double a = spec_.lrn_alpha / double(spec_.lrn_size);
    for (std::size_t i = 0; i < hw; ++i) {
      for (std::size_t ch = 0; ch < c; ++ch) {
        const double s = scale_[ch * hw + i];
        double g = gout[ch * hw + i] * std::pow(s, -spec_.lrn_beta);
        // cross terms: this x appears in the window sums of its neighbors
        const long lo = std::max<long>(0, long(ch) - half);
        const long hi = std::min<long>(long(c) - 1, long(ch) + half);
        for (long cc = lo; cc <= hi; ++cc) {
          const double sc = scale_[cc * hw + i];
          g -= 2.0 * a * spec_.lrn_beta * x_[ch * hw + i] * x_[cc * hw + i] *
               gout[cc * hw + i] * std::pow(sc, -spec_.lrn_beta - 1.0);
        }
        gx[ch * hw + i] = g;
      }
    }
    return gx;
  }

 private:
  LayerSpec spec_;
  Tensor x_;
  std::vector<double> scale_;
};

class MaxPoolImpl : public LayerImpl {
 public:
  explicit MaxPoolImpl(const LayerSpec& spec) : spec_(spec) {}

  Tensor forward(const Tensor& x, Mode, std::mt19937_64*) override {
    const std::size_t c = x.dim(0), ih = x.dim(1), iw = x.dim(2);
    in_shape_ = x.shape();
    const std::size_t oh =
        conv_out_side(ih, spec_.kernel, spec_.stride, spec_.pad, spec_.ceil_mode);
    const std::size_t ow =
        conv_out_side(iw, spec_.kernel, spec_.stride, spec_.pad, spec_.ceil_mode);
    Tensor y({c, oh, ow});
    argmax_.assign(c * oh * ow, 0);
    for (std::size_t ch = 0; ch < c; ++ch) {
      for (std::size_t oy = 0; oy < oh; ++oy) {
        for (std::size_t ox = 0; ox < ow; ++ox) {
          long y0 = long(oy * spec_.stride) - long(spec_.pad);
          long x0 = long(ox * spec_.stride) - long(spec_.pad);
          long y1 = std::min<long>(y0 + long(spec_.kernel), long(ih));
          long x1 = std::min<long>(x0 + long(spec_.kernel), long(iw));
          y0 = std::clamp<long>(y0, 0, long(ih) - 1);
          x0 = std::clamp<long>(x0, 0, long(iw) - 1);
          double best = -std::numeric_limits<double>::infinity();
          std::size_t besti = 0;
          for (long yy = y0; yy < y1; ++yy) {
            for (long xx = x0; xx < x1; ++xx) {
              const double v = x.at3(ch, yy, xx);
              if (v > best) {
                best = v;
                besti = (ch * ih + yy) * iw + xx;
              }
            }
          }
          y.at3(ch, oy, ox) = best;
          argmax_[(ch * oh + oy) * ow + ox] = besti;
        }
      }
    }
    return y;
  }

  Tensor backward(const Tensor& gout) override {
    Tensor gx(in_shape_);
    for (std::size_t i = 0; i < gout.size(); ++i) gx[argmax_[i]] += gout[i];
    return gx;
  }

 private:
  LayerSpec spec_;
  std::vector<std::size_t> in_shape_;
  std::vector<std::size_t> argmax_;
};

// Inverted dropout; identity in Eval mode.
class DropoutImpl : public LayerImpl {
 public:
  explicit DropoutImpl(const LayerSpec& spec) : rate_(spec.rate) {}

  Tensor forward(const Tensor& x, Mode mode, std::mt19937_64* rng) override {
    if (mode == Mode::Eval || rate_ <= 0.0) {
      active_ = false;
      return x;
    }
    if (!rng)
      throw ContractViolation("dropout in Train mode requires an RNG");
    active_ = true;
    const double keep = 1.0 - rate_;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    mask_.assign(x.size(), 0.0);
    Tensor y(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (u(*rng) < keep) {
        mask_[i] = 1.0 / keep;
        y[i] = x[i] * mask_[i];
      }
    }
    return y;
  }

  Tensor backward(const Tensor& gout) override {
    if (!active_) return gout;
    Tensor gx(gout.shape());
    for (std::size_t i = 0; i < gout.size(); ++i) gx[i] = gout[i] * mask_[i];
    return gx;
  }

 private:
  double rate_;
  bool active_ = false;
  std::vector<double> mask_;
};

}  // namespace
}  // namespace detail

Net::Net(Model& model) : model_(&model) {
  std::size_t pi = 0;
  wgrads_.reserve(model.weights.size());
  bgrads_.reserve(model.biases.size());
  for (std::size_t i = 0; i < model.weights.size(); ++i) {
    wgrads_.emplace_back(model.weights[i].shape());
    bgrads_.emplace_back(model.biases[i].shape());
  }
  for (const auto& spec : model.arch.layers) {
    switch (spec.kind) {
      case LayerKind::Conv:
      case LayerKind::FullyConnected:
        layers_.push_back(std::make_unique<detail::ConvImpl>(
            spec, &model.weights[pi], &model.biases[pi], &wgrads_[pi],
            &bgrads_[pi]));
        ++pi;
        break;
      case LayerKind::Relu:
        layers_.push_back(std::make_unique<detail::ReluImpl>());
        break;
      case LayerKind::Lrn:
        layers_.push_back(std::make_unique<detail::LrnImpl>(spec));
        break;
      case LayerKind::MaxPool:
        layers_.push_back(std::make_unique<detail::MaxPoolImpl>(spec));
        break;
      case LayerKind::Dropout:
        layers_.push_back(std::make_unique<detail::DropoutImpl>(spec));
        break;
    }
  }
}

Net::~Net() = default;
Net::Net(Net&&) noexcept = default;
Net& Net::operator=(Net&&) noexcept = default;

Tensor Net::forward(const Tensor& input, Mode mode, std::mt19937_64* rng) {
  if (input.rank() != 3 || input.dim(0) != model_->arch.in_channels)
    throw ContractViolation("net input must be (" +
                            std::to_string(model_->arch.in_channels) +
                            ", side, side), got " + input.shape_str());
  Tensor x = input;
  for (auto& l : layers_) x = l->forward(x, mode, rng);
  return x;
}

Tensor Net::backward(const Tensor& grad_output) {
  Tensor g = grad_output;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it)
    g = (*it)->backward(g);
  return g;
}

void Net::zero_grads() {
  for (auto& g : wgrads_) g.fill(0.0);
  for (auto& g : bgrads_) g.fill(0.0);
}

PoseVector predict_pose(Net& net, const Tensor& input) {
  const Tensor out = net.forward(input, Mode::Eval);
  if (out.size() != 7)
    throw ContractViolation("network output is not a 7-vector");
  PoseVector p;
  for (int i = 0; i < 7; ++i) p[i] = out[i];
  return p;
}

}  // namespace relocnet
