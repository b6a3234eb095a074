#include "relocnet/arch.hpp"

#include <cmath>

#include "json.hpp"

namespace relocnet {

std::size_t conv_out_side(std::size_t in, std::size_t k, std::size_t s,
                          std::size_t p, bool ceil_mode) {
  if (in + 2 * p < k)
    throw ContractViolation("layer kernel larger than padded input");
  const std::size_t span = in + 2 * p - k;
  return (ceil_mode ? (span + s - 1) / s : span / s) + 1;
}

std::size_t ArchSpec::conv_count() const {
  std::size_t n = 0;
  for (const auto& l : layers)
    if (l.kind == LayerKind::Conv) ++n;
  return n;
}

std::size_t ArchSpec::fc_count() const {
  std::size_t n = 0;
  for (const auto& l : layers)
    if (l.kind == LayerKind::FullyConnected) ++n;
  return n;
}

Shape3 ArchSpec::shape_after(std::size_t layer_end) const {
  Shape3 s{in_channels, input_side, input_side};
  for (std::size_t i = 0; i < layer_end && i < layers.size(); ++i) {
    const auto& l = layers[i];
    switch (l.kind) {
      case LayerKind::Conv:
      case LayerKind::FullyConnected: {
        if (l.in_depth != s.c)
          throw ContractViolation("layer '" + l.name +
                                  "' input depth does not chain");
        if (l.kind == LayerKind::FullyConnected && l.kernel != s.h)
          throw ContractViolation("fc layer '" + l.name +
                                  "' kernel does not match input side");
        const std::size_t side = conv_out_side(s.h, l.kernel, l.stride, l.pad);
        s = {l.out_depth, side, side};
        break;
      }
      case LayerKind::MaxPool: {
        const std::size_t side =
            conv_out_side(s.h, l.kernel, l.stride, l.pad, l.ceil_mode);
        s = {s.c, side, side};
        break;
      }
      case LayerKind::Relu:
      case LayerKind::Lrn:
      case LayerKind::Dropout:
        break;
    }
  }
  return s;
}

void ArchSpec::validate() const {
  if (layers.empty()) throw ContractViolation("empty architecture");
  const Shape3 out = output_shape();
  if (out.h != 1 || out.w != 1)
    throw ContractViolation("architecture does not reduce to 1x1 output");
}

std::size_t count_params(const ArchSpec& arch) {
  std::size_t n = 0;
  for (const auto& l : arch.layers)
    if (l.has_params()) n += l.weight_count() + l.out_depth;
  return n;
}

namespace {

class Builder {
 public:
  Builder(std::string name, std::size_t in_channels, std::size_t side)
      : arch_{std::move(name), {}, in_channels, side}, depth_(in_channels) {}

  Builder& conv(std::size_t out, std::size_t k, std::size_t s, std::size_t p) {
    LayerSpec l;
    l.kind = LayerKind::Conv;
    l.name = "conv" + std::to_string(++conv_idx_);
    l.out_depth = out;
    l.kernel = k;
    l.stride = s;
    l.pad = p;
    l.in_depth = depth_;
    arch_.layers.push_back(l);
    depth_ = out;
    return relu();
  }
  Builder& relu() {
    LayerSpec l;
    l.kind = LayerKind::Relu;
    l.name = "relu" + std::to_string(arch_.layers.size());
    arch_.layers.push_back(l);
    return *this;
  }
  Builder& lrn() {
    LayerSpec l;
    l.kind = LayerKind::Lrn;
    l.name = "norm" + std::to_string(conv_idx_);
    arch_.layers.push_back(l);
    return *this;
  }
  Builder& pool(std::size_t k, std::size_t s, bool ceil = true) {
    LayerSpec l;
    l.kind = LayerKind::MaxPool;
    l.name = "pool" + std::to_string(++pool_idx_);
    l.kernel = k;
    l.stride = s;
    l.ceil_mode = ceil;
    arch_.layers.push_back(l);
    return *this;
  }
  // Fully-connected over whatever spatial extent remains.
  Builder& fc(std::size_t out, bool final_layer = false, bool dropout = true) {
    LayerSpec l;
    l.kind = LayerKind::FullyConnected;
    l.name = "fc" + std::to_string(++fc_idx_ + conv_idx_);
    l.out_depth = out;
    l.kernel = arch_.shape_after(arch_.layers.size()).h;
    l.stride = 1;
    l.pad = 0;
    l.in_depth = depth_;
    arch_.layers.push_back(l);
    depth_ = out;
    if (!final_layer) {
      relu();
      if (dropout) {
        LayerSpec d;
        d.kind = LayerKind::Dropout;
        d.name = "drop" + std::to_string(fc_idx_ + conv_idx_);
        d.rate = 0.5;
        arch_.layers.push_back(d);
      }
    }
    return *this;
  }

  ArchSpec done() {
    arch_.validate();
    return arch_;
  }

 private:
  ArchSpec arch_;
  std::size_t depth_;
  std::size_t conv_idx_ = 0, pool_idx_ = 0, fc_idx_ = 0;
};

ArchSpec vgg_long(const std::string& name,
                  const std::vector<std::vector<std::size_t>>& blocks,
                  std::size_t n, std::size_t head) {
  Builder b(name, n, 224);
  for (const auto& block : blocks) {
    for (auto depth : block) b.conv(depth, 3, 1, 1);
    b.pool(2, 2, false);
  }
  b.fc(4096).fc(4096).fc(head, true);
  return b.done();
}

}  // namespace

ArchSpec preset(const std::string& name, std::size_t in_channels,
                std::size_t head_dim) {
  if (in_channels < 1) throw ContractViolation("in_channels must be >= 1");
  const std::size_t n = in_channels;
  if (name == "VGG-F") {
    return Builder("VGG-F", n, 224)
        .conv(64, 11, 4, 0).lrn().pool(3, 2)
        .conv(256, 5, 1, 2).lrn().pool(3, 2)
        .conv(256, 3, 1, 1)
        .conv(256, 3, 1, 1)
        .conv(256, 3, 1, 1).pool(3, 2)
        .fc(4096).fc(4096).fc(head_dim, true)
        .done();
  }
  if (name == "VGG-M") {
    return Builder("VGG-M", n, 224)
        .conv(96, 7, 2, 0).lrn().pool(3, 2)
        .conv(256, 5, 2, 1).lrn().pool(3, 2)
        .conv(512, 3, 1, 1)
        .conv(512, 3, 1, 1)
        .conv(512, 3, 1, 1).pool(3, 2)
        .fc(4096).fc(4096).fc(head_dim, true)
        .done();
  }
  if (name == "VGG-S") {
    return Builder("VGG-S", n, 224)
        .conv(96, 7, 2, 0).lrn().pool(3, 3)
        .conv(256, 5, 1, 0).pool(2, 2)
        .conv(512, 3, 1, 1)
        .conv(512, 3, 1, 1)
        .conv(512, 3, 1, 1).pool(3, 3)
        .fc(4096).fc(4096).fc(head_dim, true)
        .done();
  }
  if (name == "VGG-16")
    return vgg_long("VGG-16",
                    {{64, 64}, {128, 128}, {256, 256, 256},
                     {512, 512, 512}, {512, 512, 512}},
                    n, head_dim);
  if (name == "VGG-19")
    return vgg_long("VGG-19",
                    {{64, 64}, {128, 128}, {256, 256, 256, 256},
                     {512, 512, 512, 512}, {512, 512, 512, 512}},
                    n, head_dim);
  throw ContractViolation("unknown architecture preset: " + name);
}

ArchSpec reduced_arch(std::size_t in_channels, std::size_t side) {
  Builder b("reduced", in_channels, side);
  b.conv(16, 5, 2, 2).conv(32, 3, 2, 1).conv(32, 3, 2, 1);
  b.fc(64, false, false).fc(7, true);
  return b.done();
}

namespace {

const char* kind_name(LayerKind k) {
  switch (k) {
    case LayerKind::Conv: return "conv";
    case LayerKind::Relu: return "relu";
    case LayerKind::Lrn: return "lrn";
    case LayerKind::MaxPool: return "maxpool";
    case LayerKind::FullyConnected: return "fullyconnected";
    case LayerKind::Dropout: return "dropout";
  }
  return "?";
}

LayerKind kind_from_name(const std::string& s) {
  if (s == "conv") return LayerKind::Conv;
  if (s == "relu") return LayerKind::Relu;
  if (s == "lrn") return LayerKind::Lrn;
  if (s == "maxpool") return LayerKind::MaxPool;
  if (s == "fullyconnected") return LayerKind::FullyConnected;
  if (s == "dropout") return LayerKind::Dropout;
  throw ContractViolation("unknown layer kind: " + s);
}

}  // namespace

std::string arch_to_json(const ArchSpec& arch) {
  nlohmann::json j;
  j["name"] = arch.name;
  j["in_channels"] = arch.in_channels;
  j["input_side"] = arch.input_side;
  for (const auto& l : arch.layers) {
    nlohmann::json lj;
    lj["kind"] = kind_name(l.kind);
    lj["name"] = l.name;
    if (l.kind == LayerKind::Conv || l.kind == LayerKind::FullyConnected) {
      lj["out_depth"] = l.out_depth;
      lj["kernel"] = l.kernel;
      lj["stride"] = l.stride;
      lj["pad"] = l.pad;
      lj["in_depth"] = l.in_depth;
    } else if (l.kind == LayerKind::MaxPool) {
      lj["kernel"] = l.kernel;
      lj["stride"] = l.stride;
      lj["pad"] = l.pad;
      lj["ceil_mode"] = l.ceil_mode;
    } else if (l.kind == LayerKind::Dropout) {
      lj["rate"] = l.rate;
    } else if (l.kind == LayerKind::Lrn) {
      lj["size"] = l.lrn_size;
      lj["kappa"] = l.lrn_kappa;
      lj["alpha"] = l.lrn_alpha;
      lj["beta"] = l.lrn_beta;
    }
    j["layers"].push_back(lj);
  }
  return j.dump(2);
}

ArchSpec arch_from_json(const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  ArchSpec arch;
  arch.name = j.at("name").get<std::string>();
  arch.in_channels = j.at("in_channels").get<std::size_t>();
  arch.input_side = j.at("input_side").get<std::size_t>();
  for (const auto& lj : j.at("layers")) {
    LayerSpec l;
    l.kind = kind_from_name(lj.at("kind").get<std::string>());
    l.name = lj.at("name").get<std::string>();
    if (l.kind == LayerKind::Conv || l.kind == LayerKind::FullyConnected) {
      l.out_depth = lj.at("out_depth").get<std::size_t>();
      l.kernel = lj.at("kernel").get<std::size_t>();
      l.stride = lj.at("stride").get<std::size_t>();
      l.pad = lj.at("pad").get<std::size_t>();
      l.in_depth = lj.at("in_depth").get<std::size_t>();
    } else if (l.kind == LayerKind::MaxPool) {
      l.kernel = lj.at("kernel").get<std::size_t>();
      l.stride = lj.at("stride").get<std::size_t>();
      l.pad = lj.value("pad", 0);
      l.ceil_mode = lj.value("ceil_mode", false);
    } else if (l.kind == LayerKind::Dropout) {
      l.rate = lj.value("rate", 0.5);
    } else if (l.kind == LayerKind::Lrn) {
      l.lrn_size = lj.value("size", 5);
      l.lrn_kappa = lj.value("kappa", 2.0);
      l.lrn_alpha = lj.value("alpha", 1e-4);
      l.lrn_beta = lj.value("beta", 0.75);
    }
    arch.layers.push_back(l);
  }
  arch.validate();
  return arch;
}

}  // namespace relocnet
