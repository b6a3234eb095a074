#include "relocnet/model.hpp"

#include <cmath>
#include <random>
#include <set>

#include "relocnet/errors.hpp"

namespace relocnet {

namespace {

Tensor weight_shape_for(const LayerSpec& l) {
  return Tensor({l.out_depth, l.in_depth, l.kernel, l.kernel});
}

void fill_gaussian(Tensor& t, std::mt19937_64& rng, double std) {
  std::normal_distribution<double> g(0.0, std);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = g(rng);
}

}  // namespace

std::size_t Model::param_count() const {
  std::size_t n = 0;
  for (const auto& w : weights) n += w.size();
  for (const auto& b : biases) n += b.size();
  return n;
}

std::uint64_t Model::weight_checksum() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](const Tensor& t) {
    const auto* p = reinterpret_cast<const unsigned char*>(t.data());
    for (std::size_t i = 0; i < t.size() * sizeof(double); ++i) {
      h ^= p[i];
      h *= 0x100000001b3ull;
    }
  };
  for (const auto& w : weights) mix(w);
  for (const auto& b : biases) mix(b);
  return h;
}

Model build_model(const ArchSpec& arch, std::uint64_t seed, double init_std) {
  arch.validate();
  Model m;
  m.arch = arch;
  m.init_provenance = "random(seed=" + std::to_string(seed) + ")";
  std::mt19937_64 rng(seed);
  for (const auto& l : arch.layers) {
    if (!l.has_params()) continue;
    Tensor w = weight_shape_for(l);
    const double std_l =
        init_std > 0 ? init_std
                     : std::sqrt(2.0 / double(l.kernel * l.kernel * l.in_depth));
    fill_gaussian(w, rng, std_l);
    m.weights.push_back(std::move(w));
    m.biases.emplace_back(std::vector<std::size_t>{l.out_depth});
    m.param_names.push_back(l.name);
  }
  return m;
}

Model build_model_pretrained(const ArchSpec& arch, const WeightContainer& c,
                             std::uint64_t seed, double init_std,
                             std::vector<std::string>* extras) {
  arch.validate();
  Model m;
  m.arch = arch;
  m.init_provenance = "pretrained(" +
                      (c.provenance.empty() ? c.arch_name : c.provenance) + ")";
  m.channel_means = c.channel_means;
  std::mt19937_64 rng(seed);

  // Locate the first conv and final fc, the only layers allowed to differ.
  std::string first_conv, final_fc;
  for (const auto& l : arch.layers) {
    if (l.has_params() && first_conv.empty()) first_conv = l.name;
    if (l.kind == LayerKind::FullyConnected) final_fc = l.name;
  }

  std::set<std::string> used;
  for (const auto& l : arch.layers) {
    if (!l.has_params()) continue;
    Tensor w = weight_shape_for(l);
    Tensor b({l.out_depth});
    const bool reshapable = (l.name == first_conv || l.name == final_fc);
    const auto wit = c.arrays.find(l.name + ".weight");
    const auto bit = c.arrays.find(l.name + ".bias");
    const bool covered = wit != c.arrays.end() && bit != c.arrays.end();
    const bool shape_ok = covered && wit->second.same_shape(w) &&
                          bit->second.same_shape(b);
    if (shape_ok) {
      w = wit->second;
      b = bit->second;
      used.insert(l.name + ".weight");
      used.insert(l.name + ".bias");
    } else if (reshapable) {
      fill_gaussian(w, rng, init_std);
    } else if (covered) {
      throw ContractViolation("pretrained container shape mismatch in layer '" +
                              l.name + "'");
    } else {
      throw ContractViolation("pretrained container missing layer '" + l.name +
                              "'");
    }
    m.weights.push_back(std::move(w));
    m.biases.push_back(std::move(b));
    m.param_names.push_back(l.name);
  }
  if (extras) {
    extras->clear();
    for (const auto& [name, t] : c.arrays)
      if (!used.count(name)) extras->push_back(name);
  }
  return m;
}

WeightContainer export_weights(const Model& model) {
  WeightContainer c;
  c.arch_name = model.arch.name;
  c.provenance = model.init_provenance;
  c.channel_means = model.channel_means;
  for (std::size_t i = 0; i < model.weights.size(); ++i) {
    c.arrays[model.param_names[i] + ".weight"] = model.weights[i];
    c.arrays[model.param_names[i] + ".bias"] = model.biases[i];
  }
  return c;
}

Model import_weights(const WeightContainer& c, const ArchSpec& arch) {
  arch.validate();
  Model m;
  m.arch = arch;
  m.init_provenance = c.provenance.empty()
                          ? "imported(" + c.arch_name + ")"
                          : c.provenance;
  m.channel_means = c.channel_means;
  for (const auto& l : arch.layers) {
    if (!l.has_params()) continue;
    const auto wit = c.arrays.find(l.name + ".weight");
    const auto bit = c.arrays.find(l.name + ".bias");
    if (wit == c.arrays.end() || bit == c.arrays.end())
      throw IngestionError("weight container missing layer '" + l.name + "'");
    const Tensor expect_w = weight_shape_for(l);
    if (!wit->second.same_shape(expect_w) ||
        bit->second.shape() != std::vector<std::size_t>{l.out_depth})
      throw IngestionError("weight container shape mismatch in layer '" +
                           l.name + "'");
    m.weights.push_back(wit->second);
    m.biases.push_back(bit->second);
    m.param_names.push_back(l.name);
  }
  return m;
}

}  // namespace relocnet
