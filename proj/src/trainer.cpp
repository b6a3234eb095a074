#include "relocnet/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "json.hpp"
#include "relocnet/errors.hpp"
#include "relocnet/kernels.hpp"
#include "relocnet/net.hpp"

namespace relocnet {

void HyperParams::validate() const {
  if (batch_size == 0) throw ContractViolation("batch_size must be positive");
  if (learning_rate <= 0) throw ContractViolation("learning_rate must be > 0");
  if (weight_decay < 0) throw ContractViolation("weight_decay must be >= 0");
  if (beta <= 0) throw ContractViolation("beta must be > 0");
  if (momentum < 0) throw ContractViolation("momentum must be >= 0");
}

std::string TrainHistory::to_json() const {
  nlohmann::json j;
  j["provenance"] = provenance;
  j["diverged"] = diverged;
  j["diagnostic"] = diagnostic;
  j["epochs"] = nlohmann::json::array();
  for (const auto& e : epochs)
    j["epochs"].push_back({{"train_loss", e.train_loss},
                           {"val_position_error", e.val_position_error},
                           {"val_angle_error", e.val_angle_error}});
  return j.dump(2);
}

TrainData make_train_data(const std::vector<const Trajectory*>& trajectories,
                          const ModalitySpec& modality, const Intrinsics& intr,
                          std::size_t side, const Normalizer& norm) {
  TrainData d;
  for (const auto* t : trajectories) {
    for (const auto& f : t->frames) {
      d.inputs.push_back(assemble_input(f, modality, intr, side, norm));
      d.targets.push_back(pose_to_vector(f.pose));
    }
  }
  return d;
}

void sgd_update(std::vector<Tensor>& params, const std::vector<Tensor>& grads,
                std::vector<Tensor>& velocity, double lr, double momentum,
                double wd) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = params[i];
    Tensor& v = velocity[i];
    const Tensor& g = grads[i];
    // v = momentum v - lr g; then v -= lr wd p; p += v
    kernels::scale_add(v.size(), momentum, -lr, g.data(), v.data());
    if (wd > 0) kernels::axpy(v.size(), -lr * wd, p.data(), v.data());
    kernels::axpy(p.size(), 1.0, v.data(), p.data());
  }
}

namespace {

struct ValErrors {
  double ep = 0.0, ea = 0.0;
};

ValErrors validation_errors(Net& net, const TrainData& data) {
  ValErrors e;
  if (data.size() == 0) return e;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const PoseVector out = predict_pose(net, data.inputs[i].data);
    const auto& t = data.targets[i];
    e.ep += position_error({out[0], out[1], out[2]}, {t[0], t[1], t[2]});
    e.ea += angular_error({t[3], t[4], t[5], t[6]},
                          quat_normalize({out[3], out[4], out[5], out[6]}));
  }
  e.ep /= double(data.size());
  e.ea /= double(data.size());
  return e;
}

}  // namespace

TrainResult train(const Model& init, const TrainData& train_set,
                  const TrainData& val_set, const HyperParams& hp) {
  hp.validate();
  if (train_set.size() == 0) throw ContractViolation("empty training set");
  if (hp.batch_size > train_set.size())
    throw ContractViolation("batch_size exceeds training set size");

  TrainResult res;
  res.final_model = init;
  res.best_model = init;
  res.history.provenance = init.init_provenance;
  if (hp.epochs == 0) return res;

  Model model = init;
  Net net(model);
  std::vector<Tensor> vel_w, vel_b;
  for (const auto& w : model.weights) vel_w.emplace_back(w.shape());
  for (const auto& b : model.biases) vel_b.emplace_back(b.shape());

  std::mt19937_64 shuffle_rng(hp.seed);
  std::mt19937_64 dropout_rng(hp.seed ^ 0x9e3779b97f4a7c15ull);

  const TrainData& val = val_set.size() ? val_set : train_set;
  double best_ep = std::numeric_limits<double>::infinity();
  double best_ea = std::numeric_limits<double>::infinity();
  Model prev_snapshot = init;

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 0; epoch < hp.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0;
    std::size_t seen = 0;
    for (std::size_t start = 0; start < order.size();
         start += hp.batch_size) {
      const std::size_t end = std::min(order.size(), start + hp.batch_size);
      const std::size_t bn = end - start;  // final short batch is used
      net.zero_grads();
      double batch_loss = 0.0;
      for (std::size_t k = start; k < end; ++k) {
        const auto& in = train_set.inputs[order[k]];
        const auto& target = train_set.targets[order[k]];
        const Tensor out = net.forward(in.data, Mode::Train, &dropout_rng);
        PoseVector out7;
        for (int i = 0; i < 7; ++i) out7[i] = out[i];
        batch_loss += posenet_loss(out7, target, hp.beta);
        const PoseVector g = loss_gradient(out7, target, hp.beta);
        Tensor gt(out.shape());
        for (int i = 0; i < 7; ++i) gt[i] = g[i] / double(bn);
        net.backward(gt);
      }
      if (!std::isfinite(batch_loss)) {
        res.history.diverged = true;
        res.history.diagnostic =
            "diverged: non-finite loss at epoch " + std::to_string(epoch) +
            ", lr=" + std::to_string(hp.learning_rate);
        res.final_model = prev_snapshot;
        if (!std::isfinite(best_ep)) res.best_model = prev_snapshot;
        return res;
      }
      loss_sum += batch_loss;
      seen += bn;
      sgd_update(model.weights, net.weight_grads(), vel_w, hp.learning_rate,
                 hp.momentum, hp.weight_decay);
      sgd_update(model.biases, net.bias_grads(), vel_b, hp.learning_rate,
                 hp.momentum, hp.weight_decay);
    }

    const ValErrors ve = validation_errors(net, val);
    EpochStats st;
    st.train_loss = loss_sum / double(seen);
    st.val_position_error = ve.ep;
    st.val_angle_error = ve.ea;
    st.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    res.history.epochs.push_back(st);

    if (ve.ep < best_ep || (ve.ep == best_ep && ve.ea < best_ea)) {
      best_ep = ve.ep;
      best_ea = ve.ea;
      res.best_model = model;
    }
    prev_snapshot = model;
  }
  res.final_model = model;
  return res;
}

SweepResult sweep(const ArchSpec& arch, const TrainData& train_set,
                  const TrainData& val_set, const SweepGrid& grid,
                  std::size_t combos, std::size_t epochs,
                  std::uint64_t model_seed) {
  if (combos == 0) throw ContractViolation("combos must be >= 1");
  if (grid.batch_sizes.empty() || grid.weight_decays.empty() ||
      grid.betas.empty() || grid.lr_min <= 0 || grid.lr_max < grid.lr_min)
    throw ContractViolation("empty or invalid sweep grid");

  std::mt19937_64 rng(grid.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double lmin = std::log(grid.lr_min), lmax = std::log(grid.lr_max);

  SweepResult res;
  for (std::size_t i = 0; i < combos; ++i) {
    HyperParams hp;
    hp.learning_rate = std::exp(lmin + (lmax - lmin) * unit(rng));
    hp.batch_size = grid.batch_sizes[std::size_t(
        unit(rng) * double(grid.batch_sizes.size()))];
    hp.weight_decay = grid.weight_decays[std::size_t(
        unit(rng) * double(grid.weight_decays.size()))];
    hp.beta =
        grid.betas[std::size_t(unit(rng) * double(grid.betas.size()))];
    hp.epochs = epochs;
    hp.seed = grid.seed;  // shared seed policy
    hp.batch_size = std::min(hp.batch_size, train_set.size());

    Model init = build_model(arch, model_seed, hp.init_std);
    TrainResult tr = train(init, train_set, val_set, hp);
    SweepEntry e;
    e.hp = hp;
    if (!tr.history.epochs.empty()) {
      // errors of the best snapshot
      double bep = std::numeric_limits<double>::infinity(), bea = bep;
      for (const auto& ep : tr.history.epochs) {
        if (ep.val_position_error < bep ||
            (ep.val_position_error == bep && ep.val_angle_error < bea)) {
          bep = ep.val_position_error;
          bea = ep.val_angle_error;
        }
      }
      e.val_position_error = bep;
      e.val_angle_error = bea;
    } else {
      e.val_position_error = std::numeric_limits<double>::infinity();
      e.val_angle_error = std::numeric_limits<double>::infinity();
    }
    res.entries.push_back(std::move(e));
  }
  std::stable_sort(res.entries.begin(), res.entries.end(),
                   [](const SweepEntry& a, const SweepEntry& b) {
                     if (a.val_position_error != b.val_position_error)
                       return a.val_position_error < b.val_position_error;
                     return a.val_angle_error < b.val_angle_error;
                   });
  return res;
}

std::vector<StageResult> run_curriculum(const ArchSpec& arch,
                                        const DatasetBundle& bundle,
                                        const Curriculum& curriculum,
                                        const HyperParams& hp,
                                        const ModalitySpec& modality,
                                        std::size_t side, double scene_scale) {
  if (curriculum.stages.empty())
    throw ContractViolation("curriculum has no stages");
  const Trajectory& test = bundle.trajectories.at(curriculum.test_index);

  std::vector<StageResult> out;
  for (std::size_t si = 0; si < curriculum.stages.size(); ++si) {
    std::vector<const Trajectory*> trains;
    for (auto idx : curriculum.stages[si])
      trains.push_back(&bundle.trajectories.at(idx));

    std::vector<const FrameRecord*> train_frames;
    for (const auto* t : trains)
      for (const auto& f : t->frames) train_frames.push_back(&f);
    Normalizer norm;
    norm.scene_scale = scene_scale;
    norm.channel_means = compute_channel_means(
        train_frames, modality, test.intrinsics, side, scene_scale);

    TrainData data =
        make_train_data(trains, modality, test.intrinsics, side, norm);
    HyperParams shp = hp;
    shp.batch_size = std::min(shp.batch_size, data.size());
    Model init = build_model(arch, hp.seed, hp.init_std);  // same init policy per stage
    TrainResult tr = train(init, data, {}, shp);

    StageResult sr;
    sr.stage = si + 1;
    sr.param_count = tr.best_model.param_count();
    sr.report = evaluate(tr.best_model, test, modality, side, norm);
    sr.report.stage_index = int(si + 1);
    out.push_back(std::move(sr));
  }
  return out;
}

TrainResult finetune(const WeightContainer& container, const ArchSpec& arch,
                     const TrainData& train_set, const TrainData& val_set,
                     const HyperParams& hp) {
  Model init = build_model_pretrained(arch, container, hp.seed, hp.init_std > 0 ? hp.init_std : 0.01);
  TrainResult res = train(init, train_set, val_set, hp);
  res.history.provenance = init.init_provenance;
  return res;
}

}  // namespace relocnet
