#pragma once

// Empirical risk minimisation over a fixed architecture: shuffled minibatch
// Adam on the mean loss, with early stopping on the full-sample empirical
// risk and best-snapshot return.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rwdnn/dgp.hpp"
#include "rwdnn/error.hpp"
#include "rwdnn/losses.hpp"
#include "rwdnn/mlp.hpp"
#include "rwdnn/rng.hpp"

namespace rwdnn {

struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t batch_size = 32;
  std::size_t patience = 30;
  std::size_t max_epochs = 1000;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  /// When set, parameters are projected onto the class after every step
  /// and network outputs are clamped to its output cap F.
  std::optional<ClassSpec> constraint;
  bool shuffle = true;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
      throw InvalidSpecError("learning rate must be finite and nonnegative");
    }
    if (batch_size < 1) throw InvalidSpecError("batch size must be >= 1");
    if (patience < 1) throw InvalidSpecError("patience must be >= 1");
    if (max_epochs < 1) throw InvalidSpecError("max epochs must be >= 1");
    if (!(beta1 > 0.0 && beta1 < 1.0 && beta2 > 0.0 && beta2 < 1.0)) {
      throw InvalidSpecError("Adam betas must lie in (0, 1)");
    }
    if (!(epsilon > 0.0)) throw InvalidSpecError("Adam epsilon must be positive");
    if (constraint) constraint->validate();
  }

  std::optional<double> output_clamp() const {
    if (constraint && std::isfinite(constraint->output_cap)) return constraint->output_cap;
    return std::nullopt;
  }
};

struct TrainReport {
  Network params;
  double best_risk = std::numeric_limits<double>::infinity();
  std::size_t best_epoch = 0;
  std::size_t epochs_run = 0;
  std::vector<double> history;  // full-sample empirical risk after each epoch
  std::optional<double> output_clamp;
};

/// (1/n) sum_i loss(h(X_i), Y_i).
inline double empirical_risk(const Network& net, const SupervisedPairs& pairs, const LossSpec& spec,
                             std::optional<double> clamp = {}) {
  if (pairs.empty()) throw InsufficientDataError("empirical risk of an empty sample");
  const Eigen::RowVectorXd out = predict(net, pairs.inputs, clamp);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < out.size(); ++i) sum += loss(spec, out(i), pairs.targets(i));
  return sum / static_cast<double>(pairs.size());
}

namespace detail {

class Adam {
 public:
  Adam(std::size_t size, const TrainConfig& cfg)
      : cfg_(cfg),
        m_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size))),
        v_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size))) {}

  void step(Eigen::VectorXd& theta, const Eigen::VectorXd& g) {
    b1_pow_ *= cfg_.beta1;
    b2_pow_ *= cfg_.beta2;
    m_ = cfg_.beta1 * m_ + (1.0 - cfg_.beta1) * g;
    v_ = cfg_.beta2 * v_ + (1.0 - cfg_.beta2) * g.cwiseProduct(g);
    const double c1 = 1.0 - b1_pow_;
    const double c2 = 1.0 - b2_pow_;
    theta.array() -= cfg_.learning_rate * (m_.array() / c1) / ((v_.array() / c2).sqrt() + cfg_.epsilon);
  }

 private:
  const TrainConfig& cfg_;
  Eigen::VectorXd m_, v_;
  double b1_pow_ = 1.0;
  double b2_pow_ = 1.0;
};

}  // namespace detail

/// Trains a freshly He-initialised network on `pairs`.
///
/// One epoch is a pass over a permutation of the sample in minibatches
/// (the last may be short). After every epoch the full-sample empirical
/// risk is recorded; training stops after `patience` epochs without a
/// strict improvement of the best risk, or at `max_epochs`. The snapshot
/// with the best risk is returned.
inline TrainReport fit(const SupervisedPairs& pairs, const Architecture& arch, const LossSpec& spec,
                       const TrainConfig& cfg) {
  cfg.validate();
  spec.validate();
  if (pairs.empty()) throw InsufficientDataError("cannot fit on an empty sample");
  if (pairs.dim() != arch.input_dim()) {
    throw ShapeError("data has dimension " + std::to_string(pairs.dim()) + ", architecture expects " +
                     std::to_string(arch.input_dim()));
  }
  if (!pairs.inputs.allFinite() || !pairs.targets.allFinite()) {
    throw NumericError("training data contains non-finite values");
  }

  const auto clamp = cfg.output_clamp();
  Rng init_rng(derive_seed(cfg.seed, "init"));
  Network net = Network::he_uniform(arch, init_rng,
                                    cfg.constraint ? cfg.constraint->activation : Activation::relu);
  if (cfg.constraint) project_in_place(net, *cfg.constraint);

  const std::size_t n = pairs.size();
  const std::size_t d = pairs.dim();
  const std::size_t bs = std::min(cfg.batch_size, n);
  std::vector<std::size_t> order(n);

  detail::Adam adam(arch.parameter_count(), cfg);
  Eigen::VectorXd g(static_cast<Eigen::Index>(arch.parameter_count()));
  Eigen::MatrixXd xb;
  Eigen::RowVectorXd upstream;
  BatchWorkspace ws;

  TrainReport rep;
  rep.params = net;
  rep.output_clamp = clamp;
  rep.history.reserve(std::min<std::size_t>(cfg.max_epochs, 4096));
  std::size_t stale = 0;

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (cfg.shuffle) {
      Rng shuffle_rng(derive_seed(cfg.seed, "shuffle", epoch));
      std::shuffle(order.begin(), order.end(), shuffle_rng);
    }
    std::size_t batch = 0;
    for (std::size_t start = 0; start < n; start += bs, ++batch) {
      const std::size_t len = std::min(bs, n - start);
      xb.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(len));
      upstream.resize(static_cast<Eigen::Index>(len));
      for (std::size_t j = 0; j < len; ++j) {
        xb.col(static_cast<Eigen::Index>(j)) = pairs.inputs.col(static_cast<Eigen::Index>(order[start + j]));
      }
      const Eigen::RowVectorXd& out = forward_batch(net, xb, ws, clamp);
      if (!out.allFinite()) {
        throw DivergenceError("non-finite network output at epoch " + std::to_string(epoch) +
                                  ", batch " + std::to_string(batch + 1),
                              epoch, batch + 1);
      }
      const double scale = 1.0 / static_cast<double>(len);
      for (std::size_t j = 0; j < len; ++j) {
        const double target = pairs.targets(static_cast<Eigen::Index>(order[start + j]));
        upstream(static_cast<Eigen::Index>(j)) = scale * dloss_dpred(spec, out(static_cast<Eigen::Index>(j)), target);
      }
      g.setZero();
      backward_batch(net, xb, upstream, ws, g, clamp);
      adam.step(net.theta(), g);
      if (cfg.constraint) project_in_place(net, *cfg.constraint);
      if (!net.theta().allFinite()) {
        throw DivergenceError("non-finite parameters at epoch " + std::to_string(epoch) + ", batch " +
                                  std::to_string(batch + 1),
                              epoch, batch + 1);
      }
    }

    double risk = 0.0;
    try {
      risk = empirical_risk(net, pairs, spec, clamp);
    } catch (const NumericError&) {
      risk = std::numeric_limits<double>::quiet_NaN();
    }
    if (!std::isfinite(risk)) {
      throw DivergenceError("non-finite empirical risk at epoch " + std::to_string(epoch), epoch, batch);
    }
    rep.history.push_back(risk);
    rep.epochs_run = epoch;
    if (risk < rep.best_risk) {
      rep.best_risk = risk;
      rep.best_epoch = epoch;
      rep.params = net;
      stale = 0;
    } else if (++stale >= cfg.patience) {
      break;
    }
  }
  return rep;
}

}  // namespace rwdnn
