#pragma once

// Monte Carlo replication engine. For every (process, loss, n, replication)
// a training trajectory of length n is simulated and a network is fitted;
// prediction errors are measured on an independent test trajectory of the
// same length and excess risks (against the known regression function) on
// an independent evaluation trajectory of length m.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "rwdnn/dgp.hpp"
#include "rwdnn/error.hpp"
#include "rwdnn/losses.hpp"
#include "rwdnn/mlp.hpp"
#include "rwdnn/rng.hpp"
#include "rwdnn/trainer.hpp"

namespace rwdnn {

// ---------------------------------------------------------------------------
// Predictors

/// A trained network plus the output clamp it was trained with.
struct NetworkPredictor {
  const Network& net;
  std::optional<double> clamp;
};

inline Eigen::RowVectorXd predict_all(const NetworkPredictor& p, const Eigen::MatrixXd& inputs) {
  return predict(p.net, inputs, p.clamp);
}

inline Eigen::RowVectorXd predict_all(const Network& net, const Eigen::MatrixXd& inputs) {
  return predict(net, inputs);
}

template <typename F>
  requires std::invocable<const F&, std::span<const double>>
Eigen::RowVectorXd predict_all(const F& f, const Eigen::MatrixXd& inputs) {
  Eigen::RowVectorXd out(inputs.cols());
  const auto d = static_cast<std::size_t>(inputs.rows());
  for (Eigen::Index j = 0; j < inputs.cols(); ++j) {
    out(j) = f(std::span<const double>(inputs.data() + j * inputs.rows(), d));
  }
  return out;
}

/// The known regression function of a process, as a predictor.
inline auto target_predictor(const DgpSpec& dgp) {
  return [&dgp](std::span<const double> x) { return dgp.regression(x); };
}

// ---------------------------------------------------------------------------
// Metrics

struct ExcessRisks {
  double l1 = 0;
  double huber = 0;
  double l2 = 0;
};

namespace detail {

inline double mean_excess(const LossSpec& spec, const Eigen::RowVectorXd& pred,
                          const Eigen::RowVectorXd& best, const Eigen::VectorXd& y) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    sum += loss(spec, pred(i), y(i)) - loss(spec, best(i), y(i));
  }
  return sum / static_cast<double>(y.size());
}

}  // namespace detail

/// Empirical excess risk (1/(m-p)) sum [l(h(X'_i), Y'_i) - l(f(X'_i), Y'_i)]
/// on a fresh trajectory of length m drawn with `dgp.seed`.
template <typename Predictor>
double excess_risk_empirical(const Predictor& hhat, const DgpSpec& dgp, const LossSpec& spec,
                             std::size_t m) {
  const auto pairs = embed(simulate(dgp, m), dgp.order);
  const Eigen::RowVectorXd pred = predict_all(hhat, pairs.inputs);
  const Eigen::RowVectorXd best = predict_all(target_predictor(dgp), pairs.inputs);
  return detail::mean_excess(spec, pred, best, pairs.targets);
}

/// L1, Huber and L2 excess risks on one shared evaluation trajectory.
template <typename Predictor>
ExcessRisks excess_risks_empirical(const Predictor& hhat, const DgpSpec& dgp, std::size_t m,
                                   double huber_delta = 1.345) {
  const auto pairs = embed(simulate(dgp, m), dgp.order);
  const Eigen::RowVectorXd pred = predict_all(hhat, pairs.inputs);
  const Eigen::RowVectorXd best = predict_all(target_predictor(dgp), pairs.inputs);
  return {detail::mean_excess(LossSpec::l1(), pred, best, pairs.targets),
          detail::mean_excess(LossSpec::huber(huber_delta), pred, best, pairs.targets),
          detail::mean_excess(LossSpec::l2(), pred, best, pairs.targets)};
}

/// Mean absolute prediction error over the test pairs.
template <typename Predictor>
double mape(const Predictor& hhat, const SupervisedPairs& test) {
  if (test.empty()) throw InsufficientDataError("empty test set");
  const Eigen::RowVectorXd pred = predict_all(hhat, test.inputs);
  return (pred.transpose() - test.targets).cwiseAbs().mean();
}

/// Root mean squared prediction error over the test pairs.
template <typename Predictor>
double rmspe(const Predictor& hhat, const SupervisedPairs& test) {
  if (test.empty()) throw InsufficientDataError("empty test set");
  const Eigen::RowVectorXd pred = predict_all(hhat, test.inputs);
  return std::sqrt((pred.transpose() - test.targets).squaredNorm() / static_cast<double>(test.size()));
}

// ---------------------------------------------------------------------------
// Experiment

inline std::string loss_tag(const LossSpec& spec) {
  if (spec.family == LossFamily::huber && spec.delta != 1.345) {
    std::ostringstream os;
    os << "huber" << spec.delta;
    return os.str();
  }
  return to_string(spec.family);
}

struct ExperimentConfig {
  std::vector<DgpSpec> dgps;  // seeds are ignored; streams derive from `seed`
  std::vector<LossSpec> losses{LossSpec::l1(), LossSpec::huber(), LossSpec::l2()};
  std::vector<std::size_t> sample_sizes{250, 500, 1000};
  std::size_t replications = 100;
  std::size_t eval_length = 10000;
  std::vector<std::size_t> hidden{100, 100};
  TrainConfig train;
  std::uint64_t seed = 0;
  /// Wall-clock seconds per replication are only written when enabled, so
  /// that record files stay byte-reproducible by default.
  bool record_timing = false;

  void validate() const {
    if (dgps.empty()) throw InvalidSpecError("experiment needs at least one process");
    if (losses.empty()) throw InvalidSpecError("experiment needs at least one loss");
    if (sample_sizes.empty()) throw InvalidSpecError("experiment needs at least one sample size");
    if (replications < 1) throw InvalidSpecError("replications must be >= 1");
    train.validate();
    for (const auto& l : losses) l.validate();
    for (const auto& d : dgps) {
      d.validate();
      if (eval_length <= d.order) throw InvalidSpecError("evaluation length must exceed the order p");
      for (std::size_t n : sample_sizes) {
        if (n <= d.order + train.batch_size) {
          throw InvalidSpecError("sample size " + std::to_string(n) + " must exceed p + batch size");
        }
      }
    }
  }

  double huber_delta() const {
    for (const auto& l : losses)
      if (l.family == LossFamily::huber) return l.delta;
    return 1.345;
  }
};

/// Independent seeds of one replication. Data streams do not depend on the
/// loss, so every loss is trained and evaluated on the same trajectories.
struct ReplicationSeeds {
  std::uint64_t train_data = 0;
  std::uint64_t test_data = 0;
  std::uint64_t eval_data = 0;
  std::uint64_t fit = 0;
};

inline ReplicationSeeds replication_seeds(std::uint64_t master, const std::string& dgp_tag,
                                          const std::string& law_tag, const std::string& loss,
                                          std::size_t n, std::size_t rep) {
  return {derive_seed(master, "train", dgp_tag, law_tag, n, rep),
          derive_seed(master, "test", dgp_tag, law_tag, n, rep),
          derive_seed(master, "eval", dgp_tag, law_tag, n, rep),
          derive_seed(master, "fit", dgp_tag, law_tag, loss, n, rep)};
}

struct ReplicationRecord {
  std::string dgp;
  std::string error;
  std::string loss;
  std::size_t n = 0;
  std::size_t rep = 0;
  double excess_l1 = std::numeric_limits<double>::quiet_NaN();
  double excess_huber = std::numeric_limits<double>::quiet_NaN();
  double excess_l2 = std::numeric_limits<double>::quiet_NaN();
  double mape = std::numeric_limits<double>::quiet_NaN();
  double rmspe = std::numeric_limits<double>::quiet_NaN();
  std::size_t epochs = 0;
  double seconds = 0;
  bool diverged = false;
  std::string message;  // failure reason for diverged rows
};

/// Everything one replication produces, including the fitted network.
struct ReplicationResult {
  ReplicationRecord record;
  std::optional<TrainReport> report;
};

inline ReplicationResult run_replication(const ExperimentConfig& cfg, const DgpSpec& base,
                                         const LossSpec& loss, std::size_t n, std::size_t rep) {
  ReplicationResult res;
  auto& rec = res.record;
  rec.dgp = base.tag();
  rec.error = to_string(base.law);
  rec.loss = loss_tag(loss);
  rec.n = n;
  rec.rep = rep;
  const auto seeds = replication_seeds(cfg.seed, rec.dgp, rec.error, rec.loss, n, rep);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    DgpSpec dgp = base;
    dgp.seed = seeds.train_data;
    const auto train = embed(simulate(dgp, n), dgp.order);

    TrainConfig tc = cfg.train;
    tc.seed = seeds.fit;
    res.report = fit(train, Architecture::mlp(dgp.order, cfg.hidden), loss, tc);
    rec.epochs = res.report->epochs_run;
    const NetworkPredictor hhat{res.report->params, res.report->output_clamp};

    dgp.seed = seeds.test_data;
    const auto test = embed(simulate(dgp, n), dgp.order);
    rec.mape = mape(hhat, test);
    rec.rmspe = rmspe(hhat, test);

    dgp.seed = seeds.eval_data;
    const auto ex = excess_risks_empirical(hhat, dgp, cfg.eval_length, cfg.huber_delta());
    rec.excess_l1 = ex.l1;
    rec.excess_huber = ex.huber;
    rec.excess_l2 = ex.l2;
  } catch (const DivergenceError& e) {
    rec.diverged = true;
    rec.message = e.what();
  } catch (const NumericError& e) {
    rec.diverged = true;
    rec.message = e.what();
  }
  if (cfg.record_timing) {
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  return res;
}

/// Runs every (process, loss, n, replication) cell on `threads` workers.
/// Records come back in config order (process, loss, n, replication)
/// regardless of the thread count.
inline std::vector<ReplicationRecord> run_experiment(const ExperimentConfig& cfg, unsigned threads = 1) {
  cfg.validate();
  struct Task {
    std::size_t dgp, loss, n, rep;
  };
  std::vector<Task> tasks;
  for (std::size_t d = 0; d < cfg.dgps.size(); ++d)
    for (std::size_t l = 0; l < cfg.losses.size(); ++l)
      for (std::size_t k = 0; k < cfg.sample_sizes.size(); ++k)
        for (std::size_t r = 0; r < cfg.replications; ++r) tasks.push_back({d, l, k, r});

  std::vector<ReplicationRecord> records(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const auto& t = tasks[i];
      records[i] = run_replication(cfg, cfg.dgps[t.dgp], cfg.losses[t.loss], cfg.sample_sizes[t.n], t.rep).record;
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(tasks.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  return records;
}

// ---------------------------------------------------------------------------
// Summaries

/// Type-7 (linear interpolation) quantile of sorted data.
inline double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw InsufficientDataError("quantile of empty data");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

struct BoxStats {
  std::size_t count = 0;
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0, mean = 0, sd = 0;
};

inline BoxStats box_stats(std::vector<double> values) {
  if (values.empty()) throw InsufficientDataError("statistics of empty data");
  std::sort(values.begin(), values.end());
  BoxStats s;
  s.count = values.size();
  s.min = values.front();
  s.max = values.back();
  s.q1 = quantile_sorted(values, 0.25);
  s.median = quantile_sorted(values, 0.5);
  s.q3 = quantile_sorted(values, 0.75);
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

inline const std::vector<std::string>& summary_metrics() {
  static const std::vector<std::string> m{"excess_l1", "excess_huber", "excess_l2", "mape", "rmspe"};
  return m;
}

inline double metric_value(const ReplicationRecord& r, const std::string& metric) {
  if (metric == "excess_l1") return r.excess_l1;
  if (metric == "excess_huber") return r.excess_huber;
  if (metric == "excess_l2") return r.excess_l2;
  if (metric == "mape") return r.mape;
  if (metric == "rmspe") return r.rmspe;
  throw InvalidSpecError("unknown metric '" + metric + "'");
}

struct SummaryRow {
  std::string dgp, error, loss;
  std::size_t n = 0;
  std::string metric;
  std::size_t excluded = 0;  // diverged replications left out
  BoxStats stats;
  std::vector<double> values;  // raw values in replication order
};

/// Boxplot statistics per (process, error law, loss, n, metric), in order of
/// first appearance. Diverged rows are excluded and counted.
inline std::vector<SummaryRow> summarize(const std::vector<ReplicationRecord>& records) {
  using Key = std::tuple<std::string, std::string, std::string, std::size_t>;
  std::vector<Key> order;
  std::map<Key, std::vector<const ReplicationRecord*>> groups;
  for (const auto& r : records) {
    Key k{r.dgp, r.error, r.loss, r.n};
    auto [it, inserted] = groups.try_emplace(k);
    if (inserted) order.push_back(k);
    it->second.push_back(&r);
  }
  std::vector<SummaryRow> out;
  for (const auto& k : order) {
    const auto& members = groups[k];
    for (const auto& metric : summary_metrics()) {
      SummaryRow row;
      std::tie(row.dgp, row.error, row.loss, row.n) = k;
      row.metric = metric;
      for (const auto* r : members) {
        if (r->diverged) {
          ++row.excluded;
        } else {
          row.values.push_back(metric_value(*r, metric));
        }
      }
      if (!row.values.empty()) row.stats = box_stats(row.values);
      out.push_back(std::move(row));
    }
  }
  return out;
}

}  // namespace rwdnn
