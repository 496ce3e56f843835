#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "oracles.hpp"
#include "rwdnn/trainer.hpp"

using namespace rwdnn;

namespace {

SupervisedPairs make_pairs(const std::vector<double>& x, const std::vector<double>& y) {
  SupervisedPairs p;
  p.inputs.resize(1, static_cast<Eigen::Index>(x.size()));
  p.targets.resize(static_cast<Eigen::Index>(y.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    p.inputs(0, static_cast<Eigen::Index>(i)) = x[i];
    p.targets(static_cast<Eigen::Index>(i)) = y[i];
  }
  return p;
}

struct LinearData {
  std::vector<double> x, y;
};

LinearData linear_data(std::size_t n, double slope, double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2, 2);
  std::normal_distribution<double> e(0, sigma);
  LinearData d;
  for (std::size_t i = 0; i < n; ++i) {
    d.x.push_back(u(rng));
    d.y.push_back(slope * d.x.back() + e(rng));
  }
  return d;
}

// Bias-only predictor: an affine net fed a constant zero input, so the
// weight never influences the output.
SupervisedPairs constant_input_pairs(const std::vector<double>& y) {
  return make_pairs(std::vector<double>(y.size(), 0.0), y);
}

}  // namespace

TEST(EmpiricalRisk, Examples) {
  const Network zero(Architecture({1, 1}));
  EXPECT_EQ(empirical_risk(zero, make_pairs({1, 2, 3}, {0, 0, 0}), LossSpec::l1()), 0.0);
  EXPECT_EQ(empirical_risk(zero, make_pairs({1, 2}, {1, -1}), LossSpec::l1()), 1.0);
  EXPECT_THROW(empirical_risk(zero, SupervisedPairs{}, LossSpec::l1()), InsufficientDataError);
}

TEST(EmpiricalRisk, BiasOnlyL2MinimisedAtMean) {
  const std::vector<double> y{0.3, 2.0, -1.0, 4.5, 0.7};
  const auto pairs = constant_input_pairs(y);
  const double m = std::accumulate(y.begin(), y.end(), 0.0) / 5.0;
  Network net(Architecture({1, 1}));
  net.bias(1)(0) = m;
  const double at_mean = empirical_risk(net, pairs, LossSpec::l2());
  for (double dc : {-0.5, -0.01, 0.01, 0.5}) {
    net.bias(1)(0) = m + dc;
    EXPECT_GT(empirical_risk(net, pairs, LossSpec::l2()), at_mean);
  }
}

TEST(Fit, LinearModelRecoversOlsSlope) {
  const auto d = linear_data(200, 0.5, 0.01, 1);
  const auto ols = oracle::ols_line(d.x, d.y);
  TrainConfig cfg;
  cfg.seed = 3;
  cfg.learning_rate = 1e-2;
  const auto rep = fit(make_pairs(d.x, d.y), Architecture({1, 1}), LossSpec::l2(), cfg);
  EXPECT_NEAR(rep.params.weights(1)(0, 0), 0.5, 0.05);
  EXPECT_NEAR(rep.params.weights(1)(0, 0), ols.slope, 0.05);
  EXPECT_LE(rep.best_risk, ols.mse * 1.01);
}

TEST(Fit, DefaultLearningRateReachesOlsRiskWithinOnePercent) {
  const auto d = linear_data(200, 1.3, 0.5, 2);
  const auto ols = oracle::ols_line(d.x, d.y);
  TrainConfig cfg;
  cfg.seed = 4;
  const auto rep = fit(make_pairs(d.x, d.y), Architecture({1, 1}), LossSpec::l2(), cfg);
  EXPECT_GE(rep.best_risk, ols.mse * (1 - 1e-9));
  EXPECT_LE(rep.best_risk, ols.mse * 1.01);
}

TEST(Fit, ConstantDataL1ReachesMedianRisk) {
  const std::vector<double> y(64, 3.0);
  TrainConfig cfg;
  cfg.seed = 5;
  cfg.learning_rate = 1e-2;
  const auto rep = fit(constant_input_pairs(y), Architecture({1, 1}), LossSpec::l1(), cfg);
  EXPECT_LE(rep.best_risk, oracle::mean_abs_dev(y, oracle::median(y)) + 1e-3);
}

TEST(Fit, BiasOnlyL1OnSkewedDataReachesMedianRisk) {
  std::mt19937_64 rng(6);
  std::exponential_distribution<double> expo(0.5);
  std::vector<double> y(200);
  for (auto& v : y) v = expo(rng);
  TrainConfig cfg;
  cfg.seed = 6;
  cfg.learning_rate = 1e-2;
  cfg.patience = 100;
  cfg.max_epochs = 3000;
  const auto rep = fit(constant_input_pairs(y), Architecture({1, 1}), LossSpec::l1(), cfg);
  EXPECT_LE(rep.best_risk, oracle::mean_abs_dev(y, oracle::median(y)) + 1e-3);
}

TEST(Fit, ReportInvariants) {
  const auto d = linear_data(100, -0.7, 0.3, 7);
  TrainConfig cfg;
  cfg.seed = 8;
  cfg.max_epochs = 60;
  const auto rep = fit(make_pairs(d.x, d.y), Architecture::mlp(1, {8}), LossSpec::huber(), cfg);
  ASSERT_EQ(rep.history.size(), rep.epochs_run);
  EXPECT_LE(rep.epochs_run, cfg.max_epochs);
  EXPECT_EQ(rep.best_risk, *std::min_element(rep.history.begin(), rep.history.end()));
  EXPECT_EQ(rep.history[rep.best_epoch - 1], rep.best_risk);
  EXPECT_DOUBLE_EQ(empirical_risk(rep.params, make_pairs(d.x, d.y), LossSpec::huber()), rep.best_risk);
}

TEST(Fit, EarlyStoppingWithinPatienceOfPlateau) {
  // Zero learning rate: the risk never improves after epoch 1.
  const auto d = linear_data(50, 1.0, 0.1, 9);
  TrainConfig cfg;
  cfg.learning_rate = 0.0;
  cfg.patience = 30;
  const auto rep = fit(make_pairs(d.x, d.y), Architecture::mlp(1, {4}), LossSpec::l1(), cfg);
  EXPECT_EQ(rep.best_epoch, 1u);
  EXPECT_EQ(rep.epochs_run, 1u + 30u);
}

TEST(Fit, BestRiskNonincreasingInMaxEpochs) {
  const auto d = linear_data(120, 0.4, 0.5, 10);
  const auto pairs = make_pairs(d.x, d.y);
  TrainConfig cfg;
  cfg.seed = 11;
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t e : {1u, 5u, 20u, 80u}) {
    cfg.max_epochs = e;
    const auto rep = fit(pairs, Architecture::mlp(1, {6, 6}), LossSpec::l1(), cfg);
    EXPECT_LE(rep.best_risk, prev);
    prev = rep.best_risk;
  }
}

TEST(Fit, BitwiseDeterministic) {
  const auto d = linear_data(150, 0.9, 1.0, 12);
  const auto pairs = make_pairs(d.x, d.y);
  TrainConfig cfg;
  cfg.seed = 13;
  cfg.max_epochs = 40;
  const auto a = fit(pairs, Architecture::mlp(1, {10, 10}), LossSpec::huber(), cfg);
  const auto b = fit(pairs, Architecture::mlp(1, {10, 10}), LossSpec::huber(), cfg);
  EXPECT_EQ(a.params.theta(), b.params.theta());
  EXPECT_EQ(a.history, b.history);
  cfg.seed = 14;
  const auto c = fit(pairs, Architecture::mlp(1, {10, 10}), LossSpec::huber(), cfg);
  EXPECT_NE(a.params.theta(), c.params.theta());
}

TEST(Fit, ProjectionKeepsClassMembership) {
  const auto d = linear_data(100, 2.0, 0.2, 15);
  TrainConfig cfg;
  cfg.seed = 16;
  cfg.max_epochs = 50;
  cfg.constraint = ClassSpec{2, 8, 0.6, 1.5, 12};
  const auto rep = fit(make_pairs(d.x, d.y), Architecture::mlp(1, {8, 4}), LossSpec::l1(), cfg);
  EXPECT_TRUE(belongs_to(rep.params, *cfg.constraint));
  EXPECT_EQ(rep.output_clamp, 1.5);
  const std::vector<double> x{2.0};
  EXPECT_LE(std::abs(forward(rep.params, x, rep.output_clamp)), 1.5);
}

TEST(Fit, Preconditions) {
  TrainConfig cfg;
  EXPECT_THROW(fit(SupervisedPairs{}, Architecture({1, 1}), LossSpec::l1(), cfg), InsufficientDataError);
  EXPECT_THROW(fit(make_pairs({1, 2}, {1, 2}), Architecture({2, 1}), LossSpec::l1(), cfg), ShapeError);
  cfg.beta1 = 1.0;
  EXPECT_THROW(fit(make_pairs({1, 2}, {1, 2}), Architecture({1, 1}), LossSpec::l1(), cfg), InvalidSpecError);
  cfg = TrainConfig{};
  cfg.patience = 0;
  EXPECT_THROW(cfg.validate(), InvalidSpecError);
}

TEST(Fit, BatchLargerThanSampleIsAllowed) {
  TrainConfig cfg;
  cfg.batch_size = 1000;
  cfg.max_epochs = 5;
  EXPECT_NO_THROW(fit(make_pairs({1, 2, 3}, {1, 2, 3}), Architecture({1, 1}), LossSpec::l2(), cfg));
}

TEST(Fit, DivergenceIsReported) {
  const auto d = linear_data(64, 1.0, 1.0, 17);
  auto y = d.y;
  for (auto& v : y) v *= 1e300;
  TrainConfig cfg;
  cfg.learning_rate = 1e300;
  cfg.max_epochs = 5;
  try {
    fit(make_pairs(d.x, y), Architecture::mlp(1, {4}), LossSpec::l2(), cfg);
    FAIL() << "expected divergence";
  } catch (const DivergenceError& e) {
    EXPECT_GE(e.epoch(), 1u);
    EXPECT_GE(e.batch(), 1u);
  }
}
