#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rwdnn/theory.hpp"

using namespace rwdnn;
using namespace rwdnn::theory;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Integer-only evaluation of floor(n / ceil(sqrt(8n/c))) for gamma = 1.
std::size_t n_alpha_gamma1(std::size_t n, std::size_t c) {
  // ceil(sqrt(q)) for rational q = 8n/c: smallest k with k^2 * c >= 8n.
  std::size_t k = 0;
  while (k * k * c < 8 * n) ++k;
  return n / k;
}

// Direct transcription of the strong-mixing bound with no log-space tricks.
double thm1_direct(double s, double d, double nu, double k, double abar, double m_bound, double m) {
  const double a = s / (s + d);
  const double c = 64.0 / 3.0 * k * (1 + 4 * std::exp(-2.0) * abar) + 6 * k * m_bound;
  return (std::pow(std::log(m), nu) + k) / std::pow(m, a) + c / m + 3 * k / m;
}

// The weak-dependence constant in its simplified closed form:
// 2^{(mu+1)/(2mu+3)} 4 K (Psi L1)^{(mu+2)/(2mu+3)} / (L2 max(2^{3+mu}/Psi, 1))^{1/(2mu+3)}.
double c0_closed_form(double mu, double k, double psi, double l1, double l2) {
  const double den = 2 * mu + 3;
  return std::pow(2.0, (mu + 1) / den) * 4 * k * std::pow(psi * l1, (mu + 2) / den) /
         std::pow(l2 * std::max(std::pow(2.0, 3 + mu) / psi, 1.0), 1 / den);
}

}  // namespace

TEST(NAlpha, Examples) {
  EXPECT_EQ(n_alpha(1000, 1, 1), 11u);
  EXPECT_EQ(n_alpha(8, 8, 1), 2u);
  EXPECT_THROW(n_alpha(2, 1, 1), TooSmallNError);
  EXPECT_EQ(effective_sample_size_raw(2, 1, 1), 0u);
}

TEST(NAlpha, ExactCeilingAtPerfectSquares) {
  // 8n/c = 100 exactly: the ceiling must be 10, not 11.
  EXPECT_EQ(n_alpha(100, 8, 1), 10u);
  EXPECT_EQ(n_alpha(50, 4, 1), 5u);
}

TEST(NAlpha, MatchesIntegerOracle) {
  for (std::size_t c : {1u, 3u, 8u, 100u})
    for (std::size_t n = 1; n <= 20000; n += (n < 500 ? 1 : 37)) {
      const std::size_t want = n_alpha_gamma1(n, c);
      EXPECT_EQ(effective_sample_size_raw(n, static_cast<double>(c), 1.0), want) << "n=" << n << " c=" << c;
    }
}

TEST(NAlpha, BoundedAndQuadruplingMonotone) {
  for (std::size_t n = 1; n <= 100000; ++n) {
    const auto m = effective_sample_size_raw(n, 1.0, 1.0);
    ASSERT_LE(m, n);
    if (4 * n <= 100000) {
      ASSERT_GE(effective_sample_size_raw(4 * n, 1.0, 1.0), m) << n;
    }
  }
}

TEST(Truncate, ExamplesAndProperties) {
  EXPECT_EQ(truncate(7, 5), 5.0);
  EXPECT_EQ(truncate(-7, 5), -5.0);
  EXPECT_EQ(truncate(3, 5), 3.0);
  EXPECT_THROW(truncate(1, 0), InvalidSpecError);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-100, 100), b(0.1, 50);
  for (int i = 0; i < 10000; ++i) {
    const double x = u(rng), y = u(rng), beta = b(rng);
    EXPECT_EQ(truncate(truncate(x, beta), beta), truncate(x, beta));
    EXPECT_LE(std::abs(truncate(x, beta) - truncate(y, beta)), std::abs(x - y));
  }
}

TEST(BetaN, Examples) {
  TheoryInputs in;
  in.moment_order = 2;
  in.mixing_c = 1;
  in.mixing_gamma = 1;
  EXPECT_DOUBLE_EQ(beta_n(in, 1000, 1, 10.0), 10.0);
  EXPECT_DOUBLE_EQ(beta_n(in, 1000, 1, 1.0), std::sqrt(11.0));
  in.wd_mu = 0;
  EXPECT_NEAR(beta_n(in, 64, 2), 2.0, 1e-15);
  in.moment_order = kInf;
  for (std::size_t n : {3u, 100u, 1000000u}) EXPECT_EQ(beta_n(in, n, 2), 1.0);
  EXPECT_THROW(beta_n(in, 1000, 3), InvalidSpecError);
}

TEST(Schedule, HandEvaluatedExample) {
  TheoryInputs in;
  in.smoothness = 1;
  in.dim = 3;
  in.moment_order = kInf;
  const auto s = schedule_at(in, 100.0);
  EXPECT_NEAR(s.depth, 0.25 * std::log(100.0), 1e-12);
  EXPECT_NEAR(s.depth, 1.151, 1e-3);
  EXPECT_NEAR(s.width, std::pow(100.0, 0.75), 1e-9);
  EXPECT_NEAR(s.width, 31.62, 1e-2);
  EXPECT_NEAR(s.sparsity, 0.25 * std::pow(100.0, 0.75) * std::log(100.0), 1e-9);
  EXPECT_NEAR(s.norm, std::pow(100.0, 4.0), 1e-3);
  EXPECT_EQ(s.depth_int, 2u);
  EXPECT_EQ(s.width_int, 32u);
  EXPECT_EQ(s.sparsity_int, static_cast<std::size_t>(std::floor(s.sparsity)));
}

TEST(Schedule, BothRegimesShareTheKernel) {
  TheoryInputs in;
  in.mixing_c = 1;
  for (std::size_t n : {1000u, 5000u, 123456u}) {
    const auto m = n_alpha(n, in.mixing_c, in.mixing_gamma);
    const auto a = schedule_thm1(in, n), b = schedule_at(in, static_cast<double>(m));
    EXPECT_EQ(a.depth, b.depth);
    EXPECT_EQ(a.width, b.width);
    EXPECT_EQ(a.sparsity, b.sparsity);
    EXPECT_EQ(a.norm, b.norm);
    const auto c = schedule_thm2(in, m), e = schedule_at(in, static_cast<double>(m));
    EXPECT_EQ(c.depth, e.depth);
    EXPECT_EQ(c.sparsity, e.sparsity);
  }
}

TEST(Schedule, MomentOrderNearOneSuppressesGrowth) {
  TheoryInputs in;
  in.moment_order = 1.0 + 1e-12;
  const auto s = schedule_thm2(in, 1000000);
  EXPECT_NEAR(s.width, in.width0, 1e-6);
  EXPECT_NEAR(s.norm, in.norm0, 1e-6);
  EXPECT_NEAR(s.depth, 0.0, 1e-6);
}

TEST(Schedule, DoublingIncreasesEveryComponent) {
  TheoryInputs in;
  in.moment_order = 4;
  for (double m = 10; m < 1e7; m *= 2) {
    const auto a = schedule_at(in, m), b = schedule_at(in, 2 * m);
    EXPECT_GT(b.depth, a.depth);
    EXPECT_GT(b.width, a.width);
    EXPECT_GT(b.sparsity, a.sparsity);
    EXPECT_GT(b.norm, a.norm);
  }
}

TEST(Schedule, Preconditions) {
  TheoryInputs in;
  in.mixing_c = 1;
  EXPECT_THROW(schedule_thm1(in, 20), TooSmallNError);
  EXPECT_THROW(schedule_thm2(in, 2), TooSmallNError);
  EXPECT_NO_THROW(schedule_thm2(in, 3));
  in.output_cap = 7.5;
  EXPECT_EQ(schedule_thm1(in, 1000).output_cap, 7.5);
  in.moment_order = 2;
  EXPECT_DOUBLE_EQ(*schedule_thm2(in, 4096).output_cap, std::pow(4096.0, 1.0 / 6.0));
}

TEST(Covering, HandEvaluatedExample) {
  const auto cb = covering_bound(2, 100, 1, 10, 1, 1);
  EXPECT_NEAR(cb.log_value, 44 * std::log(202.0), 1e-12);
  EXPECT_NEAR(cb.log_value, 233.6, 0.05);
  EXPECT_FALSE(cb.vacuous);
}

TEST(Covering, HalvingEpsilon) {
  const double a = covering_bound(3, 20, 5, 40, 2, 0.1).log_value;
  const double b = covering_bound(3, 20, 5, 40, 2, 0.05).log_value;
  EXPECT_NEAR(b - a, 2 * 3 * 41 * std::log(2.0), 1e-9);
}

TEST(Covering, LinearInSparsityPlusOne) {
  for (double s : {1.0, 2.0, 7.5, 100.0, 12345.0}) {
    const double v = covering_bound(4, 30, 2, s, 1.5, 0.01).log_value;
    const double per = covering_bound(4, 30, 2, 1, 1.5, 0.01).log_value / 2.0;
    EXPECT_NEAR(v, (s + 1) * per, 1e-12 * std::abs(v));
  }
}

TEST(Covering, MonotoneAndVacuousFlag) {
  const auto base = covering_bound(2, 10, 2, 5, 1, 0.1).log_value;
  EXPECT_GE(covering_bound(3, 10, 2, 5, 1, 0.1).log_value, base);
  EXPECT_GE(covering_bound(2, 11, 2, 5, 1, 0.1).log_value, base);
  EXPECT_GE(covering_bound(2, 10, 3, 5, 1, 0.1).log_value, base);
  EXPECT_GE(covering_bound(2, 10, 2, 6, 1, 0.1).log_value, base);
  EXPECT_LE(covering_bound(2, 10, 2, 5, 1, 0.2).log_value, base);
  EXPECT_TRUE(covering_bound(0.1, 1, 1, 1, 1, 10).vacuous);
  EXPECT_THROW(covering_bound(0, 1, 1, 1, 1, 1), InvalidSpecError);
}

TEST(Psi, Values) {
  EXPECT_EQ(psi_value(PsiKind::theta, 1, 1), 2.0);
  EXPECT_EQ(psi_value(PsiKind::eta, 1, 1), 2.0);
  EXPECT_EQ(psi_value(PsiKind::kappa, 1, 1), 1.0);
  EXPECT_EQ(psi_value(PsiKind::lambda, 1, 1), 1.5);
  EXPECT_EQ(psi_value(PsiKind::theta, 3, 4), 8.0);
  EXPECT_EQ(psi_value(PsiKind::eta, 3, 4), 7.0);
  EXPECT_EQ(psi_value(PsiKind::kappa, 3, 4), 12.0);
  EXPECT_EQ(psi_value(PsiKind::lambda, 3, 4), 9.5);
  EXPECT_THROW(psi_value(PsiKind::theta, 0, 1), InvalidSpecError);
}

TEST(BoundThm1, DualImplementation) {
  TheoryInputs in;
  in.smoothness = 1;
  in.dim = 3;
  in.moment_order = kInf;
  in.log_exponent = 3.01;
  in.mixing_c = 1;
  for (std::size_t n : {100000u, 1000000u, 50000000u}) {
    const double m = static_cast<double>(n_alpha(n, 1, 1));
    const double want = thm1_direct(1, 3, 3.01, 1, 1, 1, m);
    EXPECT_NEAR(bound_thm1(in, n), want, 1e-12 * want);
  }
}

TEST(BoundThm1, LinearInLipschitzForLastTwoTerms) {
  TheoryInputs in;
  in.mixing_c = 1;
  const std::size_t n = 10000000;
  const double m = static_cast<double>(n_alpha(n, 1, 1));
  const double a = in.smoothness / (in.smoothness + 1.0);
  auto tail = [&](double k) {
    TheoryInputs t = in;
    t.lipschitz = k;
    return bound_thm1(t, n) - (std::pow(std::log(m), t.log_exponent) + k) / std::pow(m, a);
  };
  EXPECT_NEAR(tail(2.5), 2.5 * tail(1.0), 1e-12 * tail(2.5));
}

TEST(BoundThm1, DecreasingForDefaultInputs) {
  const TheoryInputs in;
  double prev = kInf;
  for (std::size_t n : log_grid(1e3, 1e8, 10)) {
    const double b = bound_thm1(in, n);
    EXPECT_TRUE(std::isfinite(b) && b > 0);
    EXPECT_LT(b, prev) << n;
    prev = b;
  }
}

TEST(BoundThm1, TooSmall) {
  TheoryInputs in;
  in.mixing_c = 1;
  EXPECT_THROW(bound_thm1(in, 30), TooSmallNError);
}

TEST(BoundThm2, ConstantMatchesClosedForm) {
  TheoryInputs in;
  in.wd_mu = 0;
  in.psi = PsiKind::theta;
  in.lipschitz = 1;
  in.wd_l1 = in.wd_l2 = 1;
  const double want = std::pow(2.0, 1.0 / 3) * 4 * std::pow(2.0, 2.0 / 3) / std::pow(4.0, 1.0 / 3);
  EXPECT_NEAR(thm2_c0(in), want, 1e-12);

  for (double mu : {0.0, 0.5, 2.0})
    for (double k : {0.5, 1.345, 3.0})
      for (auto psi : {PsiKind::theta, PsiKind::kappa, PsiKind::lambda}) {
        in.wd_mu = mu;
        in.lipschitz = k;
        in.psi = psi;
        in.wd_l1 = 1.7;
        in.wd_l2 = 0.4;
        const double oracle = c0_closed_form(mu, k, psi_value(psi, 1, 1), 1.7, 0.4);
        EXPECT_NEAR(thm2_c0(in), oracle, 1e-12 * oracle);
      }
}

TEST(BoundThm2, StatementVariantUsesDoubledConstants) {
  TheoryInputs in;
  in.constants = ConstantsVariant::statement;
  const double mu = in.wd_mu, den = 2 * mu + 3;
  const double psi = 2.0;
  const double c1 = 32 * psi, c2 = 8 * std::max(std::pow(2.0, 3 + mu) / psi, 1.0);
  const double want = std::pow(2.0, (mu + 1) / den) * std::pow(c1, (mu + 2) / den) / std::pow(c2, 1 / den);
  EXPECT_NEAR(thm2_c0(in), want, 1e-12 * want);
}

TEST(BoundThm2, DecayExponentOneThird) {
  TheoryInputs in;
  in.wd_mu = 0;
  in.moment_order = kInf;
  EXPECT_EQ(thm2_decay_exponent(in), 1.0 / 3.0);
  in.moment_order = 2;
  EXPECT_DOUBLE_EQ(thm2_decay_exponent(in), 0.5 / 3.0);
}

TEST(BoundThm2, DirectFormula) {
  TheoryInputs in;
  in.moment_order = 4;
  in.wd_mu = 1;
  in.smoothness = 10;
  const double q = 0.75, n = 1e6;
  const double c = 2 + thm2_c0(in) + 6 * in.lipschitz * in.moment_bound;
  const double want = c / std::pow(n, q * 2.0 / 5.0) + 3 / n + 2 / std::pow(n, 10.0 / 11.0 * q);
  EXPECT_NEAR(bound_thm2(in, 1000000).value, want, 1e-12 * want);
}

TEST(BoundThm2, DecreasingAndSmoothnessWarning) {
  TheoryInputs in;
  double prev = kInf;
  for (std::size_t n : log_grid(1e2, 1e8, 10)) {
    const auto b = bound_thm2(in, n);
    EXPECT_TRUE(std::isfinite(b.value) && b.value > 0);
    EXPECT_LT(b.value, prev);
    EXPECT_TRUE(b.smoothness_ok);
    EXPECT_TRUE(b.warnings.empty());
    prev = b.value;
  }
  in.smoothness = 0.5;
  const auto w = bound_thm2(in, 1000);
  EXPECT_FALSE(w.smoothness_ok);
  EXPECT_FALSE(w.warnings.empty());
  EXPECT_THROW(bound_thm2(in, 2), TooSmallNError);
}

TEST(Assumptions, SmoothnessThresholdExample) {
  TheoryInputs in;
  in.wd_mu = 0;
  in.moment_order = 2;
  in.dim = 1;
  EXPECT_NEAR(thm2_smoothness_threshold(in), 0.5, 1e-15);
  in.smoothness = 1;
  const auto rep = check_assumptions(in);
  ASSERT_NE(rep.find("thm2_smoothness"), nullptr);
  EXPECT_TRUE(rep.find("thm2_smoothness")->ok);
  in.moment_order = kInf;
  EXPECT_NEAR(thm2_smoothness_threshold(in), 2.0, 1e-15);
}

TEST(Assumptions, ThresholdLimitMatchesLargeR) {
  TheoryInputs in;
  in.wd_mu = 1.5;
  in.dim = 2;
  in.moment_order = kInf;
  const double lim = thm2_smoothness_threshold(in);
  in.moment_order = 1e12;
  EXPECT_NEAR(thm2_smoothness_threshold(in), lim, 1e-9);
}

TEST(Assumptions, Flags) {
  TheoryInputs in;
  EXPECT_TRUE(check_assumptions(in).all_ok());
  in.moment_order = 1;
  auto rep = check_assumptions(in);
  EXPECT_FALSE(rep.find("A5_moment_order")->ok);
  EXPECT_FALSE(rep.all_ok());

  in = TheoryInputs{};
  in.log_exponent = 3;
  EXPECT_FALSE(check_assumptions(in).find("thm1_log_exponent")->ok);

  in = TheoryInputs{};
  EXPECT_FALSE(check_assumptions(in, LossSpec::l2()).find("A2_lipschitz")->ok);
  EXPECT_TRUE(check_assumptions(in, LossSpec::huber()).find("A2_lipschitz")->ok);

  in.mixing_c = -1;
  EXPECT_FALSE(check_assumptions(in).find("positivity")->ok);

  in = TheoryInputs{};
  in.holder_bound = 2;
  in.output_cap = 1;
  EXPECT_FALSE(check_assumptions(in).find("output_cap_exceeds_holder_bound")->ok);
  in.output_cap = 3;
  EXPECT_TRUE(check_assumptions(in).find("output_cap_exceeds_holder_bound")->ok);
}

TEST(LogGrid, EndpointsAndSpacing) {
  const auto g = log_grid(1e3, 1e8, 1);
  EXPECT_EQ(g, (std::vector<std::size_t>{1000, 10000, 100000, 1000000, 10000000, 100000000}));
  const auto h = log_grid(1e3, 1e8, 10);
  EXPECT_EQ(h.size(), 51u);
  EXPECT_EQ(h.back(), 100000000u);
}
