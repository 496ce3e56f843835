#pragma once

// Closed-form quantities behind the excess-risk guarantees for sparse,
// norm-constrained ReLU networks trained by ERM on dependent data:
// effective sample size under exponential strong mixing, truncation,
// architecture schedules, the covering-number bound, and the right-hand
// sides of the excess-risk bounds under strong mixing (uses n_alpha) and
// under psi-weak dependence (uses n).
//
// A moment order r = +inf is represented by IEEE infinity; then
// (1 - 1/r) = 1 and m^{1/r} = 1.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rwdnn/error.hpp"
#include "rwdnn/losses.hpp"

namespace rwdnn {
namespace theory {

/// The four weak-dependence coefficient families.
enum class PsiKind { theta, eta, kappa, lambda };

inline std::string to_string(PsiKind k) {
  switch (k) {
    case PsiKind::theta: return "theta";
    case PsiKind::eta: return "eta";
    case PsiKind::kappa: return "kappa";
    case PsiKind::lambda: return "lambda";
  }
  return "?";
}

inline PsiKind parse_psi_kind(std::string_view s) {
  if (s == "theta") return PsiKind::theta;
  if (s == "eta") return PsiKind::eta;
  if (s == "kappa") return PsiKind::kappa;
  if (s == "lambda") return PsiKind::lambda;
  throw InvalidSpecError("unknown psi kind '" + std::string(s) + "'");
}

/// Psi(u, v) for the chosen dependence family.
inline double psi_value(PsiKind kind, double u, double v) {
  if (u < 1 || v < 1) throw InvalidSpecError("psi arguments must be >= 1");
  switch (kind) {
    case PsiKind::theta: return 2.0 * v;
    case PsiKind::eta: return u + v;
    case PsiKind::kappa: return u * v;
    case PsiKind::lambda: return (u + v + u * v) / 2.0;
  }
  return 0.0;
}

/// Which constants feed the weak-dependence bound: `proof` uses
/// C1 = 16 K^2 beta^2 Psi L1 and C2 = 4 K beta L2 max(2^{3+mu}/Psi, 1);
/// `statement` doubles them to 32 and 8.
enum class ConstantsVariant { proof, statement };

/// Every symbol entering the schedules and bounds. Defaults describe a
/// smooth target (s = 3) in dimension 1 with all moments finite, an
/// exponentially mixing process and mu = 0 weak dependence.
struct TheoryInputs {
  double smoothness = 3.0;                                     // s
  std::size_t dim = 1;                                         // d
  double moment_order = std::numeric_limits<double>::infinity();  // r
  double lipschitz = 1.0;                                      // K_l
  double mixing_c = 100.0;                                     // c
  double mixing_gamma = 1.0;                                   // gamma
  double mixing_alpha_bar = 1.0;                               // alpha bar
  double wd_l1 = 1.0;                                          // L_1
  double wd_l2 = 1.0;                                          // L_2
  double wd_mu = 0.0;                                          // mu
  double moment_bound = 1.0;                                   // M
  double log_exponent = 3.01;                                  // nu
  double depth0 = 1.0, width0 = 1.0, sparsity0 = 1.0, norm0 = 1.0;  // L0, N0, S0, B0
  PsiKind psi = PsiKind::theta;
  std::optional<double> holder_bound;  // K, radius of the Holder ball
  std::optional<double> output_cap;    // F_n supplied by the caller (strong-mixing case)
  ConstantsVariant constants = ConstantsVariant::proof;
};

inline double one_minus_inv_r(double r) { return std::isinf(r) ? 1.0 : 1.0 - 1.0 / r; }

/// x^{1/r}, equal to 1 for r = inf.
inline double root_r(double x, double r) { return std::isinf(r) ? 1.0 : std::pow(x, 1.0 / r); }

// ---------------------------------------------------------------------------
// Effective sample size and truncation

namespace detail {
// Ceiling that tolerates pow() landing a few ulps above an exact integer.
inline double stable_ceil(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-12 * std::max(1.0, std::abs(x))) return r;
  return std::ceil(x);
}
}  // namespace detail

/// floor(n / ceil((8n/c)^{1/(gamma+1)})), possibly 0.
inline std::size_t effective_sample_size_raw(std::size_t n, double c, double gamma) {
  if (n < 1) throw InvalidSpecError("sample size must be >= 1");
  if (!(c > 0.0) || !(gamma > 0.0)) throw InvalidSpecError("mixing constants c, gamma must be positive");
  const double block = detail::stable_ceil(std::pow(8.0 * static_cast<double>(n) / c, 1.0 / (gamma + 1.0)));
  return static_cast<std::size_t>(std::floor(static_cast<double>(n) / block));
}

/// Effective sample size n^(alpha) under alpha(j) = alpha_bar exp(-c j^gamma).
inline std::size_t n_alpha(std::size_t n, double c, double gamma) {
  const std::size_t m = effective_sample_size_raw(n, c, gamma);
  if (m < 1) {
    throw TooSmallNError("effective sample size is 0 for n = " + std::to_string(n));
  }
  return m;
}

/// T_beta(y) = y clipped to [-beta, beta].
inline double truncate(double y, double beta) {
  if (!(beta > 0.0)) throw InvalidSpecError("truncation level must be positive");
  return std::clamp(y, -beta, beta);
}

/// Truncation level used in the analysis: max(F_n, n_alpha^{1/r}) in the
/// strong-mixing case (selector 1), n^{(mu+1)/(r(2mu+3))} in the
/// weak-dependence case (selector 2).
inline double beta_n(const TheoryInputs& in, std::size_t n, int theorem, double output_cap = 0.0) {
  const double r = in.moment_order;
  if (theorem == 1) {
    const auto m = static_cast<double>(n_alpha(n, in.mixing_c, in.mixing_gamma));
    return std::max(output_cap, root_r(m, r));
  }
  if (theorem == 2) {
    const double mu = in.wd_mu;
    if (std::isinf(r)) return 1.0;
    return std::pow(static_cast<double>(n), (mu + 1.0) / (r * (2.0 * mu + 3.0)));
  }
  throw InvalidSpecError("theorem must be 1 or 2");
}

// ---------------------------------------------------------------------------
// Architecture schedules

struct ArchitectureSchedule {
  double effective_n = 0;  // m: n_alpha (strong mixing) or n (weak dependence)
  double depth = 0;        // L_n
  double width = 0;        // N_n
  double sparsity = 0;     // S_n
  double norm = 0;         // B_n
  std::optional<double> output_cap;  // F_n: user supplied (thm 1) or upper cap (thm 2)
  std::size_t depth_int = 0;     // ceil(L_n)
  std::size_t width_int = 0;     // ceil(N_n)
  std::size_t sparsity_int = 0;  // floor(S_n)
};

/// The schedule formulas shared by both dependence regimes, evaluated at an
/// effective sample size m.
inline ArchitectureSchedule schedule_at(const TheoryInputs& in, double m) {
  const double s = in.smoothness;
  const double d = static_cast<double>(in.dim);
  const double q = one_minus_inv_r(in.moment_order);
  const double lm = std::log(m);
  const double growth = std::pow(m, q * d / (s + d));
  ArchitectureSchedule out;
  out.effective_n = m;
  out.depth = q * s * in.depth0 / (s + d) * lm;
  out.width = in.width0 * growth;
  out.sparsity = q * s * in.sparsity0 / (s + d) * growth * lm;
  out.norm = in.norm0 * std::pow(m, q * 4.0 * s * (d / s + 1.0) / (s + d));
  out.depth_int = static_cast<std::size_t>(std::max(1.0, std::ceil(out.depth)));
  out.width_int = static_cast<std::size_t>(std::max(1.0, std::ceil(out.width)));
  out.sparsity_int = static_cast<std::size_t>(std::floor(out.sparsity));
  return out;
}

inline ArchitectureSchedule schedule_thm1(const TheoryInputs& in, std::size_t n) {
  const std::size_t m = n_alpha(n, in.mixing_c, in.mixing_gamma);
  if (m < 3) {
    throw TooSmallNError("strong-mixing schedule needs n_alpha >= 3 (got " + std::to_string(m) + ")");
  }
  auto out = schedule_at(in, static_cast<double>(m));
  out.output_cap = in.output_cap;
  return out;
}

inline ArchitectureSchedule schedule_thm2(const TheoryInputs& in, std::size_t n) {
  if (n < 3) throw TooSmallNError("weak-dependence schedule needs n >= 3");
  auto out = schedule_at(in, static_cast<double>(n));
  out.output_cap = beta_n(in, n, 2);
  return out;
}

// ---------------------------------------------------------------------------
// Covering numbers

struct CoveringBound {
  double log_value = 0;  // natural log of the covering-number bound
  bool vacuous = false;  // log argument <= 1
};

/// log of exp(2L(S+1) log(C_sigma L (N+1) max(B,1) / eps)).
inline CoveringBound covering_bound(double depth, double width, double norm, double sparsity,
                                    double c_sigma, double eps) {
  if (!(depth > 0 && width > 0 && norm > 0 && sparsity > 0 && c_sigma > 0 && eps > 0)) {
    throw InvalidSpecError("covering bound arguments must be positive");
  }
  const double arg = c_sigma * depth * (width + 1.0) * std::max(norm, 1.0) / eps;
  return {2.0 * depth * (sparsity + 1.0) * std::log(arg), arg <= 1.0};
}

// ---------------------------------------------------------------------------
// Excess-risk bounds

namespace detail {
inline double log_sum_exp(std::initializer_list<double> logs) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : logs) mx = std::max(mx, v);
  if (std::isinf(mx)) return mx;
  double acc = 0.0;
  for (double v : logs) acc += std::exp(v - mx);
  return mx + std::log(acc);
}
}  // namespace detail

/// C(K_l, alpha_bar, M) = 64/3 K_l (1 + 4 e^{-2} alpha_bar) + 6 K_l M.
inline double thm1_constant(const TheoryInputs& in) {
  const double k = in.lipschitz;
  return 64.0 / 3.0 * k * (1.0 + 4.0 * std::exp(-2.0) * in.mixing_alpha_bar) + 6.0 * k * in.moment_bound;
}

/// Natural log of the strong-mixing bound
/// ((log m)^nu + K)/m^{a} + C/m^{1-1/r} + 3K/m, a = s/(s+d) (1-1/r), m = n_alpha.
inline double log_bound_thm1(const TheoryInputs& in, std::size_t n) {
  const std::size_t mi = n_alpha(n, in.mixing_c, in.mixing_gamma);
  if (mi < 3) throw TooSmallNError("strong-mixing bound needs n_alpha >= 3 (got " + std::to_string(mi) + ")");
  const double m = static_cast<double>(mi);
  const double lm = std::log(m);
  const double q = one_minus_inv_r(in.moment_order);
  const double a = in.smoothness / (in.smoothness + static_cast<double>(in.dim)) * q;
  const double k = in.lipschitz;
  const double t1 = std::log(std::pow(lm, in.log_exponent) + k) - a * lm;
  const double t2 = std::log(thm1_constant(in)) - q * lm;
  const double t3 = std::log(3.0 * k) - lm;
  return detail::log_sum_exp({t1, t2, t3});
}

inline double bound_thm1(const TheoryInputs& in, std::size_t n) { return std::exp(log_bound_thm1(in, n)); }

/// (1 - 1/r)(mu + 1)/(2 mu + 3): decay exponent of the leading term.
inline double thm2_decay_exponent(const TheoryInputs& in) {
  const double mu = in.wd_mu;
  return one_minus_inv_r(in.moment_order) * (mu + 1.0) / (2.0 * mu + 3.0);
}

/// Lower bound on s required by the weak-dependence bound:
/// max{ d((r-1)(2mu+3)(mu+2)/(r(2mu+3)-(mu+1)) - 1), d((1-1/r)(2mu+3) - 1) }.
inline double thm2_smoothness_threshold(const TheoryInputs& in) {
  const double mu = in.wd_mu;
  const double r = in.moment_order;
  const double d = static_cast<double>(in.dim);
  const double ratio = std::isinf(r) ? (mu + 2.0)
                                     : (r - 1.0) * (2.0 * mu + 3.0) * (mu + 2.0) /
                                           (r * (2.0 * mu + 3.0) - (mu + 1.0));
  return std::max(d * (ratio - 1.0), d * (one_minus_inv_r(r) * (2.0 * mu + 3.0) - 1.0));
}

/// C_0(mu, K_l, L1, L2) = 2^{(mu+1)/(2mu+3)} C1^{(mu+2)/(2mu+3)} / C2^{1/(2mu+3)},
/// with the beta_n factors of C1 and C2 divided out.
inline double thm2_c0(const TheoryInputs& in) {
  if (!(in.wd_l2 > 0.0)) throw InvalidSpecError("weak-dependence constant L2 must be positive");
  const double mu = in.wd_mu;
  const double k = in.lipschitz;
  const double psi = psi_value(in.psi, 1, 1);
  const double a = in.constants == ConstantsVariant::proof ? 16.0 : 32.0;
  const double b = in.constants == ConstantsVariant::proof ? 4.0 : 8.0;
  const double c1 = a * k * k * psi * in.wd_l1;
  const double c2 = b * k * in.wd_l2 * std::max(std::pow(2.0, 3.0 + mu) / psi, 1.0);
  const double den = 2.0 * mu + 3.0;
  return std::pow(2.0, (mu + 1.0) / den) * std::pow(c1, (mu + 2.0) / den) / std::pow(c2, 1.0 / den);
}

/// Full leading constant C = 2 + C_0 + 6 K_l M.
inline double thm2_constant(const TheoryInputs& in) {
  return 2.0 + thm2_c0(in) + 6.0 * in.lipschitz * in.moment_bound;
}

struct Thm2Bound {
  double value = 0;
  double log_value = 0;
  bool smoothness_ok = true;
  double smoothness_threshold = 0;
  std::vector<std::string> warnings;
};

/// C/n^{(1-1/r)(mu+1)/(2mu+3)} + 3K/n + 2K/n^{s/(s+d)(1-1/r)}.
inline Thm2Bound bound_thm2(const TheoryInputs& in, std::size_t n) {
  if (n < 3) throw TooSmallNError("weak-dependence bound needs n >= 3");
  const double ln = std::log(static_cast<double>(n));
  const double q = one_minus_inv_r(in.moment_order);
  const double a = in.smoothness / (in.smoothness + static_cast<double>(in.dim)) * q;
  const double k = in.lipschitz;
  Thm2Bound out;
  out.log_value = detail::log_sum_exp({std::log(thm2_constant(in)) - thm2_decay_exponent(in) * ln,
                                       std::log(3.0 * k) - ln, std::log(2.0 * k) - a * ln});
  out.value = std::exp(out.log_value);
  out.smoothness_threshold = thm2_smoothness_threshold(in);
  out.smoothness_ok = in.smoothness > out.smoothness_threshold;
  if (!out.smoothness_ok) {
    out.warnings.push_back("smoothness s = " + std::to_string(in.smoothness) +
                           " does not exceed the required " + std::to_string(out.smoothness_threshold));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Assumption report

struct AssumptionCheck {
  std::string name;
  bool ok = false;
  std::string detail;
};

struct AssumptionReport {
  std::vector<AssumptionCheck> checks;

  bool all_ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.ok; });
  }
  const AssumptionCheck* find(std::string_view name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

/// Purely arithmetic checks of the hypotheses; nothing is estimated from
/// data. Passing a loss checks that it is globally Lipschitz.
inline AssumptionReport check_assumptions(const TheoryInputs& in, std::optional<LossSpec> loss = {}) {
  AssumptionReport rep;
  auto add = [&](std::string name, bool ok, std::string detail) {
    rep.checks.push_back({std::move(name), ok, std::move(detail)});
  };

  const bool positive = in.smoothness > 0 && in.dim >= 1 && in.mixing_c > 0 && in.mixing_gamma > 0 &&
                        in.mixing_alpha_bar > 0 && in.moment_bound > 0 && in.depth0 > 0 &&
                        in.width0 > 0 && in.sparsity0 > 0 && in.norm0 > 0;
  add("positivity", positive, "s, d, c, gamma, alpha_bar, M, L0, N0, S0, B0 must be positive");

  bool lipschitz_ok = in.lipschitz > 0 && std::isfinite(in.lipschitz);
  std::string lip_detail = "K_l = " + std::to_string(in.lipschitz);
  if (loss) {
    const auto k = lipschitz_constant(*loss);
    if (!k) {
      lipschitz_ok = false;
      lip_detail = to_string(loss->family) + " loss is not globally Lipschitz";
    } else {
      lip_detail = to_string(loss->family) + " loss, K_l = " + std::to_string(*k);
    }
  }
  add("A2_lipschitz", lipschitz_ok, lip_detail);

  add("A3_weak_dependence", in.wd_l1 >= 0 && in.wd_l2 >= 0 && in.wd_mu >= 0,
      "L1, L2, mu must be nonnegative");
  add("A4_mixing", in.mixing_c > 0 && in.mixing_gamma > 0 && in.mixing_alpha_bar > 0,
      "alpha(j) = alpha_bar exp(-c j^gamma) with c, gamma, alpha_bar > 0");
  add("A5_moment_order", in.moment_order > 1.0, "r = " + std::to_string(in.moment_order) + " must exceed 1");
  add("thm1_log_exponent", in.log_exponent > 3.0, "nu = " + std::to_string(in.log_exponent) + " must exceed 3");

  if (in.moment_order > 1.0) {
    const double th = thm2_smoothness_threshold(in);
    add("thm2_smoothness", in.smoothness > th,
        "s = " + std::to_string(in.smoothness) + " must exceed " + std::to_string(th));
  } else {
    add("thm2_smoothness", false, "undefined for r <= 1");
  }

  if (in.holder_bound && in.output_cap) {
    add("output_cap_exceeds_holder_bound", *in.output_cap > *in.holder_bound,
        "F_n must exceed the Holder radius K");
  }
  return rep;
}

/// Log-spaced integer grid from lo to hi with `per_decade` points per decade.
inline std::vector<std::size_t> log_grid(double lo, double hi, int per_decade) {
  if (!(lo >= 1 && hi >= lo && per_decade >= 1)) throw InvalidSpecError("invalid grid");
  std::vector<std::size_t> out;
  const double first = std::log10(lo);
  const auto steps = static_cast<int>(std::floor((std::log10(hi) - first) * per_decade + 1e-9));
  for (int i = 0; i <= steps; ++i) {
    const double e = first + static_cast<double>(i) / per_decade;
    const auto v = static_cast<std::size_t>(std::llround(std::pow(10.0, e)));
    if (out.empty() || v > out.back()) out.push_back(v);
  }
  return out;
}

}  // namespace theory
}  // namespace rwdnn
