#pragma once

// Nonlinear autoregressive processes Y_t = f(Y_{t-1}, ..., Y_{t-p}) + e_t
// with i.i.d. innovations, and their embedding into supervised pairs
// X_t = (Y_{t-1}, ..., Y_{t-p}), target Y_t.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "rwdnn/error.hpp"
#include "rwdnn/rng.hpp"

namespace rwdnn {

// ---------------------------------------------------------------------------
// Innovations

struct InnovationLaw {
  enum class Kind { gaussian, student_t, cauchy, zero };
  Kind kind = Kind::gaussian;
  double df = 2.0;  // student_t only

  static InnovationLaw gaussian() { return {Kind::gaussian, 0.0}; }
  static InnovationLaw student_t(double df) { return {Kind::student_t, df}; }
  static InnovationLaw cauchy() { return {Kind::cauchy, 0.0}; }
  /// Degenerate e_t = 0, for deterministic checks of the skeleton.
  static InnovationLaw zero() { return {Kind::zero, 0.0}; }

  void validate() const {
    if (kind == Kind::student_t && !(df > 0.0 && std::isfinite(df))) {
      throw InvalidSpecError("Student t degrees of freedom must be positive");
    }
  }

  friend bool operator==(const InnovationLaw&, const InnovationLaw&) = default;
};

/// Short tag used in CLI flags and CSV output: gauss, t<df>, cauchy, none.
inline std::string to_string(const InnovationLaw& law) {
  switch (law.kind) {
    case InnovationLaw::Kind::gaussian: return "gauss";
    case InnovationLaw::Kind::cauchy: return "cauchy";
    case InnovationLaw::Kind::zero: return "none";
    case InnovationLaw::Kind::student_t: {
      std::ostringstream os;
      os << 't' << law.df;
      return os.str();
    }
  }
  return "?";
}

inline InnovationLaw parse_innovation_law(std::string_view s) {
  if (s == "gauss" || s == "gaussian" || s == "normal") return InnovationLaw::gaussian();
  if (s == "cauchy") return InnovationLaw::cauchy();
  if (s == "none" || s == "zero") return InnovationLaw::zero();
  if (s.size() > 1 && s.front() == 't') {
    const std::string rest(s.substr(1));
    std::size_t used = 0;
    double df = 0.0;
    try {
      df = std::stod(rest, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == rest.size()) {
      auto law = InnovationLaw::student_t(df);
      law.validate();
      return law;
    }
  }
  throw InvalidSpecError("unknown error law '" + std::string(s) +
                         "' (expected gauss, t<df>, cauchy or none)");
}

/// Draws innovations from one law. Student t is generated as
/// Z / sqrt(chi2_df / df); Cauchy as tan(pi (U - 1/2)).
class InnovationSampler {
 public:
  explicit InnovationSampler(InnovationLaw law) : law_(law) {
    law_.validate();
    if (law_.kind == InnovationLaw::Kind::student_t) {
      chi2_ = std::chi_squared_distribution<double>(law_.df);
    }
  }

  double operator()(Rng& rng) {
    switch (law_.kind) {
      case InnovationLaw::Kind::gaussian:
        return normal_(rng);
      case InnovationLaw::Kind::student_t: {
        const double z = normal_(rng);
        const double w = chi2_(rng);
        return z / std::sqrt(w / law_.df);
      }
      case InnovationLaw::Kind::cauchy:
        return std::tan(std::numbers::pi * (unif_(rng) - 0.5));
      case InnovationLaw::Kind::zero:
        return 0.0;
    }
    return 0.0;
  }

 private:
  InnovationLaw law_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::chi_squared_distribution<double> chi2_{1.0};
  std::uniform_real_distribution<double> unif_{0.0, 1.0};
};

inline double sample_innovation(const InnovationLaw& law, Rng& rng) {
  InnovationSampler sampler(law);
  return sampler(rng);
}

// ---------------------------------------------------------------------------
// Regression functions

/// Threshold AR skeleton; the second lag does not enter.
inline double f_dgp1(double y1, double /*y2*/, double y3) {
  return 0.5 - 0.5 * std::max(y1, 0.0) + 0.2 * std::min(y1, 0.0) + 0.15 * y3;
}

/// Exponential AR skeleton.
inline double f_dgp2(double y1, double y2) {
  const double e = std::exp(-y1 * y1);
  return 0.75 + (0.8 - 0.2 * e) * y1 + (-0.2 + 0.3 * e) * y2;
}

enum class RegressionFunction { dgp1, dgp2, custom };

inline std::string to_string(RegressionFunction f) {
  switch (f) {
    case RegressionFunction::dgp1: return "dgp1";
    case RegressionFunction::dgp2: return "dgp2";
    case RegressionFunction::custom: return "custom";
  }
  return "?";
}

/// Complete description of a simulated process.
///
/// `alpha` holds the coefficients of a linear growth bound
/// |f(x)| <= sum_i alpha_i |x_i| + c for large |x|; sum alpha_i < 1 is the
/// classical sufficient condition for a geometrically mixing stationary
/// solution.
struct DgpSpec {
  std::size_t order = 1;
  RegressionFunction function = RegressionFunction::custom;
  std::function<double(std::span<const double>)> custom;  // lags (Y_{t-1}, ..., Y_{t-p})
  InnovationLaw law = InnovationLaw::gaussian();
  std::size_t burn_in = 500;
  std::vector<double> alpha;
  std::uint64_t seed = 0;

  static DgpSpec dgp1(InnovationLaw law, std::uint64_t seed = 0) {
    DgpSpec s;
    s.order = 3;
    s.function = RegressionFunction::dgp1;
    s.law = law;
    s.alpha = {0.5, 0.0, 0.15};
    s.seed = seed;
    return s;
  }

  // For |Y_{t-1}| large the skeleton behaves like 0.75 + 0.8 Y_{t-1} - 0.2 Y_{t-2},
  // so the tightest growth coefficients are (0.8, 0.2).
  static DgpSpec dgp2(InnovationLaw law, std::uint64_t seed = 0) {
    DgpSpec s;
    s.order = 2;
    s.function = RegressionFunction::dgp2;
    s.law = law;
    s.alpha = {0.8, 0.2};
    s.seed = seed;
    return s;
  }

  static DgpSpec by_name(std::string_view name, InnovationLaw law, std::uint64_t seed = 0) {
    if (name == "dgp1") return dgp1(law, seed);
    if (name == "dgp2") return dgp2(law, seed);
    throw InvalidSpecError("unknown DGP '" + std::string(name) + "' (expected dgp1 or dgp2)");
  }

  void validate() const {
    if (order < 1) throw InvalidSpecError("autoregressive order must be >= 1");
    if (function == RegressionFunction::dgp1 && order != 3) {
      throw InvalidSpecError("dgp1 has order 3");
    }
    if (function == RegressionFunction::dgp2 && order != 2) {
      throw InvalidSpecError("dgp2 has order 2");
    }
    if (function == RegressionFunction::custom && !custom) {
      throw InvalidSpecError("custom DGP requires a regression function");
    }
    if (!alpha.empty() && alpha.size() != order) {
      throw InvalidSpecError("alpha must have one coefficient per lag");
    }
    for (double a : alpha) {
      if (!(a >= 0.0)) throw InvalidSpecError("alpha coefficients must be nonnegative");
    }
    law.validate();
  }

  /// f evaluated at lags (Y_{t-1}, ..., Y_{t-p}).
  double regression(std::span<const double> lags) const {
    switch (function) {
      case RegressionFunction::dgp1: return f_dgp1(lags[0], lags[1], lags[2]);
      case RegressionFunction::dgp2: return f_dgp2(lags[0], lags[1]);
      case RegressionFunction::custom: return custom(lags);
    }
    return 0.0;
  }

  std::string tag() const { return to_string(function); }
};

struct StationarityCheck {
  bool stationary = false;
  double margin = 0.0;  // 1 - sum(alpha)
};

inline StationarityCheck check_stationarity(const DgpSpec& spec) {
  if (spec.alpha.empty()) throw InvalidSpecError("stationarity check needs alpha coefficients");
  double sum = 0.0;
  for (double a : spec.alpha) sum += a;
  return {sum < 1.0, 1.0 - sum};
}

// ---------------------------------------------------------------------------
// Simulation and embedding

struct Trajectory {
  std::vector<double> values;
  std::string dgp_tag;
  std::string law_tag;

  std::size_t size() const noexcept { return values.size(); }
};

/// Runs the recursion from p zero lags for burn_in + n steps and keeps the
/// last n values. Deterministic in `spec.seed`.
inline Trajectory simulate(const DgpSpec& spec, std::size_t n) {
  spec.validate();
  const std::size_t p = spec.order;
  if (n < p + 1) throw InsufficientDataError("trajectory length must be at least p + 1");
  Rng rng(spec.seed);
  InnovationSampler eps(spec.law);

  const std::size_t total = spec.burn_in + n;
  std::vector<double> y(p + total, 0.0);
  std::vector<double> lags(p);
  constexpr double kExplode = 1e100;
  for (std::size_t t = p; t < y.size(); ++t) {
    for (std::size_t i = 0; i < p; ++i) lags[i] = y[t - 1 - i];
    const double v = spec.regression(lags) + eps(rng);
    if (!std::isfinite(v) || std::abs(v) > kExplode) {
      throw DivergenceError("simulation diverged at step " + std::to_string(t - p + 1));
    }
    y[t] = v;
  }
  Trajectory out;
  out.values.assign(y.end() - static_cast<std::ptrdiff_t>(n), y.end());
  out.dgp_tag = spec.tag();
  out.law_tag = to_string(spec.law);
  return out;
}

/// Supervised pairs stored column-wise: inputs is p x count, targets has
/// length count.
struct SupervisedPairs {
  Eigen::MatrixXd inputs;
  Eigen::VectorXd targets;

  std::size_t size() const noexcept { return static_cast<std::size_t>(targets.size()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(inputs.rows()); }
  bool empty() const noexcept { return targets.size() == 0; }

  std::span<const double> x(std::size_t i) const {
    return {inputs.data() + static_cast<Eigen::Index>(i) * inputs.rows(),
            static_cast<std::size_t>(inputs.rows())};
  }
  double y(std::size_t i) const { return targets(static_cast<Eigen::Index>(i)); }
};

/// X_i = (Y_{i-1}, ..., Y_{i-p}), target Y_i for i = p+1..n, in time order.
inline SupervisedPairs embed(std::span<const double> values, std::size_t p) {
  if (p < 1) throw InvalidSpecError("embedding order must be >= 1");
  if (values.size() <= p) {
    throw InsufficientDataError("trajectory of length " + std::to_string(values.size()) +
                                " is too short for order " + std::to_string(p));
  }
  const std::size_t count = values.size() - p;
  SupervisedPairs out;
  out.inputs.resize(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(count));
  out.targets.resize(static_cast<Eigen::Index>(count));
  for (std::size_t j = 0; j < count; ++j) {
    const std::size_t t = j + p;
    for (std::size_t i = 0; i < p; ++i) {
      out.inputs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[t - 1 - i];
    }
    out.targets(static_cast<Eigen::Index>(j)) = values[t];
  }
  return out;
}

inline SupervisedPairs embed(const Trajectory& traj, std::size_t p) { return embed(traj.values, p); }

}  // namespace rwdnn
