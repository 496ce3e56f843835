#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "rwdnn/error.hpp"

namespace rwdnn {

enum class LossFamily { l1, huber, l2 };

/// Loss family with its Huber threshold. The Huber default 1.345 is the
/// usual 95%-efficiency tuning constant under Gaussian noise.
struct LossSpec {
  LossFamily family = LossFamily::l1;
  double delta = 1.345;

  static LossSpec l1() { return {LossFamily::l1, 1.345}; }
  static LossSpec huber(double delta = 1.345) { return {LossFamily::huber, delta}; }
  static LossSpec l2() { return {LossFamily::l2, 1.345}; }

  void validate() const {
    if (family == LossFamily::huber && !(delta > 0.0 && std::isfinite(delta))) {
      throw InvalidSpecError("Huber delta must be positive and finite");
    }
  }

  friend bool operator==(const LossSpec&, const LossSpec&) = default;
};

inline std::string to_string(LossFamily f) {
  switch (f) {
    case LossFamily::l1: return "l1";
    case LossFamily::huber: return "huber";
    case LossFamily::l2: return "l2";
  }
  return "?";
}

inline LossFamily parse_loss_family(std::string_view s) {
  if (s == "l1") return LossFamily::l1;
  if (s == "huber") return LossFamily::huber;
  if (s == "l2") return LossFamily::l2;
  throw InvalidSpecError("unknown loss '" + std::string(s) + "' (expected l1, huber or l2)");
}

namespace detail {
inline void require_finite(double y, double target) {
  if (!std::isfinite(y) || !std::isfinite(target)) throw NumericError("non-finite loss argument");
}
}  // namespace detail

/// l(y, y') for prediction y and target y'.
inline double loss(const LossSpec& spec, double y, double target) {
  detail::require_finite(y, target);
  const double r = y - target;
  const double a = std::abs(r);
  switch (spec.family) {
    case LossFamily::l1:
      return a;
    case LossFamily::huber:
      return a <= spec.delta ? 0.5 * r * r : spec.delta * a - 0.5 * spec.delta * spec.delta;
    case LossFamily::l2:
      return r * r;
  }
  return 0.0;
}

/// Subgradient in the prediction argument; sign(0) is taken as 0.
inline double dloss_dpred(const LossSpec& spec, double y, double target) {
  detail::require_finite(y, target);
  const double r = y - target;
  const double sgn = static_cast<double>((r > 0.0) - (r < 0.0));
  switch (spec.family) {
    case LossFamily::l1:
      return sgn;
    case LossFamily::huber:
      return std::abs(r) <= spec.delta ? r : spec.delta * sgn;
    case LossFamily::l2:
      return 2.0 * r;
  }
  return 0.0;
}

/// Global Lipschitz constant in the prediction argument, or nullopt when
/// the loss is not globally Lipschitz (L2).
inline std::optional<double> lipschitz_constant(const LossSpec& spec) {
  switch (spec.family) {
    case LossFamily::l1: return 1.0;
    case LossFamily::huber: return spec.delta;
    case LossFamily::l2: return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace rwdnn
