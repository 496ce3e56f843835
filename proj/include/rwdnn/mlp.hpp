#pragma once

// Fully connected feedforward networks with scalar output.
//
// A network with L hidden layers and widths p = (p_0, ..., p_{L+1}) computes
//   h(x) = A_{L+1} o sigma o A_L o ... o sigma o A_1 (x),  A_k(z) = W_k z + b_k
// with W_k of shape p_k x p_{k-1}. All parameters live in one contiguous
// vector theta = (vec(W_1), b_1, ..., vec(W_{L+1}), b_{L+1}), where vec()
// stacks columns; the per-layer matrices are Eigen maps into that storage.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rwdnn/error.hpp"
#include "rwdnn/rng.hpp"

namespace rwdnn {

enum class Activation { relu, identity };

inline const char* to_string(Activation a) {
  return a == Activation::relu ? "relu" : "identity";
}

/// Depth and width vector of a network. Widths always have length depth+2
/// and the last entry is the scalar output.
class Architecture {
 public:
  Architecture() : Architecture(std::vector<std::size_t>{1, 1}) {}

  explicit Architecture(std::vector<std::size_t> widths) : widths_(std::move(widths)) {
    if (widths_.size() < 2) {
      throw ShapeError("architecture needs at least input and output widths");
    }
    for (std::size_t w : widths_) {
      if (w < 1) throw ShapeError("architecture widths must be >= 1");
    }
    if (widths_.back() != 1) {
      throw ShapeError("architecture output width must be 1");
    }
    offsets_.reserve(widths_.size());
    std::size_t off = 0;
    for (std::size_t k = 1; k < widths_.size(); ++k) {
      offsets_.push_back(off);
      off += widths_[k] * widths_[k - 1] + widths_[k];
    }
    offsets_.push_back(off);
  }

  /// `input` -> hidden[0] -> ... -> hidden.back() -> 1
  static Architecture mlp(std::size_t input, const std::vector<std::size_t>& hidden) {
    std::vector<std::size_t> w;
    w.reserve(hidden.size() + 2);
    w.push_back(input);
    w.insert(w.end(), hidden.begin(), hidden.end());
    w.push_back(1);
    return Architecture(std::move(w));
  }

  /// Number of hidden layers L.
  std::size_t depth() const noexcept { return widths_.size() - 2; }
  /// Number of affine maps, L + 1.
  std::size_t layers() const noexcept { return widths_.size() - 1; }
  std::size_t input_dim() const noexcept { return widths_.front(); }
  std::size_t width(std::size_t k) const { return widths_.at(k); }
  const std::vector<std::size_t>& widths() const noexcept { return widths_; }

  /// Largest hidden width; 0 for a purely affine network.
  std::size_t max_hidden_width() const noexcept {
    std::size_t m = 0;
    for (std::size_t k = 1; k + 1 < widths_.size(); ++k) m = std::max(m, widths_[k]);
    return m;
  }

  std::size_t parameter_count() const noexcept { return offsets_.back(); }

  // Layer k is 1-based, matching A_1..A_{L+1}.
  std::size_t weight_offset(std::size_t k) const { return offsets_.at(k - 1); }
  std::size_t bias_offset(std::size_t k) const {
    return offsets_.at(k - 1) + widths_.at(k) * widths_.at(k - 1);
  }

  friend bool operator==(const Architecture& a, const Architecture& b) {
    return a.widths_ == b.widths_;
  }

 private:
  std::vector<std::size_t> widths_;
  std::vector<std::size_t> offsets_;
};

/// Parameters of a network together with its architecture.
///
/// Also used as the container for parameter gradients, which share the
/// exact layout.
class Network {
 public:
  using MatrixMap = Eigen::Map<Eigen::MatrixXd>;
  using ConstMatrixMap = Eigen::Map<const Eigen::MatrixXd>;
  using VectorMap = Eigen::Map<Eigen::VectorXd>;
  using ConstVectorMap = Eigen::Map<const Eigen::VectorXd>;

  Network() : Network(Architecture{}) {}

  explicit Network(Architecture arch, Activation act = Activation::relu)
      : arch_(std::move(arch)),
        activation_(act),
        theta_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(arch_.parameter_count()))) {}

  Network(Architecture arch, Eigen::VectorXd theta, Activation act = Activation::relu)
      : arch_(std::move(arch)), activation_(act), theta_(std::move(theta)) {
    if (static_cast<std::size_t>(theta_.size()) != arch_.parameter_count()) {
      throw ShapeError("theta has " + std::to_string(theta_.size()) + " entries, architecture needs " +
                       std::to_string(arch_.parameter_count()));
    }
  }

  /// Weights uniform on [-sqrt(6/fan_in), sqrt(6/fan_in)], biases zero.
  static Network he_uniform(Architecture arch, Rng& rng, Activation act = Activation::relu) {
    Network net(std::move(arch), act);
    for (std::size_t k = 1; k <= net.arch_.layers(); ++k) {
      const double bound = std::sqrt(6.0 / static_cast<double>(net.arch_.width(k - 1)));
      std::uniform_real_distribution<double> unif(-bound, bound);
      auto w = net.weights(k);
      // Column-major fill keeps the draw order equal to theta order.
      for (Eigen::Index j = 0; j < w.cols(); ++j)
        for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = unif(rng);
    }
    return net;
  }

  const Architecture& architecture() const noexcept { return arch_; }
  Activation activation() const noexcept { return activation_; }

  const Eigen::VectorXd& theta() const noexcept { return theta_; }
  Eigen::VectorXd& theta() noexcept { return theta_; }

  MatrixMap weights(std::size_t k) {
    return {theta_.data() + arch_.weight_offset(k), rows(k), cols(k)};
  }
  ConstMatrixMap weights(std::size_t k) const {
    return {theta_.data() + arch_.weight_offset(k), rows(k), cols(k)};
  }
  VectorMap bias(std::size_t k) { return {theta_.data() + arch_.bias_offset(k), rows(k)}; }
  ConstVectorMap bias(std::size_t k) const {
    return {theta_.data() + arch_.bias_offset(k), rows(k)};
  }

 private:
  Eigen::Index rows(std::size_t k) const { return static_cast<Eigen::Index>(arch_.width(k)); }
  Eigen::Index cols(std::size_t k) const { return static_cast<Eigen::Index>(arch_.width(k - 1)); }

  Architecture arch_;
  Activation activation_ = Activation::relu;
  Eigen::VectorXd theta_;
};

// ---------------------------------------------------------------------------
// Structural statistics

inline std::size_t count_nonzero(const Network& net) {
  const auto& t = net.theta();
  return static_cast<std::size_t>(std::count_if(t.data(), t.data() + t.size(),
                                                [](double v) { return v != 0.0; }));
}

inline double sup_norm(const Network& net) {
  return net.theta().size() == 0 ? 0.0 : net.theta().cwiseAbs().maxCoeff();
}

inline std::size_t depth(const Network& net) { return net.architecture().depth(); }

inline std::size_t max_width(const Network& net) { return net.architecture().max_hidden_width(); }

// ---------------------------------------------------------------------------
// Evaluation

/// Scratch space for batched forward/backward passes. Columns are samples.
struct BatchWorkspace {
  std::vector<Eigen::MatrixXd> pre;   // Z_k, k = 1..L+1 (index k-1)
  std::vector<Eigen::MatrixXd> post;  // sigma(Z_k) for hidden layers
  Eigen::MatrixXd delta;
  Eigen::MatrixXd delta_prev;
  Eigen::RowVectorXd raw_output;
  Eigen::RowVectorXd output;
};

namespace detail {

inline bool clamp_active(std::optional<double> clamp) {
  return clamp.has_value() && std::isfinite(*clamp);
}

inline void check_clamp(std::optional<double> clamp) {
  if (clamp && !(*clamp > 0.0)) throw InvalidSpecError("output clamp F must be positive");
}

}  // namespace detail

/// Batched forward pass. `inputs` is d x B; returns the B outputs and keeps
/// the intermediate activations in `ws` for a subsequent backward pass.
template <typename Derived>
const Eigen::RowVectorXd& forward_batch(const Network& net, const Eigen::MatrixBase<Derived>& inputs,
                                        BatchWorkspace& ws, std::optional<double> clamp = {}) {
  const auto& arch = net.architecture();
  if (static_cast<std::size_t>(inputs.rows()) != arch.input_dim()) {
    throw ShapeError("input has dimension " + std::to_string(inputs.rows()) + ", network expects " +
                     std::to_string(arch.input_dim()));
  }
  detail::check_clamp(clamp);
  const std::size_t layers = arch.layers();
  ws.pre.resize(layers);
  ws.post.resize(layers - 1);
  for (std::size_t k = 1; k <= layers; ++k) {
    auto& z = ws.pre[k - 1];
    if (k == 1) {
      z.noalias() = net.weights(k) * inputs;
    } else {
      z.noalias() = net.weights(k) * ws.post[k - 2];
    }
    z.colwise() += net.bias(k);
    if (k < layers) {
      if (net.activation() == Activation::relu) {
        ws.post[k - 1] = z.cwiseMax(0.0);
      } else {
        ws.post[k - 1] = z;
      }
    }
  }
  ws.raw_output = ws.pre.back().row(0);
  if (detail::clamp_active(clamp)) {
    ws.output = ws.raw_output.cwiseMax(-*clamp).cwiseMin(*clamp);
  } else {
    ws.output = ws.raw_output;
  }
  return ws.output;
}

/// Accumulates sum_i upstream_i * d h(x_i) / d theta into `grad` (a flat
/// vector in theta layout). Must follow `forward_batch` on the same inputs.
/// Subgradient conventions: ReLU'(0) = 0; the clamp passes no gradient
/// where |raw output| >= F.
template <typename Derived>
void backward_batch(const Network& net, const Eigen::MatrixBase<Derived>& inputs,
                    const Eigen::RowVectorXd& upstream, BatchWorkspace& ws, Eigen::VectorXd& grad,
                    std::optional<double> clamp = {}) {
  const auto& arch = net.architecture();
  const std::size_t layers = arch.layers();
  if (upstream.size() != inputs.cols() || ws.pre.size() != layers) {
    throw ShapeError("backward pass does not match the preceding forward pass");
  }
  if (static_cast<std::size_t>(grad.size()) != arch.parameter_count()) {
    throw ShapeError("gradient buffer has wrong size");
  }
  ws.delta = upstream;
  if (detail::clamp_active(clamp)) {
    const double f = *clamp;
    for (Eigen::Index i = 0; i < ws.delta.cols(); ++i) {
      if (std::abs(ws.raw_output(i)) >= f) ws.delta(0, i) = 0.0;
    }
  }
  for (std::size_t k = layers; k >= 1; --k) {
    Eigen::Map<Eigen::MatrixXd> gw(grad.data() + arch.weight_offset(k),
                                   static_cast<Eigen::Index>(arch.width(k)),
                                   static_cast<Eigen::Index>(arch.width(k - 1)));
    Eigen::Map<Eigen::VectorXd> gb(grad.data() + arch.bias_offset(k),
                                   static_cast<Eigen::Index>(arch.width(k)));
    if (k == 1) {
      gw.noalias() += ws.delta * inputs.transpose();
    } else {
      gw.noalias() += ws.delta * ws.post[k - 2].transpose();
    }
    gb.noalias() += ws.delta.rowwise().sum();
    if (k == 1) break;
    ws.delta_prev.noalias() = net.weights(k).transpose() * ws.delta;
    if (net.activation() == Activation::relu) {
      ws.delta_prev.array() *= (ws.pre[k - 2].array() > 0.0).template cast<double>();
    }
    std::swap(ws.delta, ws.delta_prev);
  }
}

/// Evaluates h(x). With a clamp F the result is clipped to [-F, F];
/// an infinite F disables clipping.
inline double forward(const Network& net, std::span<const double> x, std::optional<double> clamp = {}) {
  if (x.size() != net.architecture().input_dim()) {
    throw ShapeError("input has dimension " + std::to_string(x.size()) + ", network expects " +
                     std::to_string(net.architecture().input_dim()));
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw NumericError("non-finite network input");
  }
  Eigen::Map<const Eigen::VectorXd> col(x.data(), static_cast<Eigen::Index>(x.size()));
  BatchWorkspace ws;
  return forward_batch(net, col, ws, clamp)(0);
}

/// Evaluates the network on every column of `inputs`.
template <typename Derived>
Eigen::RowVectorXd predict(const Network& net, const Eigen::MatrixBase<Derived>& inputs,
                           std::optional<double> clamp = {}) {
  if (!inputs.allFinite()) throw NumericError("non-finite network input");
  BatchWorkspace ws;
  return forward_batch(net, inputs, ws, clamp);
}

/// Parameter gradient of upstream * h(x), laid out like the network itself.
inline Network grad(const Network& net, std::span<const double> x, double upstream,
                    std::optional<double> clamp = {}) {
  if (x.size() != net.architecture().input_dim()) {
    throw ShapeError("input has dimension " + std::to_string(x.size()) + ", network expects " +
                     std::to_string(net.architecture().input_dim()));
  }
  Eigen::Map<const Eigen::VectorXd> col(x.data(), static_cast<Eigen::Index>(x.size()));
  BatchWorkspace ws;
  forward_batch(net, col, ws, clamp);
  Network g(net.architecture(), net.activation());
  Eigen::RowVectorXd up(1);
  up(0) = upstream;
  backward_batch(net, col, up, ws, g.theta(), clamp);
  return g;
}

// ---------------------------------------------------------------------------
// Constrained class H(L, N, B, F, S)

struct ClassSpec {
  double depth_cap = 1.0;     // L
  double width_cap = 1.0;     // N
  double param_cap = 1.0;     // B, bound on |theta_i|
  double output_cap = std::numeric_limits<double>::infinity();  // F
  double sparsity = 1.0;      // S, bound on ||theta||_0
  Activation activation = Activation::relu;

  void validate() const {
    if (!(depth_cap > 0 && width_cap > 0 && param_cap > 0 && output_cap > 0 && sparsity > 0)) {
      throw InvalidSpecError("class caps L, N, B, F, S must all be strictly positive");
    }
  }

  std::size_t max_nonzero() const { return static_cast<std::size_t>(std::floor(sparsity)); }
};

/// Structural membership: depth, width, parameter sup-norm and sparsity.
/// The output bound F is enforced at evaluation time through the clamp.
inline bool belongs_to(const Network& net, const ClassSpec& spec) {
  return static_cast<double>(depth(net)) <= spec.depth_cap &&
         static_cast<double>(max_width(net)) <= spec.width_cap && sup_norm(net) <= spec.param_cap &&
         static_cast<double>(count_nonzero(net)) <= spec.sparsity;
}

/// Clips every parameter to [-B, B], then keeps only the floor(S)
/// largest-magnitude entries. Ties keep the lower theta index.
inline void project_in_place(Network& net, const ClassSpec& spec) {
  spec.validate();
  if (spec.sparsity < 1.0) throw InvalidSpecError("sparsity level S must be >= 1 for projection");
  if (static_cast<double>(depth(net)) > spec.depth_cap ||
      static_cast<double>(max_width(net)) > spec.width_cap) {
    throw InvalidSpecError("architecture exceeds the class depth/width caps");
  }
  auto& t = net.theta();
  const double b = spec.param_cap;
  for (Eigen::Index i = 0; i < t.size(); ++i) t(i) = std::clamp(t(i), -b, b);

  const std::size_t keep = spec.max_nonzero();
  if (count_nonzero(net) <= keep) return;
  std::vector<Eigen::Index> order(static_cast<std::size_t>(t.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                   [&](Eigen::Index a, Eigen::Index b2) {
                     const double ma = std::abs(t(a)), mb = std::abs(t(b2));
                     return ma != mb ? ma > mb : a < b2;
                   });
  for (auto it = order.begin() + static_cast<std::ptrdiff_t>(keep); it != order.end(); ++it) {
    t(*it) = 0.0;
  }
}

inline Network project_to_class(Network net, const ClassSpec& spec) {
  project_in_place(net, spec);
  return net;
}

}  // namespace rwdnn
