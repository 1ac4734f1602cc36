#ifndef FRACLAP_BARRIER_HPP
#define FRACLAP_BARRIER_HPP

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>

#include "fraclap/errors.hpp"

namespace fraclap {

/// Axis-aligned parameter box ∏ [lo_i, hi_i].
struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  Box() = default;
  Box(Eigen::VectorXd lower, Eigen::VectorXd upper) : lo(std::move(lower)), hi(std::move(upper)) {
    if (lo.size() != hi.size() || lo.size() == 0) throw ArgumentError("Box: bound dimension mismatch");
    for (Eigen::Index i = 0; i < lo.size(); ++i) {
      if (!(lo[i] < hi[i])) throw ArgumentError("Box: lower bound must be below upper bound on axis " + std::to_string(i));
    }
  }

  [[nodiscard]] Eigen::Index dim() const noexcept { return lo.size(); }
  [[nodiscard]] Eigen::VectorXd center() const { return 0.5 * (lo + hi); }
  [[nodiscard]] Eigen::VectorXd width() const { return hi - lo; }

  [[nodiscard]] bool contains(const Eigen::VectorXd& x) const {
    return x.size() == dim() && (x.array() >= lo.array()).all() && (x.array() <= hi.array()).all();
  }
  [[nodiscard]] bool interior(const Eigen::VectorXd& x) const {
    return x.size() == dim() && (x.array() > lo.array()).all() && (x.array() < hi.array()).all();
  }
  /// Smallest distance to a face, as a fraction of that axis' width.
  [[nodiscard]] double boundary_proximity(const Eigen::VectorXd& x) const {
    double d = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < dim(); ++i) {
      d = std::min(d, std::min(x[i] - lo[i], hi[i] - x[i]) / (hi[i] - lo[i]));
    }
    return d;
  }
};

/// Box W = [0, 0.5] × [0, 250] of the (s, α) denoising experiments.
inline Box denoise_box() { return Box(Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(0.5, 250.0)); }

/// Box Y = [0, 0.5] × [0.01, 1e4] × [-1, 0] × [0, 1e5] for (s1, α, s2, β).
inline Box decompose_box() {
  Eigen::Vector4d lo(0.0, 0.01, -1.0, 0.0);
  Eigen::Vector4d hi(0.5, 1e4, 0.0, 1e5);
  return Box(lo, hi);
}

struct BarrierValue {
  double value = std::numeric_limits<double>::infinity();
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;

  [[nodiscard]] bool finite() const noexcept { return std::isfinite(value); }
};

/// scale · Σ_i 1 / ((x_i - lo_i)(hi_i - x_i)).
///
/// With the default boxes this is exactly the 2-term φ₁ of the denoising
/// problem and the 4-term φ of the decomposition problem. Each term diverges
/// at both faces of its axis and is minimised at the axis midpoint.
struct BarrierFn {
  enum class Kind { Denoise2d, Decompose4d };

  Kind kind = Kind::Denoise2d;
  double scale = 5e-5;
  Box box = denoise_box();

  static BarrierFn denoise(double scale = 5e-5, Box b = denoise_box()) {
    return BarrierFn{Kind::Denoise2d, scale, std::move(b)};
  }
  static BarrierFn decompose(double scale = 3e-7, Box b = decompose_box()) {
    return BarrierFn{Kind::Decompose4d, scale, std::move(b)};
  }
};

/// Analytic value, gradient and (diagonal) Hessian of the barrier. Points on
/// or outside the box yield value = +inf and empty derivatives.
inline BarrierValue barrier_eval(const BarrierFn& b, const Eigen::VectorXd& x) {
  BarrierValue out;
  const Eigen::Index d = b.box.dim();
  if (x.size() != d) throw ArgumentError("barrier_eval: dimension mismatch");
  if (!b.box.interior(x)) return out;
  out.value = 0.0;
  out.grad = Eigen::VectorXd::Zero(d);
  out.hess = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double lo = b.box.lo[i];
    const double hi = b.box.hi[i];
    const double q = (x[i] - lo) * (hi - x[i]);
    const double dq = lo + hi - 2.0 * x[i];
    out.value += b.scale / q;
    out.grad[i] = -b.scale * dq / (q * q);
    out.hess(i, i) = b.scale * (2.0 * dq * dq + 2.0 * q) / (q * q * q);
  }
  return out;
}

}  // namespace fraclap

#endif  // FRACLAP_BARRIER_HPP
