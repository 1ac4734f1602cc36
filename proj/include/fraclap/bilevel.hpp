#ifndef FRACLAP_BILEVEL_HPP
#define FRACLAP_BILEVEL_HPP

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fraclap/barrier.hpp"
#include "fraclap/denoise.hpp"
#include "fraclap/errors.hpp"
#include "fraclap/grid.hpp"

namespace fraclap {

/// One oracle evaluation. `hess` is empty when the oracle has no second
/// derivatives; the solver then falls back to BFGS. An oracle may still supply
/// the exactly known part of f (e.g. a barrier) through `known_grad` and
/// `known_hess`, and BFGS then only models the remainder.
struct Evaluation {
  double value = std::numeric_limits<double>::infinity();
  Eigen::VectorXd grad;
  std::optional<Eigen::MatrixXd> hess;
  std::optional<Eigen::MatrixXd> known_hess;
  Eigen::VectorXd known_grad;

  [[nodiscard]] bool finite() const { return std::isfinite(value) && grad.allFinite(); }
};

using Oracle = std::function<Evaluation(const Eigen::VectorXd&)>;
using ValueOracle = std::function<double(const Eigen::VectorXd&)>;

struct SqpConfig {
  std::optional<Eigen::VectorXd> init;  ///< box center when empty
  double grad_tol = 1e-8;               ///< on the width-scaled gradient
  double step_tol = 0.0;                ///< stop when the scaled step is shorter
  int max_iter = 200;
  double c1 = 1e-4;
  double shrink = 0.5;
  int max_halvings = 60;
  double hessian_floor = 1e-10;  ///< relative to the largest |eigenvalue|
  double fraction_to_boundary = 0.99;
};

struct Iterate {
  Eigen::VectorXd params;
  double value = 0.0;
  double grad_norm = 0.0;  ///< width-scaled
};

struct OptimReport {
  std::vector<Iterate> iterates;
  bool converged = false;
  Eigen::VectorXd final_params;
  double final_value = std::numeric_limits<double>::infinity();
  double kkt_residual = std::numeric_limits<double>::infinity();
  int iterations = 0;
  int evaluations = 0;
  double wall_time = 0.0;  ///< seconds
  double boundary_proximity = 0.0;
  std::string message;
};

class StallError : public NumericalError {
 public:
  StallError(const std::string& what, OptimReport report)
      : NumericalError(what), report_(std::move(report)) {}
  [[nodiscard]] const OptimReport& report() const noexcept { return report_; }

 private:
  OptimReport report_;
};

namespace detail {

inline double step_to_boundary(const Box& box, const Eigen::VectorXd& x, const Eigen::VectorXd& d, double frac) {
  double t = 1.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (d[i] < 0.0) t = std::min(t, frac * (x[i] - box.lo[i]) / -d[i]);
    if (d[i] > 0.0) t = std::min(t, frac * (box.hi[i] - x[i]) / d[i]);
  }
  return t;
}

/// Inverse of H with eigenvalues replaced by max(|λ|, floor · max|λ|).
inline Eigen::MatrixXd damped_inverse(const Eigen::MatrixXd& h, double floor) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (h + h.transpose()));
  if (eig.info() != Eigen::Success) throw NumericalError("solve_bilevel: eigen-decomposition failed");
  Eigen::VectorXd lam = eig.eigenvalues();
  double top = lam.cwiseAbs().maxCoeff();
  if (!(top > 0.0)) top = 1.0;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    lam[i] = 1.0 / std::max(std::abs(lam[i]), floor * top);
  }
  return eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace detail

/// Damped Newton / SQP iteration for min f over the open box.
///
/// The search direction solves the quadratic model with the analytic Hessian
/// when the oracle supplies one and a BFGS approximation otherwise. Both are
/// formed in coordinates scaled by the box widths. Steps are cut to stay a
/// fixed fraction inside the box and then backtracked until Armijo holds.
inline OptimReport solve_bilevel(const Oracle& f, const Box& box, const SqpConfig& cfg = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  const Eigen::Index dim = box.dim();
  const Eigen::VectorXd w = box.width();

  OptimReport rep;
  Eigen::VectorXd x = cfg.init.value_or(box.center());
  if (x.size() != dim) throw ConfigError("solve_bilevel: initial point has wrong dimension");
  if (!box.interior(x)) throw ConfigError("solve_bilevel: initial point is not strictly inside the box");
  Evaluation e = f(x);
  ++rep.evaluations;
  if (!e.finite()) throw ConfigError("solve_bilevel: objective is not finite at the initial point");

  auto finish = [&](bool converged, std::string msg) {
    rep.converged = converged;
    rep.final_params = x;
    rep.final_value = e.value;
    rep.kkt_residual = (w.array() * e.grad.array()).matrix().norm();
    rep.boundary_proximity = box.boundary_proximity(x);
    rep.message = std::move(msg);
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  const bool split = !e.hess && e.known_hess.has_value();
  const Eigen::MatrixXd bfgs0 = split ? Eigen::MatrixXd(Eigen::MatrixXd::Zero(dim, dim)) : Eigen::MatrixXd(Eigen::MatrixXd::Identity(dim, dim));
  Eigen::MatrixXd bfgs = bfgs0;
  double bfgs_scale = 0.0;  // latest y'y / s'y, used when the model is reset
  auto remainder_grad = [&](const Evaluation& ev) -> Eigen::VectorXd {
    return split ? Eigen::VectorXd(ev.grad - ev.known_grad) : ev.grad;
  };
  for (int it = 0;; ++it) {
    const Eigen::VectorXd gs = w.array() * e.grad.array();
    rep.iterates.push_back({x, e.value, gs.norm()});
    if (gs.norm() <= cfg.grad_tol) {
      finish(true, "gradient tolerance reached");
      return rep;
    }
    if (it >= cfg.max_iter) {
      finish(false, "iteration limit reached");
      return rep;
    }
    rep.iterations = it + 1;

    const bool newton = e.hess.has_value();
    bool accepted = false;
    Evaluation en;
    Eigen::VectorXd xn;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      Eigen::MatrixXd hs = newton ? Eigen::MatrixXd(w.asDiagonal() * (*e.hess) * w.asDiagonal()) : bfgs;
      if (split) hs += w.asDiagonal() * (*e.known_hess) * w.asDiagonal();
      const Eigen::VectorXd ds = -detail::damped_inverse(hs, cfg.hessian_floor) * gs;
      if (ds.norm() <= cfg.step_tol) {
        finish(true, "step tolerance reached");
        return rep;
      }
      const Eigen::VectorXd d = w.array() * ds.array();
      const double slope = e.grad.dot(d);
      double t = detail::step_to_boundary(box, x, d, cfg.fraction_to_boundary);
      for (int k = 0; k <= cfg.max_halvings; ++k, t *= cfg.shrink) {
        xn = x + t * d;
        if (xn == x) break;  // step fell below the resolution of x
        if (!box.interior(xn)) continue;
        en = f(xn);
        ++rep.evaluations;
        if (!en.finite()) continue;
        if (en.value <= e.value + cfg.c1 * t * slope) {
          accepted = true;
          break;
        }
        // Near the optimum the decrease drops below rounding of f; accept a
        // non-increasing step that still shrinks the gradient.
        const double gn = (w.array() * en.grad.array()).matrix().norm();
        if (en.value <= e.value && gn < gs.norm()) {
          accepted = true;
          break;
        }
      }
      if (!accepted && !newton) {
        bfgs = bfgs_scale > 0.0 ? Eigen::MatrixXd(bfgs_scale * Eigen::MatrixXd::Identity(dim, dim)) : bfgs0;
      }
      if (newton) break;
    }
    if (!accepted) {
      finish(false, "line search failed");
      throw StallError("solve_bilevel: line search failed after " + std::to_string(cfg.max_halvings) +
                           " halvings",
                       rep);
    }

    if (!newton) {
      const Eigen::VectorXd sk = (xn - x).array() / w.array();
      const Eigen::VectorXd yk = w.array() * (remainder_grad(en) - remainder_grad(e)).array();
      const double sy = sk.dot(yk);
      if (sy > 1e-12 * sk.norm() * yk.norm()) {
        // first curvature pair: start from the scaled identity y'y / s'y
        bfgs_scale = yk.squaredNorm() / sy;
        if (bfgs.isZero(0.0)) bfgs = bfgs_scale * Eigen::MatrixXd::Identity(dim, dim);
        const Eigen::VectorXd bs = bfgs * sk;
        const double sbs = sk.dot(bs);
        bfgs += yk * yk.transpose() / sy;
        if (sbs > 0.0) bfgs -= bs * bs.transpose() / sbs;
      }
    }
    x = xn;
    e = std::move(en);
  }
}

struct GridSearchResult {
  Eigen::VectorXd params;
  double value = std::numeric_limits<double>::infinity();
  Eigen::VectorXd cell;  ///< lattice spacing per axis
};

/// Exhaustive search over the interior lattice lo + (i+1)·w/(r+1), i < r.
/// The first minimum in row-major order (last axis fastest) wins.
inline GridSearchResult grid_search(const ValueOracle& f, const Box& box, const std::vector<int>& resolution) {
  const Eigen::Index dim = box.dim();
  if (static_cast<Eigen::Index>(resolution.size()) != dim) {
    throw ArgumentError("grid_search: one resolution per axis required");
  }
  for (int r : resolution) {
    if (r < 2) throw ArgumentError("grid_search: resolution must be >= 2");
  }
  GridSearchResult best;
  best.cell = Eigen::VectorXd(dim);
  for (Eigen::Index a = 0; a < dim; ++a) best.cell[a] = box.width()[a] / (resolution[a] + 1);

  std::vector<int> idx(dim, 0);
  Eigen::VectorXd x(dim);
  while (true) {
    for (Eigen::Index a = 0; a < dim; ++a) x[a] = box.lo[a] + (idx[a] + 1) * best.cell[a];
    const double v = f(x);
    if (v < best.value) {
      best.value = v;
      best.params = x;
    }
    Eigen::Index a = dim - 1;
    while (a >= 0 && ++idx[a] == resolution[a]) idx[a--] = 0;
    if (a < 0) break;
  }
  return best;
}

inline GridSearchResult grid_search(const ValueOracle& f, const Box& box, int resolution) {
  return grid_search(f, box, std::vector<int>(box.dim(), resolution));
}

/// Central-difference gradient with per-axis step rel·width, shortened near
/// the box faces so both probes stay inside. With `extrapolate`, differences
/// at h and h/2 are combined (Richardson) to cancel the O(h²) error.
inline Eigen::VectorXd fd_gradient(const ValueOracle& f, const Box& box, const Eigen::VectorXd& x,
                                   double rel = 1e-4, bool extrapolate = false) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double room = std::min(x[i] - box.lo[i], box.hi[i] - x[i]);
    const double h = std::min(rel * (box.hi[i] - box.lo[i]), 0.5 * room);
    auto central = [&](double step) {
      Eigen::VectorXd xp = x, xm = x;
      xp[i] += step;
      xm[i] -= step;
      return (f(xp) - f(xm)) / (2.0 * step);
    };
    const double d1 = central(h);
    g[i] = extrapolate ? (4.0 * central(0.5 * h) - d1) / 3.0 : d1;
  }
  return g;
}

/// Oracle for the reduced denoising objective with analytic derivatives.
inline Oracle denoise_oracle(SpectralField g, SpectralField u_d, BarrierFn barrier) {
  return [g = std::move(g), u_d = std::move(u_d), barrier = std::move(barrier)](const Eigen::VectorXd& x) {
    Evaluation out;
    if (!barrier.box.interior(x)) return out;
    const auto j = objective(g, u_d, DenoiseParams::from(x, barrier.box), barrier);
    if (!j.in_domain()) return out;
    out.value = j.value;
    out.grad = j.grad;
    out.hess = Eigen::MatrixXd(j.hess);
    return out;
  };
}

/// Learns (s, α) from one noisy/clean pair, both given mean-removed.
inline OptimReport learn_denoise(const SpectralField& g, const SpectralField& u_d, const BarrierFn& barrier,
                                 const SqpConfig& cfg = {}) {
  return solve_bilevel(denoise_oracle(g, u_d, barrier), barrier.box, cfg);
}

}  // namespace fraclap

#endif  // FRACLAP_BILEVEL_HPP
