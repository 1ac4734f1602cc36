#ifndef FRACLAP_DECOMPOSE_HPP
#define FRACLAP_DECOMPOSE_HPP

#include <Eigen/Dense>

#include <cmath>
#include <algorithm>
#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "fraclap/barrier.hpp"
#include "fraclap/bilevel.hpp"
#include "fraclap/denoise.hpp"
#include "fraclap/errors.hpp"
#include "fraclap/grid.hpp"
#include "fraclap/spectral.hpp"

namespace fraclap {

/// (s1, α, s2, β) of the structure/texture model and its box Y.
struct DecompParams {
  double s1 = 0.25;
  double alpha = 5000.005;
  double s2 = -0.5;
  double beta = 5e4;
  Box box = decompose_box();

  [[nodiscard]] Eigen::VectorXd vec() const { return Eigen::Vector4d(s1, alpha, s2, beta); }
  static DecompParams from(const Eigen::VectorXd& x, Box b = decompose_box()) {
    return DecompParams{x[0], x[1], x[2], x[3], std::move(b)};
  }
};

/// Structural part u and textural part v.
struct DecompPair {
  SpectralField u;
  SpectralField v;
};

namespace detail {

inline void require_positive_weights(const DecompParams& p, const char* what) {
  if (!(p.alpha > 0.0) || !(p.beta > 0.0)) {
    throw DomainError(std::string(what) + ": alpha and beta must be > 0");
  }
  if (!std::isfinite(p.s1) || !std::isfinite(p.s2)) throw DomainError(std::string(what) + ": orders must be finite");
}

}  // namespace detail

/// Unique minimiser of
///   ½|u|²_{s1} + α/2 |u + v - g|²_0 + β/2 |v|²_{s2}
/// per mode, with D = αβ|k|^{2(s2-s1)} + α + β|k|^{2s2}:
///   û = αβ|k|^{2(s2-s1)} ĝ / D,  v̂ = α ĝ / D.
/// u inherits the mean of g, v has mean 0.
inline DecompPair solve_pair(const SpectralField& g, const DecompParams& p) {
  detail::require_zero_mean(g, "solve_pair");
  detail::require_positive_weights(p, "solve_pair");
  const auto& table = frequency_table(g.size());
  DecompPair out{SpectralField(g.size()), SpectralField(g.size())};
  out.u.set_mean_offset(g.mean_offset());
  for (std::size_t i = 1; i < g.mode_count(); ++i) {
    const double ab = p.alpha * p.beta * table.power(i, p.s2 - p.s1);
    const double den = ab + p.alpha + p.beta * table.power(i, p.s2);
    out.u[i] = ab / den * g[i];
    out.v[i] = p.alpha / den * g[i];
  }
  return out;
}

/// ½|u|²_{s1} + α/2 |u + v - g|²_0 + β/2 |v|²_{s2} in coefficient space.
inline double decomposition_energy(const SpectralField& g, const SpectralField& u, const SpectralField& v,
                                   const DecompParams& p) {
  g.require_same(u);
  g.require_same(v);
  const double a = sobolev_seminorm(u, SobolevOrder{p.s1});
  const double b = l2_norm(u + v - g);
  const double c = sobolev_seminorm(v, SobolevOrder{p.s2});
  return 0.5 * a * a + 0.5 * p.alpha * b * b + 0.5 * p.beta * c * c;
}

/// Large-α limit: the minimiser of ½|u|²_{s1} + β/2 |u - g|²_{s2},
/// û₀ = β|k|^{2s2} ĝ / (|k|^{2s1} + β|k|^{2s2}).
inline SpectralField alpha_limit(const SpectralField& g, const DecompParams& p) {
  detail::require_zero_mean(g, "alpha_limit");
  const auto& table = frequency_table(g.size());
  SpectralField u0(g.size());
  u0.set_mean_offset(g.mean_offset());
  for (std::size_t i = 1; i < g.mode_count(); ++i) {
    const double b = p.beta * table.power(i, p.s2);
    u0[i] = b / (table.power(i, p.s1) + b) * g[i];
  }
  return u0;
}

struct LimitStep {
  double weight = 0.0;    ///< α or β
  double residual = 0.0;  ///< ‖u + v - g‖ for α, |v|_{s2} for β
  double error = 0.0;     ///< distance of u to the limit
  double relative_error = 0.0;
  double v_norm = 0.0;    ///< |v|_0
};

struct LimitReport {
  std::vector<LimitStep> steps;

  [[nodiscard]] bool residual_monotone() const {
    for (std::size_t i = 1; i < steps.size(); ++i)
      if (steps[i].residual > steps[i - 1].residual) return false;
    return true;
  }
  [[nodiscard]] bool error_monotone() const {
    for (std::size_t i = 1; i < steps.size(); ++i)
      if (steps[i].error > steps[i - 1].error) return false;
    return true;
  }
  /// Least-squares slope of log residual against log weight.
  [[nodiscard]] double residual_slope() const {
    std::vector<std::pair<double, double>> pts;
    for (const auto& s : steps)
      if (s.residual > 0.0) pts.emplace_back(std::log(s.weight), std::log(s.residual));
    if (pts.size() < 2) return 0.0;
    double mx = 0.0, my = 0.0;
    for (auto [x, y] : pts) mx += x, my += y;
    mx /= static_cast<double>(pts.size());
    my /= static_cast<double>(pts.size());
    double sxy = 0.0, sxx = 0.0;
    for (auto [x, y] : pts) sxy += (x - mx) * (y - my), sxx += (x - mx) * (x - mx);
    return sxy / sxx;
  }
};

/// Solves along an increasing α sequence and measures the approach to
/// (u₀, g - u₀).
inline LimitReport limit_alpha_probe(const SpectralField& g, const DecompParams& p, const std::vector<double>& alphas) {
  const auto u0 = alpha_limit(g, p);
  const double ref = l2_norm(u0);
  LimitReport rep;
  for (double a : alphas) {
    DecompParams q = p;
    q.alpha = a;
    const auto pair = solve_pair(g, q);
    const double err = l2_norm(pair.u - u0);
    rep.steps.push_back({a, l2_norm(pair.u + pair.v - g), err, ref > 0.0 ? err / ref : err, l2_norm(pair.v)});
  }
  return rep;
}

/// Solves along an increasing β sequence and measures the approach to
/// (𝒮(s1, α) g, 0).
inline LimitReport limit_beta_probe(const SpectralField& g, const DecompParams& p, const std::vector<double>& betas) {
  const double s_hi = std::max(0.5, p.s1);
  const double s_lo = std::min(0.0, p.s1);
  const DenoiseParams dp{p.s1, p.alpha, Box(Eigen::Vector2d(s_lo, 0.0), Eigen::Vector2d(s_hi, p.alpha + 1.0))};
  const auto target = solve(g, dp);
  const double ref = l2_norm(g);
  LimitReport rep;
  for (double b : betas) {
    DecompParams q = p;
    q.beta = b;
    const auto pair = solve_pair(g, q);
    const double err = l2_norm(pair.u - target);
    rep.steps.push_back(
        {b, sobolev_seminorm(pair.v, SobolevOrder{p.s2}), err, ref > 0.0 ? err / ref : err, l2_norm(pair.v)});
  }
  return rep;
}

/// Replacing g by its projection g_n = P_m g perturbs the decomposition by
///   |u - u_n|²_{s1} + β|v_n - v|²_{s2} + α/2 ‖u_n + v_n - u - v‖² ≤ α/2 ‖g - g_n‖².
inline StabilityReport decomposition_stability(const SpectralField& g, const SpectralField& g_n, const DecompParams& p) {
  const auto a = solve_pair(g, p);
  const auto b = solve_pair(g_n, p);
  const double du = sobolev_seminorm(a.u - b.u, SobolevOrder{p.s1});
  const double dv = sobolev_seminorm(b.v - a.v, SobolevOrder{p.s2});
  const double dw = l2_norm((b.u - a.u) + (b.v - a.v));
  const double dg = l2_norm(g - g_n);
  return {du * du + p.beta * dv * dv + 0.5 * p.alpha * dw * dw, 0.5 * p.alpha * dg * dg};
}

inline StabilityReport decomposition_stability(const SpectralField& g, std::size_t m, const DecompParams& p) {
  return decomposition_stability(g, project(g, m), p);
}

/// j(p) = ½‖u(p) - U_d‖² + φ(p) for the structural component u.
inline double decompose_objective(const SpectralField& g, const SpectralField& u_d, const DecompParams& p,
                                  const BarrierFn& barrier) {
  const auto phi = barrier_eval(barrier, p.vec());
  if (!phi.finite()) return phi.value;
  const auto u = solve_pair(g, p).u;
  const double r = l2_norm(u - u_d);
  return 0.5 * r * r + phi.value;
}

namespace detail {

/// Per-shell sums over modes sharing one |k|²: Σ|ĝ|², Σ|û_d|², Σ Re(ĝ conj û_d).
/// The structural multiplier is real and depends on |k| only, so
/// ‖u - U_d‖² = Σ_shells (m² A - 2 m C + B) with m the multiplier of the shell.
struct ShellSums {
  // extended precision: the shell form cancels when u is close to U_d, and
  // rounding noise there would swamp the finite-difference gradient
  std::vector<long double> log_norm_sq;
  std::vector<long double> gg, dd, gd;

  ShellSums(const SpectralField& g, const SpectralField& u_d) {
    const auto& table = frequency_table(g.size());
    std::map<double, std::size_t> index;
    for (std::size_t i = 1; i < g.mode_count(); ++i) {
      const auto [it, fresh] = index.try_emplace(table.norm_sq[i], log_norm_sq.size());
      if (fresh) {
        log_norm_sq.push_back(std::log(static_cast<long double>(table.norm_sq[i])));
        gg.push_back(0.0L);
        dd.push_back(0.0L);
        gd.push_back(0.0L);
      }
      const std::size_t k = it->second;
      const long double gr = g[i].real(), gi = g[i].imag(), dr = u_d[i].real(), di = u_d[i].imag();
      gg[k] += gr * gr + gi * gi;
      dd[k] += dr * dr + di * di;
      gd[k] += gr * dr + gi * di;
    }
  }

  /// ½‖u(p) - U_d‖².
  [[nodiscard]] double data_term(const DecompParams& p) const {
    const long double a = p.alpha, b = p.beta, s1 = p.s1, s2 = p.s2;
    long double sum = 0.0L;
    for (std::size_t k = 0; k < gg.size(); ++k) {
      const long double ab = a * b * std::exp((s2 - s1) * log_norm_sq[k]);
      const long double m = ab / (ab + a + b * std::exp(s2 * log_norm_sq[k]));
      sum += m * m * gg[k] - 2.0L * m * gd[k] + dd[k];
    }
    return static_cast<double>(0.5L * std::max(sum, 0.0L));
  }
};

}  // namespace detail

/// Oracle for the decomposition bilevel problem: central differences (step
/// rel·width per axis, extrapolated) for the data term, analytic barrier
/// derivatives.
inline Oracle decompose_oracle(SpectralField g, SpectralField u_d, BarrierFn barrier, double rel = 1e-4) {
  g.require_same(u_d);
  detail::require_zero_mean(g, "decompose_oracle");
  detail::require_zero_mean(u_d, "decompose_oracle");
  auto shells = std::make_shared<const detail::ShellSums>(g, u_d);
  return [shells, barrier = std::move(barrier), rel](const Eigen::VectorXd& x) {
    Evaluation out;
    const auto phi = barrier_eval(barrier, x);
    if (!phi.finite()) return out;
    const ValueOracle data = [&](const Eigen::VectorXd& y) {
      const auto p = DecompParams::from(y, barrier.box);
      detail::require_positive_weights(p, "decompose_oracle");
      return shells->data_term(p);
    };
    out.value = data(x) + phi.value;
    out.known_grad = phi.grad;
    out.known_hess = phi.hess;
    out.grad = fd_gradient(data, barrier.box, x, rel, true) + phi.grad;
    return out;
  };
}

inline OptimReport bilevel_decompose(const SpectralField& g, const SpectralField& u_d,
                                     const BarrierFn& barrier = BarrierFn::decompose(), const SqpConfig& cfg = {}) {
  return solve_bilevel(decompose_oracle(g, u_d, barrier), barrier.box, cfg);
}

}  // namespace fraclap

#endif  // FRACLAP_DECOMPOSE_HPP
