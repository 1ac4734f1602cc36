#ifndef FRACLAP_DENOISE_HPP
#define FRACLAP_DENOISE_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fraclap/barrier.hpp"
#include "fraclap/errors.hpp"
#include "fraclap/grid.hpp"
#include "fraclap/spectral.hpp"

namespace fraclap {

/// Regularisation order s and fidelity weight α of the fractional denoiser,
/// together with their admissible box W.
struct DenoiseParams {
  double s = 0.25;
  double alpha = 125.0;
  Box box = denoise_box();

  [[nodiscard]] Eigen::VectorXd vec() const { return Eigen::Vector2d(s, alpha); }
  static DenoiseParams from(const Eigen::VectorXd& x, Box b = denoise_box()) {
    return DenoiseParams{x[0], x[1], std::move(b)};
  }
};

namespace detail {

/// Per-mode multiplier α/(α+|k|^{2s}) and its partial derivatives in (s, α).
struct DenoiseMultipliers {
  double m = 0.0;
  double ds = 0.0;
  double dalpha = 0.0;
  double dss = 0.0;
  double daa = 0.0;
  double dsa = 0.0;
};

/// `power` is |k|^{2s}, `log_k` is ln|k|.
inline DenoiseMultipliers denoise_multipliers(double power, double log_k, double alpha) noexcept {
  const double den = power + alpha;
  const double den2 = den * den;
  const double den3 = den2 * den;
  DenoiseMultipliers out;
  out.m = alpha / den;
  out.ds = -2.0 * alpha * power * log_k / den2;
  out.dalpha = power / den2;
  out.dss = 4.0 * alpha * power * log_k * log_k * (power - alpha) / den3;
  out.daa = -2.0 * power / den3;
  out.dsa = -2.0 * power * log_k * (power - alpha) / den3;
  return out;
}

inline void require_in_box(const DenoiseParams& p, const char* what) {
  if (!p.box.contains(p.vec())) {
    throw ArgumentError(std::string(what) + ": (s, alpha) = (" + std::to_string(p.s) + ", " +
                        std::to_string(p.alpha) + ") lies outside the parameter box");
  }
}

}  // namespace detail

/// Closed-form minimiser of ½‖(-Δ)^{s/2}u‖² + α/2‖u-g‖²: û_k = α/(α+|k|^{2s}) ĝ_k.
/// The mean offset of g is carried over to the result.
inline SpectralField solve(const SpectralField& g, const DenoiseParams& p) {
  detail::require_zero_mean(g, "solve");
  detail::require_in_box(p, "solve");
  const auto& table = frequency_table(g.size());
  SpectralField u(g.size());
  u.set_mean_offset(g.mean_offset());
  for (std::size_t i = 1; i < g.mode_count(); ++i) {
    u[i] = p.alpha / (p.alpha + table.power(i, p.s)) * g[i];
  }
  return u;
}

/// 𝒮(s, α) and its five partial derivatives, all as coefficient fields.
struct DerivativeBundle {
  SpectralField S;
  SpectralField dS_ds;
  SpectralField dS_dalpha;
  SpectralField d2S_ds2;
  SpectralField d2S_dalpha2;
  SpectralField d2S_dsdalpha;
};

inline DerivativeBundle derivatives(const SpectralField& g, const DenoiseParams& p) {
  detail::require_zero_mean(g, "derivatives");
  if (!(p.alpha > 0.0)) throw DomainError("derivatives: alpha must be > 0");
  detail::require_in_box(p, "derivatives");
  const std::size_t n = g.size();
  const auto& table = frequency_table(n);
  DerivativeBundle b{SpectralField(n), SpectralField(n), SpectralField(n),
                     SpectralField(n), SpectralField(n), SpectralField(n)};
  for (std::size_t i = 1; i < g.mode_count(); ++i) {
    const auto m = detail::denoise_multipliers(table.power(i, p.s), 0.5 * table.log_norm_sq[i], p.alpha);
    b.S[i] = m.m * g[i];
    b.dS_ds[i] = m.ds * g[i];
    b.dS_dalpha[i] = m.dalpha * g[i];
    b.d2S_ds2[i] = m.dss * g[i];
    b.d2S_dalpha2[i] = m.daa * g[i];
    b.d2S_dsdalpha[i] = m.dsa * g[i];
  }
  return b;
}

/// Value, gradient and Hessian of the reduced bilevel objective
/// j(s, α) = 1/(2(2π)^2) ‖𝒮(s, α) - Û_d‖² + φ(s, α).
struct ObjectiveEval {
  double value = std::numeric_limits<double>::infinity();
  double data_term = std::numeric_limits<double>::infinity();
  double barrier_term = std::numeric_limits<double>::infinity();
  Eigen::Vector2d grad = Eigen::Vector2d::Constant(std::numeric_limits<double>::quiet_NaN());
  Eigen::Matrix2d hess = Eigen::Matrix2d::Constant(std::numeric_limits<double>::quiet_NaN());

  [[nodiscard]] bool in_domain() const noexcept { return std::isfinite(value); }
};

/// Evaluates j and its derivatives. The Hessian is assembled as
/// (residual · second derivatives) + Gramian of first derivatives + ∇²φ.
/// Points on or outside the open box return an out-of-domain evaluation.
inline ObjectiveEval objective(const SpectralField& g, const SpectralField& u_d, const DenoiseParams& p,
                               const BarrierFn& barrier) {
  g.require_same(u_d);
  detail::require_zero_mean(g, "objective");
  detail::require_zero_mean(u_d, "objective");
  ObjectiveEval out;
  const auto phi = barrier_eval(barrier, p.vec());
  if (!phi.finite() || !(p.alpha > 0.0)) return out;

  const auto& table = frequency_table(g.size());
  double data = 0.0;
  double gs = 0.0, ga = 0.0;
  double hss = 0.0, haa = 0.0, hsa = 0.0;
  for (std::size_t i = 1; i < g.mode_count(); ++i) {
    const auto m = detail::denoise_multipliers(table.power(i, p.s), 0.5 * table.log_norm_sq[i], p.alpha);
    const Complex gi = g[i];
    const double g2 = std::norm(gi);
    const Complex r = m.m * gi - u_d[i];
    // Re⟨r, c·g⟩ = c · Re(r conj g) for real multipliers c.
    const double rg = (r * std::conj(gi)).real();
    data += std::norm(r);
    gs += m.ds * rg;
    ga += m.dalpha * rg;
    hss += m.dss * rg + m.ds * m.ds * g2;
    haa += m.daa * rg + m.dalpha * m.dalpha * g2;
    hsa += m.dsa * rg + m.ds * m.dalpha * g2;
  }
  const double c = 1.0 / kTorusVolume;
  out.data_term = 0.5 * c * data;
  out.barrier_term = phi.value;
  out.value = out.data_term + out.barrier_term;
  out.grad = Eigen::Vector2d(c * gs, c * ga) + phi.grad;
  Eigen::Matrix2d h;
  h << c * hss, c * hsa, c * hsa, c * haa;
  out.hess = h + phi.hess;
  return out;
}

/// Denoising energy ½|u|_s² + α/2 |u - g|_0² in coefficient space.
inline double denoise_energy(const SpectralField& g, const SpectralField& u, const DenoiseParams& p) {
  const double reg = sobolev_seminorm(u, SobolevOrder{p.s});
  const double fit = l2_norm(u - g);
  return 0.5 * reg * reg + 0.5 * p.alpha * fit * fit;
}

/// Both sides of a stability estimate; holds() allows 1e-12 relative slack.
struct StabilityReport {
  double lhs = 0.0;
  double rhs = 0.0;
  [[nodiscard]] bool holds() const noexcept { return lhs <= rhs * (1.0 + 1e-12) + 1e-300; }
};

/// Perturbation of the data g → g_n moves the denoised image by at most
/// |u - u_n|_s ≤ α |g - g_n|_{-s}.
inline StabilityReport denoise_stability(const SpectralField& g, const SpectralField& g_n, const DenoiseParams& p) {
  const auto u = solve(g, p);
  const auto u_n = solve(g_n, p);
  return {sobolev_seminorm(u - u_n, SobolevOrder{p.s}), p.alpha * sobolev_seminorm(g - g_n, SobolevOrder{-p.s})};
}

/// Result of checking one derivative against its a-priori bound.
struct BoundCheck {
  std::string name;
  int order = 1;
  double norm = 0.0;      ///< ℓ² norm of the computed derivative
  double bound = 0.0;     ///< right-hand side of the estimate
  double constant = 1.0;  ///< i! for α-derivatives, the sampled supremum M otherwise
  [[nodiscard]] bool satisfied() const noexcept { return norm <= bound * (1.0 + 1e-12) + 1e-300; }
};

struct DerivativeBoundReport {
  double eps = 0.1;
  std::vector<BoundCheck> checks;
  /// Third derivatives have no closed form here and are not checked.
  bool third_order_checked = false;
  [[nodiscard]] bool all_satisfied() const {
    return std::all_of(checks.begin(), checks.end(), [](const BoundCheck& c) { return c.satisfied(); });
  }
};

namespace detail {

/// sup over a 100×100 grid of the box and over all |k| present on the grid of
/// |multiplier(k)| · ε^i · |k|^{2s - iε}, for the s-derivatives of order 1, 2
/// and the mixed derivative (returned in that order).
inline std::array<double, 3> sampled_s_bound_constants(std::size_t n, const Box& box, double eps) {
  std::set<double> radii_sq;
  const auto& table = frequency_table(n);
  for (std::size_t i = 1; i < table.norm_sq.size(); ++i) radii_sq.insert(table.norm_sq[i]);
  std::array<double, 3> sup{0.0, 0.0, 0.0};
  constexpr int kSamples = 100;
  for (int a = 0; a < kSamples; ++a) {
    const double s = box.lo[0] + (box.hi[0] - box.lo[0]) * a / (kSamples - 1);
    for (int b = 0; b < kSamples; ++b) {
      const double alpha = box.lo[1] + (box.hi[1] - box.lo[1]) * b / (kSamples - 1);
      for (double r2 : radii_sq) {
        const double log_k = 0.5 * std::log(r2);
        const double power = std::exp(s * std::log(r2));
        const auto m = denoise_multipliers(power, log_k, alpha);
        const double k = std::sqrt(r2);
        sup[0] = std::max(sup[0], std::abs(m.ds) * eps * std::pow(k, 2.0 * s - eps));
        sup[1] = std::max(sup[1], std::abs(m.dss) * eps * eps * std::pow(k, 2.0 * s - 2.0 * eps));
        sup[2] = std::max(sup[2], std::abs(m.dsa) * eps * std::pow(k, 2.0 * s - eps));
      }
    }
  }
  return sup;
}

}  // namespace detail

/// Evaluates the a-priori bounds on the first and second partial derivatives
/// of 𝒮 and compares them with the ℓ² norms of the computed derivatives.
///
/// α-derivatives: ‖∂_α^i 𝒮‖ ≤ Σ i!/|k|^{2si} |ĝ_k| (exact constants).
/// s-derivatives: ‖∂_s^i 𝒮‖ ≤ Σ M_i / (ε^i |k|^{2s-iε}) |ĝ_k|, where M_i is the
/// supremum of the bounded prefactor sampled on a 100×100 grid of the box.
inline DerivativeBoundReport derivative_bounds(const SpectralField& g, const DenoiseParams& p, double eps = 0.1) {
  if (!(eps > 0.0)) throw ArgumentError("derivative_bounds: eps must be > 0");
  DerivativeBoundReport report;
  report.eps = eps;
  const auto b = derivatives(g, p);
  const auto m = detail::sampled_s_bound_constants(g.size(), p.box, eps);
  const auto& table = frequency_table(g.size());

  double a1 = 0.0, a2 = 0.0, s1 = 0.0, s2 = 0.0, sa = 0.0;
  for (std::size_t i = 1; i < g.mode_count(); ++i) {
    const double gk = std::abs(g[i]);
    const double k = std::sqrt(table.norm_sq[i]);
    const double k2s = table.power(i, p.s);
    a1 += gk / k2s;
    a2 += 2.0 * gk / (k2s * k2s);
    s1 += gk / (eps * std::pow(k, 2.0 * p.s - eps));
    s2 += gk / (eps * eps * std::pow(k, 2.0 * p.s - 2.0 * eps));
    sa += gk / (eps * std::pow(k, 2.0 * p.s - eps));
  }
  report.checks.push_back({"d_alpha", 1, l2_norm(b.dS_dalpha), a1, 1.0});
  report.checks.push_back({"d2_alpha", 2, l2_norm(b.d2S_dalpha2), a2, 2.0});
  report.checks.push_back({"d_s", 1, l2_norm(b.dS_ds), m[0] * s1, m[0]});
  report.checks.push_back({"d2_s", 2, l2_norm(b.d2S_ds2), m[1] * s2, m[1]});
  report.checks.push_back({"d_s_alpha", 1, l2_norm(b.d2S_dsdalpha), m[2] * sa, m[2]});
  return report;
}

}  // namespace fraclap

#endif  // FRACLAP_DENOISE_HPP
