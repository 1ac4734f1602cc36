#ifndef FRACLAP_BASELINES_HPP
#define FRACLAP_BASELINES_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "fraclap/errors.hpp"
#include "fraclap/fft.hpp"
#include "fraclap/grid.hpp"
#include "fraclap/metrics.hpp"

namespace fraclap {

// Both flows work in pixel units (grid spacing 1) with periodic boundary:
// forward differences for the gradient, and div = -∇* (backward differences).

struct FlowConfig {
  double alpha = 0.1;
  double eps = 0.004;
  double step_size = 0.0;  ///< 0 picks 1.9 / L for the gradient Lipschitz bound L
  int max_steps = 5000;
  double stop_tol = 1e-7;  ///< relative energy decrease
};

using RofConfig = FlowConfig;

struct FlowResult {
  PixelGrid u;
  std::vector<double> energies;  ///< energy after every accepted step, starting at u = g
  int steps = 0;
  int halvings = 0;
  bool converged = false;
};

namespace detail {

/// Σ sqrt(ε² + |∇u|²) and the vector field ∇u / sqrt(ε² + |∇u|²).
/// Rows are summed first so the total does not depend on thread count.
inline double tv_flux(const PixelGrid& u, double eps, std::vector<double>& px, std::vector<double>& py) {
  const std::size_t n = u.size();
  px.resize(n * n);
  py.resize(n * n);
  std::vector<double> rows(n, 0.0);
#pragma omp parallel for schedule(static)
  for (long li = 0; li < static_cast<long>(n); ++li) {
    const auto i = static_cast<std::size_t>(li);
    const std::size_t ip = (i + 1) % n;
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t jp = (j + 1) % n;
      const double dx = u(i, jp) - u(i, j);
      const double dy = u(ip, j) - u(i, j);
      const double m = std::sqrt(eps * eps + dx * dx + dy * dy);
      px[i * n + j] = dx / m;
      py[i * n + j] = dy / m;
      acc += m;
    }
    rows[i] = acc;
  }
  double total = 0.0;
  for (double r : rows) total += r;
  return total;
}

inline double divergence_at(const std::vector<double>& px, const std::vector<double>& py, std::size_t n,
                            std::size_t i, std::size_t j) {
  const std::size_t im = (i + n - 1) % n;
  const std::size_t jm = (j + n - 1) % n;
  return px[i * n + j] - px[i * n + jm] + py[i * n + j] - py[im * n + j];
}

inline double sum_sq_diff(const PixelGrid& a, const PixelGrid& b) {
  const std::size_t n = a.size();
  std::vector<double> rows(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += (a(i, j) - b(i, j)) * (a(i, j) - b(i, j));
    rows[i] = acc;
  }
  double total = 0.0;
  for (double r : rows) total += r;
  return total;
}

inline void check_flow_config(const FlowConfig& cfg, const char* what) {
  if (!(cfg.eps > 0.0)) throw ArgumentError(std::string(what) + ": eps must be > 0");
  if (!(cfg.alpha > 0.0)) throw ArgumentError(std::string(what) + ": alpha must be > 0");
  if (cfg.max_steps < 0) throw ArgumentError(std::string(what) + ": max_steps must be >= 0");
}

/// Explicit descent u ← u - τ ∇E with τ halved whenever E would increase.
/// `energy_and_flux` returns E(u) and caches what `gradient_at` needs.
template <class Energy, class Gradient>
FlowResult run_flow(const PixelGrid& g, const FlowConfig& cfg, double tau, Energy&& energy_and_flux,
                    Gradient&& gradient_at, const char* what) {
  FlowResult res;
  res.u = g;
  double e = energy_and_flux(res.u);
  res.energies.push_back(e);
  PixelGrid trial(g.size());
  for (int step = 0; step < cfg.max_steps; ++step) {
    const std::vector<double> grad = gradient_at(res.u);
    double e_new = std::numeric_limits<double>::infinity();
    while (true) {
      auto t = trial.values();
      const auto cur = res.u.values();
      for (std::size_t i = 0; i < t.size(); ++i) t[i] = cur[i] - tau * grad[i];
      e_new = energy_and_flux(trial);
      if (std::isnan(e_new)) {
        throw NumericalError(std::string(what) + ": energy became NaN at step " + std::to_string(step) +
                             " (tau = " + std::to_string(tau) + ")");
      }
      if (e_new <= e) break;
      tau *= 0.5;
      ++res.halvings;
      if (tau < 1e-300) {
        // No decrease at any step size: already stationary to rounding.
        energy_and_flux(res.u);
        res.converged = true;
        return res;
      }
    }
    std::swap(res.u, trial);
    res.steps = step + 1;
    res.energies.push_back(e_new);
    const double rel = (e - e_new) / std::max(std::abs(e), std::numeric_limits<double>::min());
    e = e_new;
    if (rel < cfg.stop_tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace detail

/// Regularised ROF energy α Σ sqrt(ε² + |∇u|²) + ½ Σ (u - g)².
inline double rof_energy(const PixelGrid& u, const PixelGrid& g, const FlowConfig& cfg) {
  std::vector<double> px, py;
  return cfg.alpha * detail::tv_flux(u, cfg.eps, px, py) + 0.5 * detail::sum_sq_diff(u, g);
}

/// Gradient flow on the regularised ROF energy, starting from g.
inline FlowResult rof_denoise(const PixelGrid& g, const FlowConfig& cfg) {
  detail::check_flow_config(cfg, "rof_denoise");
  if (!g.all_finite()) throw ArgumentError("rof_denoise: image contains non-finite values");
  const std::size_t n = g.size();
  const double tau = cfg.step_size > 0.0 ? cfg.step_size : 1.9 / (1.0 + 8.0 * cfg.alpha / cfg.eps);
  std::vector<double> px, py;
  auto energy = [&](const PixelGrid& u) {
    return cfg.alpha * detail::tv_flux(u, cfg.eps, px, py) + 0.5 * detail::sum_sq_diff(u, g);
  };
  auto gradient = [&](const PixelGrid& u) {
    std::vector<double> grad(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        grad[i * n + j] = -cfg.alpha * detail::divergence_at(px, py, n, i, j) + (u(i, j) - g(i, j));
    return grad;
  };
  return detail::run_flow(g, cfg, tau, energy, gradient, "rof_denoise");
}

struct SweepRow {
  double alpha = 0.0;
  double psnr = 0.0;
  double ssim = 0.0;
  int steps = 0;
  bool converged = false;
};

struct SweepResult {
  double best_alpha = 0.0;
  PixelGrid best;
  std::vector<SweepRow> table;

  void write_csv(std::ostream& os) const {
    os << "alpha,psnr,ssim,steps,converged\n";
    os.precision(17);
    for (const auto& r : table) {
      os << r.alpha << ',' << r.psnr << ',' << r.ssim << ',' << r.steps << ',' << (r.converged ? 1 : 0) << '\n';
    }
  }
};

/// `count` equidistant values in [lo, hi].
inline std::vector<double> linspace(double lo, double hi, int count) {
  if (count < 1) throw ArgumentError("linspace: count must be >= 1");
  std::vector<double> v(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) v[static_cast<std::size_t>(i)] = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
  return v;
}

inline std::vector<double> default_rof_sweep() { return linspace(1e-6, 0.2, 20); }

/// Runs rof_denoise for every α and keeps the one with the highest PSNR
/// against the reference. Ties keep the earlier α.
inline SweepResult rof_sweep(const PixelGrid& g, const PixelGrid& reference, const std::vector<double>& alphas,
                             FlowConfig cfg = {}) {
  if (alphas.empty()) throw ArgumentError("rof_sweep: no alpha values");
  SweepResult out;
  double best = -std::numeric_limits<double>::infinity();
  for (double a : alphas) {
    if (!(a > 0.0)) throw ArgumentError("rof_sweep: alpha values must be > 0");
    cfg.alpha = a;
    auto r = rof_denoise(g, cfg);
    const double p = psnr(r.u, reference);
    out.table.push_back({a, p, ssim(r.u, reference), r.steps, r.converged});
    if (p > best) {
      best = p;
      out.best_alpha = a;
      out.best = std::move(r.u);
    }
  }
  return out;
}

/// (-Δ)^{-1} in pixel units, i.e. symbol (n / (2π|k|))², on the zero-mean
/// part of w.
inline PixelGrid inverse_neg_laplacian(const PixelGrid& w) {
  const std::size_t n = w.size();
  std::vector<Complex> buf(w.values().begin(), w.values().end());
  detail::dft2d(buf, n, detail::FftDirection::Forward);
  const auto& table = frequency_table(n);
  const double scale = (static_cast<double>(n) / kTwoPi) * (static_cast<double>(n) / kTwoPi);
  buf[0] = 0.0;
  for (std::size_t i = 1; i < buf.size(); ++i) buf[i] *= scale / table.norm_sq[i] / static_cast<double>(n * n);
  detail::dft2d(buf, n, detail::FftDirection::Backward);
  std::vector<double> out(buf.size());
  for (std::size_t i = 0; i < buf.size(); ++i) out[i] = buf[i].real();
  return PixelGrid(n, std::move(out));
}

/// Σ |∇Δ^{-1} w|² in pixel units, evaluated as Σ w · (-Δ)^{-1} w.
inline double h_minus_one_energy(const PixelGrid& w) {
  const auto p = inverse_neg_laplacian(w);
  const double mean = w.mean();
  double sum = 0.0;
  for (std::size_t i = 0; i < w.pixel_count(); ++i) sum += (w.values()[i] - mean) * p.values()[i];
  return sum;
}

/// Regularised OSV energy Σ sqrt(ε² + |∇u|²) + α Σ |∇Δ^{-1}(g - u)|².
inline double osv_energy(const PixelGrid& u, const PixelGrid& g, const FlowConfig& cfg) {
  std::vector<double> px, py;
  PixelGrid w = g;
  for (std::size_t i = 0; i < w.pixel_count(); ++i) w.values()[i] -= u.values()[i];
  return detail::tv_flux(u, cfg.eps, px, py) + cfg.alpha * h_minus_one_energy(w);
}

struct OsvResult {
  FlowResult flow;
  PixelGrid v;  ///< g - u
};

/// Gradient flow on the regularised OSV energy, starting from u = g.
/// The flow never changes the mean of u, so mean(v) = 0.
inline OsvResult osv_decompose(const PixelGrid& g, const FlowConfig& cfg) {
  detail::check_flow_config(cfg, "osv_decompose");
  if (!g.all_finite()) throw ArgumentError("osv_decompose: image contains non-finite values");
  const std::size_t n = g.size();
  const double low = (static_cast<double>(n) / kTwoPi) * (static_cast<double>(n) / kTwoPi);
  const double tau = cfg.step_size > 0.0 ? cfg.step_size : 1.9 / (8.0 / cfg.eps + 2.0 * cfg.alpha * low);
  std::vector<double> px, py;
  PixelGrid pw(n);
  auto energy = [&](const PixelGrid& u) {
    PixelGrid w = g;
    for (std::size_t i = 0; i < w.pixel_count(); ++i) w.values()[i] -= u.values()[i];
    pw = inverse_neg_laplacian(w);
    double h = 0.0;
    for (std::size_t i = 0; i < w.pixel_count(); ++i) h += w.values()[i] * pw.values()[i];
    return detail::tv_flux(u, cfg.eps, px, py) + cfg.alpha * h;
  };
  auto gradient = [&](const PixelGrid&) {
    std::vector<double> grad(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        grad[i * n + j] = -detail::divergence_at(px, py, n, i, j) - 2.0 * cfg.alpha * pw(i, j);
    return grad;
  };
  OsvResult out{detail::run_flow(g, cfg, tau, energy, gradient, "osv_decompose"), PixelGrid(n)};
  for (std::size_t i = 0; i < out.v.pixel_count(); ++i) out.v.values()[i] = g.values()[i] - out.flow.u.values()[i];
  return out;
}

}  // namespace fraclap

#endif  // FRACLAP_BASELINES_HPP
