#ifndef FRACLAP_SPECTRAL_HPP
#define FRACLAP_SPECTRAL_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "fraclap/errors.hpp"
#include "fraclap/fft.hpp"
#include "fraclap/grid.hpp"

namespace fraclap {

enum class MeanHandling {
  Keep,    ///< k = 0 coefficient holds (2π)^2 · mean
  Remove,  ///< k = 0 zeroed, mean stored in mean_offset
};

enum class ImagPolicy {
  Discard,  ///< return the real part
  Verify,   ///< also throw NumericalError if the imaginary residue exceeds 1e-9
};

/// ṽ_k = (2π)^2/n^2 · Σ_j v_j e^{-i k·x_j}.
inline SpectralField forward_transform(const PixelGrid& g, MeanHandling mean = MeanHandling::Keep) {
  const std::size_t n = g.size();
  detail::require_even_size(n, "forward_transform");
  if (!g.all_finite()) throw ArgumentError("forward_transform: image contains non-finite values");

  std::vector<Complex> buf(g.values().begin(), g.values().end());
  detail::dft2d(buf, n, detail::FftDirection::Forward);
  const double scale = kTorusVolume / static_cast<double>(n * n);
  for (auto& c : buf) c *= scale;

  SpectralField f(n, std::move(buf));
  if (mean == MeanHandling::Remove) {
    f.set_mean_offset(f[0].real() / kTorusVolume);
    f[0] = 0.0;
  }
  return f;
}

/// Complex samples of I_n v = (2π)^{-2} Σ ṽ_k φ^k at the grid points, without
/// the stored mean offset.
inline std::vector<Complex> synthesize(const SpectralField& f) {
  const std::size_t n = f.size();
  std::vector<Complex> buf(f.coefficients().begin(), f.coefficients().end());
  detail::dft2d(buf, n, detail::FftDirection::Backward);
  for (auto& c : buf) c /= kTorusVolume;
  return buf;
}

/// Largest |Im| of the synthesized samples relative to max(1, max |Re|).
inline double imaginary_residue(const SpectralField& f) {
  const auto samples = synthesize(f);
  double im = 0.0;
  double re = 1.0;
  for (const auto& c : samples) {
    im = std::max(im, std::abs(c.imag()));
    re = std::max(re, std::abs(c.real()));
  }
  return im / re;
}

/// Grid samples of the trigonometric interpolant plus the stored mean offset.
/// Non-Hermitian input yields the real part of the complex samples.
inline PixelGrid inverse_transform(const SpectralField& f, ImagPolicy policy = ImagPolicy::Discard) {
  const std::size_t n = f.size();
  const auto samples = synthesize(f);
  std::vector<double> out(samples.size());
  double im = 0.0;
  double re = 1.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    out[i] = samples[i].real() + f.mean_offset();
    im = std::max(im, std::abs(samples[i].imag()));
    re = std::max(re, std::abs(samples[i].real()));
  }
  if (policy == ImagPolicy::Verify && im / re >= 1e-9) {
    throw NumericalError("inverse_transform: imaginary residue " + std::to_string(im / re) +
                         " exceeds 1e-9; coefficients are not Hermitian");
  }
  return PixelGrid(n, std::move(out));
}

namespace detail {

inline void require_zero_mean(const SpectralField& f, const char* what) {
  if (!f.zero_mean()) {
    throw PreconditionError(std::string(what) + ": input must have zero mean (k = 0 coefficient " +
                            std::to_string(std::abs(f.zero_mode())) + ")");
  }
}

inline SpectralField apply_power(const SpectralField& f, double s) {
  const auto& table = frequency_table(f.size());
  SpectralField out(f.size());
  for (std::size_t i = 1; i < f.mode_count(); ++i) out[i] = table.power(i, s) * f[i];
  return out;
}

}  // namespace detail

/// (-Δ)^s: multiplies mode k by |k|^{2s}; the k = 0 mode stays 0.
inline SpectralField fractional_laplacian(const SpectralField& f, SobolevOrder s) {
  if (!(s.gamma >= 0.0)) throw DomainError("fractional_laplacian: order must be >= 0 (use riesz_potential)");
  detail::require_zero_mean(f, "fractional_laplacian");
  return detail::apply_power(f, s.gamma);
}

/// R_s for s <= 0: multiplies mode k by |k|^{2s}; inverse of the fractional Laplacian.
inline SpectralField riesz_potential(const SpectralField& f, SobolevOrder s) {
  if (!(s.gamma <= 0.0)) throw DomainError("riesz_potential: order must be <= 0 (use fractional_laplacian)");
  detail::require_zero_mean(f, "riesz_potential");
  return detail::apply_power(f, s.gamma);
}

/// |f|_γ = (Σ_{k≠0} |k|^{2γ} |f_k|^2)^{1/2}. For γ = 0 the k = 0 mode is
/// included, so |f|_0 is the plain ℓ² norm of the coefficients.
inline double sobolev_seminorm(const SpectralField& f, SobolevOrder gamma) {
  if (gamma.gamma < 0.0) detail::require_zero_mean(f, "sobolev_seminorm");
  const auto& table = frequency_table(f.size());
  double sum = gamma.gamma == 0.0 ? std::norm(f[0]) : 0.0;
  for (std::size_t i = 1; i < f.mode_count(); ++i) sum += table.power(i, gamma.gamma) * std::norm(f[i]);
  return std::sqrt(sum);
}

/// ℓ² inner product Σ a_k conj(b_k).
inline Complex inner_product(const SpectralField& a, const SpectralField& b) {
  a.require_same(b);
  Complex sum{};
  for (std::size_t i = 0; i < a.mode_count(); ++i) sum += a[i] * std::conj(b[i]);
  return sum;
}

inline double l2_norm(const SpectralField& f) { return sobolev_seminorm(f, SobolevOrder{0.0}); }

/// ‖V‖_n for the discrete scalar product (V,W)_n = (2π)^2/n^2 Σ v_j w̄_j.
inline double discrete_norm(const PixelGrid& g) {
  double sum = 0.0;
  for (double v : g.values()) sum += v * v;
  return std::sqrt(kTorusVolume / static_cast<double>(g.pixel_count()) * sum);
}

/// P_m: keeps modes with -m/2 <= k_i <= m/2 - 1, zeroes the rest (same grid size).
inline SpectralField project(const SpectralField& f, std::size_t m) {
  const std::size_t n = f.size();
  detail::require_even_size(m, "project");
  if (m > n) throw ArgumentError("project: target size " + std::to_string(m) + " exceeds grid size " + std::to_string(n));
  SpectralField out(n);
  out.set_mean_offset(f.mean_offset());
  const int half = static_cast<int>(m / 2);
  for (std::size_t a = 0; a < n; ++a) {
    const int k1 = SpectralField::frequency(a, n);
    if (k1 < -half || k1 >= half) continue;
    for (std::size_t b = 0; b < n; ++b) {
      const int k2 = SpectralField::frequency(b, n);
      if (k2 < -half || k2 >= half) continue;
      out[a * n + b] = f[a * n + b];
    }
  }
  return out;
}

/// Re-indexes the modes of f into a grid of size m, dropping modes outside
/// Z_m when m < n and zero-padding when m > n.
inline SpectralField resize(const SpectralField& f, std::size_t m) {
  detail::require_even_size(m, "resize");
  const std::size_t n = f.size();
  SpectralField out(m);
  out.set_mean_offset(f.mean_offset());
  const std::size_t small = std::min(n, m);
  const int half = static_cast<int>(small / 2);
  for (int k1 = -half; k1 < half; ++k1) {
    for (int k2 = -half; k2 < half; ++k2) {
      out[SpectralField::index(k1, m) * m + SpectralField::index(k2, m)] =
          f[SpectralField::index(k1, n) * n + SpectralField::index(k2, n)];
    }
  }
  return out;
}

/// Subsamples the fine grid at stride n/m and transforms at size m, i.e. the
/// discrete coefficients of I_m applied to the underlying function.
inline SpectralField interpolate(const PixelGrid& fine, std::size_t m, MeanHandling mean = MeanHandling::Keep) {
  const std::size_t n = fine.size();
  detail::require_even_size(m, "interpolate");
  if (m > n || n % m != 0) {
    throw ArgumentError("interpolate: size " + std::to_string(m) + " does not divide " + std::to_string(n));
  }
  const std::size_t stride = n / m;
  PixelGrid coarse(m);
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < m; ++c) coarse(r, c) = fine(r * stride, c * stride);
  return forward_transform(coarse, mean);
}

}  // namespace fraclap

#endif  // FRACLAP_SPECTRAL_HPP
