#ifndef FRACLAP_METRICS_HPP
#define FRACLAP_METRICS_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "fraclap/errors.hpp"
#include "fraclap/grid.hpp"

namespace fraclap {

struct NoiseSpec {
  double sigma = 0.15;
  std::uint64_t seed = 42;
};

/// u + N(0, σ²) per pixel, row-major draw order. Values are not clipped.
inline PixelGrid add_gaussian_noise(const PixelGrid& u, const NoiseSpec& spec) {
  if (!(spec.sigma >= 0.0) || !std::isfinite(spec.sigma)) throw ArgumentError("add_gaussian_noise: sigma must be finite and >= 0");
  PixelGrid out = u;
  if (spec.sigma == 0.0) return out;
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> dist(0.0, spec.sigma);
  for (double& v : out.values()) v += dist(rng);
  return out;
}

namespace detail {

inline void require_same_shape(const PixelGrid& a, const PixelGrid& b, const char* what) {
  if (a.size() != b.size()) {
    throw ArgumentError(std::string(what) + ": image sizes differ (" + std::to_string(a.size()) + " vs " +
                        std::to_string(b.size()) + ")");
  }
}

}  // namespace detail

inline double mean_squared_error(const PixelGrid& u, const PixelGrid& ref) {
  detail::require_same_shape(u, ref, "mean_squared_error");
  double sum = 0.0;
  const auto a = u.values();
  const auto b = ref.values();
  for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
  return sum / static_cast<double>(a.size());
}

/// 10 log10(1 / MSE) for peak 1. Identical images give +inf.
inline double psnr(const PixelGrid& u, const PixelGrid& ref) {
  const double mse = mean_squared_error(u, ref);
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

struct SsimParams {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double range = 1.0;
};

/// Normalised 1-D Gaussian taps, centred.
inline std::vector<double> gaussian_taps(int window, double sigma) {
  std::vector<double> w(static_cast<std::size_t>(window));
  const int r = window / 2;
  double sum = 0.0;
  for (int i = 0; i < window; ++i) {
    w[static_cast<std::size_t>(i)] = std::exp(-0.5 * (i - r) * (i - r) / (sigma * sigma));
    sum += w[static_cast<std::size_t>(i)];
  }
  for (double& x : w) x /= sum;
  return w;
}

namespace detail {

// Separable periodic filtering: images live on the torus, so the window
// wraps around instead of being truncated at the border.
inline std::vector<double> wrap_filter(const std::vector<double>& img, std::size_t n, const std::vector<double>& taps) {
  const std::size_t r = taps.size() / 2;
  std::vector<double> tmp(img.size()), out(img.size(), 0.0), row(n + 2 * r);
  for (std::size_t i = 0; i < n; ++i) {
    const double* src = img.data() + i * n;
    for (std::size_t j = 0; j < n + 2 * r; ++j) row[j] = src[(j + n - r) % n];
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t t = 0; t < taps.size(); ++t) s += taps[t] * row[j + t];
      tmp[i * n + j] = s;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double* dst = out.data() + i * n;
    for (std::size_t t = 0; t < taps.size(); ++t) {
      const double* src = tmp.data() + (i + n + t - r) % n * n;
      for (std::size_t j = 0; j < n; ++j) dst[j] += taps[t] * src[j];
    }
  }
  return out;
}

}  // namespace detail

/// Mean structural similarity with a Gaussian window, evaluated at every
/// pixel with periodic wrap-around.
inline double ssim(const PixelGrid& u, const PixelGrid& ref, const SsimParams& prm = {}) {
  detail::require_same_shape(u, ref, "ssim");
  const std::size_t n = u.size();
  if (n < static_cast<std::size_t>(prm.window)) throw ArgumentError("ssim: image smaller than the window");
  const auto taps = gaussian_taps(prm.window, prm.sigma);
  const std::vector<double> x(u.values().begin(), u.values().end());
  const std::vector<double> y(ref.values().begin(), ref.values().end());
  std::vector<double> xx(x.size()), yy(x.size()), xy(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto mx = detail::wrap_filter(x, n, taps);
  const auto my = detail::wrap_filter(y, n, taps);
  const auto sxx = detail::wrap_filter(xx, n, taps);
  const auto syy = detail::wrap_filter(yy, n, taps);
  const auto sxy = detail::wrap_filter(xy, n, taps);
  const double c1 = (prm.k1 * prm.range) * (prm.k1 * prm.range);
  const double c2 = (prm.k2 * prm.range) * (prm.k2 * prm.range);
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double vx = sxx[i] - mx[i] * mx[i];
    const double vy = syy[i] - my[i] * my[i];
    const double cxy = sxy[i] - mx[i] * my[i];
    total += ((2.0 * mx[i] * my[i] + c1) * (2.0 * cxy + c2)) /
             ((mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2));
  }
  return total / static_cast<double>(x.size());
}

}  // namespace fraclap

#endif  // FRACLAP_METRICS_HPP
