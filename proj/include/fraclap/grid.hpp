#ifndef FRACLAP_GRID_HPP
#define FRACLAP_GRID_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fraclap/errors.hpp"

namespace fraclap {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
/// (2π)^d with d = 2.
inline constexpr double kTorusVolume = kTwoPi * kTwoPi;

namespace detail {

inline void require_even_size(std::size_t n, const char* what) {
  if (n < 2 || n % 2 != 0) {
    throw ConfigError(std::string(what) + ": grid size must be even and >= 2, got " +
                      std::to_string(n));
  }
}

}  // namespace detail

/// Real samples of an image on the n×n torus grid x_j = 2π/n·(j1, j2).
/// Row-major, row index first.
class PixelGrid {
 public:
  PixelGrid() = default;

  explicit PixelGrid(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {
    detail::require_even_size(n, "PixelGrid");
  }

  PixelGrid(std::size_t n, std::vector<double> data) : n_(n), data_(std::move(data)) {
    detail::require_even_size(n, "PixelGrid");
    if (data_.size() != n * n) {
      throw ConfigError("PixelGrid: expected " + std::to_string(n * n) + " samples, got " +
                        std::to_string(data_.size()));
    }
  }

  [[nodiscard]] std::size_t size() const noexcept { return n_; }
  [[nodiscard]] std::size_t pixel_count() const noexcept { return data_.size(); }

  double& operator()(std::size_t row, std::size_t col) noexcept { return data_[row * n_ + col]; }
  double operator()(std::size_t row, std::size_t col) const noexcept {
    return data_[row * n_ + col];
  }

  [[nodiscard]] std::span<double> values() noexcept { return data_; }
  [[nodiscard]] std::span<const double> values() const noexcept { return data_; }

  [[nodiscard]] double mean() const noexcept {
    double sum = 0.0;
    for (double v : data_) sum += v;
    return data_.empty() ? 0.0 : sum / static_cast<double>(data_.size());
  }

  [[nodiscard]] bool all_finite() const noexcept {
    for (double v : data_) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  friend bool operator==(const PixelGrid&, const PixelGrid&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// Fourier coefficients ṽ_k = (V, Φ^k)_n on the index set Z_n^2.
///
/// Storage follows FFT order: flat index j ∈ [0, n) on each axis maps to the
/// signed frequency k = j for j < n/2 and k = j - n otherwise, which covers
/// exactly {-n/2, ..., n/2 - 1}. The coefficient normalisation carries the
/// (2π)^2/n^2 factor of the discrete scalar product, so ṽ_k approximates the
/// continuous coefficient ∫ v e^{-ik·x} dx independently of n.
///
/// `mean_offset` is the image mean removed before spectral work; it is added
/// back by inverse_transform.
class SpectralField {
 public:
  SpectralField() = default;

  explicit SpectralField(std::size_t n) : n_(n), coeffs_(n * n) {
    detail::require_even_size(n, "SpectralField");
  }

  SpectralField(std::size_t n, std::vector<Complex> coeffs, double mean_offset = 0.0)
      : n_(n), coeffs_(std::move(coeffs)), mean_offset_(mean_offset) {
    detail::require_even_size(n, "SpectralField");
    if (coeffs_.size() != n * n) throw ConfigError("SpectralField: coefficient count mismatch");
  }

  [[nodiscard]] std::size_t size() const noexcept { return n_; }
  [[nodiscard]] std::size_t mode_count() const noexcept { return coeffs_.size(); }

  /// Signed frequency of storage index j on an axis of length n.
  static constexpr int frequency(std::size_t j, std::size_t n) noexcept {
    return j < n / 2 ? static_cast<int>(j) : static_cast<int>(j) - static_cast<int>(n);
  }
  /// Storage index of signed frequency k (must lie in Z_n).
  static constexpr std::size_t index(int k, std::size_t n) noexcept {
    return k >= 0 ? static_cast<std::size_t>(k) : static_cast<std::size_t>(k + static_cast<int>(n));
  }
  [[nodiscard]] bool contains(int k1, int k2) const noexcept {
    const int half = static_cast<int>(n_ / 2);
    return k1 >= -half && k1 < half && k2 >= -half && k2 < half;
  }

  Complex& at(int k1, int k2) {
    if (!contains(k1, k2)) throw ArgumentError("SpectralField::at: frequency outside Z_n");
    return coeffs_[index(k1, n_) * n_ + index(k2, n_)];
  }
  [[nodiscard]] Complex at(int k1, int k2) const {
    if (!contains(k1, k2)) throw ArgumentError("SpectralField::at: frequency outside Z_n");
    return coeffs_[index(k1, n_) * n_ + index(k2, n_)];
  }

  Complex& operator[](std::size_t flat) noexcept { return coeffs_[flat]; }
  Complex operator[](std::size_t flat) const noexcept { return coeffs_[flat]; }

  [[nodiscard]] std::span<Complex> coefficients() noexcept { return coeffs_; }
  [[nodiscard]] std::span<const Complex> coefficients() const noexcept { return coeffs_; }

  [[nodiscard]] Complex zero_mode() const noexcept { return coeffs_.empty() ? Complex{} : coeffs_[0]; }
  [[nodiscard]] bool zero_mean() const noexcept { return std::abs(zero_mode()) <= 1e-12; }

  [[nodiscard]] double mean_offset() const noexcept { return mean_offset_; }
  void set_mean_offset(double m) noexcept { mean_offset_ = m; }

  SpectralField& operator+=(const SpectralField& o) {
    require_same(o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
  }
  SpectralField& operator-=(const SpectralField& o) {
    require_same(o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
    return *this;
  }
  SpectralField& operator*=(double a) noexcept {
    for (auto& c : coeffs_) c *= a;
    return *this;
  }
  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double a, SpectralField f) { return f *= a; }

  void require_same(const SpectralField& o) const {
    if (o.n_ != n_) {
      throw ConfigError("SpectralField size mismatch: " + std::to_string(n_) + " vs " +
                        std::to_string(o.n_));
    }
  }

 private:
  std::size_t n_ = 0;
  std::vector<Complex> coeffs_;
  double mean_offset_ = 0.0;
};

/// Exponent of a fractional Sobolev scale (may be negative).
struct SobolevOrder {
  double gamma = 0.0;
  constexpr explicit SobolevOrder(double g) noexcept : gamma(g) {}
};

/// Per-mode |k|^2 and ln|k|^2 for one grid size, in storage order.
/// ln|k|^2 is 0 at k = 0 (that mode never enters operator action).
struct FrequencyTable {
  std::size_t n = 0;
  std::vector<double> norm_sq;
  std::vector<double> log_norm_sq;

  explicit FrequencyTable(std::size_t size) : n(size), norm_sq(size * size), log_norm_sq(size * size) {
    for (std::size_t a = 0; a < n; ++a) {
      const int k1 = SpectralField::frequency(a, n);
      for (std::size_t b = 0; b < n; ++b) {
        const int k2 = SpectralField::frequency(b, n);
        const double r2 = static_cast<double>(k1 * k1 + k2 * k2);
        norm_sq[a * n + b] = r2;
        log_norm_sq[a * n + b] = r2 > 0.0 ? std::log(r2) : 0.0;
      }
    }
  }

  /// |k|^{2s} = exp(s · ln|k|^2); undefined (returns 0) at k = 0.
  [[nodiscard]] double power(std::size_t flat, double s) const noexcept {
    return flat == 0 ? 0.0 : std::exp(s * log_norm_sq[flat]);
  }
};

/// Shared, lazily built table for grid size n. Entries are never evicted,
/// so returned references stay valid for the program lifetime.
inline const FrequencyTable& frequency_table(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, std::unique_ptr<const FrequencyTable>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<const FrequencyTable>(n);
  return *slot;
}

}  // namespace fraclap

#endif  // FRACLAP_GRID_HPP
