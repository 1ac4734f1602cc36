#ifndef FRACLAP_FFT_HPP
#define FRACLAP_FFT_HPP

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include "fraclap/errors.hpp"

namespace fraclap::detail {

/// Sign of the exponent in Σ v_j e^{sign · i k·x_j}.
enum class FftDirection : int { Forward = FFTW_FORWARD, Backward = FFTW_BACKWARD };

// FFTW planning is not thread-safe; execution of an existing plan is.
// Plans are made once per (n, direction) with FFTW_ESTIMATE so every run uses
// the same algorithm and results are bit-reproducible.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(std::size_t n, FftDirection dir) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(n, static_cast<int>(dir));
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<std::complex<double>> scratch(n * n);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan = fftw_plan_dft_2d(static_cast<int>(n), static_cast<int>(n), buf, buf,
                                      static_cast<int>(dir), FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) throw NumericalError("FFTW failed to create a plan");
    plans_.emplace(key, plan);
    return plan;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  std::mutex mutex_;
  std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

/// Unnormalised in-place 2-D DFT of an n×n row-major array.
inline void dft2d(std::span<std::complex<double>> data, std::size_t n, FftDirection dir) {
  if (data.size() != n * n) throw ConfigError("dft2d: buffer size mismatch");
  fftw_plan plan = PlanCache::instance().get(n, dir);
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, buf, buf);
}

}  // namespace fraclap::detail

#endif  // FRACLAP_FFT_HPP
