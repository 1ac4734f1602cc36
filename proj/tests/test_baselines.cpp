#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "fraclap/baselines.hpp"
#include "fraclap/metrics.hpp"
#include "fraclap/pgm.hpp"
#include "fraclap/spectral.hpp"
#include "oracles.hpp"

using namespace fraclap;

namespace {

PixelGrid constant(std::size_t n, double c) {
  PixelGrid g(n);
  for (double& v : g.values()) v = c;
  return g;
}

PixelGrid camera_crop(std::size_t n) {
  const auto full = to_grid(read_pgm(std::string(FRACLAP_TEST_DATA) + "/camera.pgm"), false).grid;
  PixelGrid out(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) out(r, c) = full(200 + r, 200 + c);
  return out;
}

void expect_monotone(const std::vector<double>& e) {
  for (std::size_t i = 1; i < e.size(); ++i) ASSERT_LE(e[i], e[i - 1]) << "step " << i;
}

}  // namespace

TEST(Rof, ConstantImageUnchanged) {
  const auto g = constant(16, 0.37);
  const auto r = rof_denoise(g, {});
  for (std::size_t i = 0; i < g.pixel_count(); ++i) EXPECT_EQ(r.u.values()[i], 0.37);
}

TEST(Rof, EnergyNonIncreasing) {
  const auto g = add_gaussian_noise(oracle::random_grid(32, 1), {0.1, 2});
  const auto r = rof_denoise(g, {0.05, 0.004, 0.0, 5000, 1e-7});
  ASSERT_GT(r.energies.size(), 2u);
  expect_monotone(r.energies);
  EXPECT_NEAR(r.energies.back(), rof_energy(r.u, g, {0.05}), 1e-12 * r.energies.back());
  EXPECT_LT(r.energies.back(), r.energies.front());
}

TEST(Rof, EnergyLiteral) {
  // u = g, one unit step in a single pixel of a 4×4 grid
  PixelGrid u(4);
  u(1, 2) = 1.0;
  const FlowConfig cfg{0.5, 0.004};
  const double eps2 = 0.004 * 0.004;
  // four pixels carry a unit difference: (1,2) itself and its left/upper neighbours
  const double expected = 0.5 * (13.0 * 0.004 + std::sqrt(eps2 + 2.0) + 2.0 * std::sqrt(eps2 + 1.0));
  EXPECT_NEAR(rof_energy(u, u, cfg), expected, 1e-14);
}

TEST(Rof, FinalIterateIsNearMinimiser) {
  const auto g = add_gaussian_noise(oracle::random_grid(16, 3), {0.1, 4});
  const FlowConfig cfg{0.05, 0.05, 0.0, 20000, 1e-12};
  const auto r = rof_denoise(g, cfg);
  const double e = rof_energy(r.u, g, cfg);
  for (int t = 0; t < 100; ++t) {
    auto p = r.u;
    const auto d = oracle::random_grid(16, 100 + t, -1e-3, 1e-3);
    for (std::size_t i = 0; i < p.pixel_count(); ++i) p.values()[i] += d.values()[i];
    EXPECT_LE(e, rof_energy(p, g, cfg) + 1e-12) << t;
  }
}

TEST(Rof, Errors) {
  const auto g = oracle::random_grid(8, 5);
  EXPECT_THROW(rof_denoise(g, {0.1, 0.0}), ArgumentError);
  EXPECT_THROW(rof_denoise(g, {0.0, 0.004}), ArgumentError);
  auto bad = g;
  bad(2, 3) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(rof_denoise(bad, {}), ArgumentError);
}

TEST(Rof, DeterministicAcrossRuns) {
  const auto g = add_gaussian_noise(oracle::random_grid(32, 6), {0.1, 7});
  const auto a = rof_denoise(g, {});
  const auto b = rof_denoise(g, {});
  ASSERT_EQ(a.steps, b.steps);
  for (std::size_t i = 0; i < g.pixel_count(); ++i) EXPECT_EQ(a.u.values()[i], b.u.values()[i]);
}

TEST(Sweep, SingleValue) {
  const auto g = oracle::random_grid(16, 8);
  const auto s = rof_sweep(g, g, {0.03});
  EXPECT_EQ(s.best_alpha, 0.03);
  ASSERT_EQ(s.table.size(), 1u);
}

TEST(Sweep, NoiselessPrefersWeakestSmoothing) {
  const auto g = camera_crop(32);
  const auto s = rof_sweep(g, g, linspace(1e-6, 0.2, 6));
  EXPECT_EQ(s.best_alpha, 1e-6);
  for (std::size_t i = 1; i < s.table.size(); ++i) EXPECT_LT(s.table[i].psnr, s.table[i - 1].psnr);
}

TEST(Sweep, DefaultSweepBeatsNoisyInput) {
  const auto clean = camera_crop(64);
  const auto noisy = add_gaussian_noise(clean, {0.15, 42});
  const auto s = rof_sweep(noisy, clean, default_rof_sweep());
  ASSERT_EQ(s.table.size(), 20u);
  EXPECT_GT(psnr(s.best, clean), psnr(noisy, clean));
  double best = -1e300;
  for (const auto& row : s.table) best = std::max(best, row.psnr);
  EXPECT_EQ(psnr(s.best, clean), best);
}

TEST(Sweep, CsvAndErrors) {
  const auto g = oracle::random_grid(16, 9);
  const auto s = rof_sweep(g, g, {0.01, 0.02});
  std::ostringstream os;
  s.write_csv(os);
  const std::string text = os.str();
  EXPECT_EQ(text.rfind("alpha,psnr,ssim,steps,converged\n", 0), 0u);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
  EXPECT_THROW(rof_sweep(g, g, {}), ArgumentError);
  EXPECT_THROW(rof_sweep(g, g, {0.1, -0.1}), ArgumentError);
}

TEST(Linspace, Endpoints) {
  const auto v = default_rof_sweep();
  ASSERT_EQ(v.size(), 20u);
  EXPECT_EQ(v.front(), 1e-6);
  EXPECT_EQ(v.back(), 0.2);
  EXPECT_NEAR(v[1] - v[0], (0.2 - 1e-6) / 19.0, 1e-16);
}

TEST(InverseLaplacian, CosineMode) {
  const std::size_t n = 32;
  PixelGrid w(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) w(r, c) = std::cos(2.0 * std::numbers::pi * 3.0 * static_cast<double>(c) / n);
  const auto p = inverse_neg_laplacian(w);
  const double factor = std::pow(static_cast<double>(n) / (2.0 * std::numbers::pi * 3.0), 2);
  for (std::size_t i = 0; i < w.pixel_count(); ++i) EXPECT_NEAR(p.values()[i], factor * w.values()[i], 1e-12);
}

TEST(InverseLaplacian, HMinusOneIdentity) {
  const std::size_t n = 16;
  const auto w = oracle::random_grid(n, 10, -1.0, 1.0);
  const double h = h_minus_one_energy(w);

  // brute-force unnormalised DFT: Σ_x w (-Δ)^{-1} w = n^{-2} Σ_{k≠0} (n / 2π|k|)² |W_k|²
  const auto coeffs = oracle::dft(w);
  const double to_raw = static_cast<double>(n * n) / (4.0 * std::numbers::pi * std::numbers::pi);
  long double sum = 0.0L;
  for (std::size_t i = 1; i < coeffs.size(); ++i) {
    const double k = oracle::knorm(i, n);
    sum += std::norm(coeffs[i] * to_raw) * std::pow(n / (2.0 * std::numbers::pi * k), 2);
  }
  EXPECT_NEAR(h, static_cast<double>(sum) / (n * n), 1e-10 * h);

  // the same quantity through the library's -1 seminorm
  const double s = sobolev_seminorm(forward_transform(w, MeanHandling::Remove), SobolevOrder{-1.0});
  const double scale = std::pow(static_cast<double>(n), 4) / std::pow(2.0 * std::numbers::pi, 6);
  EXPECT_NEAR(h, scale * s * s, 1e-10 * h);
}

TEST(InverseLaplacian, IgnoresMean) {
  auto w = oracle::random_grid(16, 11);
  const double h = h_minus_one_energy(w);
  for (double& v : w.values()) v += 5.0;
  EXPECT_NEAR(h_minus_one_energy(w), h, 1e-12 * h);
}

TEST(Osv, ConstantImageUnchanged) {
  const auto g = constant(16, 0.6);
  const auto r = osv_decompose(g, {});
  for (std::size_t i = 0; i < g.pixel_count(); ++i) {
    EXPECT_EQ(r.flow.u.values()[i], 0.6);
    EXPECT_EQ(r.v.values()[i], 0.0);
  }
}

TEST(Osv, EnergyNonIncreasingAndSplit) {
  const auto g = add_gaussian_noise(camera_crop(32), {0.1, 12});
  const FlowConfig cfg{1.0, 0.05, 0.0, 2000, 1e-9};
  const auto r = osv_decompose(g, cfg);
  ASSERT_GT(r.flow.energies.size(), 2u);
  expect_monotone(r.flow.energies);
  EXPECT_NEAR(r.flow.energies.back(), osv_energy(r.flow.u, g, cfg), 1e-10 * r.flow.energies.back());
  double vmean = 0.0;
  for (std::size_t i = 0; i < g.pixel_count(); ++i) {
    EXPECT_EQ(r.v.values()[i], g.values()[i] - r.flow.u.values()[i]);
    vmean += r.v.values()[i];
  }
  EXPECT_NEAR(vmean / static_cast<double>(g.pixel_count()), 0.0, 1e-12);
}

TEST(Osv, LargerWeightKeepsMoreOfTheImage) {
  const auto g = add_gaussian_noise(camera_crop(32), {0.1, 13});
  const auto weak = osv_decompose(g, {0.1, 0.05, 0.0, 2000, 1e-9});
  const auto strong = osv_decompose(g, {10.0, 0.05, 0.0, 2000, 1e-9});
  EXPECT_LT(h_minus_one_energy(strong.v), h_minus_one_energy(weak.v));
}
