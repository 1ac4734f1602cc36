#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fraclap/spectral.hpp"
#include "oracles.hpp"

using namespace fraclap;

namespace {

double max_abs_diff(std::span<const Complex> a, std::span<const Complex> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST(ForwardTransform, ConstantImageHasOnlyZeroMode) {
  const PixelGrid g(8, 0.3);
  const auto f = forward_transform(g);
  EXPECT_NEAR(f[0].real(), kTorusVolume * 0.3, 1e-12);
  for (std::size_t i = 1; i < f.mode_count(); ++i) EXPECT_LT(std::abs(f[i]), 1e-12);
}

TEST(ForwardTransform, CosineHasTwoModes) {
  const std::size_t n = 8;
  PixelGrid g(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) g(r, c) = std::cos(kTwoPi * static_cast<double>(r) / n);
  const auto f = forward_transform(g);
  for (std::size_t i = 0; i < f.mode_count(); ++i) {
    const int k1 = SpectralField::frequency(i / n, n), k2 = SpectralField::frequency(i % n, n);
    if (k2 == 0 && (k1 == 1 || k1 == -1)) {
      EXPECT_NEAR(std::abs(f[i]), kTorusVolume / 2.0, 1e-12);
    } else {
      EXPECT_LT(std::abs(f[i]), 1e-12);
    }
  }
}

TEST(ForwardTransform, MatchesBruteForceDft) {
  for (std::size_t n : {4u, 6u, 8u}) {
    const auto g = oracle::random_grid(n, 11 + n);
    const auto f = forward_transform(g);
    const auto ref = oracle::dft(g);
    EXPECT_LT(max_abs_diff(f.coefficients(), ref), 1e-12) << "n = " << n;
  }
}

TEST(ForwardTransform, MeanRemoval) {
  const auto g = oracle::random_grid(16, 5);
  const auto f = forward_transform(g, MeanHandling::Remove);
  EXPECT_TRUE(f.zero_mean());
  EXPECT_NEAR(f.mean_offset(), g.mean(), 1e-14);
  const auto back = inverse_transform(f);
  for (std::size_t i = 0; i < g.pixel_count(); ++i) EXPECT_NEAR(back.values()[i], g.values()[i], 1e-12);
}

TEST(ForwardTransform, RejectsOddSize) {
  EXPECT_THROW(PixelGrid(7), ConfigError);
  EXPECT_THROW(SpectralField(3), ConfigError);
}

TEST(ForwardTransform, RejectsNonFinite) {
  PixelGrid g(4);
  g(1, 1) = std::nan("");
  EXPECT_THROW(forward_transform(g), ArgumentError);
}

TEST(InverseTransform, ZeroFieldGivesZeroGrid) {
  const auto g = inverse_transform(SpectralField(8));
  for (double v : g.values()) EXPECT_EQ(v, 0.0);
}

TEST(InverseTransform, RoundTripAllSizes) {
  for (std::size_t n : {4u, 8u, 16u, 64u, 256u}) {
    const auto g = oracle::random_grid(n, n);
    const auto back = inverse_transform(forward_transform(g), ImagPolicy::Verify);
    double err = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < g.pixel_count(); ++i) {
      err = std::max(err, std::abs(back.values()[i] - g.values()[i]));
      ref = std::max(ref, std::abs(g.values()[i]));
    }
    EXPECT_LT(err / ref, 1e-12) << "n = " << n;

    const auto f = forward_transform(g);
    const auto f2 = forward_transform(inverse_transform(f));
    EXPECT_LT(max_abs_diff(f.coefficients(), f2.coefficients()), 1e-12 * kTorusVolume) << "n = " << n;
  }
}

TEST(InverseTransform, SingleModeSamples) {
  const std::size_t n = 8;
  SpectralField f(n);
  f.at(1, 1) = kTorusVolume;
  const auto g = inverse_transform(f);
  const auto ref = oracle::synth(f);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const double x = kTwoPi * static_cast<double>(r + c) / n;
      EXPECT_NEAR(g(r, c), std::cos(x), 1e-13);
      EXPECT_NEAR(g(r, c), ref[r * n + c].real(), 1e-13);
    }
  }
  EXPECT_THROW(inverse_transform(f, ImagPolicy::Verify), NumericalError);
}

TEST(InverseTransform, MatchesBruteForceSynthesis) {
  const auto f = oracle::random_field(6, 3);
  const auto z = synthesize(f);
  const auto ref = oracle::synth(f);
  EXPECT_LT(max_abs_diff(z, ref), 1e-13);
}

TEST(Parseval, DiscreteNormMatchesCoefficientNorm) {
  for (std::size_t n : {4u, 8u, 16u, 64u, 256u}) {
    const auto g = oracle::random_grid(n, 100 + n, -1.0, 1.0);
    const double lhs = discrete_norm(g);
    const double rhs = l2_norm(forward_transform(g)) / kTwoPi;
    EXPECT_NEAR(lhs, rhs, 1e-12 * lhs) << "n = " << n;
  }
}

TEST(FractionalLaplacian, OrderZeroIsIdentity) {
  const auto f = oracle::random_field(8, 1);
  const auto out = fractional_laplacian(f, SobolevOrder{0.0});
  EXPECT_EQ(max_abs_diff(out.coefficients(), f.coefficients()), 0.0);
}

TEST(FractionalLaplacian, LiteralModes) {
  SpectralField f(8);
  f.at(1, 0) = 1.0;
  f.at(2, 1) = 1.0;
  const auto out = fractional_laplacian(f, SobolevOrder{1.0});
  EXPECT_NEAR(out.at(1, 0).real(), 1.0, 1e-15);
  EXPECT_NEAR(out.at(2, 1).real(), 5.0, 1e-14);
}

TEST(FractionalLaplacian, MatchesPerModeLoop) {
  const auto f = oracle::random_field(8, 2);
  const auto out = fractional_laplacian(f, SobolevOrder{0.5});
  for (std::size_t i = 1; i < f.mode_count(); ++i) {
    const Complex expect = oracle::knorm(i, 8) * f[i];
    EXPECT_LT(std::abs(out[i] - expect), 1e-13 * std::abs(expect));
  }
  EXPECT_EQ(out[0], Complex(0.0));
}

TEST(FractionalLaplacian, Errors) {
  const auto f = oracle::random_field(8, 2);
  EXPECT_THROW(fractional_laplacian(f, SobolevOrder{-0.1}), DomainError);
  auto g = f;
  g[0] = 1.0;
  EXPECT_THROW(fractional_laplacian(g, SobolevOrder{0.5}), PreconditionError);
  EXPECT_THROW(riesz_potential(f, SobolevOrder{0.1}), DomainError);
  EXPECT_THROW(riesz_potential(g, SobolevOrder{-0.5}), PreconditionError);
}

TEST(RieszPotential, IdentityAndLiteral) {
  const auto f = oracle::random_field(8, 4);
  EXPECT_EQ(max_abs_diff(riesz_potential(f, SobolevOrder{0.0}).coefficients(), f.coefficients()), 0.0);
  SpectralField m(8);
  m.at(2, 0) = 1.0;
  EXPECT_NEAR(riesz_potential(m, SobolevOrder{-0.5}).at(2, 0).real(), 0.5, 1e-15);
}

TEST(RieszPotential, InvertsFractionalLaplacian) {
  const auto f = oracle::random_field(16, 5);
  const auto back = riesz_potential(fractional_laplacian(f, SobolevOrder{0.3}), SobolevOrder{-0.3});
  for (std::size_t i = 1; i < f.mode_count(); ++i) EXPECT_LT(std::abs(back[i] - f[i]), 1e-12 * std::abs(f[i]));
}

TEST(SobolevSeminorm, TrivialCases) {
  for (double gamma : {-0.5, 0.0, 0.7, 2.0}) EXPECT_EQ(sobolev_seminorm(SpectralField(8), SobolevOrder{gamma}), 0.0);
  SpectralField f(8);
  f.at(1, 0) = 1.0;
  for (double gamma : {-1.0, 0.0, 0.3, 1.5}) EXPECT_NEAR(sobolev_seminorm(f, SobolevOrder{gamma}), 1.0, 1e-15);
}

TEST(SobolevSeminorm, MatchesBruteForceSum) {
  const auto f = oracle::random_field(8, 6);
  EXPECT_NEAR(sobolev_seminorm(f, SobolevOrder{0.7}), std::sqrt(oracle::seminorm_sq(f, 0.7)),
              1e-12 * std::sqrt(oracle::seminorm_sq(f, 0.7)));
}

TEST(SobolevSeminorm, ZeroOrderIsCoefficientNorm) {
  auto f = oracle::random_field(8, 7);
  f[0] = 2.0;
  double sum = 0.0;
  for (auto c : f.coefficients()) sum += std::norm(c);
  EXPECT_NEAR(l2_norm(f), std::sqrt(sum), 1e-13);
}

TEST(SobolevSeminorm, MonotoneInOrder) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto f = oracle::random_field(16, 200 + trial);
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    EXPECT_LE(sobolev_seminorm(f, SobolevOrder{a}), sobolev_seminorm(f, SobolevOrder{b})) << a << " " << b;
  }
}

TEST(Project, FullSizeIsIdentityAndNested) {
  const auto f = oracle::random_field(16, 9);
  EXPECT_EQ(max_abs_diff(project(f, 16).coefficients(), f.coefficients()), 0.0);
  const auto a = project(project(f, 8), 4);
  const auto b = project(f, 4);
  EXPECT_EQ(max_abs_diff(a.coefficients(), b.coefficients()), 0.0);
  const auto c = project(project(f, 8), 8);
  EXPECT_EQ(max_abs_diff(c.coefficients(), project(f, 8).coefficients()), 0.0);
  EXPECT_THROW(project(f, 32), ArgumentError);
}

TEST(Project, KeepsExactlyTheCentredIndexSet) {
  const auto f = oracle::random_field(16, 10);
  const auto p = project(f, 6);
  for (int k1 = -8; k1 < 8; ++k1)
    for (int k2 = -8; k2 < 8; ++k2) {
      const bool keep = k1 >= -3 && k1 <= 2 && k2 >= -3 && k2 <= 2;
      EXPECT_EQ(p.at(k1, k2), keep ? f.at(k1, k2) : Complex(0.0));
    }
}

TEST(Project, ErrorBoundHolds) {
  // |v - P_m v|_{γ1} ≤ (m/2)^{-(γ2-γ1)} |v|_{γ2}
  for (int trial = 0; trial < 10; ++trial) {
    const auto v = oracle::random_field(64, 300 + trial);
    for (std::size_t m : {4u, 8u, 16u, 32u}) {
      for (auto [g1, g2] : {std::pair{0.0, 1.0}, std::pair{0.5, 2.0}, std::pair{-0.5, 0.25}}) {
        const double lhs = sobolev_seminorm(v - project(v, m), SobolevOrder{g1});
        const double rhs = std::pow(m / 2.0, -(g2 - g1)) * sobolev_seminorm(v, SobolevOrder{g2});
        EXPECT_LE(lhs, rhs * (1.0 + 1e-12));
      }
    }
  }
}

TEST(Resize, PadsAndTruncates) {
  const auto f = oracle::random_field(8, 12);
  const auto big = resize(f, 16);
  const auto back = resize(big, 8);
  EXPECT_EQ(max_abs_diff(back.coefficients(), f.coefficients()), 0.0);
  const auto small = resize(f, 4);
  EXPECT_EQ(small.at(-2, 1), f.at(-2, 1));
}

TEST(Interpolate, FullSizeMatchesForward) {
  const auto g = oracle::random_grid(16, 13);
  EXPECT_EQ(max_abs_diff(interpolate(g, 16).coefficients(), forward_transform(g).coefficients()), 0.0);
  EXPECT_THROW(interpolate(g, 6), ArgumentError);
}

TEST(Interpolate, BandLimitedHasNoAliasing) {
  // modes with |k_i| < m/2 - 1 only
  const std::size_t n = 64, m = 16;
  SpectralField f(n);
  std::mt19937_64 rng(14);
  std::normal_distribution<double> d;
  for (int k1 = -6; k1 <= 6; ++k1)
    for (int k2 = -6; k2 <= 6; ++k2) {
      if (k1 == 0 && k2 == 0) continue;
      if (f.at(k1, k2) != Complex(0.0)) continue;
      const Complex c(d(rng), d(rng));
      f.at(k1, k2) = c;
      f.at(-k1, -k2) = std::conj(c);
    }
  const auto g = inverse_transform(f, ImagPolicy::Verify);
  const auto a = interpolate(g, m);
  const auto b = resize(project(forward_transform(g), m), m);
  EXPECT_LT(max_abs_diff(a.coefficients(), b.coefficients()), 1e-11);
}
