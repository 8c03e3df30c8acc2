#include "support.hpp"

#include "spdc/error.hpp"

#include <doctest.h>

using namespace spdc;

namespace {

// Two-mode Gaussian amplitude exp(-a x^2 - b y^2 - 2 c x y): Schmidt weights are geometric,
// lambda_n = (1 - mu^2) mu^(2n) with mu = (1 - sqrt(1 - t^2)) / t, t = c / sqrt(ab).
std::vector<double> gaussian_schmidt(double a, double b, double c, int n) {
  const double t = std::abs(c) / std::sqrt(a * b);
  const double mu = t == 0 ? 0.0 : (1 - std::sqrt(1 - t * t)) / t;
  std::vector<double> out;
  for (int k = 0; k < n; ++k) out.push_back((1 - mu * mu) * std::pow(mu, 2 * k));
  return out;
}

SchmidtResult schmidt_of_gaussian_amplitude(double a, double b, double c, int n, double half) {
  std::vector<double> x(n);
  for (int k = 0; k < n; ++k) x[k] = -half + 2 * half * k / (n - 1);
  std::vector<std::complex<double>> m(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      m[i * n + j] = std::exp(-a * x[i] * x[i] - b * x[j] * x[j] - 2 * c * x[i] * x[j]);
  const auto w = axis_weights(x);
  return schmidt_from_matrix(m, n, n, w, w);
}

}  // namespace

TEST_CASE("Gaussian self-fit recovers a, b, c") {
  const double a = 3000.0, b = 1800.0, c = -1200.0;
  const auto g = testing::gaussian_intensity_grid(a, b, c);
  const auto f = fit_gaussian(g);
  CHECK(f.a == doctest::Approx(a).epsilon(1e-6));
  CHECK(f.b == doctest::Approx(b).epsilon(1e-6));
  CHECK(f.c == doctest::Approx(c).epsilon(1e-6));
  CHECK(f.r == doctest::Approx(-c / std::sqrt(a * b)).epsilon(1e-6));
  CHECK(f.overlap == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(f.metric - f.r * f.r) < 1e-12);
}

TEST_CASE("separable Gaussian fits to metric 0 and r 0") {
  const auto f = fit_gaussian(testing::gaussian_intensity_grid(2500.0, 900.0, 0.0));
  CHECK(std::abs(f.metric) < 1e-9);
  CHECK(std::abs(f.r) < 1e-9);
}

TEST_CASE("fit precondition: three points above half maximum per axis") {
  const auto g = testing::gaussian_intensity_grid(1e7, 1e7, 0.0, 32, 20.0);
  CHECK_THROWS_AS(fit_gaussian(g), Error);
}

TEST_CASE("indefinite surfaces are rejected naming the invariant") {
  // Saddle-shaped data: S = exp(-(x^2 + y^2 - 2.4 x y)) is not integrable.
  const auto g = testing::synthetic_grid(
      [](double x, double y) {
        const double q = 3000 * (x * x + y * y) - 2 * 3000 * 1.2 * x * y;
        return std::complex<double>(std::exp(-0.5 * std::max(q, -5.0)), 0);
      },
      64, 10.0);
  try {
    fit_gaussian(g);
    FAIL("expected a fit error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("Gaussian fit violates") != std::string::npos);
    CHECK(std::string(e.what()).find("synthetic") != std::string::npos);
  }
}

TEST_CASE("Schmidt of a product amplitude has zero entropy") {
  const auto g = testing::synthetic_grid(
      [](double x, double y) {
        const double f = std::exp(-900 * x * x) * (1 + 0.3 * std::cos(40 * x));
        const double h = std::exp(-400 * y * y) * std::sin(30 * y + 1.0);
        return std::complex<double>(f * h, 0);
      },
      96, 8.0, 80);
  const auto s = schmidt_decompose(g);
  CHECK(s.entropy_bits < 1e-6);
  CHECK(s.schmidt_number - 1.0 < 1e-6);
  CHECK_FALSE(s.approximate);
}

TEST_CASE("Gaussian-state Schmidt spectrum matches the geometric series") {
  for (double c : {-30.0, 15.0, 45.0}) {
    const double a = 60.0, b = 40.0;
    const auto s = schmidt_of_gaussian_amplitude(a, b, c, 160, 1.2);
    const auto expect = gaussian_schmidt(a, b, c, 8);
    for (int k = 0; k < 8; ++k) CHECK(std::abs(s.coefficients[k] - expect[k]) < 1e-4);
  }
}

TEST_CASE("Schmidt coefficients are descending, sum to one; entropy and K consistent") {
  const auto s = schmidt_decompose(testing::default_grid(0.0));
  double sum = 0.0, sum2 = 0.0, ent = 0.0;
  for (std::size_t k = 0; k < s.coefficients.size(); ++k) {
    const double l = s.coefficients[k];
    CHECK(l >= 0.0);
    if (k) CHECK(l <= s.coefficients[k - 1]);
    sum += l;
    sum2 += l * l;
    if (l > 0) ent -= l * std::log2(l);
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.schmidt_number == doctest::Approx(1.0 / sum2).epsilon(1e-9));
  CHECK(s.entropy_bits == doctest::Approx(ent).epsilon(1e-9));
  CHECK(s.schmidt_number >= 1.0);
}

TEST_CASE("Schmidt entropy invariant under transposition and global scaling") {
  const auto g = testing::default_grid(-35.0, 2.0, 128);
  const auto w_s = axis_weights(g.omega_s), w_i = axis_weights(g.omega_i);
  std::vector<std::complex<double>> t(g.amplitude.size()), scaled = g.amplitude;
  for (std::size_t is = 0; is < g.n_s(); ++is)
    for (std::size_t ii = 0; ii < g.n_i(); ++ii) t[ii * g.n_s() + is] = g.amplitude[g.index(is, ii)];
  for (auto& v : scaled) v *= std::complex<double>(0.0, -7.5);
  const auto a = schmidt_from_matrix(g.amplitude, g.n_s(), g.n_i(), w_s, w_i);
  const auto b = schmidt_from_matrix(t, g.n_i(), g.n_s(), w_i, w_s);
  const auto c = schmidt_from_matrix(scaled, g.n_s(), g.n_i(), w_s, w_i);
  CHECK(std::abs(a.entropy_bits - b.entropy_bits) < 1e-9);
  CHECK(std::abs(a.entropy_bits - c.entropy_bits) < 1e-9);
}

TEST_CASE("entropy grows with |c| at fixed a, b") {
  double prev = -1.0;
  for (double c = 0.0; c <= 54.0; c += 6.0) {
    const double e = schmidt_of_gaussian_amplitude(60.0, 50.0, c, 120, 1.2).entropy_bits;
    CHECK(e > prev);
    prev = e;
  }
}

TEST_CASE("halving the grid step barely moves lambda_1") {
  auto amp = [](double x, double y) {
    return std::complex<double>(std::exp(-1500 * x * x - 1000 * y * y - 1400 * x * y), 0);
  };
  const auto coarse = schmidt_decompose(testing::synthetic_grid(amp, 80, 12.0));
  const auto fine = schmidt_decompose(testing::synthetic_grid(amp, 159, 12.0));
  CHECK(std::abs(coarse.coefficients[0] - fine.coefficients[0]) < 1e-3);
}

TEST_CASE("intensity-only grids are flagged approximate") {
  auto g = testing::gaussian_intensity_grid(2000.0, 2000.0, 500.0, 64);
  g.meta.intensity_only = true;
  CHECK(schmidt_decompose(g).approximate);
}

TEST_CASE("regime classification thresholds") {
  GaussianFitResult f;
  f.r = -0.95;
  f.metric = f.r * f.r;
  CHECK(classify_regime(f) == Regime::Anticorrelated);
  f.r = -0.1;
  f.metric = 0.01;
  CHECK(classify_regime(f) == Regime::Uncorrelated);
  f.r = 0.7;
  f.metric = 0.49;
  CHECK(classify_regime(f) == Regime::Correlated);
  f.r = 0.4;
  f.metric = 0.16;
  CHECK(classify_regime(f) == Regime::Asymmetric);
}

TEST_CASE("default configuration at -20 degrees fits as uncorrelated") {
  const auto f = fit_gaussian(testing::default_grid(-20.0));
  CHECK(f.metric <= 0.05);
  CHECK(f.overlap >= 0.95);
  CHECK(classify_regime(f) == Regime::Uncorrelated);
}

TEST_CASE("default configuration: signs of r at 38 and -52 degrees") {
  CHECK(fit_gaussian(testing::default_grid(38.0)).r <= -0.9);
  CHECK(fit_gaussian(testing::default_grid(-52.0)).r >= 0.5);
}
