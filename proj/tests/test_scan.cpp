#include "support.hpp"

#include "spdc/error.hpp"
#include "spdc/scan.hpp"

#include <doctest.h>

#include <numeric>

using namespace spdc;

namespace {

// 41 x 41 nodes on 790..810 nm: a 0.5 nm scan step lands exactly on nodes. The Gaussians
// used below fall below 1e-7 at the window edges.
JointSpectrumGrid node_aligned_grid(double a, double b, double c) {
  return testing::synthetic_grid(
      [=](double x, double y) {
        return std::complex<double>(std::exp(-0.5 * (a * x * x + b * y * y + 2 * c * x * y)), 0);
      },
      41, 10.0);
}

ScanConfig aligned_scan(double peak_rate) {
  ScanConfig s;
  s.bandpass_fwhm_nm = 0.0;
  s.step_s_nm = s.step_i_nm = 0.5;
  s.pair_rate_peak = peak_rate;
  s.singles_efficiency = 0.2;
  return s;
}

ScanConfig centered_scan(double half_nm, double step, double peak_rate, std::uint64_t seed) {
  ScanConfig s;
  s.bandpass_fwhm_nm = 1e-3;
  s.step_s_nm = s.step_i_nm = step;
  s.range_s = WavelengthRange{800.0 - half_nm, 800.0 + half_nm};
  s.range_i = s.range_s;
  s.pair_rate_peak = peak_rate;
  s.rng_seed = seed;
  return s;
}

}  // namespace

TEST_CASE("delta bandpass is the identity on grid nodes") {
  const auto g = testing::default_grid(0.0, 2.0, 128);
  const auto zero = bandpass_convolved(g, 0.0);
  const auto tiny = bandpass_convolved(g, 1e-6);
  for (std::size_t k = 0; k < g.intensity.size(); ++k) {
    CHECK(std::abs(zero[k] - g.intensity[k]) < 1e-9);
    CHECK(std::abs(tiny[k] - g.intensity[k]) < 1e-9);
  }
}

TEST_CASE("finite bandpass broadens and stays peak-normalized") {
  const auto g = node_aligned_grid(30000.0, 30000.0, 0.0);
  const auto conv = bandpass_convolved(g, 3.0);
  CHECK(*std::max_element(conv.begin(), conv.end()) == doctest::Approx(1.0));
  const std::size_t edge = g.index(20, 25);
  CHECK(conv[edge] > g.intensity[edge]);
}

TEST_CASE("mean counts converge to S at 1e6 peak counts") {
  const auto g = node_aligned_grid(30000.0, 20000.0, 12000.0);
  auto cfg = aligned_scan(1e6);
  const auto recs = simulate_scan(g, cfg);
  REQUIRE(recs.size() == g.intensity.size());
  double worst = 0.0;
  for (std::size_t k = 0; k < recs.size(); ++k) {
    const double s = g.intensity[k];
    if (s < 0.05) continue;
    worst = std::max(worst, std::abs(static_cast<double>(recs[k].coincidences) / 1e6 - s) / s);
  }
  CHECK(worst < 0.02);
}

TEST_CASE("fixed seed is reproducible and independent of thread count") {
  const auto g = node_aligned_grid(30000.0, 20000.0, 0.0);
  auto cfg = aligned_scan(1e4);
  cfg.rng_seed = 7;
  const auto a = simulate_scan(g, cfg, 1);
  const auto b = simulate_scan(g, cfg, 8);
  const auto c = simulate_scan(g, cfg, 3);
  CHECK(scan_csv_text(a, "") == scan_csv_text(b, ""));
  CHECK(scan_csv_text(a, "") == scan_csv_text(c, ""));
  cfg.rng_seed = 8;
  CHECK(scan_csv_text(simulate_scan(g, cfg), "") != scan_csv_text(a, ""));
}

TEST_CASE("Poisson variance matches the mean over 1000 repeats") {
  const auto g = node_aligned_grid(30000.0, 20000.0, 0.0);
  auto cfg = aligned_scan(150.0);
  cfg.range_s = WavelengthRange{800.0, 800.0};
  cfg.range_i = WavelengthRange{800.0, 800.0};
  std::vector<double> x;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    cfg.rng_seed = seed;
    const auto r = simulate_scan(g, cfg, 1);
    REQUIRE(r.size() == 1);
    x.push_back(static_cast<double>(r[0].coincidences));
  }
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= (x.size() - 1);
  CHECK(mean == doctest::Approx(150.0).epsilon(0.05));
  CHECK(std::abs(var - mean) / mean < 0.10);
}

TEST_CASE("expected coincidences scale linearly with integration time") {
  const auto g = node_aligned_grid(30000.0, 20000.0, 8000.0);
  auto total = [&](double t) {
    double sum = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      auto cfg = aligned_scan(200.0);
      cfg.integration_time_s = t;
      cfg.rng_seed = seed;
      for (const auto& r : simulate_scan(g, cfg)) sum += static_cast<double>(r.coincidences);
    }
    return sum;
  };
  CHECK(total(4.0) / total(1.0) == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("dark rate adds a flat floor; singles follow the marginals") {
  const auto g = node_aligned_grid(30000.0, 20000.0, 0.0);
  auto cfg = aligned_scan(1000.0);
  cfg.dark_coincidence_rate = 25.0;
  const auto rates = expected_scan_rates(g, cfg);
  double lo = 1e300;
  for (const auto& r : rates) lo = std::min(lo, r.coincidences);
  CHECK(lo == doctest::Approx(25.0).epsilon(1e-6));
  double peak_singles = 0.0;
  for (const auto& r : rates) peak_singles = std::max(peak_singles, r.singles_s);
  CHECK(peak_singles == doctest::Approx(1000.0 / 0.2).epsilon(1e-9));
}

TEST_CASE("scan range outside the grid is rejected") {
  const auto g = node_aligned_grid(30000.0, 20000.0, 0.0);
  auto cfg = aligned_scan(100.0);
  cfg.range_s = WavelengthRange{780.0, 800.0};
  CHECK_THROWS_AS(simulate_scan(g, cfg), Error);
}

TEST_CASE("scan config validation and sampling warning") {
  ScanConfig s;
  s.step_s_nm = 0.0;
  CHECK_THROWS_AS(s.validate(), Error);
  s = {};
  s.step_i_nm = 0.5;
  CHECK_NOTHROW(s.validate());
  CHECK_FALSE(s.warnings().empty());
  CHECK(ScanConfig{}.warnings().empty());
}

TEST_CASE("scan CSV: exact header, round trip, parse errors") {
  const auto g = node_aligned_grid(30000.0, 20000.0, 0.0);
  const auto recs = simulate_scan(g, aligned_scan(500.0));
  const auto text = scan_csv_text(recs, "note");
  CHECK(text.rfind("# note\nlambda_s_nm,lambda_i_nm,coincidences,singles_s,singles_i,t_s\n", 0) == 0);
  const auto back = parse_scan_csv(text);
  REQUIRE(back.size() == recs.size());
  for (std::size_t k = 0; k < recs.size(); ++k) {
    CHECK(back[k].coincidences == recs[k].coincidences);
    CHECK(back[k].singles_i == recs[k].singles_i);
    CHECK(back[k].lambda_s_nm == doctest::Approx(recs[k].lambda_s_nm).epsilon(1e-9));
  }
  CHECK_THROWS_AS(parse_scan_csv(""), Error);
  CHECK_THROWS_AS(parse_scan_csv("lambda_s,lambda_i\n1,2\n"), Error);
  CHECK_THROWS_AS(parse_scan_csv(std::string(kScanCsvHeader) + "\n800,800,1,2\n"), Error);
  CHECK_THROWS_AS(parse_scan_csv(std::string(kScanCsvHeader) + "\n800,800,-1,2,3,1\n"), Error);
  // CRLF line endings are accepted.
  CHECK(parse_scan_csv(std::string(kScanCsvHeader) + "\r\n800,800,1,2,3,1\r\n").size() == 1);
}

TEST_CASE("ingest rejects ragged scans") {
  const std::string h = std::string(kScanCsvHeader) + "\n";
  CHECK_THROWS_AS(ingest_scan(parse_scan_csv(h + "800,800,1,1,1,1\n800,801,1,1,1,1\n801,800,1,1,1,1\n")),
                  Error);
  CHECK_THROWS_AS(ingest_scan(parse_scan_csv(h + "800,800,1,1,1,1\n800,800,1,1,1,1\n801,800,1,1,1,1\n801,801,1,1,1,1\n")),
                  Error);
}

TEST_CASE("ingest: dark subtraction, clipping count, intensity-only flag") {
  const auto g = node_aligned_grid(30000.0, 20000.0, 0.0);
  auto cfg = aligned_scan(2000.0);
  cfg.dark_coincidence_rate = 40.0;
  cfg.rng_seed = 11;
  const auto ing = ingest_scan(simulate_scan(g, cfg), 800.0);
  CHECK(ing.grid.meta.intensity_only);
  CHECK(ing.dark_rate_estimate == doctest::Approx(40.0).epsilon(0.5));
  CHECK(ing.clipped_points > 0);
  double peak = 0.0;
  for (double s : ing.grid.intensity) {
    CHECK(s >= 0.0);
    peak = std::max(peak, s);
  }
  CHECK(peak == doctest::Approx(1.0));
}

TEST_CASE("simulate then ingest then fit recovers r") {
  for (double xi : {0.0, -52.0}) {
    const auto g = testing::default_grid(xi);
    const auto model = fit_gaussian(g);
    const auto ing = ingest_scan(simulate_scan(g, centered_scan(12.0, 0.25, 1e6, 3)), 800.0);
    const auto fit = fit_gaussian(ing.grid);
    CHECK(std::abs(fit.r - model.r) <= 0.05);
  }
}

TEST_CASE("separable synthetic state stays separable through the scan at 1e4 counts") {
  const auto g = node_aligned_grid(30000.0, 20000.0, 0.0);
  auto cfg = aligned_scan(1e4);
  cfg.rng_seed = 99;
  const auto fit = fit_gaussian(ingest_scan(simulate_scan(g, cfg), 800.0).grid);
  CHECK(fit.metric <= 0.05);
}
