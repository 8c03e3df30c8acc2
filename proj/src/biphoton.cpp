#include "spdc/biphoton.hpp"

#include "spdc/error.hpp"
#include "spdc/hash.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

namespace spdc {

namespace {

double sinc(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

std::vector<double> linear_axis(double center, double half_span, int n) {
  std::vector<double> axis(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) axis[k] = center - half_span + 2.0 * half_span * k / (n - 1);
  return axis;
}

std::string grid_fingerprint(const CrystalConfig& crystal, const PumpConfig& pump, double xi_deg,
                             int n_s, int n_i, double span_s, double span_i) {
  std::ostringstream os;
  os << "jsa|" << crystal.material->name() << '|' << format_double(crystal.length_mm) << '|'
     << format_double(crystal.theta_pm_deg) << '|' << format_double(crystal.lambda_p0_nm) << '|'
     << to_string(crystal.pol.pump) << to_string(crystal.pol.signal)
     << to_string(crystal.pol.idler) << '|' << crystal.walkoff_sign[0] << crystal.walkoff_sign[1]
     << crystal.walkoff_sign[2] << '|' << format_double(pump.lambda0_nm) << '|'
     << format_double(pump.fwhm_nm) << '|' << format_double(xi_deg) << '|' << n_s << 'x' << n_i
     << '|' << format_double(span_s) << '|' << format_double(span_i);
  return hash_hex(os.str());
}

// FFTW's planner is not re-entrant.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

void PumpConfig::validate() const {
  if (!(lambda0_nm > 0.0)) throw_config("pump.lambda0_nm", "must be > 0");
  if (!(fwhm_nm > 0.0) || !std::isfinite(fwhm_nm)) throw_config("pump.fwhm_nm", "must be > 0");
}

double PumpConfig::fwhm_rad_per_fs() const {
  return bandwidth_nm_to_rad_per_fs(fwhm_nm, Wavelength{lambda0_nm});
}

std::complex<double> pump_envelope(double total_detuning, const PumpConfig& pump) {
  // |E|^2 = exp(-4 ln2 W^2 / FWHM^2)
  const double fwhm = pump.fwhm_rad_per_fs();
  const double x = total_detuning / fwhm;
  return {std::exp(-2.0 * std::numbers::ln2 * x * x), 0.0};
}

void GridSpec::validate() const {
  if (n_s < 16) throw_config("grid.n_s", "must be >= 16");
  if (n_i < 16) throw_config("grid.n_i", "must be >= 16");
  if (span_s_nm && !(*span_s_nm > 0.0)) throw_config("grid.span_s_nm", "must be > 0");
  if (span_i_nm && !(*span_i_nm > 0.0)) throw_config("grid.span_i_nm", "must be > 0");
}

void JointSpectrumGrid::set_axes(std::vector<double> lambda_s, std::vector<double> lambda_i) {
  lambda_s_nm = std::move(lambda_s);
  lambda_i_nm = std::move(lambda_i);
  const Wavelength center{meta.center_nm};
  omega_s.resize(lambda_s_nm.size());
  omega_i.resize(lambda_i_nm.size());
  for (std::size_t k = 0; k < lambda_s_nm.size(); ++k)
    omega_s[k] = detuning(Wavelength{lambda_s_nm[k]}, center);
  for (std::size_t k = 0; k < lambda_i_nm.size(); ++k)
    omega_i[k] = detuning(Wavelength{lambda_i_nm[k]}, center);
}

void JointSpectrumGrid::normalize() {
  double peak = 0.0;
  for (const auto& a : amplitude) peak = std::max(peak, std::abs(a));
  if (!(peak > 0.0) || !std::isfinite(peak))
    throw_numeric("joint spectrum vanishes on the grid (grid " + meta.grid_hash + ")");
  intensity.resize(amplitude.size());
  for (std::size_t k = 0; k < amplitude.size(); ++k) {
    amplitude[k] /= peak;
    intensity[k] = std::norm(amplitude[k]);
  }
}

void JointSpectrumGrid::validate() const {
  auto increasing = [](const std::vector<double>& v) {
    return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
  };
  if (n_s() < 2 || n_i() < 2) throw_parse("grid needs at least 2 points per axis");
  if (!increasing(lambda_s_nm) || !increasing(lambda_i_nm))
    throw_parse("grid axes must be strictly increasing");
  if (intensity.size() != n_s() * n_i() || amplitude.size() != intensity.size())
    throw_parse("grid matrix size does not match its axes");
}

JointSpectrumGrid evaluate_jsa(const CrystalConfig& crystal, const PumpConfig& pump,
                               const TaylorCoefficients& coeffs, double xi_deg, int n_s, int n_i,
                               double span_s_nm, double span_i_nm) {
  const double center = crystal.downconverted_wavelength().nm;
  if (!(span_s_nm > 0.0 && span_s_nm < center)) throw_config("grid.span_s_nm", "out of range");
  if (!(span_i_nm > 0.0 && span_i_nm < center)) throw_config("grid.span_i_nm", "out of range");

  JointSpectrumGrid g;
  g.meta.xi_deg = xi_deg;
  g.meta.sellmeier_name = crystal.material->name();
  g.meta.crystal_length_mm = crystal.length_mm;
  g.meta.theta_pm_deg = crystal.theta_pm_deg;
  g.meta.lambda_p0_nm = crystal.lambda_p0_nm;
  g.meta.pump_fwhm_nm = pump.fwhm_nm;
  g.meta.center_nm = center;
  g.meta.grid_hash = grid_fingerprint(crystal, pump, xi_deg, n_s, n_i, span_s_nm, span_i_nm);
  g.set_axes(linear_axis(center, span_s_nm, n_s), linear_axis(center, span_i_nm, n_i));

  // Pump detuning is measured from the pump's own center; the grid center sits at half the
  // crystal's pump frequency.
  const double pump_offset = detuning(crystal.pump_wavelength(), Wavelength{pump.lambda0_nm});
  const double half_length = 0.5 * crystal.length_mm;
  g.amplitude.resize(static_cast<std::size_t>(n_s) * n_i);
  for (int is = 0; is < n_s; ++is) {
    const double ws = g.omega_s[is];
    for (int ii = 0; ii < n_i; ++ii) {
      const double wi = g.omega_i[ii];
      const double dk = delta_k_taylor(ws, wi, coeffs);
      g.amplitude[g.index(is, ii)] =
          pump_envelope(ws + wi + pump_offset, pump) * sinc(dk * half_length);
    }
  }
  g.normalize();
  return g;
}

Marginals marginals_unchecked(const JointSpectrumGrid& grid) {
  Marginals m;
  m.signal.assign(grid.n_s(), 0.0);
  m.idler.assign(grid.n_i(), 0.0);
  for (std::size_t is = 0; is < grid.n_s(); ++is)
    for (std::size_t ii = 0; ii < grid.n_i(); ++ii) {
      const double s = grid.S(is, ii);
      m.signal[is] += s;
      m.idler[ii] += s;
    }
  auto norm = [](std::vector<double>& v) {
    const double peak = *std::max_element(v.begin(), v.end());
    if (!(peak > 0.0)) throw_numeric("marginal vanishes");
    for (double& x : v) x /= peak;
    return std::max(v.front(), v.back());
  };
  m.edge_s = norm(m.signal);
  m.edge_i = norm(m.idler);
  try {
    m.fwhm_s_nm = peak_fwhm(grid.lambda_s_nm, m.signal);
  } catch (const Error&) {
    m.fwhm_s_nm = std::nan("");
  }
  try {
    m.fwhm_i_nm = peak_fwhm(grid.lambda_i_nm, m.idler);
  } catch (const Error&) {
    m.fwhm_i_nm = std::nan("");
  }
  return m;
}

Marginals marginals(const JointSpectrumGrid& grid) {
  auto m = marginals_unchecked(grid);
  auto clipped = [](const char* axis, const char* field, double edge) {
    std::ostringstream os;
    os << "support clipped at the " << axis << " axis edge (edge/peak = " << edge
       << "); increase " << field;
    throw_domain(os.str());
  };
  if (m.edge_s >= kEdgeThreshold) clipped("signal", "grid.span_s_nm", m.edge_s);
  if (m.edge_i >= kEdgeThreshold) clipped("idler", "grid.span_i_nm", m.edge_i);
  return m;
}

std::vector<char> connected_support(const JointSpectrumGrid& grid, double threshold,
                                    std::size_t seed) {
  const std::size_t rows = grid.n_s(), cols = grid.n_i();
  std::vector<char> in(rows * cols, 0);
  if (seed >= in.size() || grid.intensity[seed] < threshold) return in;
  std::vector<std::size_t> stack{seed};
  in[seed] = 1;
  while (!stack.empty()) {
    const std::size_t k = stack.back();
    stack.pop_back();
    const std::size_t r = k / cols, c = k % cols;
    auto visit = [&](std::size_t n) {
      if (!in[n] && grid.intensity[n] >= threshold) {
        in[n] = 1;
        stack.push_back(n);
      }
    };
    if (r > 0) visit(k - cols);
    if (r + 1 < rows) visit(k + cols);
    if (c > 0) visit(k - 1);
    if (c + 1 < cols) visit(k + 1);
  }
  return in;
}

std::size_t degenerate_node(const JointSpectrumGrid& grid) {
  auto nearest = [](const std::vector<double>& w) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < w.size(); ++k)
      if (std::abs(w[k]) < std::abs(w[best])) best = k;
    return best;
  };
  return grid.index(nearest(grid.omega_s), nearest(grid.omega_i));
}

Marginals central_lobe_marginals(const JointSpectrumGrid& grid) {
  // Seed on the brightest of the 3x3 nodes around degeneracy; coarse grids can straddle the lobe.
  const std::size_t d = degenerate_node(grid);
  const auto r0 = static_cast<std::ptrdiff_t>(d / grid.n_i());
  const auto c0 = static_cast<std::ptrdiff_t>(d % grid.n_i());
  std::size_t seed = d;
  for (std::ptrdiff_t dr = -1; dr <= 1; ++dr)
    for (std::ptrdiff_t dc = -1; dc <= 1; ++dc) {
      const auto r = r0 + dr, c = c0 + dc;
      if (r < 0 || c < 0 || r >= static_cast<std::ptrdiff_t>(grid.n_s()) ||
          c >= static_cast<std::ptrdiff_t>(grid.n_i()))
        continue;
      const auto k = grid.index(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
      if (grid.intensity[k] > grid.intensity[seed]) seed = k;
    }
  const auto mask = connected_support(grid, 0.1 * kEdgeThreshold, seed);
  if (std::find(mask.begin(), mask.end(), 1) == mask.end()) return marginals_unchecked(grid);
  JointSpectrumGrid lobe = grid;
  for (std::size_t k = 0; k < mask.size(); ++k)
    if (!mask[k]) lobe.intensity[k] = 0.0;
  return marginals_unchecked(lobe);
}

double peak_fwhm(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3) throw_domain("FWHM needs at least 3 samples");
  const auto m = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
  const double half = 0.5 * y[m];
  if (!(half > 0.0)) throw_numeric("FWHM of an all-zero profile");
  std::size_t a = m;
  while (a > 0 && y[a] >= half) --a;
  std::size_t b = m;
  while (b + 1 < y.size() && y[b] >= half) ++b;
  if (y[a] >= half || y[b] >= half) throw_domain("peak does not fall to half maximum inside the range");
  auto cross = [&](std::size_t lo, std::size_t hi) {
    return x[lo] + (half - y[lo]) * (x[hi] - x[lo]) / (y[hi] - y[lo]);
  };
  return std::abs(cross(b - 1, b) - cross(a, a + 1));
}

ResolvedSpans auto_spans(const CrystalConfig& crystal, const PumpConfig& pump,
                         const TiltConfig& tilt, int probe_points) {
  const auto coeffs = taylor_coefficients(crystal, tilt);
  const Wavelength center = crystal.downconverted_wavelength();
  const double cap = 0.75 * center.nm;

  // Initial guesses: the narrower of the pump band and the first-order sinc lobe per axis.
  const double pump_nm = bandwidth_rad_per_fs_to_nm(pump.fwhm_rad_per_fs(), center);
  auto lobe_nm = [&](double n) {
    const double a = std::max(std::abs(n), 1e-3);
    return bandwidth_rad_per_fs_to_nm(5.566 / (crystal.length_mm * a), center);
  };
  double h[2] = {std::clamp(1.5 * std::min(pump_nm, lobe_nm(coeffs.nps)), 0.05, cap),
                 std::clamp(1.5 * std::min(pump_nm, lobe_nm(coeffs.npi)), 0.05, cap)};

  auto probe = [&] {
    return central_lobe_marginals(
        evaluate_jsa(crystal, pump, coeffs, tilt.xi_deg, probe_points, probe_points, h[0], h[1]));
  };
  auto extent = [&](const std::vector<double>& marg, double half_span) {
    // Farthest node from the center still above the edge threshold.
    const int n = static_cast<int>(marg.size());
    double e = 0.0;
    for (int k = 0; k < n; ++k)
      if (marg[k] >= kEdgeThreshold)
        e = std::max(e, std::abs(-half_span + 2.0 * half_span * k / (n - 1)));
    return e;
  };

  // Grow until both marginals are contained.
  for (int it = 0; it < 24; ++it) {
    const auto m = probe();
    const bool grow_s = m.edge_s >= 0.5 * kEdgeThreshold && h[0] < cap;
    const bool grow_i = m.edge_i >= 0.5 * kEdgeThreshold && h[1] < cap;
    if (!grow_s && !grow_i) break;
    if (grow_s) h[0] = std::min(2.0 * h[0], cap);
    if (grow_i) h[1] = std::min(2.0 * h[1], cap);
  }
  // Settle on max(3 FWHM, support extent); repeat once so the FWHM is measured at resolution.
  for (int pass = 0; pass < 2; ++pass) {
    const auto m = probe();
    const double fw[2] = {std::isfinite(m.fwhm_s_nm) ? m.fwhm_s_nm : h[0],
                          std::isfinite(m.fwhm_i_nm) ? m.fwhm_i_nm : h[1]};
    const double ex[2] = {extent(m.signal, h[0]), extent(m.idler, h[1])};
    for (int a = 0; a < 2; ++a)
      h[a] = std::clamp(std::max(3.0 * fw[a], 1.15 * ex[a]), 1e-3, cap);
  }
  return {h[0], h[1]};
}

JointSpectrumGrid compute_jsa(const CrystalConfig& crystal, const PumpConfig& pump,
                              const TiltConfig& tilt, const GridSpec& grid) {
  crystal.validate();
  pump.validate();
  grid.validate();
  const auto coeffs = taylor_coefficients(crystal, tilt);
  if (grid.span_s_nm && grid.span_i_nm)
    return evaluate_jsa(crystal, pump, coeffs, tilt.xi_deg, grid.n_s, grid.n_i, *grid.span_s_nm,
                        *grid.span_i_nm);

  const auto spans = auto_spans(crystal, pump, tilt);
  double h[2] = {grid.span_s_nm.value_or(spans.span_s_nm),
                 grid.span_i_nm.value_or(spans.span_i_nm)};
  const double cap = 0.75 * crystal.downconverted_wavelength().nm;
  auto g = evaluate_jsa(crystal, pump, coeffs, tilt.xi_deg, grid.n_s, grid.n_i, h[0], h[1]);
  // The probe is coarse; widen an auto-sized axis if the full grid still shows clipping.
  for (int it = 0; it < 8; ++it) {
    const auto m = central_lobe_marginals(g);
    const bool grow_s = !grid.span_s_nm && m.edge_s >= kEdgeThreshold && h[0] < cap;
    const bool grow_i = !grid.span_i_nm && m.edge_i >= kEdgeThreshold && h[1] < cap;
    if (!grow_s && !grow_i) break;
    if (grow_s) h[0] = std::min(1.3 * h[0], cap);
    if (grow_i) h[1] = std::min(1.3 * h[1], cap);
    g = evaluate_jsa(crystal, pump, coeffs, tilt.xi_deg, grid.n_s, grid.n_i, h[0], h[1]);
  }
  return g;
}

std::vector<std::complex<double>> forward_dft(std::span<const std::complex<double>> x) {
  const int n = static_cast<int>(x.size());
  std::vector<std::complex<double>> in(x.begin(), x.end()), out(x.size());
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(in.data()),
                            reinterpret_cast<fftw_complex*>(out.data()), FFTW_FORWARD,
                            FFTW_ESTIMATE);
  }
  if (!plan) throw_numeric("FFTW plan creation failed");
  fftw_execute(plan);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

TimeProfile spectral_to_time(std::span<const std::complex<double>> samples, double d_omega,
                             int pad) {
  if (samples.empty() || !(d_omega > 0.0) || pad < 1)
    throw_domain("spectral_to_time needs samples, a positive spacing and pad >= 1");
  const std::size_t m = samples.size() * static_cast<std::size_t>(pad);
  std::vector<std::complex<double>> buf(m, {0.0, 0.0});
  std::copy(samples.begin(), samples.end(), buf.begin());
  const auto spec = forward_dft(buf);

  TimeProfile tp;
  tp.t_fs.resize(m);
  tp.intensity.resize(m);
  const double dt = 2.0 * kPi / (static_cast<double>(m) * d_omega);
  const std::size_t half = m / 2;
  double peak = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    // fftshift: output index k holds frequency bin (k + half) mod m
    const std::size_t src = (k + half) % m;
    tp.t_fs[k] = (static_cast<double>(k) - static_cast<double>(half)) * dt;
    tp.intensity[k] = std::norm(spec[src]);
    peak = std::max(peak, tp.intensity[k]);
  }
  if (!(peak > 0.0)) throw_numeric("transform of an all-zero slice");
  for (double& v : tp.intensity) v /= peak;
  return tp;
}

std::complex<double> interpolate_amplitude(const JointSpectrumGrid& grid, double ls, double li) {
  auto locate = [](const std::vector<double>& axis, double x, std::size_t& k, double& f) {
    if (x < axis.front() || x > axis.back()) return false;
    auto it = std::upper_bound(axis.begin(), axis.end(), x);
    k = it == axis.end() ? axis.size() - 2
                         : static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - axis.begin() - 1, 0));
    k = std::min(k, axis.size() - 2);
    f = (x - axis[k]) / (axis[k + 1] - axis[k]);
    return true;
  };
  std::size_t ks, ki;
  double fs, fi;
  if (!locate(grid.lambda_s_nm, ls, ks, fs) || !locate(grid.lambda_i_nm, li, ki, fi)) return {};
  const auto& a = grid.amplitude;
  return (1 - fs) * (1 - fi) * a[grid.index(ks, ki)] + (1 - fs) * fi * a[grid.index(ks, ki + 1)] +
         fs * (1 - fi) * a[grid.index(ks + 1, ki)] + fs * fi * a[grid.index(ks + 1, ki + 1)];
}

AntidiagonalSlice antidiagonal_slice(const JointSpectrumGrid& grid, int samples) {
  if (samples < 8) throw_domain("antidiagonal slice needs at least 8 samples");
  const auto [smin, smax] = std::minmax_element(grid.omega_s.begin(), grid.omega_s.end());
  const auto [imin, imax] = std::minmax_element(grid.omega_i.begin(), grid.omega_i.end());
  const double lo = std::max(*smin, -*imax);
  const double hi = std::min(*smax, -*imin);
  if (!(hi > lo)) throw_domain("grid does not cover the antidiagonal ws = -wi");

  const double wc = Wavelength{grid.meta.center_nm}.to_frequency().rad_per_fs;
  const double two_pi_c = 2.0 * kPi * kSpeedOfLightNmPerFs;
  AntidiagonalSlice s;
  s.omega.resize(samples);
  s.amplitude.resize(samples);
  for (int k = 0; k < samples; ++k) {
    // Stay a hair inside the range so the end points interpolate.
    const double w = lo + (hi - lo) * (1e-9 + (1.0 - 2e-9) * k / (samples - 1));
    s.omega[k] = w;
    s.amplitude[k] = interpolate_amplitude(grid, two_pi_c / (wc + w), two_pi_c / (wc - w));
  }
  return s;
}

double temporal_correlation_width(const JointSpectrumGrid& grid) {
  const auto slice = antidiagonal_slice(grid, 1024);
  std::vector<double> inten(slice.amplitude.size());
  for (std::size_t k = 0; k < inten.size(); ++k) inten[k] = std::norm(slice.amplitude[k]);
  const double peak = *std::max_element(inten.begin(), inten.end());
  if (!(peak >= 0.1))
    throw_domain("insufficient antidiagonal support: slice peak " + std::to_string(peak) +
                 " of the joint-spectrum maximum");
  const auto above = std::count_if(inten.begin(), inten.end(), [&](double v) { return v >= 0.5 * peak; });
  if (above < 4) throw_domain("insufficient antidiagonal support: slice under-resolved");
  if (std::max(inten.front(), inten.back()) > 1e-2 * peak)
    throw_domain("insufficient antidiagonal support: slice clipped by the grid");

  const double d_omega = slice.omega[1] - slice.omega[0];
  const auto tp = spectral_to_time(slice.amplitude, d_omega, 8);
  return peak_fwhm(tp.t_fs, tp.intensity);
}

}  // namespace spdc
