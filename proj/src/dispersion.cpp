#include "spdc/dispersion.hpp"

#include "spdc/error.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>

namespace spdc {

const char* to_string(Polarization p) noexcept {
  return p == Polarization::Ordinary ? "o" : "e";
}

SellmeierModel::SellmeierModel(std::string name, Formula formula, std::vector<double> ordinary,
                               std::vector<double> extraordinary, double window_lo_nm,
                               double window_hi_nm)
    : name_(std::move(name)),
      formula_(formula),
      ordinary_(std::move(ordinary)),
      extraordinary_(std::move(extraordinary)),
      window_lo_nm_(window_lo_nm),
      window_hi_nm_(window_hi_nm) {
  if (name_.empty()) throw_config("name", "Sellmeier set needs a name");
  if (!(window_lo_nm_ > 0.0 && window_hi_nm_ > window_lo_nm_))
    throw_config("validity_window_nm", "window must satisfy 0 < lo < hi");
  auto check = [&](const std::vector<double>& c, const char* field) {
    if (formula_ == Formula::PoleMinusIr && c.size() != 4)
      throw_config(std::string("coefficients.") + field, "pole_minus_ir needs 4 coefficients");
    if (formula_ == Formula::Standard && (c.empty() || c.size() % 2 != 0))
      throw_config(std::string("coefficients.") + field, "standard form needs (B, C) pairs");
  };
  check(ordinary_, "ordinary");
  check(extraordinary_, "extraordinary");
}

SellmeierModel SellmeierModel::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw_parse(std::string("Sellmeier file: ") + e.what());
  }
  try {
    const auto id = j.at("formula_id").get<std::string>();
    Formula formula;
    if (id == "pole_minus_ir")
      formula = Formula::PoleMinusIr;
    else if (id == "sellmeier_standard")
      formula = Formula::Standard;
    else
      throw_config("formula_id", "unknown formula id '" + id + "'");
    const auto& window = j.at("validity_window_nm");
    if (!window.is_array() || window.size() != 2)
      throw_config("validity_window_nm", "expected [lo, hi]");
    return SellmeierModel(j.at("name").get<std::string>(), formula,
                          j.at("coefficients").at("ordinary").get<std::vector<double>>(),
                          j.at("coefficients").at("extraordinary").get<std::vector<double>>(),
                          window[0].get<double>(), window[1].get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw_parse(std::string("Sellmeier file: ") + e.what());
  }
}

SellmeierModel SellmeierModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw_io("cannot open Sellmeier file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::filesystem::path data_directory() {
  if (const char* env = std::getenv("SPDC_DATA_DIR"); env && *env) return env;
  return SPDC_DEFAULT_DATA_DIR;
}

std::shared_ptr<const SellmeierModel> SellmeierModel::default_bbo() {
  static std::once_flag once;
  static std::shared_ptr<const SellmeierModel> model;
  std::call_once(once, [] {
    model = std::make_shared<const SellmeierModel>(load(data_directory() / "bbo_kato1986.json"));
  });
  return model;
}

void SellmeierModel::check_window(Wavelength lambda) const {
  if (!(lambda.nm >= window_lo_nm_ && lambda.nm <= window_hi_nm_)) {
    std::ostringstream os;
    os << "wavelength " << lambda.nm << " nm outside Sellmeier validity window [" << window_lo_nm_
       << ", " << window_hi_nm_ << "] nm of '" << name_ << "'";
    throw_domain(os.str());
  }
}

std::array<double, 3> SellmeierModel::index_squared(const std::vector<double>& c,
                                                    double l) const {
  const double l2 = l * l;
  if (formula_ == Formula::PoleMinusIr) {
    const double A = c[0], B = c[1], C = c[2], D = c[3];
    const double q = l2 - C;
    const double p = A + B / q - D * l2;
    const double dp = -2.0 * B * l / (q * q) - 2.0 * D * l;
    const double d2p = -2.0 * B / (q * q) + 8.0 * B * l2 / (q * q * q) - 2.0 * D;
    return {p, dp, d2p};
  }
  double p = 1.0, dp = 0.0, d2p = 0.0;
  for (std::size_t j = 0; j + 1 < c.size(); j += 2) {
    const double B = c[j], C = c[j + 1];
    const double q = l2 - C;
    p += B * l2 / q;
    dp += -2.0 * B * C * l / (q * q);
    d2p += -2.0 * B * C / (q * q) + 8.0 * B * C * l2 / (q * q * q);
  }
  return {p, dp, d2p};
}

IndexDerivatives SellmeierModel::principal(Polarization axis, Wavelength lambda) const {
  check_window(lambda);
  const auto [p, dp, d2p] = index_squared(
      axis == Polarization::Ordinary ? ordinary_ : extraordinary_, lambda.micrometers());
  if (!(p > 1.0)) throw_domain("Sellmeier set '" + name_ + "' gives n <= 1");
  const double n = std::sqrt(p);
  const double dn = dp / (2.0 * n);
  const double d2n = (d2p - 2.0 * dn * dn) / (2.0 * n);
  return {n, dn, d2n};
}

namespace {

// u = 1/n^2 for a principal index with its wavelength derivatives.
std::array<double, 3> inverse_square(const IndexDerivatives& d) {
  const double p = d.n * d.n;
  const double dp = 2.0 * d.n * d.dn;
  const double d2p = 2.0 * (d.dn * d.dn + d.n * d.d2n);
  return {1.0 / p, -dp / (p * p), 2.0 * dp * dp / (p * p * p) - d2p / (p * p)};
}

void check_angle(const WavePolarization& pol) {
  if (!(pol.theta_deg >= 0.0 && pol.theta_deg <= 90.0))
    throw_domain("propagation angle must lie in [0, 90] deg, got " +
                 std::to_string(pol.theta_deg));
}

}  // namespace

IndexDerivatives index_with_derivatives(const SellmeierModel& material, WavePolarization pol,
                                        Wavelength lambda) {
  check_angle(pol);
  const auto no = material.principal(Polarization::Ordinary, lambda);
  if (pol.kind == Polarization::Ordinary) return no;
  const auto ne = material.principal(Polarization::Extraordinary, lambda);

  // 1/n(theta)^2 = cos^2/n_o^2 + sin^2/n_e^2
  const double th = deg_to_rad(pol.theta_deg);
  const double c2 = std::cos(th) * std::cos(th);
  const double s2 = std::sin(th) * std::sin(th);
  const auto uo = inverse_square(no);
  const auto ue = inverse_square(ne);
  const double u = c2 * uo[0] + s2 * ue[0];
  const double du = c2 * uo[1] + s2 * ue[1];
  const double d2u = c2 * uo[2] + s2 * ue[2];

  const double n = 1.0 / std::sqrt(u);
  const double dn = -0.5 * n * n * n * du;
  const double d2n = 0.75 * n * n * n * n * n * du * du - 0.5 * n * n * n * d2u;
  return {n, dn, d2n};
}

double refractive_index(const SellmeierModel& material, WavePolarization pol, Wavelength lambda) {
  return index_with_derivatives(material, pol, lambda).n;
}

double wavevector_rad_per_mm(const SellmeierModel& material, WavePolarization pol,
                             AngularFrequency omega) {
  const double n = refractive_index(material, pol, omega.to_wavelength());
  return n * omega.rad_per_fs / kSpeedOfLightMmPerFs;
}

double walkoff_deg(const SellmeierModel& material, WavePolarization pol, Wavelength lambda) {
  check_angle(pol);
  material.check_window(lambda);
  if (pol.kind == Polarization::Ordinary || pol.theta_deg == 0.0 || pol.theta_deg == 90.0)
    return 0.0;
  const double no = material.principal(Polarization::Ordinary, lambda).n;
  const double ne = material.principal(Polarization::Extraordinary, lambda).n;
  const double n = refractive_index(material, pol, lambda);
  const double th = deg_to_rad(pol.theta_deg);
  const double tan_rho = 0.5 * n * n * (1.0 / (ne * ne) - 1.0 / (no * no)) * std::sin(2.0 * th);
  return rad_to_deg(std::atan(tan_rho));
}

WaveDispersion wave_dispersion(const SellmeierModel& material, WavePolarization pol,
                               Wavelength lambda0) {
  const auto idx = index_with_derivatives(material, pol, lambda0);
  const double omega = lambda0.to_frequency().rad_per_fs;
  const double l = lambda0.micrometers();

  // Chain rule from wavelength (um) to angular frequency: dl/dw = -l/w, d2l/dw2 = 2l/w^2.
  const double dn_dw = idx.dn * (-l / omega);
  const double d2n_dw2 = idx.d2n * (l / omega) * (l / omega) + idx.dn * (2.0 * l / (omega * omega));

  WaveDispersion d;
  d.k_rad_per_nm = idx.n * omega / kSpeedOfLightNmPerFs;
  d.N_fs_per_mm = (idx.n + omega * dn_dw) / kSpeedOfLightMmPerFs;
  d.D_fs2_per_mm = (2.0 * dn_dw + omega * d2n_dw2) / kSpeedOfLightMmPerFs;
  d.rho_deg = walkoff_deg(material, pol, lambda0);
  return d;
}

}  // namespace spdc
