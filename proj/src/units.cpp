#include "spdc/units.hpp"

#include "spdc/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace spdc {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Config: return "config";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Numeric: return "numeric";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

AngularFrequency Wavelength::to_frequency() const {
  if (!(nm > 0.0) || !std::isfinite(nm))
    throw_domain("wavelength must be positive and finite, got " + std::to_string(nm) + " nm");
  return AngularFrequency{2.0 * kPi * kSpeedOfLightNmPerFs / nm};
}

Wavelength AngularFrequency::to_wavelength() const {
  if (!(rad_per_fs > 0.0) || !std::isfinite(rad_per_fs))
    throw_domain("angular frequency must be positive and finite, got " +
                 std::to_string(rad_per_fs) + " rad/fs");
  return Wavelength{2.0 * kPi * kSpeedOfLightNmPerFs / rad_per_fs};
}

double detuning(Wavelength lambda, Wavelength center) {
  return lambda.to_frequency().rad_per_fs - center.to_frequency().rad_per_fs;
}

double bandwidth_nm_to_rad_per_fs(double fwhm_nm, Wavelength center) {
  return 2.0 * kPi * kSpeedOfLightNmPerFs * fwhm_nm / (center.nm * center.nm);
}

double bandwidth_rad_per_fs_to_nm(double fwhm_rad_per_fs, Wavelength center) {
  return fwhm_rad_per_fs * center.nm * center.nm / (2.0 * kPi * kSpeedOfLightNmPerFs);
}

}  // namespace spdc

#include "spdc/hash.hpp"

#include <charconv>
#include <cstdio>

namespace spdc {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hash_hex(std::string_view bytes, int digits) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
  return std::string(buf, buf + std::min(digits, 16));
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace spdc
