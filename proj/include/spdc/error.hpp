#pragma once

#include <stdexcept>
#include <string>

namespace spdc {

enum class ErrorKind {
  Config,   // invalid or unknown configuration field
  Parse,    // malformed input file
  Domain,   // input outside the model's domain (wavelength window, no phase matching, ...)
  Numeric,  // numerical failure (singular fit, decomposition failure, ...)
  Io,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message, std::string field = {})
      : std::runtime_error(std::move(message)), kind_(kind), field_(std::move(field)) {}

  ErrorKind kind() const noexcept { return kind_; }
  // Dotted config path or column name the error refers to; empty when not applicable.
  const std::string& field() const noexcept { return field_; }

 private:
  ErrorKind kind_;
  std::string field_;
};

[[noreturn]] inline void throw_config(const std::string& field, const std::string& msg) {
  throw Error(ErrorKind::Config, field + ": " + msg, field);
}
[[noreturn]] inline void throw_parse(const std::string& msg) { throw Error(ErrorKind::Parse, msg); }
[[noreturn]] inline void throw_domain(const std::string& msg) { throw Error(ErrorKind::Domain, msg); }
[[noreturn]] inline void throw_numeric(const std::string& msg) { throw Error(ErrorKind::Numeric, msg); }
[[noreturn]] inline void throw_io(const std::string& msg) { throw Error(ErrorKind::Io, msg); }

}  // namespace spdc
