#pragma once

#include <stdexcept>
#include <string>

namespace wd {

enum class Errc {
  invalid_params = 1,
  domain_error,
  delta_regime,
  pole_in_numerator,
  series_not_converged,
  division_near_zero,
  moment_undefined,
  asymptotic_invalid,
  quadrature_failed,
  oscillation_too_fast,
  positivity_violation,
  kurtosis_undefined,
  dimension_mismatch,
  dimension_too_large,
  no_factor_found,
  exploded,
  degenerate_sample,
  no_intersection,
  parse_error,
  io_error,
};

const char* errc_name(Errc c) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc c, const std::string& msg) : std::runtime_error(msg), code_(c) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void fail(Errc c, const std::string& msg);

// Optional diagnostics sink. Default writes nothing.
using LogSink = void (*)(const char* msg, void* user);
void set_log_sink(LogSink sink, void* user) noexcept;
void log_message(const std::string& msg);

}  // namespace wd
