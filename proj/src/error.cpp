#include "error.hpp"

#include <atomic>

namespace wd {

const char* errc_name(Errc c) noexcept {
  switch (c) {
    case Errc::invalid_params: return "InvalidParams";
    case Errc::domain_error: return "DomainError";
    case Errc::delta_regime: return "DeltaRegime";
    case Errc::pole_in_numerator: return "PoleInNumerator";
    case Errc::series_not_converged: return "SeriesNotConverged";
    case Errc::division_near_zero: return "DivisionNearZero";
    case Errc::moment_undefined: return "MomentUndefined";
    case Errc::asymptotic_invalid: return "AsymptoticInvalid";
    case Errc::quadrature_failed: return "QuadratureFailed";
    case Errc::oscillation_too_fast: return "OscillationTooFast";
    case Errc::positivity_violation: return "PositivityViolation";
    case Errc::kurtosis_undefined: return "KurtosisUndefined";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::dimension_too_large: return "DimensionTooLarge";
    case Errc::no_factor_found: return "NoFactorFound";
    case Errc::exploded: return "Exploded";
    case Errc::degenerate_sample: return "DegenerateSample";
    case Errc::no_intersection: return "NoIntersection";
    case Errc::parse_error: return "ParseError";
    case Errc::io_error: return "IoError";
  }
  return "Unknown";
}

void fail(Errc c, const std::string& msg) {
  throw Error(c, std::string(errc_name(c)) + ": " + msg);
}

namespace {
std::atomic<LogSink> g_sink{nullptr};
std::atomic<void*> g_user{nullptr};
}  // namespace

void set_log_sink(LogSink sink, void* user) noexcept {
  g_user.store(user);
  g_sink.store(sink);
}

void log_message(const std::string& msg) {
  if (auto s = g_sink.load()) s(msg.c_str(), g_user.load());
}

}  // namespace wd
