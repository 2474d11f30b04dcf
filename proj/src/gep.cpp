#include "gep.hpp"

#include <cmath>

#include "error.hpp"

namespace wd {

namespace {
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
}

void validate(const GepShape& g) {
  if (!(g.alpha > 0.0 && g.alpha <= 2.0)) fail(Errc::invalid_params, "GEP alpha must lie in (0,2]");
  if (!(g.k > 0.0) || !std::isfinite(g.k)) fail(Errc::invalid_params, "GEP k must be > 0");
}

FcmShape gep_as_gsas(const GepShape& g) {
  validate(g);
  return {g.alpha, -g.k};
}

double gep_pdf(const GepShape& g, double x, const QuadSpec& q) { return gsas_pdf(gep_as_gsas(g), x, q); }

double gep_pdf_product(const GepShape& g, double x, const QuadSpec& q) {
  validate(g);
  const FcmShape s{g.alpha, g.k};
  x = std::fabs(x);
  if (g.alpha == 2.0) {
    const double c = fcm_delta_point(s);
    return kInvSqrt2Pi * std::exp(-0.5 * x * x / (c * c)) / c;
  }
  const double m1 = fcm_moment(s, 1.0);
  if (x == 0.0) return kInvSqrt2Pi / m1;
  std::vector<quad::Hint> extra{{std::log(x), 1.0}};
  const double v = integrate_over_fcm(
      s, [x](double t) { return kInvSqrt2Pi * std::exp(-0.5 * (x / t) * (x / t)); }, extra, q, "GEP product form");
  return v / m1;
}

double gep_moment(const GepShape& g, double n) {
  validate(g);
  if (n < 0.0) fail(Errc::domain_error, "moment order must be >= 0");
  if (n == 0.0) return 1.0;
  if (std::floor(n) == n && std::fmod(n, 2.0) == 1.0) return 0.0;
  const FcmShape s{g.alpha, g.k};
  const double zn = std::pow(2.0, n / 2.0) * std::tgamma((n + 1.0) / 2.0) / std::sqrt(kPi);
  return zn * fcm_moment(s, n + 1.0) / fcm_moment(s, 1.0);
}

double gep_exkurt(const GepShape& g) {
  validate(g);
  const FcmShape s{g.alpha, g.k};
  const double m3 = fcm_moment(s, 3.0);
  return 3.0 * fcm_moment(s, 1.0) * fcm_moment(s, 5.0) / (m3 * m3) - 3.0;
}

double gep_cdf(const GepShape& g, double x, const QuadSpec& q) {
  validate(g);
  if (std::isnan(x)) fail(Errc::domain_error, "x is NaN");
  if (x == 0.0) return 0.5;
  const FcmShape s{g.alpha, g.k};
  const double ax = std::fabs(x);
  double tail;
  if (g.alpha == 2.0) {
    tail = 0.5 * std::erfc(ax / (fcm_delta_point(s) * std::sqrt(2.0)));
  } else if (std::isinf(ax)) {
    tail = 0.0;
  } else {
    // erf written as 1 - erfc so the upper tail keeps its digits
    const double v = integrate_over_fcm(
        s, [ax](double t) { return t * std::erfc(ax / (std::sqrt(2.0) * t)); }, {{std::log(ax), 1.0}}, q,
        "GEP CDF");
    tail = 0.5 * v / fcm_moment(s, 1.0);
  }
  return x > 0 ? 1.0 - tail : tail;
}

}  // namespace wd
