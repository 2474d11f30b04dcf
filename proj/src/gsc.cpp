#include "gsc.hpp"

#include <cmath>
#include <limits>

#include <boost/math/special_functions/gamma.hpp>

#include "error.hpp"

namespace wd {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void validate(const GscParams& g) {
  if (!(g.alpha >= 0.0 && g.alpha <= 1.0)) fail(Errc::invalid_params, "GSC alpha must lie in [0,1]");
  if (!(g.sigma > 0.0) || !std::isfinite(g.sigma)) fail(Errc::invalid_params, "GSC sigma must be > 0");
  if (g.p == 0.0 || !std::isfinite(g.p)) fail(Errc::invalid_params, "GSC p must be nonzero");
  if (!std::isfinite(g.d)) fail(Errc::invalid_params, "GSC d must be finite");
  if (g.d * g.p < 0.0) fail(Errc::invalid_params, "GSC requires d*p >= 0");
}

void validate(const GgParams& g) {
  if (!(g.a > 0.0) || !std::isfinite(g.a)) fail(Errc::invalid_params, "GG scale must be > 0");
  if (g.p == 0.0 || !std::isfinite(g.p) || !std::isfinite(g.d))
    fail(Errc::invalid_params, "GG p must be nonzero");
  if (!(g.d / g.p > 0.0)) fail(Errc::invalid_params, "GG requires d/p > 0");
}

GgParams gsc_zero_as_gg(const GscParams& g) { return {g.sigma, g.d + g.p, g.p}; }

double log_gg_pdf(const GgParams& g, double x) {
  validate(g);
  if (x < 0.0) fail(Errc::domain_error, "GG density needs x >= 0");
  const double lc = std::log(std::fabs(g.p) / g.a) - boost::math::lgamma(g.d / g.p);
  if (x == 0.0) {
    if (g.p < 0.0) return -kInf;
    if (g.d > 1.0) return -kInf;
    if (g.d < 1.0) return kInf;
    return lc;
  }
  const double ly = std::log(x / g.a);
  const double yp = std::exp(g.p * ly);
  return lc + (g.d - 1.0) * ly - yp;
}

double gg_pdf(const GgParams& g, double x) { return std::exp(log_gg_pdf(g, x)); }

double log_gsc_norm_const(const GscParams& g) {
  validate(g);
  if (g.alpha == 0.0) fail(Errc::invalid_params, "normalization constant needs alpha > 0");
  if (g.d == 0.0) return std::log(std::fabs(g.p) / (g.sigma * g.alpha));
  const double r = g.d / g.p;
  return std::log(std::fabs(g.p) / g.sigma) + boost::math::lgamma(g.alpha * r) -
         boost::math::lgamma(r);
}

double gsc_norm_const(const GscParams& g) { return std::exp(log_gsc_norm_const(g)); }

double log_gsc_pdf(const GscParams& g, double x, const SeriesPolicy& pol) {
  validate(g);
  if (x < 0.0 || std::isnan(x)) fail(Errc::domain_error, "GSC density needs x >= 0");
  if (g.alpha == 1.0) fail(Errc::delta_regime, "GSC at alpha = 1 is a point mass at sigma");
  if (g.alpha == 0.0) return log_gg_pdf(gsc_zero_as_gg(g), x);
  const double lc = log_gsc_norm_const(g);
  if (x == 0.0) {
    if (g.p < 0.0) return -kInf;
    const double e = g.d + g.p - 1.0;
    if (e > 0.0) return -kInf;
    if (e < 0.0) return kInf;
    return lc + std::log(g.alpha) - boost::math::lgamma(1.0 - g.alpha);
  }
  if (std::isinf(x)) return -kInf;
  const double ly = std::log(x / g.sigma);
  const double lz = g.p * ly;
  if (lz > 700.0) return -kInf;
  const double z = std::exp(lz);
  return lc + (g.d - 1.0) * ly + std::log(g.alpha) + lz + log_m_wright(g.alpha, z, pol);
}

double gsc_pdf(const GscParams& g, double x, const SeriesPolicy& pol) {
  return std::exp(log_gsc_pdf(g, x, pol));
}

double gsc_moment_formula(const GscParams& g, double n) {
  validate(g);
  const double ls = n * std::log(g.sigma);
  if (g.alpha == 1.0) return std::exp(ls);
  if (g.alpha == 0.0) {
    const double a = (n + g.d + g.p) / g.p;
    if (is_nonpos_int(a)) fail(Errc::pole_in_numerator, "Gamma pole in GG moment");
    int s = 1;
    const double l = lgamma_signed(a, &s) - std::lgamma((g.d + g.p) / g.p);
    return s * std::exp(ls + l);
  }
  int s1 = 1, s2 = 1;
  const double l1 = log_gamma_ratio_scaled(g.alpha, 1.0, g.d / g.p, &s1);
  const double l2 = log_gamma_ratio_scaled(1.0, g.alpha, (n + g.d) / g.p, &s2);
  return s1 * s2 * std::exp(ls + l1 + l2);
}

double gsc_moment(const GscParams& g, double n) {
  validate(g);
  if ((n + g.d + g.p) / g.p <= 0.0)
    fail(Errc::moment_undefined, "GSC moment diverges for this order");
  return gsc_moment_formula(g, n);
}

double gsc_pdf_asymptotic(const GscParams& g, double x) {
  validate(g);
  if (g.alpha < 0.05) fail(Errc::asymptotic_invalid, "large-x form does not hold for alpha < 0.05");
  if (g.alpha >= 1.0) fail(Errc::delta_regime, "GSC at alpha = 1 is a point mass");
  if (!(x > 0.0)) fail(Errc::domain_error, "asymptotic form needs x > 0");
  const double a = g.alpha;
  const double A = (1.0 - a) * std::pow(a, a / (1.0 - a));
  const double Bp = std::pow(a, 1.0 / (2.0 * (1.0 - a))) / std::sqrt(2.0 * kPi * (1.0 - a));
  const double y = x / g.sigma;
  return Bp * gsc_norm_const(g) * std::pow(y, g.d + g.p / (2.0 * (1.0 - a)) - 1.0) *
         std::exp(-A * std::pow(y, g.p / (1.0 - a)));
}

double gsc_mgf(const GscParams& g, double t, const SeriesPolicy& pol) {
  validate(g);
  if (t == 0.0) return 1.0;
  if (g.alpha == 1.0) return std::exp(g.sigma * t);
  if (g.alpha > 0.0 && g.d != 0.0) {
    const double pre = gamma_ratio_safe(g.alpha * g.d / g.p, g.d / g.p);
    return pre * wright4({1.0 / g.p, g.d / g.p, g.alpha / g.p, g.alpha * g.d / g.p, g.sigma * t}, pol);
  }
  // d = 0 or alpha = 0: the same power series written through the moments.
  double sum = 1.0, fact = 1.0;
  for (int n = 1; n < pol.max_terms; ++n) {
    fact *= t / n;
    const double term = fact * gsc_moment(g, n);
    sum += term;
    if (std::fabs(term) < pol.rel_tol * 1e-2 * std::fabs(sum) && n > 3) return sum;
    if (!std::isfinite(sum)) break;
  }
  fail(Errc::series_not_converged, "GSC moment generating series");
}

GscParams gsc_reciprocal(const GscParams& g) { return {g.alpha, 1.0 / g.sigma, -g.d, -g.p}; }

GscParams gg_as_half_gsc(const GgParams& g) {
  return {0.5, g.a / std::pow(2.0, 2.0 / g.p), g.d - g.p / 2.0, g.p / 2.0};
}

GscParams stable_count_params(double alpha) { return {alpha, 1.0, 1.0, alpha}; }

GscParams stable_vol_params(double alpha) { return {alpha / 2.0, 1.0 / std::sqrt(2.0), 1.0, alpha}; }

}  // namespace wd
