#include "gsas.hpp"

#include <cmath>
#include <limits>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/tools/roots.hpp>

#include "error.hpp"

namespace wd {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

// alpha = 2: X = Z / c with c the FCM point mass.
double delta_sd(const FcmShape& s) { return 1.0 / fcm_delta_point(s); }

}  // namespace

void validate(const QuadSpec& q) {
  if (!(q.rel_tol > 0.0) || !(q.abs_tol > 0.0)) fail(Errc::invalid_params, "quadrature tolerances must be > 0");
  if (q.max_panels < 1) fail(Errc::invalid_params, "max_panels must be positive");
  if (q.s_upper_policy == UpperPolicy::fixed && !(q.s_upper > 0.0))
    fail(Errc::invalid_params, "fixed upper limit must be > 0");
}

double integrate_over_fcm(const FcmShape& s, const std::function<double(double)>& f,
                          std::vector<quad::Hint> extra, const QuadSpec& q, const char* what,
                          quad::Result* info, double f_slope) {
  validate(q);
  auto hints = fcm_hints(s);
  hints.insert(hints.end(), extra.begin(), extra.end());
  quad::Options opt;
  opt.rel_tol = q.rel_tol;
  opt.abs_tol = q.abs_tol;
  opt.max_intervals = q.max_panels;
  const double u_max = q.s_upper_policy == UpperPolicy::fixed ? std::log(q.s_upper)
                                                             : std::numeric_limits<double>::infinity();
  const double skip = 1e-6 * q.abs_tol;
  auto g = [&](double t) {
    const double p = fcm_pdf(s, t);
    if (p == 0.0 || (f_slope > 0.0 && f_slope * t * t * p < skip)) return 0.0;
    return f(t) * p;
  };
  const auto r = quad::integrate_half_line(g, hints, opt, -std::numeric_limits<double>::infinity(), u_max);
  if (info) *info = r;
  if (!r.converged)
    fail(Errc::quadrature_failed, std::string(what) + ": estimate " + std::to_string(r.value) + ", error " +
                                      std::to_string(r.error) + " after " + std::to_string(r.evals) + " evaluations");
  return r.value;
}

double gsas_peak(const FcmShape& s) {
  validate(s);
  return fcm_moment(s, 1.0) * kInvSqrt2Pi;
}

double gsas_pdf(const FcmShape& s, double x, const QuadSpec& q) {
  validate(s);
  if (std::isnan(x)) fail(Errc::domain_error, "x is NaN");
  x = std::fabs(x);
  if (s.alpha == 2.0) {
    const double sd = delta_sd(s);
    return normal_pdf(x / sd) / sd;
  }
  if (x == 0.0) return gsas_peak(s);
  if (std::isinf(x)) return 0.0;
  return integrate_over_fcm(
      s, [x](double t) { return t * normal_pdf(x * t); }, {{-std::log(x), 1.0}}, q, "GSaS density");
}

bool gsas_moment_exists(const FcmShape& s, double n) {
  return fcm_moment_exists(s, -n);
}

double gsas_moment(const FcmShape& s, double n) {
  validate(s);
  if (n < 0.0) fail(Errc::domain_error, "moment order must be >= 0");
  if (n == 0.0) return 1.0;
  if (std::floor(n) == n && std::fmod(n, 2.0) == 1.0) return 0.0;
  // E|Z|^n E[S^-n]
  const double zn = std::pow(2.0, n / 2.0) * std::tgamma((n + 1.0) / 2.0) / std::sqrt(kPi);
  return zn * fcm_moment(s, -n);
}

double gsas_kurtosis(const FcmShape& s) {
  validate(s);
  if (!gsas_moment_exists(s, 2.0)) fail(Errc::kurtosis_undefined, "variance does not exist");
  double r;
  try {
    const double e2 = fcm_moment_formula(s, -2.0);
    r = 3.0 * fcm_moment_formula(s, -4.0) / (e2 * e2);
  } catch (const Error&) {
    fail(Errc::kurtosis_undefined, "fourth moment formula hits a pole");
  }
  if (!std::isfinite(r) || !(r > 0.0)) fail(Errc::kurtosis_undefined, "fourth moment formula is not positive");
  return r;
}

double gsas_exkurt(const FcmShape& s) { return gsas_kurtosis(s) - 3.0; }

GsasMoments gsas_summary(const FcmShape& s) {
  GsasMoments m;
  m.peak = gsas_peak(s);
  if (gsas_moment_exists(s, 2.0)) {
    m.m2 = gsas_moment(s, 2.0);
    m.std_peak = m.peak * std::sqrt(m.m2);
    try {
      m.exkurt = gsas_exkurt(s);
    } catch (const Error&) {
      m.exkurt = kNaN;
    }
  } else {
    m.m2 = m.exkurt = m.std_peak = kNaN;
  }
  return m;
}

double gsas_cdf(const FcmShape& s, double x, const QuadSpec& q) {
  validate(s);
  if (std::isnan(x)) fail(Errc::domain_error, "x is NaN");
  if (x == 0.0) return 0.5;
  const double ax = std::fabs(x);
  double tail;
  if (s.alpha == 2.0) {
    tail = 0.5 * std::erfc(ax / delta_sd(s) / std::sqrt(2.0));
  } else if (std::isinf(ax)) {
    tail = 0.0;
  } else {
    // P(X > x) = (1/2) int erfc(x s / sqrt2) chi-bar(s) ds
    tail = 0.5 * integrate_over_fcm(
                     s, [ax](double t) { return std::erfc(ax * t / std::sqrt(2.0)); }, {{-std::log(ax), 1.0}}, q,
                     "GSaS CDF");
  }
  return x > 0 ? 1.0 - tail : tail;
}

double gsas_quantile(const FcmShape& s, double prob, const QuadSpec& q) {
  if (!(prob > 0.0 && prob < 1.0)) fail(Errc::domain_error, "probability must lie in (0,1)");
  if (prob == 0.5) return 0.0;
  const double p = std::max(prob, 1.0 - prob);
  double hi = 1.0;
  while (gsas_cdf(s, hi, q) < p) {
    hi *= 2.0;
    if (hi > 1e12) fail(Errc::domain_error, "quantile too far in the tail");
  }
  auto f = [&](double x) { return gsas_cdf(s, x, q) - p; };
  boost::math::tools::eps_tolerance<double> tol(40);
  std::uintmax_t it = 100;
  const auto br = boost::math::tools::toms748_solve(f, 0.0, hi, -(p - 0.5), f(hi), tol, it);
  const double x = 0.5 * (br.first + br.second);
  return prob > 0.5 ? x : -x;
}

double gsas_cf(const FcmShape& s, double zeta, const QuadSpec& q) {
  validate(s);
  const double z2 = zeta * zeta;
  if (z2 == 0.0) return 1.0;
  if (s.alpha == 2.0) return std::exp(-0.5 * z2 * delta_sd(s) * delta_sd(s));
  return integrate_over_fcm(
      s, [z2](double t) { return std::exp(-0.5 * z2 / (t * t)); }, {{std::log(std::sqrt(z2)), 1.0}}, q,
      "GSaS characteristic function");
}

double gsas_pdf_series_small_x(const FcmShape& s, double x, const SeriesPolicy& pol) {
  validate(s);
  if (s.k < 0) fail(Errc::invalid_params, "small-x series needs k > 0");
  x = std::fabs(x);
  if (s.alpha == 2.0) return gsas_pdf(s, x);
  const double st = std::sqrt(2.0) / sigma_scale(s);
  const double pre = gamma_ratio_scaled(0.5, 1.0 / s.alpha, s.k - 1.0) / (st * std::sqrt(kPi));
  const double y = x / st;
  return pre * wright4({2.0 / s.alpha, s.k / s.alpha, 1.0, s.k / 2.0, -y * y}, pol);
}

double gsas_pdf_series_tail(const FcmShape& s, double x, const SeriesPolicy& pol) {
  validate(s);
  if (s.k < 0) fail(Errc::invalid_params, "tail series needs k > 0");
  x = std::fabs(x);
  if (!(x > 0.0)) fail(Errc::domain_error, "tail series needs x != 0");
  if (s.alpha == 2.0) return gsas_pdf(s, x);
  const double st = std::sqrt(2.0) / sigma_scale(s);
  const double y = x / st;
  const double pre =
      s.alpha * gamma_ratio_scaled(0.5, 1.0 / s.alpha, s.k - 1.0) / (2.0 * std::sqrt(kPi) * st) * std::pow(y, -s.k);
  return pre * wright4({s.alpha / 2.0, s.k / 2.0, -s.alpha / 2.0, 0.0, -std::pow(y, -s.alpha)}, pol);
}

double frac_hypergeom(const FcmShape& s, double b, double c, double x, const QuadSpec& q) {
  validate(s);
  if (s.k < 0) fail(Errc::invalid_params, "fractional hypergeometric function needs k > 0");
  const double pre = std::sqrt(s.k / (2.0 * kPi));
  if (s.alpha == 2.0) {
    const double t = fcm_delta_point(s);
    return pre * t * kummer_m(b, c, x * s.k * t * t / 2.0);
  }
  if (x == 0.0) return pre * fcm_moment(s, 1.0);
  const double xk = x * s.k / 2.0;
  std::vector<quad::Hint> extra;
  if (xk < 0) extra.push_back({-0.5 * std::log(-xk), 1.0});
  return pre * integrate_over_fcm(
                   s, [=](double t) { return t * kummer_m(b, c, xk * t * t); }, extra, q,
                   "fractional hypergeometric integral");
}

}  // namespace wd
