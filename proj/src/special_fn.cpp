#include "special_fn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/sin_pi.hpp>

#include "error.hpp"
#include "quad.hpp"

namespace wd {

namespace {

// Neumaier compensated sum.
struct CompSum {
  double s = 0.0, c = 0.0;
  void add(double x) {
    const double t = s + x;
    if (std::fabs(s) >= std::fabs(x))
      c += (s - t) + x;
    else
      c += (x - t) + s;
    s = t;
  }
  double value() const { return s + c; }
};

constexpr double kCancelLimit = 1e3;

struct SeriesOut {
  double sum = 0.0;
  double maxmag = 0.0;
  bool converged = false;
};

// sum_{n >= 1+shift} (-z)^m / m! * Gamma(a n) sin(a n pi) / pi, m = n-1-shift.
SeriesOut mw_series(double a, double z, int shift, const SeriesPolicy& pol) {
  SeriesOut out;
  CompSum acc;
  const double lz = z > 0 ? std::log(z) : -std::numeric_limits<double>::infinity();
  double prev = std::numeric_limits<double>::infinity();
  int small_run = 0;
  for (int m = 0; m < pol.max_terms; ++m) {
    const int n = m + 1 + shift;
    double lmag = boost::math::lgamma(a * n) - std::lgamma(m + 1.0);
    if (m > 0) lmag += m * lz;
    const double mag = m > 0 && z == 0.0 ? 0.0 : std::exp(lmag);
    const double sgn = (m & 1) ? -1.0 : 1.0;
    const double term = sgn * mag * boost::math::sin_pi(a * n) / kPi;
    acc.add(term);
    out.maxmag = std::max(out.maxmag, mag);
    if (z == 0.0) {
      out.converged = true;
      break;
    }
    const double cur = std::fabs(acc.value());
    if (mag <= prev && (mag < pol.rel_tol * 1e-2 * cur || mag < 1e-300)) {
      if (++small_run >= 2) {
        out.converged = true;
        break;
      }
    } else {
      small_run = 0;
    }
    prev = mag;
  }
  out.sum = (shift ? -1.0 : 1.0) * acc.value();
  return out;
}

bool series_usable(double a, double z, const SeriesPolicy& pol) {
  if (pol.asymptotic_switch_z > 0) return z <= pol.asymptotic_switch_z;
  if (z <= 0) return true;
  const double g = 1.0 / (1.0 - a);
  const double a0 = (1.0 - a) * std::pow(a, a * g);
  const double lw = g * std::log(z);
  if (lw > std::log(25.0 / a0)) return false;
  // index of the largest term
  const double nstar = std::exp(g * (std::log(z) + a * std::log(a)));
  return nstar < 0.5 * pol.max_terms;
}

// log(sin(x)/x), accurate near 0.
double log_sinc(double x) {
  if (std::fabs(x) < 0.1) {
    const double x2 = x * x;
    return -x2 * (1.0 / 6 + x2 * (1.0 / 180 + x2 * (1.0 / 2835 + x2 * (1.0 / 37800 + x2 / 467775))));
  }
  return std::log(std::sin(x) / x);
}

// log A(phi) - log A(0) for the Kanter kernel; the log(phi) terms cancel exactly.
double log_a_kanter_rel(double a, double phi) {
  return (a * log_sinc(a * phi) + (1.0 - a) * log_sinc((1.0 - a) * phi) - log_sinc(phi)) /
         (1.0 - a);
}

}  // namespace

bool is_nonpos_int(double x) { return x <= 0.0 && std::floor(x) == x; }

double lgamma_signed(double x, int* sign) {
  if (is_nonpos_int(x)) {
    if (sign) *sign = 0;
    return std::numeric_limits<double>::infinity();
  }
  int s = 1;
  const double v = boost::math::lgamma(x, &s);
  if (sign) *sign = s;
  return v;
}

double rgamma(double x) {
  if (is_nonpos_int(x)) return 0.0;
  if (x > 0 && x < 170) return 1.0 / boost::math::tgamma(x);
  int s = 1;
  const double lg = lgamma_signed(x, &s);
  return s * std::exp(-lg);
}

double gamma_ratio_safe(double a, double b) {
  const bool pa = is_nonpos_int(a), pb = is_nonpos_int(b);
  if (pa && pb) {
    if (a == b) return 1.0;
    fail(Errc::pole_in_numerator, "both gamma arguments are poles");
  }
  if (pa) fail(Errc::pole_in_numerator, "Gamma(a) is singular");
  if (pb) return 0.0;
  if (a == b) return 1.0;
  int sa = 1, sb = 1;
  const double la = lgamma_signed(a, &sa), lb = lgamma_signed(b, &sb);
  const double d = la - lb;
  if (a > 0 && b > 0 && std::fabs(d) < 600) return boost::math::tgamma_ratio(a, b);
  return sa * sb * std::exp(d);
}

double gamma_ratio_scaled(double ca, double cb, double x) {
  if (x == 0.0) {
    if (ca == 0.0) fail(Errc::pole_in_numerator, "Gamma(0) in numerator");
    return cb / ca;
  }
  return gamma_ratio_safe(ca * x, cb * x);
}

double log_gamma_ratio_scaled(double ca, double cb, double x, int* sign) {
  *sign = 1;
  if (x == 0.0) {
    if (ca == 0.0) fail(Errc::pole_in_numerator, "Gamma(0) in numerator");
    const double r = cb / ca;
    *sign = r < 0 ? -1 : 1;
    return std::log(std::fabs(r));
  }
  const double a = ca * x, b = cb * x;
  const bool pa = is_nonpos_int(a), pb = is_nonpos_int(b);
  if (pa && !(pb && a == b)) fail(Errc::pole_in_numerator, "Gamma(a) is singular");
  if (pa) return 0.0;
  if (pb) {
    *sign = 0;
    return -std::numeric_limits<double>::infinity();
  }
  int sa = 1, sb = 1;
  const double d = lgamma_signed(a, &sa) - lgamma_signed(b, &sb);
  *sign = sa * sb;
  return d;
}

double m_wright_series(double alpha, double z, const SeriesPolicy& pol) {
  if (alpha == 0.0) return std::exp(-z);
  const auto s = mw_series(alpha, z, 0, pol);
  if (!s.converged) fail(Errc::series_not_converged, "M-Wright series");
  return s.sum;
}

namespace detail {

void m_wright_integral(double a, double z, double* log_m, double* dlog_m) {
  const double g = 1.0 / (1.0 - a);
  const double beta = a * g;
  const double la0 = std::log(1.0 - a) + beta * std::log(a);
  const double a0 = std::exp(la0);
  const double lw = g * std::log(z);
  const double w = std::exp(lw);

  std::vector<double> pts{0.0, kPi};
  const double kappa = std::min(0.5, 1.0 / std::sqrt(1.0 + w * a0 * g));
  for (double p = kappa / 8; p < kPi; p *= 2) pts.push_back(p);
  const double eps_star = std::sin(kPi * a) * z;
  for (int j = -4; j <= 4; ++j) {
    const double e = eps_star * std::ldexp(1.0, j);
    if (e > 0 && e < kPi) pts.push_back(kPi - e);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  auto integrand = [&](double phi, int power) {
    const double d = log_a_kanter_rel(a, phi);
    const double ex = a0 * std::expm1(d) * w;
    return std::exp(power * (la0 + d) - ex);
  };
  quad::Options opt;
  opt.rel_tol = 1e-12;
  opt.max_intervals = 2000;
  auto r1 = quad::integrate([&](double p) { return integrand(p, 1); }, pts, opt);
  if (!(r1.value > 0) || r1.error > 1e-8 * r1.value)
    fail(Errc::quadrature_failed, "M-Wright integral form did not converge");
  *log_m = -std::log(kPi * (1.0 - a)) + beta * std::log(z) - a0 * w + std::log(r1.value);
  if (dlog_m) {
    auto r2 = quad::integrate([&](double p) { return integrand(p, 2); }, pts, opt);
    if (!(r2.value > 0) || r2.error > 1e-8 * r2.value)
      fail(Errc::quadrature_failed, "M-Wright derivative integral did not converge");
    *dlog_m = (beta - g * w * r2.value / r1.value) / z;
  }
}

}  // namespace detail

namespace {

void check_alpha(double alpha, bool allow_zero) {
  if (!(alpha < 1.0) || alpha < 0.0 || (!allow_zero && alpha == 0.0) || !std::isfinite(alpha))
    fail(Errc::invalid_params, "M-Wright index must lie in [0,1)");
}

// log M and optionally d/dz log M, using whichever route is accurate.
void log_m_eval(double alpha, double z, const SeriesPolicy& pol, double* lm, double* dlm) {
  if (z < 0 || !std::isfinite(z)) fail(Errc::domain_error, "M-Wright argument must be >= 0");
  if (alpha == 0.0) {
    *lm = -z;
    if (dlm) *dlm = -1.0;
    return;
  }
  if (alpha == 0.5) {
    *lm = -0.25 * z * z - 0.5 * std::log(kPi);
    if (dlm) *dlm = -0.5 * z;
    return;
  }
  if (series_usable(alpha, z, pol)) {
    const auto s = mw_series(alpha, z, 0, pol);
    if (s.converged && s.sum > 0 && s.maxmag <= kCancelLimit * s.sum) {
      if (!dlm) {
        *lm = std::log(s.sum);
        return;
      }
      const auto d = mw_series(alpha, z, 1, pol);
      const double dscale = std::max(std::fabs(d.sum), s.sum);
      if (d.converged && d.maxmag <= kCancelLimit * dscale) {
        *lm = std::log(s.sum);
        *dlm = d.sum / s.sum;
        return;
      }
    }
  }
  if (z == 0.0) fail(Errc::series_not_converged, "M-Wright series at z = 0");
  detail::m_wright_integral(alpha, z, lm, dlm);
}

}  // namespace

double log_m_wright(double alpha, double z, const SeriesPolicy& pol) {
  check_alpha(alpha, true);
  double lm;
  log_m_eval(alpha, z, pol, &lm, nullptr);
  return lm;
}

double m_wright(double alpha, double z, const SeriesPolicy& pol) {
  return std::exp(log_m_wright(alpha, z, pol));
}

double log_f_wright(double alpha, double z, const SeriesPolicy& pol) {
  if (!(alpha > 0.0 && alpha < 1.0)) fail(Errc::invalid_params, "F-Wright index must lie in (0,1)");
  if (z == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(alpha * z) + log_m_wright(alpha, z, pol);
}

double f_wright(double alpha, double z, const SeriesPolicy& pol) {
  if (!(alpha > 0.0 && alpha < 1.0)) fail(Errc::invalid_params, "F-Wright index must lie in (0,1)");
  if (z == 0.0) return 0.0;
  return alpha * z * m_wright(alpha, z, pol);
}

double m_wright_deriv(double alpha, double z, const SeriesPolicy& pol) {
  check_alpha(alpha, false);
  if (z == 0.0) {
    return -boost::math::tgamma(2 * alpha) * boost::math::sin_pi(2 * alpha) / kPi;
  }
  double lm, dlm;
  log_m_eval(alpha, z, pol, &lm, &dlm);
  return std::exp(lm) * dlm;
}

double q_ratio(double alpha, double z, const SeriesPolicy& pol) {
  check_alpha(alpha, false);
  if (z == 0.0) return alpha + 1.0;
  double lm, dlm;
  log_m_eval(alpha, z, pol, &lm, &dlm);
  if (!std::isfinite(lm) || lm < -745.0) {
    // value of M is irrelevant to the ratio on the integral route
    if (!std::isfinite(dlm)) fail(Errc::division_near_zero, "M-Wright vanishes");
  }
  return (alpha + 1.0) + alpha * z * dlm;
}

double m_wright_asymptotic(double alpha, double z) {
  check_alpha(alpha, false);
  const double p = 1.0 / (1.0 - alpha);
  const double d = p / 2;
  const double A = std::sqrt(p / (2 * kPi));
  const double B = 1.0 / (alpha * p);
  const double x = alpha * z;
  return A * std::pow(x, d - 1) * std::exp(-B * std::pow(x, p));
}

double wright(const WrightArgs& args, const SeriesPolicy& pol) {
  if (!(args.lambda > -1.0) || !std::isfinite(args.lambda) || !std::isfinite(args.delta) ||
      !std::isfinite(args.z))
    fail(Errc::invalid_params, "Wright function requires lambda > -1 and finite arguments");
  CompSum acc;
  const double lz = std::log(std::fabs(args.z));
  const double zs = args.z < 0 ? -1.0 : 1.0;
  double prev = std::numeric_limits<double>::infinity();
  int small_run = 0;
  for (int n = 0; n < pol.max_terms; ++n) {
    const double x = args.lambda * n + args.delta;
    double term = 0.0, mag = 0.0;
    if (!is_nonpos_int(x)) {
      int s = 1;
      const double lg = lgamma_signed(x, &s);
      const double lmag = (n ? n * lz : 0.0) - std::lgamma(n + 1.0) - lg;
      mag = (n && args.z == 0.0) ? 0.0 : std::exp(lmag);
      term = s * ((n & 1) && zs < 0 ? -1.0 : 1.0) * mag;
    }
    acc.add(term);
    if (args.z == 0.0) return acc.value();
    if (n > 2 && mag <= prev && mag < pol.rel_tol * 1e-2 * std::fabs(acc.value())) {
      if (++small_run >= 3) return acc.value();
    } else if (mag != 0.0 || n < 3) {
      small_run = 0;
    }
    if (mag != 0.0) prev = mag;
  }
  fail(Errc::series_not_converged, "Wright series");
}

double wright4(const Wright4Args& w, const SeriesPolicy& pol) {
  CompSum acc;
  const double lz = std::log(std::fabs(w.z));
  const double zs = w.z < 0 ? -1.0 : 1.0;
  double prev = std::numeric_limits<double>::infinity();
  int small_run = 0;
  for (int n = 0; n < pol.max_terms; ++n) {
    const double xn = w.a * n + w.b;
    const double xd = w.lambda * n + w.mu;
    if (is_nonpos_int(xn)) fail(Errc::pole_in_numerator, "four-parameter Wright term");
    double term = 0.0, mag = 0.0;
    if (!is_nonpos_int(xd)) {
      int sn = 1, sd = 1;
      const double ln = lgamma_signed(xn, &sn);
      const double ld = lgamma_signed(xd, &sd);
      const double lmag = (n ? n * lz : 0.0) + ln - std::lgamma(n + 1.0) - ld;
      mag = (n && w.z == 0.0) ? 0.0 : std::exp(lmag);
      term = sn * sd * ((n & 1) && zs < 0 ? -1.0 : 1.0) * mag;
    }
    acc.add(term);
    if (w.z == 0.0) return acc.value();
    if (!std::isfinite(acc.value())) break;
    if (n > 2 && mag <= prev && mag < pol.rel_tol * 1e-2 * std::fabs(acc.value())) {
      if (++small_run >= 3) return acc.value();
    } else if (mag != 0.0 || n < 3) {
      small_run = 0;
    }
    if (mag != 0.0) prev = mag;
  }
  fail(Errc::series_not_converged, "four-parameter Wright series");
}

namespace {

double kummer_series(double b, double c, double z, const SeriesPolicy& pol) {
  CompSum acc;
  double term = 1.0;
  acc.add(term);
  const int cap = std::max(pol.max_terms, static_cast<int>(4 * std::fabs(z)) + 100);
  for (int n = 0; n < cap; ++n) {
    if (is_nonpos_int(c + n)) fail(Errc::pole_in_numerator, "Kummer series with c at a pole");
    term *= (b + n) / (c + n) * z / (n + 1);
    acc.add(term);
    if (term == 0.0 || (n > std::fabs(z) && std::fabs(term) < pol.rel_tol * 1e-3 * std::fabs(acc.value())))
      return acc.value();
  }
  fail(Errc::series_not_converged, "Kummer series");
}

}  // namespace

double kummer_m(double b, double c, double z, const SeriesPolicy& pol) {
  if (z >= 0.0) return kummer_series(b, c, z, pol);
  const double y = -z;
  if (y <= 30.0) return std::exp(z) * kummer_series(c - b, c, y, pol);
  // M(b,c,-y) ~ Gamma(c)/Gamma(c-b) y^-b sum_s (b)_s (b-c+1)_s / s! y^-s
  CompSum acc;
  double term = 1.0, prev = 1.0;
  acc.add(term);
  for (int s = 0; s < 200; ++s) {
    term *= (b + s) * (b - c + 1 + s) / ((s + 1) * y);
    if (std::fabs(term) > prev) break;  // asymptotic series starts to diverge
    acc.add(term);
    prev = std::fabs(term);
    if (prev < 1e-17 * std::fabs(acc.value())) break;
  }
  return gamma_ratio_safe(c, c - b) * std::pow(y, -b) * acc.value();
}

double wright_moment(double lambda, double delta, double d) {
  return gamma_ratio_safe(d, d * lambda + delta);
}

}  // namespace wd
