#pragma once

namespace wd {

struct SeriesPolicy {
  double rel_tol = 1e-12;
  int max_terms = 400;
  // Above this argument the M-Wright family is evaluated through its
  // non-oscillatory integral form. Zero selects the switch automatically by
  // monitoring cancellation in the series.
  double asymptotic_switch_z = 0.0;
};

struct WrightArgs {
  double lambda, delta, z;
};

struct Wright4Args {
  double a, b, lambda, mu, z;
};

constexpr double kPi = 3.14159265358979323846264338327950288;

bool is_nonpos_int(double x);

// log|Gamma(x)| and its sign; *sign = 0 at poles (and +inf returned).
double lgamma_signed(double x, int* sign);

// 1/Gamma(x), zero at non-positive integers.
double rgamma(double x);

// Gamma(a)/Gamma(b) with sign tracking. Pole in b alone gives 0, pole in a
// alone throws PoleInNumerator.
double gamma_ratio_safe(double a, double b);

// Gamma(ca*x)/Gamma(cb*x), continuous through x = 0 where it tends to cb/ca.
double gamma_ratio_scaled(double ca, double cb, double x);
// log|Gamma(ca*x)/Gamma(cb*x)| with the same conventions; *sign = 0 for a zero ratio.
double log_gamma_ratio_scaled(double ca, double cb, double x, int* sign);

double m_wright(double alpha, double z, const SeriesPolicy& pol = {});
double log_m_wright(double alpha, double z, const SeriesPolicy& pol = {});
double f_wright(double alpha, double z, const SeriesPolicy& pol = {});
double log_f_wright(double alpha, double z, const SeriesPolicy& pol = {});
double m_wright_deriv(double alpha, double z, const SeriesPolicy& pol = {});
double q_ratio(double alpha, double z, const SeriesPolicy& pol = {});

// Leading large-z form M_a(x/a) ~ A x^(d-1) exp(-B x^p).
double m_wright_asymptotic(double alpha, double z);

// Plain series for W_{lambda,delta}(z) = sum z^n / (n! Gamma(lambda n + delta)).
double wright(const WrightArgs& args, const SeriesPolicy& pol = {});

double wright4(const Wright4Args& args, const SeriesPolicy& pol = {});

// Gamma(d) / Gamma(d lambda + delta).
double wright_moment(double lambda, double delta, double d);

// Kummer's confluent hypergeometric M(b, c; z). Negative arguments go through
// Kummer's transformation, large negative ones through the asymptotic expansion.
double kummer_m(double b, double c, double z, const SeriesPolicy& pol = {});

// Only the sine-form series, no fallback. Exposed for cross-checks.
double m_wright_series(double alpha, double z, const SeriesPolicy& pol = {});

namespace detail {
// log M and (d/dz) log M through the integral representation.
void m_wright_integral(double alpha, double z, double* log_m, double* dlog_m);
}  // namespace detail

}  // namespace wd
