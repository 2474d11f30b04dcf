#pragma once

#include "fcm.hpp"

namespace wd {

enum class UpperPolicy { tail_bound, fixed };

struct QuadSpec {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  int max_panels = 4000;
  UpperPolicy s_upper_policy = UpperPolicy::tail_bound;
  double s_upper = 0.0;  // used with UpperPolicy::fixed
};

void validate(const QuadSpec& q);

// NaN marks a quantity that does not exist for the shape.
struct GsasMoments {
  double m2 = 0.0;
  double exkurt = 0.0;
  double peak = 0.0;
  double std_peak = 0.0;
};

// Integrates f(s) chi-bar(s) over s > 0 in log space, with the FCM feature
// plus any extra hints as breakpoints. Throws QuadratureFailed on failure.
// A positive f_slope promises |f(s)| <= f_slope * s, which lets costly
// integrands be skipped where the density is negligible.
double integrate_over_fcm(const FcmShape& s, const std::function<double(double)>& f,
                          std::vector<quad::Hint> extra, const QuadSpec& q, const char* what,
                          quad::Result* info = nullptr, double f_slope = 0.0);

double gsas_pdf(const FcmShape& s, double x, const QuadSpec& q = {});
double gsas_peak(const FcmShape& s);

// E[X^n]; odd integer orders vanish. Non-integer even-like orders follow the
// same analytic formula and are an extrapolation.
double gsas_moment(const FcmShape& s, double n);
bool gsas_moment_exists(const FcmShape& s, double n);

// m4 / m2^2 - 3. Inside the region k < 5 - alpha the analytic continuation is
// used while it stays finite and positive.
double gsas_exkurt(const FcmShape& s);
double gsas_kurtosis(const FcmShape& s);

GsasMoments gsas_summary(const FcmShape& s);

double gsas_cdf(const FcmShape& s, double x, const QuadSpec& q = {});
double gsas_quantile(const FcmShape& s, double prob, const QuadSpec& q = {});
double gsas_cf(const FcmShape& s, double zeta, const QuadSpec& q = {});

double gsas_pdf_series_small_x(const FcmShape& s, double x, const SeriesPolicy& pol = {});
double gsas_pdf_series_tail(const FcmShape& s, double x, const SeriesPolicy& pol = {});

// sqrt(k/2pi) int s M(b, c; x k s^2 / 2) chi-bar(s) ds
double frac_hypergeom(const FcmShape& s, double b, double c, double x, const QuadSpec& q = {});

}  // namespace wd
