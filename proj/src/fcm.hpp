#pragma once

#include <functional>
#include <vector>

#include "gsc.hpp"
#include "quad.hpp"

namespace wd {

// Fractional chi-mean shape; negative k selects the characteristic family.
struct FcmShape {
  double alpha = 1.0;
  double k = 1.0;
};

void validate(const FcmShape& s);

double sigma_scale(const FcmShape& s);

// chi-bar_{a,k} = N_{a/2}(x; sigma^{sgn k}, k - h(k), sgn(k) a), a < 2.
GscParams fcm_as_gsc(const FcmShape& s);

// Location of the point mass when alpha = 2.
double fcm_delta_point(const FcmShape& s);

double fcm_pdf(const FcmShape& s, double x, const SeriesPolicy& pol = {});
double log_fcm_pdf(const FcmShape& s, double x, const SeriesPolicy& pol = {});

// Closed-form E[X^n]. Throws MomentUndefined when the integral diverges.
double fcm_moment(const FcmShape& s, double n);
// The same closed form continued analytically past the divergence boundary.
double fcm_moment_formula(const FcmShape& s, double n);
bool fcm_moment_exists(const FcmShape& s, double n);

double fcm_mean_limit(double alpha);

// x^-2 pdf(1/x)
double inverse_distribution(const std::function<double(double)>& pdf, double x);

GscParams fcm_inverse_as_gsc(const FcmShape& s);
double fcm_inverse_pdf(const FcmShape& s, double x, const SeriesPolicy& pol = {});

double fcm_pdf_asymptotic(const FcmShape& s, double x);

// Quadrature hints (log location, log width) describing where the mass sits.
std::vector<quad::Hint> fcm_hints(const FcmShape& s);

double fcm_cdf(const FcmShape& s, double x, double rel_tol = 1e-10);

}  // namespace wd
