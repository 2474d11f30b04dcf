#pragma once

#include "special_fn.hpp"

namespace wd {

// Generalized stable count N_alpha(x; sigma, d, p).
struct GscParams {
  double alpha = 0.5;
  double sigma = 1.0;
  double d = 1.0;
  double p = 1.0;
};

// Generalized gamma GG(x; a, d, p).
struct GgParams {
  double a = 1.0;
  double d = 1.0;
  double p = 1.0;
};

void validate(const GscParams& g);
void validate(const GgParams& g);

double gsc_norm_const(const GscParams& g);
double log_gsc_norm_const(const GscParams& g);

double gsc_pdf(const GscParams& g, double x, const SeriesPolicy& pol = {});
double log_gsc_pdf(const GscParams& g, double x, const SeriesPolicy& pol = {});

double gg_pdf(const GgParams& g, double x);
double log_gg_pdf(const GgParams& g, double x);

// E[X^n]; analytic in n. Throws MomentUndefined when the integral diverges.
double gsc_moment(const GscParams& g, double n);
// The closed form alone, continued analytically past the divergence boundary.
double gsc_moment_formula(const GscParams& g, double n);

double gsc_pdf_asymptotic(const GscParams& g, double x);

double gsc_mgf(const GscParams& g, double t, const SeriesPolicy& pol = {});

// Law of 1/X: N(1/sigma, -d, -p).
GscParams gsc_reciprocal(const GscParams& g);

// GG(a, d, p) written as a GSC with alpha = 1/2.
GscParams gg_as_half_gsc(const GgParams& g);

// The alpha = 0 member is a plain GG.
GgParams gsc_zero_as_gg(const GscParams& g);

// Stable count N_a(nu; 1, 1, a) and stable vol N_{a/2}(s; 1/sqrt2, 1, a).
GscParams stable_count_params(double alpha);
GscParams stable_vol_params(double alpha);

}  // namespace wd
