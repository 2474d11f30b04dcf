#pragma once

#include "gsas.hpp"

namespace wd {

// Generalized exponential power E_{alpha,k}; k > 0 here, equal to L_{alpha,-k}.
struct GepShape {
  double alpha = 1.0;
  double k = 1.0;
};

void validate(const GepShape& g);

FcmShape gep_as_gsas(const GepShape& g);

double gep_pdf(const GepShape& g, double x, const QuadSpec& q = {});
// (1/E[S]) int N(x/s) chi-bar_{alpha,k}(s) ds, kept for cross-validation.
double gep_pdf_product(const GepShape& g, double x, const QuadSpec& q = {});

double gep_moment(const GepShape& g, double n);
double gep_exkurt(const GepShape& g);
double gep_cdf(const GepShape& g, double x, const QuadSpec& q = {});

}  // namespace wd
