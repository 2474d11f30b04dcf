#pragma once

#include <utility>

#include "gsas.hpp"

namespace wd {

// Skewed shape. |theta| <= min(alpha, 2 - alpha) and |theta| < 1; theta != 0
// needs k > 0.
struct SkewShape {
  double alpha = 1.0;
  double k = 1.0;
  double theta = 0.0;
};

void validate(const SkewShape& s);
double skew_q(const SkewShape& s);    // cos(theta pi / 2)^(1/alpha)
double skew_tau(const SkewShape& s);  // tan(theta pi / 2)

struct OscQuadSpec {
  double t_cut = 100.0;
  bool zero_crossing_segmentation = true;
  double rel_tol = 1e-12;
  int max_segments = 200000;
};

void validate(const OscQuadSpec& o);

// (1/(q pi)) int_0^inf cos(tau (s t)^alpha + (x/q) s t) exp(-t^2/2) dt
double skew_kernel(const SkewShape& sh, double x, double s, const OscQuadSpec& osc = {});

// skew_kernel minus its Gaussian part (1/q) N(x s / q).
double skew_kernel_tail(const SkewShape& sh, double x, double s, const OscQuadSpec& osc = {});

double gas_pdf(const SkewShape& sh, double x, const QuadSpec& q = {}, const OscQuadSpec& osc = {});

// (L^theta(-x), L^-theta(x))
std::pair<double, double> gas_symmetry_check(const SkewShape& sh, double x, const QuadSpec& q = {},
                                             const OscQuadSpec& osc = {});

}  // namespace wd
