#include "doctest.h"

#include <cmath>
#include <functional>

#include "error.hpp"
#include "gas.hpp"
#include "multivariate.hpp"

using namespace wd;

namespace {

double rel(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

bool is_errc(const std::function<void()>& f, Errc code) {
  try {
    f();
  } catch (const Error& e) {
    return e.code() == code;
  }
  return false;
}

double normal(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi); }

double mvt_pdf(double nu, const CovMatrix& c, const Eigen::VectorXd& x) {
  const double n = c.n();
  return std::exp(std::lgamma((nu + n) / 2) - std::lgamma(nu / 2)) / (std::pow(nu * kPi, n / 2) * std::sqrt(c.det())) *
         std::pow(1 + c.quad_form(x) / nu, -(nu + n) / 2);
}

}  // namespace

TEST_CASE("skew kernel reduces to the normal density at theta = 0") {
  const SkewShape sh{1.2, 3.0, 0.0};
  for (double x : {0.0, 0.7, 2.0})
    for (double s : {0.5, 1.3}) CHECK(std::fabs(skew_kernel(sh, x, s) - normal(x * s)) < 1e-12);
}

TEST_CASE("skew kernel splits into normal and tail parts") {
  const SkewShape sh{0.9, 3.0, 0.3};
  const double q = skew_q(sh);
  CHECK(rel(q, std::pow(std::cos(0.3 * kPi / 2), 1.0 / 0.9)) < 1e-14);
  CHECK(rel(skew_tau(sh), std::tan(0.3 * kPi / 2)) < 1e-14);
  for (double x : {-1.0, 0.4, 2.5}) {
    const double whole = skew_kernel(sh, x, 1.1);
    const double tail = skew_kernel_tail(sh, x, 1.1);
    CHECK(std::fabs(whole - tail - normal(x * 1.1 / q) / q) < 1e-10);
  }
}

TEST_CASE("skew kernel mass is 1/s") {
  // The leading |x|^(-1-alpha) tails are odd and cancel over [-X, X]; the even
  // |x|^(-1-2 alpha) term beyond X is added in closed form.
  for (SkewShape sh : {SkewShape{0.8, 3.0, 0.3}, SkewShape{1.6, 2.0, -0.3}}) {
    const double s = 1.4, X = 300.0, h = 0.02;
    const double U = std::asinh(X);
    double mass = 0.0;
    for (double u = -U; u <= U + 1e-12; u += h) {
      const double w = std::fabs(std::fabs(u) - U) < 1e-9 ? 0.5 : 1.0;
      mass += w * skew_kernel(sh, std::sinh(u), s) * std::cosh(u);
    }
    mass *= h;
    const double a = sh.alpha, q = skew_q(sh), tau = skew_tau(sh);
    mass += 2.0 / (q * kPi) * (tau * tau / 2) * std::tgamma(2 * a + 1) * std::sin(kPi * a) * std::pow(s, 2 * a) *
            std::pow(s / q, -2 * a - 1) * std::pow(X, -2 * a) / (2 * a);
    CAPTURE(sh.alpha);
    CHECK(std::fabs(mass - 1.0 / s) < 1e-5);
  }
}

TEST_CASE("gas at theta = 0 is gsas") {
  const SkewShape sh{1.1, 4.0, 0.0};
  for (double x : {0.0, 0.9, 3.0}) CHECK(rel(gas_pdf(sh, x), gsas_pdf({1.1, 4.0}, x)) < 1e-9);
}

TEST_CASE("gas mirror symmetry") {
  const SkewShape sh{1.2, 3.0, 0.25};
  for (double x : {0.5, 1.7}) {
    const auto [a, b] = gas_symmetry_check(sh, x);
    CHECK(std::fabs(a - b) < 1e-6 * std::max(a, b));
  }
}

TEST_CASE("positive theta moves the bulk left") {
  const SkewShape sh{1.3, 4.0, 0.3};
  CHECK(gas_pdf(sh, -1.5) > gas_pdf(sh, 1.5));
}

TEST_CASE("negative density is reported") {
  // with k > 1 the tail opposite the sign of theta eventually dips below zero
  CHECK(is_errc([] { gas_pdf({1.3, 4.0, 0.3}, -6.0); }, Errc::positivity_violation));
}

TEST_CASE("gas parameter validation") {
  CHECK(is_errc([] { validate(SkewShape{0.5, 3.0, 0.6}); }, Errc::invalid_params));
  CHECK(is_errc([] { validate(SkewShape{1.5, 3.0, 0.6}); }, Errc::invalid_params));
  CHECK(is_errc([] { validate(SkewShape{1.0, 3.0, 1.0}); }, Errc::invalid_params));
  CHECK(is_errc([] { validate(SkewShape{1.0, -2.0, 0.2}); }, Errc::invalid_params));
  validate(SkewShape{1.0, -2.0, 0.0});
  CHECK(is_errc([] { validate(OscQuadSpec{-1.0, true, 1e-12, 1000}); }, Errc::invalid_params));
}

TEST_CASE("elliptical density at alpha = 1 is multivariate t") {
  Eigen::MatrixXd m(3, 3);
  m << 2.0, 0.3, -0.2, 0.3, 1.0, 0.1, -0.2, 0.1, 0.7;
  const CovMatrix c(m);
  Eigen::VectorXd x(3);
  x << 0.4, -0.8, 0.2;
  for (double k : {3.0, 6.0}) CHECK(rel(mv_ell_pdf({1.0, k}, c, x), mvt_pdf(k, c, x)) < 1e-8);
}

TEST_CASE("elliptical marginals and summary") {
  const FcmShape s{1.2, 5.0};
  const CovMatrix c = CovMatrix::bivariate(2.0, 0.5, -0.4);
  CHECK(rel(c.matrix()(0, 1), -0.4 * std::sqrt(2.0 * 0.5)) < 1e-14);
  for (double x : {0.0, 1.1})
    CHECK(rel(mv_ell_marginal_pdf(s, c, 0, x), gsas_pdf(s, x / std::sqrt(2.0)) / std::sqrt(2.0)) < 1e-10);
  const MvEllSummary sm = mv_ell_summary(s, c);
  const double m2 = gsas_moment(s, 2.0);
  CHECK(rel(sm.cov(0, 1), m2 * c.matrix()(0, 1)) < 1e-12);
  CHECK(rel(sm.cov(1, 1), m2 * 0.5) < 1e-12);
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);
  CHECK(rel(sm.peak, mv_ell_pdf(s, c, zero)) < 1e-8);
}

TEST_CASE("adaptive density factorizes for a diagonal scale") {
  const CovMatrix id(Eigen::MatrixXd::Identity(2, 2));
  Eigen::VectorXd x(2);
  x << 0.5, -1.0;
  const MvShapes sh{{1.0, 4.0}, {1.5, 3.0}};
  CHECK(rel(mv_adp_pdf(sh, id, x), gsas_pdf(sh[0], 0.5) * gsas_pdf(sh[1], -1.0)) < 1e-7);
  CHECK(rel(mv_adp_peak(sh, id), gsas_pdf(sh[0], 0.0) * gsas_pdf(sh[1], 0.0)) < 1e-7);
}

TEST_CASE("adaptive with one shared shape equals elliptical only in one dimension") {
  const FcmShape s{1.3, 4.0};
  Eigen::MatrixXd one(1, 1);
  one << 1.7;
  Eigen::VectorXd x1(1);
  x1 << 0.6;
  CHECK(rel(mv_adp_pdf({s}, CovMatrix(one), x1), mv_ell_pdf(s, CovMatrix(one), x1)) < 1e-7);
  const CovMatrix c = CovMatrix::bivariate(1.0, 1.0, 0.5);
  Eigen::VectorXd x2(2);
  x2 << 0.6, -0.3;
  CHECK(rel(mv_adp_pdf({s, s}, c, x2), mv_ell_pdf(s, c, x2)) > 1e-3);
}

TEST_CASE("adaptive covariance keeps the marginal variances") {
  const MvShapes sh{{0.9, 5.0}, {1.4, 6.0}};
  const CovMatrix c = CovMatrix::bivariate(1.5, 0.8, 0.3);
  const Eigen::MatrixXd cov = mv_adp_cov(sh, c);
  CHECK(rel(cov(0, 0), 1.5 * gsas_moment(sh[0], 2.0)) < 1e-10);
  CHECK(rel(cov(1, 1), 0.8 * gsas_moment(sh[1], 2.0)) < 1e-10);
  CHECK(cov(0, 1) > 0.0);
}

TEST_CASE("peak ratio correlation") {
  for (double rho : {-0.7, 0.0, 0.45}) {
    const CovMatrix c = CovMatrix::bivariate(2.0, 3.0, rho);
    CHECK(std::fabs(peak_ratio_correlation(c) - std::sqrt(1.0 - rho * rho)) < 1e-14);
  }
}

TEST_CASE("multivariate validation") {
  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;
  CHECK(is_errc([&] { CovMatrix c(bad); }, Errc::invalid_params));
  const CovMatrix c = CovMatrix::bivariate(1.0, 1.0, 0.2);
  Eigen::VectorXd x3 = Eigen::VectorXd::Zero(3);
  CHECK(is_errc([&] { mv_ell_pdf({1.0, 3.0}, c, x3); }, Errc::dimension_mismatch));
  CHECK(is_errc([&] { mv_adp_pdf({{1.0, 3.0}}, c, Eigen::VectorXd::Zero(2)); }, Errc::dimension_mismatch));
  const CovMatrix c4(Eigen::MatrixXd::Identity(4, 4));
  const MvShapes four(4, FcmShape{1.0, 3.0});
  CHECK(is_errc([&] { mv_adp_pdf(four, c4, Eigen::VectorXd::Zero(4)); }, Errc::dimension_too_large));
}
