#include "multivariate.hpp"

#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

#include "error.hpp"

namespace wd {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

struct Node {
  double s, w;
};

// Composite Gauss-Legendre nodes in u = log s carrying s * s * chi-bar(s) du:
// one s from ds = s du and one from the Gaussian normalization.
std::vector<Node> fcm_nodes(const FcmShape& sh, double panel) {
  if (sh.alpha == 2.0) {
    const double c = fcm_delta_point(sh);
    return {{c, c}};
  }
  auto weight = [&](double u) {
    const double s = std::exp(u);
    return s * s * fcm_pdf(sh, s);
  };
  const auto hints = fcm_hints(sh);
  double u0 = hints.front().u, wmax = 0.0;
  for (const auto& h : hints)
    for (int j = -8; j <= 8; ++j) wmax = std::max(wmax, weight(h.u + j * 0.25 * h.w));
  auto edge = [&](double dir) {
    double u = u0;
    int quiet = 0;
    for (int n = 0; n < 4000 && quiet < 3; ++n) {
      u += dir * panel;
      const double v = weight(u);
      wmax = std::max(wmax, v);
      quiet = v < 1e-15 * wmax ? quiet + 1 : 0;
    }
    return u;
  };
  const double lo = edge(-1.0), hi = edge(+1.0);
  using GL = boost::math::quadrature::gauss<double, 10>;
  const auto& xa = GL::abscissa();
  const auto& wa = GL::weights();
  std::vector<Node> out;
  for (double a = lo; a < hi; a += panel) {
    const double c = a + 0.5 * panel, h = 0.5 * panel;
    for (size_t i = 0; i < xa.size(); ++i) {
      for (int sgn : {-1, 1}) {
        if (xa[i] == 0.0 && sgn < 0) continue;
        const double u = c + sgn * h * xa[i];
        const double v = weight(u) * wa[i] * h;
        if (v > 0.0) out.push_back({std::exp(u), v});
      }
    }
  }
  return out;
}

}  // namespace

CovMatrix::CovMatrix(const Eigen::MatrixXd& m) : m_(m) {
  if (m.rows() != m.cols() || m.rows() < 1) fail(Errc::dimension_mismatch, "covariance must be square");
  if (!m.allFinite()) fail(Errc::invalid_params, "covariance has non-finite entries");
  const double scale = m.cwiseAbs().maxCoeff();
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(scale, 1.0))
    fail(Errc::invalid_params, "covariance is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.eigenvalues().minCoeff() <= 0.0) fail(Errc::invalid_params, "covariance is not positive definite");
  if (m.rows() == 2)
    det_ = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  else
    det_ = es.eigenvalues().prod();
  inv_ = m.llt().solve(Eigen::MatrixXd::Identity(m.rows(), m.cols()));
}

CovMatrix CovMatrix::bivariate(double var1, double var2, double rho) {
  if (!(std::fabs(rho) < 1.0)) fail(Errc::invalid_params, "|rho| must be < 1");
  Eigen::MatrixXd m(2, 2);
  const double c = rho * std::sqrt(var1 * var2);
  m << var1, c, c, var2;
  return CovMatrix(m);
}

double CovMatrix::quad_form(const Eigen::VectorXd& x) const {
  if (x.size() != m_.rows()) fail(Errc::dimension_mismatch, "vector length does not match covariance");
  return x.dot(inv_ * x);
}

double mv_ell_pdf(const FcmShape& s, const CovMatrix& sigma, const Eigen::VectorXd& x, const QuadSpec& q) {
  validate(s);
  const int n = sigma.n();
  const double r2 = sigma.quad_form(x);
  const double norm = std::pow(kTwoPi, -0.5 * n) / std::sqrt(sigma.det());
  if (s.alpha == 2.0) {
    const double c = fcm_delta_point(s);
    return norm * std::pow(c, n) * std::exp(-0.5 * c * c * r2);
  }
  if (r2 == 0.0) return norm * fcm_moment(s, n);
  std::vector<quad::Hint> extra{{-0.5 * std::log(r2), 1.0}};
  return norm * integrate_over_fcm(
                    s, [n, r2](double t) { return std::pow(t, n) * std::exp(-0.5 * t * t * r2); }, extra, q,
                    "elliptical density");
}

MvEllSummary mv_ell_summary(const FcmShape& s, const CovMatrix& sigma) {
  MvEllSummary out;
  const int n = sigma.n();
  out.peak = std::pow(kTwoPi, -0.5 * n) / std::sqrt(sigma.det()) * fcm_moment(s, n);
  out.cov = fcm_moment(s, -2.0) * sigma.matrix();
  for (int i = 0; i < n; ++i) out.marginal_scales.push_back(sigma.sigma(i));
  return out;
}

double mv_ell_marginal_pdf(const FcmShape& s, const CovMatrix& sigma, int i, double x, const QuadSpec& q) {
  if (i < 0 || i >= sigma.n()) fail(Errc::dimension_mismatch, "marginal index out of range");
  const double si = sigma.sigma(i);
  return gsas_pdf(s, x / si, q) / si;
}

double mv_adp_pdf(const MvShapes& shapes, const CovMatrix& sigma, const Eigen::VectorXd& x, const QuadSpec& q) {
  (void)q;
  const int n = sigma.n();
  if (static_cast<int>(shapes.size()) != n || x.size() != n)
    fail(Errc::dimension_mismatch, "shapes, covariance and x must share one dimension");
  if (n > kMaxAdaptiveDim) fail(Errc::dimension_too_large, "adaptive density supports up to 3 dimensions");
  for (const auto& s : shapes) validate(s);
  const double norm = std::pow(kTwoPi, -0.5 * n) / std::sqrt(sigma.det());
  if (x.isZero(0.0)) return mv_adp_peak(shapes, sigma);
  // Panels of 1/4 in log s for two dimensions or fewer, 1/2 for three.
  const double panel = n <= 2 ? 0.25 : 0.5;
  std::vector<std::vector<Node>> nodes;
  for (const auto& s : shapes) nodes.push_back(fcm_nodes(s, panel));
  const Eigen::MatrixXd& P = sigma.inverse();
  double total = 0.0;
  if (n == 1) {
    for (const auto& a : nodes[0]) {
      const double y = a.s * x(0);
      total += a.w * std::exp(-0.5 * P(0, 0) * y * y);
    }
  } else if (n == 2) {
    for (const auto& a : nodes[0]) {
      const double y0 = a.s * x(0);
      const double c0 = P(0, 0) * y0 * y0;
      for (const auto& b : nodes[1]) {
        const double y1 = b.s * x(1);
        total += a.w * b.w * std::exp(-0.5 * (c0 + 2.0 * P(0, 1) * y0 * y1 + P(1, 1) * y1 * y1));
      }
    }
  } else {
    for (const auto& a : nodes[0]) {
      const double y0 = a.s * x(0);
      for (const auto& b : nodes[1]) {
        const double y1 = b.s * x(1);
        const double c01 = P(0, 0) * y0 * y0 + 2.0 * P(0, 1) * y0 * y1 + P(1, 1) * y1 * y1;
        const double wab = a.w * b.w;
        for (const auto& c : nodes[2]) {
          const double y2 = c.s * x(2);
          total += wab * c.w *
                   std::exp(-0.5 * (c01 + 2.0 * (P(0, 2) * y0 + P(1, 2) * y1) * y2 + P(2, 2) * y2 * y2));
        }
      }
    }
  }
  if (!std::isfinite(total)) fail(Errc::quadrature_failed, "adaptive density sum is not finite");
  return norm * total;
}

double mv_adp_peak(const MvShapes& shapes, const CovMatrix& sigma) {
  const int n = sigma.n();
  if (static_cast<int>(shapes.size()) != n) fail(Errc::dimension_mismatch, "one shape per dimension required");
  double prod = 1.0;
  for (const auto& s : shapes) prod *= fcm_moment(s, 1.0);
  return prod * std::pow(kTwoPi, -0.5 * n) / std::sqrt(sigma.det());
}

Eigen::MatrixXd mv_adp_cov(const MvShapes& shapes, const CovMatrix& sigma) {
  const int n = sigma.n();
  if (static_cast<int>(shapes.size()) != n) fail(Errc::dimension_mismatch, "one shape per dimension required");
  Eigen::MatrixXd c(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      c(i, j) = (i == j ? fcm_moment(shapes[i], -2.0)
                        : fcm_moment(shapes[i], -1.0) * fcm_moment(shapes[j], -1.0)) *
                sigma.matrix()(i, j);
  return c;
}

double peak_ratio_correlation(const CovMatrix& sigma) {
  if (sigma.n() != 2) fail(Errc::dimension_mismatch, "peak ratio is defined for two dimensions");
  const auto& m = sigma.matrix();
  const double r = m(0, 1) / std::sqrt(m(0, 0) * m(1, 1));
  return std::sqrt(1.0 - r * r);
}

CovAdjustResult covariance_adjust(MvMode mode, const MvShapes& shapes, const Eigen::Matrix2d& sample_cov,
                                  double sample_peak) {
  if (!(sample_peak > 0.0)) fail(Errc::invalid_params, "sample peak must be > 0");
  if (mode == MvMode::elliptical ? shapes.size() != 1 : shapes.size() != 2)
    fail(Errc::dimension_mismatch, "elliptical mode takes one shape, adaptive mode two");
  const CovMatrix base(sample_cov);
  const FcmShape& s0 = shapes[0];
  const FcmShape& s1 = mode == MvMode::elliptical ? shapes[0] : shapes[1];
  const double v0 = sample_cov(0, 0) / fcm_moment(s0, -2.0);
  const double v1 = sample_cov(1, 1) / fcm_moment(s1, -2.0);
  const double rho0 = sample_cov(0, 1) / std::sqrt(sample_cov(0, 0) * sample_cov(1, 1));
  const double numer = mode == MvMode::elliptical ? fcm_moment(s0, 2.0) : fcm_moment(s0, 1.0) * fcm_moment(s1, 1.0);
  auto rho_at = [&](double f) { return rho0 * (1.0 + f); };
  auto peak_at = [&](double f) {
    const double r = rho_at(f);
    return numer / (kTwoPi * std::sqrt(v0 * v1 * (1.0 - f) * (1.0 - f) * (1.0 - r * r)));
  };
  auto gap = [&](double f) { return std::fabs(peak_at(f) - sample_peak) / sample_peak - f; };
  // largest admissible f keeps |rho| below one
  const double f_max = std::min(1.0, std::fabs(rho0) > 0 ? (1.0 / std::fabs(rho0) - 1.0) : 1.0);
  double lo = 0.0, hi = -1.0;
  const int steps = 20000;
  for (int i = 1; i <= steps; ++i) {
    const double f = f_max * i / steps * (1.0 - 1e-9);
    if (gap(f) < 0.0) {
      hi = f;
      break;
    }
    lo = f;
  }
  if (hi < 0.0) fail(Errc::no_factor_found, "no adjustment factor in (0, 1] meets the peak tolerance");
  for (int it = 0; it < 100; ++it) {
    const double m = 0.5 * (lo + hi);
    (gap(m) < 0.0 ? hi : lo) = m;
  }
  const double f = hi, r = rho_at(f);
  CovAdjustResult out{CovMatrix::bivariate(v0 * (1.0 - f), v1 * (1.0 - f), r), f, r, peak_at(f), 0.0};
  out.deviation = std::fabs(out.model_peak - sample_peak) / sample_peak;
  return out;
}

}  // namespace wd
