#pragma once

#include <vector>

#include <Eigen/Dense>

#include "gsas.hpp"

namespace wd {

// Symmetric positive-definite scale matrix with cached inverse and determinant.
class CovMatrix {
 public:
  explicit CovMatrix(const Eigen::MatrixXd& m);
  static CovMatrix bivariate(double var1, double var2, double rho);

  int n() const { return static_cast<int>(m_.rows()); }
  const Eigen::MatrixXd& matrix() const { return m_; }
  const Eigen::MatrixXd& inverse() const { return inv_; }
  double det() const { return det_; }
  double sigma(int i) const { return std::sqrt(m_(i, i)); }
  double quad_form(const Eigen::VectorXd& x) const;

 private:
  Eigen::MatrixXd m_, inv_;
  double det_ = 0.0;
};

enum class MvMode { elliptical, adaptive };

// One shape per dimension (adaptive) or a single shared one (elliptical).
using MvShapes = std::vector<FcmShape>;

double mv_ell_pdf(const FcmShape& s, const CovMatrix& sigma, const Eigen::VectorXd& x, const QuadSpec& q = {});

struct MvEllSummary {
  double peak = 0.0;
  Eigen::MatrixXd cov;
  std::vector<double> marginal_scales;
};

MvEllSummary mv_ell_summary(const FcmShape& s, const CovMatrix& sigma);
double mv_ell_marginal_pdf(const FcmShape& s, const CovMatrix& sigma, int i, double x, const QuadSpec& q = {});

// Dimensions above this are rejected by the adaptive density.
constexpr int kMaxAdaptiveDim = 3;

double mv_adp_pdf(const MvShapes& shapes, const CovMatrix& sigma, const Eigen::VectorXd& x, const QuadSpec& q = {});
double mv_adp_peak(const MvShapes& shapes, const CovMatrix& sigma);
Eigen::MatrixXd mv_adp_cov(const MvShapes& shapes, const CovMatrix& sigma);

// sqrt(|Sigma| / prod Sigma_ii); equals sqrt(1 - rho^2) in two dimensions.
double peak_ratio_correlation(const CovMatrix& sigma);

struct CovAdjustResult {
  CovMatrix sigma;  // adjusted model scale matrix
  double factor = 0.0;
  double rho = 0.0;
  double model_peak = 0.0;
  double deviation = 0.0;  // |model_peak - sample_peak| / sample_peak
};

// Starts from the model scale matrix implied by the sample covariance (each
// variance divided by the marginal GSaS variance) and searches the smallest
// f in (0, 1] where variances scaled by (1 - f) and |rho| by (1 + f) bring the
// peak density within a fraction f of sample_peak.
CovAdjustResult covariance_adjust(MvMode mode, const MvShapes& shapes, const Eigen::Matrix2d& sample_cov,
                                  double sample_peak);

}  // namespace wd
