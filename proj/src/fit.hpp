#pragma once

#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "gas.hpp"
#include "multivariate.hpp"

namespace wd {

struct ReturnSeries {
  std::vector<double> values;
  std::vector<std::string> timestamps;  // empty when the input had one column
};

// One numeric column or "date,value"; '#' starts a comment. A header line is
// skipped only when it is the first non-comment line and does not parse.
ReturnSeries read_series_csv(std::istream& in);
ReturnSeries read_series_csv_file(const std::string& path);

struct FitTarget {
  double exkurt = 0.0;
  double std_peak = 0.0;
  double skewness = 0.0;
  double mean = 0.0;
  double sd = 0.0;
  double max_abs_z = 0.0;  // largest standardized observation
};

constexpr std::size_t kMinFitLength = 100;

FitTarget summarize(const ReturnSeries& series, int bins = 200);

struct ContourGrid {
  std::vector<double> alphas, ks;
  // row i = alpha index, column j = k index
  std::vector<std::vector<double>> std_peak, exkurt;
  std::vector<std::vector<char>> valid;
  double peak_level = 0.0, exkurt_level = 0.0;
  std::vector<std::vector<std::pair<double, double>>> peak_lines, exkurt_lines;  // (alpha, k) vertices
};

struct GridSpec {
  double alpha_lo = 0.3, alpha_hi = 2.0;
  double k_lo = 0.5, k_hi = 12.0;
  int n_alpha = 200, n_k = 200;
  int threads = 0;  // 0 = hardware concurrency
  // Space the alpha axis evenly in s = 1/alpha instead of alpha.
  bool uniform_in_s = false;
};

// Both closed forms at one point; valid is false where either is undefined.
struct ShapeStats {
  double std_peak = 0.0, exkurt = 0.0;
  bool valid = false;
};
ShapeStats gsas_shape_stats(double alpha, double k);

ContourGrid contour_grid(const FitTarget& t, const GridSpec& spec = {});

struct FitCandidate {
  double alpha, k, res_peak, res_exkurt;
};

struct FitResult {
  double alpha = 0.0, k = 0.0, theta = 0.0, scale = 1.0, location = 0.0;
  double res_peak = 0.0, res_exkurt = 0.0, res_skew = 0.0;
  bool at_boundary = false;  // normal limit: no interior solution
  std::vector<FitCandidate> candidates;
  int peak_polylines = 0, exkurt_polylines = 0;
};

FitResult trace_solution(const FitTarget& t, const ContourGrid& grid);

// Skewness of the GAS model restricted to |x| <= limit standard deviations of
// the symmetric shape. Throws PositivityViolation when the density goes
// negative inside that window.
double gas_truncated_skewness(const SkewShape& sh, double limit);

FitResult fit_skew(const ReturnSeries& series, const FitResult& base, const OscQuadSpec& osc = {});

struct BivariateFit {
  MvMode mode = MvMode::adaptive;
  FitResult marginal_a, marginal_b;
  MvShapes shapes;
  Eigen::Matrix2d sample_cov;
  double sample_peak = 0.0;
  std::optional<CovAdjustResult> adjust;
};

// Peak of the 2-D histogram density with bins x bins cells over the data range.
double histogram_peak_2d(const std::vector<double>& a, const std::vector<double>& b, int bins);

BivariateFit fit_bivariate(const ReturnSeries& a, const ReturnSeries& b, MvMode mode, int bins = 200,
                           const GridSpec& grid = {});

}  // namespace wd
