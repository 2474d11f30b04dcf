/* C interface to the Wright-function distribution library.
 *
 * Every fallible call returns a wd_status; results go through out-pointers.
 * On failure wd_last_error() holds a message for the calling thread until its
 * next failing call. Handles are opaque and owned by the caller; pass them to
 * the matching *_free function. Free functions accept NULL.
 */
#ifndef WD_WD_H
#define WD_WD_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define WD_API __declspec(dllexport)
#else
#define WD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum wd_status {
  WD_OK = 0,
  WD_E_INVALID_PARAMS = 1,
  WD_E_DOMAIN = 2,
  WD_E_DELTA_REGIME = 3,
  WD_E_POLE_IN_NUMERATOR = 4,
  WD_E_SERIES_NOT_CONVERGED = 5,
  WD_E_DIVISION_NEAR_ZERO = 6,
  WD_E_MOMENT_UNDEFINED = 7,
  WD_E_ASYMPTOTIC_INVALID = 8,
  WD_E_QUADRATURE_FAILED = 9,
  WD_E_OSCILLATION_TOO_FAST = 10,
  WD_E_POSITIVITY_VIOLATION = 11,
  WD_E_KURTOSIS_UNDEFINED = 12,
  WD_E_DIMENSION_MISMATCH = 13,
  WD_E_DIMENSION_TOO_LARGE = 14,
  WD_E_NO_FACTOR_FOUND = 15,
  WD_E_EXPLODED = 16,
  WD_E_DEGENERATE_SAMPLE = 17,
  WD_E_NO_INTERSECTION = 18,
  WD_E_PARSE = 19,
  WD_E_IO = 20,
  WD_E_NULL_ARGUMENT = 100,
  WD_E_UNSUPPORTED = 101,
  WD_E_INTERNAL = 102
} wd_status;

WD_API const char* wd_status_name(wd_status s);
WD_API const char* wd_last_error(void);
WD_API const char* wd_version(void);

/* Diagnostics such as quadrature range extensions. NULL disables. */
typedef void (*wd_log_fn)(const char* msg, void* user);
WD_API void wd_set_log_callback(wd_log_fn fn, void* user);

/* ---- numerical options ---------------------------------------------- */

typedef struct wd_quad_opts {
  double rel_tol;
  double abs_tol;
  int max_panels;
  int fixed_upper; /* nonzero: integrate s only up to s_upper */
  double s_upper;
} wd_quad_opts;

typedef struct wd_osc_opts {
  double t_cut;
  int zero_crossing_segmentation;
  double rel_tol;
  int max_segments;
} wd_osc_opts;

WD_API void wd_quad_opts_default(wd_quad_opts* o);
WD_API void wd_osc_opts_default(wd_osc_opts* o);

/* ---- special functions ---------------------------------------------- */

WD_API wd_status wd_m_wright(double alpha, double z, double* out);
WD_API wd_status wd_wright(double lambda, double delta, double z, double* out);
/* sum z^n/n! Gamma(a n + b) / Gamma(lambda n + mu) */
WD_API wd_status wd_wright4(double a, double b, double lambda, double mu, double z, double* out);

/* ---- univariate distributions --------------------------------------- */

typedef enum wd_family {
  WD_GSC = 0,  /* generalized stable count (alpha, sigma, d, p) */
  WD_FCM = 1,  /* fractional chi-mean (alpha, k) */
  WD_GSAS = 2, /* generalized symmetric alpha-stable (alpha, k) */
  WD_GEP = 3,  /* generalized exponential power (alpha, k > 0) */
  WD_GAS = 4   /* skewed GSaS (alpha, k, theta) */
} wd_family;

typedef struct wd_dist wd_dist;

WD_API wd_status wd_gsc_create(double alpha, double sigma, double d, double p, wd_dist** out);
WD_API wd_status wd_fcm_create(double alpha, double k, wd_dist** out);
WD_API wd_status wd_gsas_create(double alpha, double k, wd_dist** out);
WD_API wd_status wd_gep_create(double alpha, double k, wd_dist** out);
WD_API wd_status wd_gas_create(double alpha, double k, double theta, wd_dist** out);
WD_API void wd_dist_free(wd_dist* d);

WD_API wd_family wd_dist_family(const wd_dist* d);
WD_API wd_status wd_dist_set_quad(wd_dist* d, const wd_quad_opts* o);
WD_API wd_status wd_dist_set_osc(wd_dist* d, const wd_osc_opts* o);

WD_API wd_status wd_dist_pdf(const wd_dist* d, double x, double* out);
/* FCM, GSaS and GEP */
WD_API wd_status wd_dist_cdf(const wd_dist* d, double x, double* out);
/* GSaS only */
WD_API wd_status wd_dist_quantile(const wd_dist* d, double prob, double* out);
WD_API wd_status wd_dist_cf(const wd_dist* d, double zeta, double* out);
/* GSC, FCM, GSaS and GEP */
WD_API wd_status wd_dist_moment(const wd_dist* d, double n, double* out);

/* Fields that do not exist for the shape are NaN. */
typedef struct wd_summary {
  double mean;
  double variance;
  double exkurt;
  double peak;     /* density at the mode (FCM) or at zero (symmetric laws) */
  double std_peak; /* peak after scaling to unit variance */
} wd_summary;

WD_API wd_status wd_dist_summary(const wd_dist* d, wd_summary* out);

/* GAS at -x and the mirrored shape at x; equal in exact arithmetic. */
WD_API wd_status wd_gas_symmetry_check(const wd_dist* d, double x, double* at_neg_x, double* mirrored);
/* Skew kernel g(x, s) of a GAS handle. */
WD_API wd_status wd_gas_kernel(const wd_dist* d, double x, double s, double* out);

/* ---- return series and fitting -------------------------------------- */

typedef struct wd_series wd_series;

/* One value column or "date,value"; '#' starts a comment. */
WD_API wd_status wd_series_read_csv(const char* path, wd_series** out);
WD_API wd_status wd_series_from_values(const double* values, size_t n, wd_series** out);
WD_API size_t wd_series_length(const wd_series* s);
WD_API const double* wd_series_values(const wd_series* s);
WD_API void wd_series_free(wd_series* s);

typedef struct wd_fit_target {
  double exkurt;
  double std_peak;
  double skewness;
  double mean;
  double sd;
  double max_abs_z;
} wd_fit_target;

WD_API wd_status wd_summarize(const wd_series* s, int bins, wd_fit_target* out);

typedef struct wd_grid_opts {
  double alpha_lo, alpha_hi;
  double k_lo, k_hi;
  int n_alpha, n_k;
  int threads;      /* 0 = hardware concurrency */
  int uniform_in_s; /* nonzero: alpha nodes evenly spaced in s = 1/alpha */
} wd_grid_opts;

WD_API void wd_grid_opts_default(wd_grid_opts* o);

typedef struct wd_grid wd_grid;

WD_API wd_status wd_grid_create(const wd_fit_target* t, const wd_grid_opts* o, wd_grid** out);
WD_API void wd_grid_free(wd_grid* g);
WD_API void wd_grid_dims(const wd_grid* g, int* n_alpha, int* n_k);
WD_API wd_status wd_grid_cell(const wd_grid* g, int i, int j, double* alpha, double* k, double* std_peak,
                              double* exkurt, int* valid);

typedef enum wd_level { WD_LEVEL_STD_PEAK = 0, WD_LEVEL_EXKURT = 1 } wd_level;

WD_API int wd_grid_polyline_count(const wd_grid* g, wd_level which);
/* Vertex count of one polyline. */
WD_API wd_status wd_grid_polyline_size(const wd_grid* g, wd_level which, int index, size_t* n);
/* Copies at most cap vertices into alpha[] and k[]. */
WD_API wd_status wd_grid_polyline(const wd_grid* g, wd_level which, int index, double* alpha, double* k,
                                  size_t cap);

typedef struct wd_fit_result {
  double alpha, k, theta;
  double scale, location;
  double res_peak, res_exkurt, res_skew;
  int at_boundary; /* nonzero: normal limit, k reported as +inf */
  int candidates;
  int peak_polylines, exkurt_polylines;
} wd_fit_result;

WD_API wd_status wd_trace_solution(const wd_fit_target* t, const wd_grid* g, wd_fit_result* out);
WD_API wd_status wd_fit_skew(const wd_series* s, const wd_fit_result* base, const wd_osc_opts* osc,
                             wd_fit_result* out);
/* Skewness of GAS(alpha, k, theta) restricted to limit standard deviations. */
WD_API wd_status wd_gas_truncated_skewness(double alpha, double k, double theta, double limit, double* out);

/* ---- multivariate ---------------------------------------------------- */

typedef enum wd_mv_mode { WD_MV_ELLIPTICAL = 0, WD_MV_ADAPTIVE = 1 } wd_mv_mode;

/* Shapes: one (alpha, k) pair for elliptical, n pairs for adaptive.
 * Matrices are n x n row-major. */
WD_API wd_status wd_mv_pdf(wd_mv_mode mode, const double* alphas, const double* ks, int n_shapes,
                           const double* cov, int n, const double* x, double* out);
WD_API wd_status wd_mv_peak(wd_mv_mode mode, const double* alphas, const double* ks, int n_shapes,
                            const double* cov, int n, double* out);
/* Covariance of the distribution with scale matrix cov. */
WD_API wd_status wd_mv_covariance(wd_mv_mode mode, const double* alphas, const double* ks, int n_shapes,
                                  const double* cov, int n, double* out);
WD_API wd_status wd_peak_ratio_correlation(const double* cov, int n, double* out);

typedef struct wd_cov_adjust_result {
  double factor;
  double rho;
  double model_cov[4]; /* adjusted 2 x 2 scale matrix, row-major */
  double model_peak;
  double deviation;
} wd_cov_adjust_result;

WD_API wd_status wd_covariance_adjust(wd_mv_mode mode, const double* alphas, const double* ks, int n_shapes,
                                      const double sample_cov[4], double sample_peak, wd_cov_adjust_result* out);

typedef struct wd_bivariate_fit {
  wd_fit_result marginal[2];
  double alphas[2], ks[2];
  int n_shapes;
  double sample_cov[4];
  double sample_peak;
  wd_cov_adjust_result adjust;
} wd_bivariate_fit;

WD_API wd_status wd_fit_bivariate(const wd_series* a, const wd_series* b, wd_mv_mode mode, int bins,
                                  const wd_grid_opts* grid, wd_bivariate_fit* out);

/* ---- simulation ------------------------------------------------------- */

typedef struct wd_sde_opts {
  double dt;
  double sigma_u;
  double theta_u;
  double horizon_years;
  uint64_t seed;
  double drift_cache_step;
  double reflect_floor;
  double ceiling;
  double burn_in_years; /* negative: ten mean-reversion half-lives */
  int thin;
  int hist_bins;
  double x0; /* negative: start at the drift's fixed point */
} wd_sde_opts;

WD_API void wd_sde_opts_default(wd_sde_opts* o);

typedef struct wd_drift wd_drift;

/* Drift whose stationary law is chi-bar_{alpha,k} (k > 0). */
WD_API wd_status wd_drift_fcm(double alpha, double k, double step, wd_drift** out);
/* Size-biased chi-bar_{alpha,k}, the multiplier law of the GEP product form. */
WD_API wd_status wd_drift_fcm_inverse(double alpha, double k, double step, wd_drift** out);
/* Stationary law GSC(alpha, sigma, d, p); alpha = 0 is the generalized gamma. */
WD_API wd_status wd_drift_gsc(double alpha, double sigma, double d, double p, double step, wd_drift** out);
WD_API void wd_drift_free(wd_drift* d);
WD_API wd_status wd_drift_eval(const wd_drift* d, double x, double* out);
WD_API wd_status wd_drift_fixed_point(const wd_drift* d, double* x, double* slope);
WD_API wd_status wd_half_life_years(const wd_drift* d, const wd_sde_opts* o, double* out);

typedef struct wd_samples wd_samples;

WD_API wd_status wd_sde_run(const wd_drift* d, const wd_sde_opts* o, wd_samples** out);
WD_API wd_status wd_sample_gsas(double alpha, double k, const wd_sde_opts* o, int count, double spacing_years,
                                wd_samples** out);
WD_API wd_status wd_sample_gep(double alpha, double k, const wd_sde_opts* o, int count, double spacing_years,
                               wd_samples** out);
WD_API void wd_samples_free(wd_samples* s);
WD_API size_t wd_samples_length(const wd_samples* s);
WD_API const double* wd_samples_data(const wd_samples* s);
/* Histogram has bins + 1 edges; empty for the sample_* draws. */
WD_API size_t wd_samples_hist_bins(const wd_samples* s);
WD_API const double* wd_samples_hist_edges(const wd_samples* s);
WD_API const double* wd_samples_hist_density(const wd_samples* s);

typedef struct wd_moments {
  double mean, var, skew, exkurt;
} wd_moments;

WD_API wd_status wd_samples_moments(const wd_samples* s, wd_moments* out);

#ifdef __cplusplus
}
#endif

#endif /* WD_WD_H */
