#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "gep.hpp"

namespace wd {

// Stationary drift mu(x) = (x/2) dlog pdf/dx + 1/2.
double drift_mu_gsc(const GscParams& g, double x);
// k > 0.
double drift_mu_fcm(const FcmShape& s, double x);
// Product route: drift of the size-biased chi-bar_{alpha,k} (k > 0), the law of
// the multiplier in X = S N.
double drift_mu_fcm_inverse(const FcmShape& s, double x);
// Ratio route: drift of chi-bar_{alpha,-k} itself (k > 0).
double drift_mu_fcm_ratio(const FcmShape& s, double x);

// Drift with a linear-interpolation table on [step, x_hi]; exact outside.
class DriftFn {
 public:
  DriftFn(std::function<double(double)> mu, double x_hi, double step = 0.01);
  double operator()(double x) const;
  double exact(double x) const { return mu_(x); }
  double step() const { return step_; }
  double x_hi() const { return x_hi_; }
  // Root of mu and |dmu/dx| there.
  double fixed_point() const { return x_star_; }
  double reversion_slope() const { return slope_; }

 private:
  std::function<double(double)> mu_;
  double step_, x_hi_;
  std::vector<double> table_;
  double x_star_ = 1.0, slope_ = 1.0;
};

DriftFn make_drift_gsc(const GscParams& g, double step = 0.01);
DriftFn make_drift_fcm(const FcmShape& s, double step = 0.01);
DriftFn make_drift_fcm_inverse(const FcmShape& s, double step = 0.01);

struct SdeConfig {
  double dt = 1.0 / 365.0;
  double sigma_u = 1.0;
  double theta_u = 1.0;
  double horizon_years = 100.0;
  std::uint64_t seed = 42;
  double drift_cache_step = 0.01;
  double reflect_floor = 1e-6;
  double ceiling = 1e6;
  // Negative selects ten mean-reversion half-lives.
  double burn_in_years = -1.0;
  int thin = 1;
  int hist_bins = 200;
  double x0 = -1.0;  // negative starts at the drift's fixed point
};

void validate(const SdeConfig& c);

struct SdeSummary {
  std::vector<double> samples;  // kept after burn-in and thinning
  std::vector<double> hist_edges, hist_density;
  double mean = 0.0, var = 0.0, skew = 0.0, exkurt = 0.0;
  std::int64_t steps = 0;
  double burn_in_years = 0.0;
};

double half_life_years(const DriftFn& mu, const SdeConfig& c);

SdeSummary sde_run(const DriftFn& mu, const SdeConfig& c);
// Independent paths on worker threads; path i uses seed + i.
std::vector<SdeSummary> sde_run_paths(const DriftFn& mu, const SdeConfig& c, int paths, int threads = 0);

// Draws spaced five half-lives apart (or sample_spacing_years when larger).
std::vector<double> sample_gsas(const FcmShape& s, const SdeConfig& c, int count, double sample_spacing_years = 0.0);
std::vector<double> sample_gep(const GepShape& g, const SdeConfig& c, int count, double sample_spacing_years = 0.0);

struct MomentSummary {
  double mean = 0.0, var = 0.0, skew = 0.0, exkurt = 0.0;
};
MomentSummary sample_moments(const std::vector<double>& v);

}  // namespace wd
