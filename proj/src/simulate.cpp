#include "simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include <boost/math/tools/roots.hpp>

#include "error.hpp"

namespace wd {

double drift_mu_gsc(const GscParams& g, double x) {
  validate(g);
  if (!(x > 0.0)) fail(Errc::domain_error, "drift needs x > 0");
  if (g.alpha >= 1.0) fail(Errc::delta_regime, "drift needs alpha < 1");
  const double z = std::pow(x / g.sigma, g.p);
  if (g.alpha == 0.0) return 0.5 * (g.d + g.p) - 0.5 * g.p * z;  // generalized gamma
  const double c = g.p / (2.0 * g.alpha);
  return c * q_ratio(g.alpha, z) + g.d / 2.0 - c;
}

double drift_mu_fcm(const FcmShape& s, double x) {
  validate(s);
  if (s.k < 0) fail(Errc::invalid_params, "drift_mu_fcm needs k > 0");
  if (s.alpha == 2.0) fail(Errc::delta_regime, "FCM at alpha = 2 is a point mass");
  if (!(x > 0.0)) fail(Errc::domain_error, "drift needs x > 0");
  return q_ratio(s.alpha / 2.0, std::pow(x / sigma_scale(s), s.alpha)) + (s.k - 3.0) / 2.0;
}

double drift_mu_fcm_inverse(const FcmShape& s, double x) {
  validate(s);
  if (s.k < 0) fail(Errc::invalid_params, "drift_mu_fcm_inverse takes k > 0");
  if (s.alpha == 2.0) fail(Errc::delta_regime, "FCM at alpha = 2 is a point mass");
  if (!(x > 0.0)) fail(Errc::domain_error, "drift needs x > 0");
  return q_ratio(s.alpha / 2.0, std::pow(x / sigma_scale(s), s.alpha)) + (s.k / 2.0 - 1.0);
}

double drift_mu_fcm_ratio(const FcmShape& s, double x) {
  validate(s);
  if (s.k < 0) fail(Errc::invalid_params, "drift_mu_fcm_ratio takes k > 0");
  if (s.alpha == 2.0) fail(Errc::delta_regime, "FCM at alpha = 2 is a point mass");
  if (!(x > 0.0)) fail(Errc::domain_error, "drift needs x > 0");
  // chi-bar_{a,-k} = N_{a/2}(1/sigma, -k, -a)
  return -q_ratio(s.alpha / 2.0, std::pow(x * sigma_scale(s), -s.alpha)) + 1.0 - s.k / 2.0;
}

DriftFn::DriftFn(std::function<double(double)> mu, double x_hi, double step)
    : mu_(std::move(mu)), step_(step), x_hi_(x_hi) {
  if (!(step > 0.0) || !(x_hi > step)) fail(Errc::invalid_params, "drift table needs 0 < step < x_hi");
  const auto n = static_cast<size_t>(std::ceil(x_hi / step));
  table_.resize(n + 1);
  for (size_t i = 1; i <= n; ++i) table_[i] = mu_(i * step);
  // fixed point: first sign change from + to -
  double lo = -1.0;
  for (size_t i = 1; i < n; ++i) {
    if (table_[i] > 0.0 && table_[i + 1] <= 0.0) {
      lo = i * step;
      break;
    }
  }
  if (lo < 0.0) fail(Errc::invalid_params, "drift has no mean-reverting root on the table range");
  boost::math::tools::eps_tolerance<double> tol(50);
  std::uintmax_t it = 100;
  const auto br = boost::math::tools::toms748_solve(mu_, lo, lo + step, tol, it);
  x_star_ = 0.5 * (br.first + br.second);
  const double h = 1e-4 * std::max(x_star_, 1e-3);
  slope_ = std::fabs((mu_(x_star_ + h) - mu_(x_star_ - h)) / (2 * h));
}

double DriftFn::operator()(double x) const {
  if (x < step_ || x >= x_hi_) return mu_(x);
  const double u = x / step_;
  const auto i = static_cast<size_t>(u);
  const double f = u - i;
  return table_[i] + f * (table_[i + 1] - table_[i]);
}

namespace {

double table_reach(const GscParams& g) {
  try {
    const double m1 = gsc_moment(g, 1.0), m2 = gsc_moment(g, 2.0);
    return m1 + 12.0 * std::sqrt(std::max(m2 - m1 * m1, 0.0)) + 1.0;
  } catch (const Error&) {
    return 50.0 * g.sigma;
  }
}

GscParams size_biased_fcm(const FcmShape& s) { return {s.alpha / 2.0, sigma_scale(s), s.k, s.alpha}; }

}  // namespace

DriftFn make_drift_gsc(const GscParams& g, double step) {
  validate(g);
  return DriftFn([g](double x) { return drift_mu_gsc(g, x); }, table_reach(g), step);
}

DriftFn make_drift_fcm(const FcmShape& s, double step) {
  validate(s);
  if (s.k < 0 || s.alpha == 2.0) fail(Errc::invalid_params, "FCM drift needs k > 0 and alpha < 2");
  return DriftFn([s](double x) { return drift_mu_fcm(s, x); }, table_reach(fcm_as_gsc(s)), step);
}

DriftFn make_drift_fcm_inverse(const FcmShape& s, double step) {
  validate(s);
  if (s.k < 0 || s.alpha == 2.0) fail(Errc::invalid_params, "FCM drift needs k > 0 and alpha < 2");
  return DriftFn([s](double x) { return drift_mu_fcm_inverse(s, x); }, table_reach(size_biased_fcm(s)), step);
}

void validate(const SdeConfig& c) {
  if (!(c.dt > 0.0) || !(c.sigma_u > 0.0) || !(c.theta_u > 0.0) || !(c.horizon_years > 0.0))
    fail(Errc::invalid_params, "dt, sigma_u, theta_u and horizon must be > 0");
  if (!(c.drift_cache_step > 0.0) || !(c.reflect_floor > 0.0) || !(c.ceiling > c.reflect_floor))
    fail(Errc::invalid_params, "cache step, reflect floor and ceiling must be positive and ordered");
  if (c.thin < 1 || c.hist_bins < 1) fail(Errc::invalid_params, "thin and hist_bins must be >= 1");
}

double half_life_years(const DriftFn& mu, const SdeConfig& c) {
  return std::log(2.0) * c.theta_u / (c.sigma_u * c.sigma_u * std::max(mu.reversion_slope(), 1e-12));
}

MomentSummary sample_moments(const std::vector<double>& v) {
  MomentSummary m;
  if (v.empty()) return m;
  const double n = static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += x;
  m.mean = s / n;
  double c2 = 0.0, c3 = 0.0, c4 = 0.0;
  for (double x : v) {
    const double d = x - m.mean, d2 = d * d;
    c2 += d2;
    c3 += d2 * d;
    c4 += d2 * d2;
  }
  c2 /= n;
  c3 /= n;
  c4 /= n;
  m.var = c2;
  m.skew = c2 > 0 ? c3 / std::pow(c2, 1.5) : 0.0;
  m.exkurt = c2 > 0 ? c4 / (c2 * c2) - 3.0 : 0.0;
  return m;
}

namespace {

// Steps the path, calling keep(x) for every recorded state after burn-in.
template <class Keep>
std::int64_t run_path(const DriftFn& mu, const SdeConfig& c, double burn_years, double total_years, Keep&& keep) {
  std::mt19937_64 rng(c.seed);
  std::normal_distribution<double> z(0.0, 1.0);
  const double s2dt = c.sigma_u * c.sigma_u * c.dt, sdt = c.sigma_u * std::sqrt(c.dt);
  const auto n = static_cast<std::int64_t>(std::ceil(total_years / c.dt));
  const auto burn = static_cast<std::int64_t>(std::ceil(burn_years / c.dt));
  double s = c.x0 > 0 ? c.x0 : c.theta_u * mu.fixed_point();
  for (std::int64_t i = 0; i < n; ++i) {
    s += s2dt * mu(s / c.theta_u) + sdt * std::sqrt(std::max(s, c.reflect_floor)) * z(rng);
    if (s < c.reflect_floor) s = std::max(2.0 * c.reflect_floor - s, c.reflect_floor);
    if (!(s < c.ceiling)) fail(Errc::exploded, "path exceeded the ceiling at t = " + std::to_string(i * c.dt));
    if (i >= burn) keep(i - burn, s);
  }
  return n;
}

}  // namespace

SdeSummary sde_run(const DriftFn& mu, const SdeConfig& c) {
  validate(c);
  SdeSummary out;
  out.burn_in_years = c.burn_in_years >= 0 ? c.burn_in_years : 10.0 * half_life_years(mu, c);
  out.steps = run_path(mu, c, out.burn_in_years, out.burn_in_years + c.horizon_years, [&](std::int64_t i, double s) {
    if (i % c.thin == 0) out.samples.push_back(s);
  });
  const auto m = sample_moments(out.samples);
  out.mean = m.mean;
  out.var = m.var;
  out.skew = m.skew;
  out.exkurt = m.exkurt;
  if (!out.samples.empty()) {
    const double hi = *std::max_element(out.samples.begin(), out.samples.end());
    const double w = hi / c.hist_bins;
    out.hist_edges.resize(c.hist_bins + 1);
    out.hist_density.assign(c.hist_bins, 0.0);
    for (int b = 0; b <= c.hist_bins; ++b) out.hist_edges[b] = b * w;
    for (double s : out.samples) {
      const int b = std::min(static_cast<int>(s / w), c.hist_bins - 1);
      out.hist_density[b] += 1.0;
    }
    for (double& d : out.hist_density) d /= out.samples.size() * w;
  }
  return out;
}

std::vector<SdeSummary> sde_run_paths(const DriftFn& mu, const SdeConfig& c, int paths, int threads) {
  if (paths < 1) fail(Errc::invalid_params, "paths must be >= 1");
  if (threads <= 0) threads = std::max(1u, std::thread::hardware_concurrency());
  std::vector<SdeSummary> out(paths);
  std::vector<std::exception_ptr> errs(paths);
  auto work = [&](int t) {
    for (int i = t; i < paths; i += threads) {
      SdeConfig ci = c;
      ci.seed = c.seed + static_cast<std::uint64_t>(i);
      try {
        out[i] = sde_run(mu, ci);
      } catch (...) {
        errs[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < std::min(threads, paths); ++t) pool.emplace_back(work, t);
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  return out;
}

namespace {

// Multipliers spaced along one long path; normals come from a separate stream.
std::vector<double> mixed_draws(const DriftFn& mu, const SdeConfig& c, int count, double spacing, bool ratio) {
  validate(c);
  if (count < 1) fail(Errc::invalid_params, "count must be >= 1");
  const double hl = half_life_years(mu, c);
  spacing = std::max(spacing, 5.0 * hl);
  const auto every = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::llround(spacing / c.dt)));
  const double burn = c.burn_in_years >= 0 ? c.burn_in_years : 10.0 * hl;
  std::vector<double> out;
  out.reserve(count);
  std::mt19937_64 rng(c.seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> z(0.0, 1.0);
  run_path(mu, c, burn, burn + (count * every + 1) * c.dt, [&](std::int64_t i, double s) {
    if (i % every == 0 && static_cast<int>(out.size()) < count) {
      const double v = s / c.theta_u;
      out.push_back(ratio ? z(rng) / v : z(rng) * v);
    }
  });
  return out;
}

std::vector<double> normal_draws(const SdeConfig& c, int count, double sd) {
  std::mt19937_64 rng(c.seed);
  std::normal_distribution<double> z(0.0, sd);
  std::vector<double> out(count);
  for (double& v : out) v = z(rng);
  return out;
}

}  // namespace

std::vector<double> sample_gsas(const FcmShape& s, const SdeConfig& c, int count, double sample_spacing_years) {
  validate(s);
  if (s.k < 0) fail(Errc::invalid_params, "sample_gsas needs k > 0; use sample_gep for the other face");
  if (s.alpha == 2.0) return normal_draws(c, count, 1.0 / fcm_delta_point(s));
  return mixed_draws(make_drift_fcm(s, c.drift_cache_step), c, count, sample_spacing_years, true);
}

std::vector<double> sample_gep(const GepShape& g, const SdeConfig& c, int count, double sample_spacing_years) {
  validate(g);
  const FcmShape s{g.alpha, g.k};
  if (g.alpha == 2.0) return normal_draws(c, count, fcm_delta_point(s));
  return mixed_draws(make_drift_fcm_inverse(s, c.drift_cache_step), c, count, sample_spacing_years, false);
}

}  // namespace wd
