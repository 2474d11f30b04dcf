// wdist: command-line front end over the C interface.
//
// Exit codes: 0 ok, 1 selftest failure, 2 usage or validation error,
// 3 numeric failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "wd/wd.h"

using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSelftest = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

struct CliError {
  int exit_code;
  std::string message;
};

bool is_validation(wd_status s) {
  switch (s) {
    case WD_E_INVALID_PARAMS:
    case WD_E_DOMAIN:
    case WD_E_DIMENSION_MISMATCH:
    case WD_E_DIMENSION_TOO_LARGE:
    case WD_E_DEGENERATE_SAMPLE:
    case WD_E_PARSE:
    case WD_E_IO:
    case WD_E_NULL_ARGUMENT:
    case WD_E_UNSUPPORTED:
      return true;
    default:
      return false;
  }
}

void check(wd_status s) {
  if (s == WD_OK) return;
  throw CliError{is_validation(s) ? kExitUsage : kExitNumeric,
                 *wd_last_error() ? std::string(wd_last_error()) : std::string(wd_status_name(s))};
}

[[noreturn]] void usage_error(const std::string& msg) { throw CliError{kExitUsage, msg}; }

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using DistPtr = std::unique_ptr<wd_dist, Deleter<wd_dist, wd_dist_free>>;
using SeriesPtr = std::unique_ptr<wd_series, Deleter<wd_series, wd_series_free>>;
using GridPtr = std::unique_ptr<wd_grid, Deleter<wd_grid, wd_grid_free>>;
using DriftPtr = std::unique_ptr<wd_drift, Deleter<wd_drift, wd_drift_free>>;
using SamplesPtr = std::unique_ptr<wd_samples, Deleter<wd_samples, wd_samples_free>>;

// Locale-independent shortest round-trip formatting.
std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

json jnum(double v) { return std::isfinite(v) ? json(v) : json(num(v)); }

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) usage_error("cannot write " + path);
  return f;
}

enum class Format { text, tsv, json };

// ---- eval -----------------------------------------------------------------

struct EvalArgs {
  std::string dist;
  double alpha = 1.0, k = 1.0, theta = 0.0;
  double sigma = 1.0, d = 1.0, p = 1.0;
  std::vector<double> x, range, cov, alphas, ks;
  Format format = Format::text;
};

std::vector<double> eval_points(const EvalArgs& a) {
  std::vector<double> xs = a.x;
  if (!a.range.empty()) {
    if (a.range.size() != 3 || !(a.range[2] > 0.0) || a.range[1] < a.range[0])
      usage_error("--range takes lo hi step with step > 0");
    const int n = static_cast<int>(std::floor((a.range[1] - a.range[0]) / a.range[2] + 1e-9));
    for (int i = 0; i <= n; ++i) xs.push_back(a.range[0] + i * a.range[2]);
  }
  if (xs.empty()) usage_error("no evaluation points: give --x or --range");
  return xs;
}

int run_eval(const EvalArgs& a) {
  std::vector<std::string> cols{"x", "pdf"};
  std::vector<std::vector<double>> rows;
  if (a.dist == "mv-ell" || a.dist == "mv-adp") {
    const int n = static_cast<int>(a.x.size());
    if (n < 1) usage_error("--x gives the point, one value per dimension");
    if (static_cast<int>(a.cov.size()) != n * n) usage_error("--cov needs n*n values in row-major order");
    const bool ell = a.dist == "mv-ell";
    std::vector<double> al = a.alphas, kk = a.ks;
    if (al.empty()) al.assign(ell ? 1 : n, a.alpha);
    if (kk.empty()) kk.assign(ell ? 1 : n, a.k);
    if (al.size() != kk.size()) usage_error("--alphas and --ks differ in length");
    double v = 0.0;
    check(wd_mv_pdf(ell ? WD_MV_ELLIPTICAL : WD_MV_ADAPTIVE, al.data(), kk.data(), static_cast<int>(al.size()),
                    a.cov.data(), n, a.x.data(), &v));
    cols = {};
    for (int i = 0; i < n; ++i) cols.push_back("x" + std::to_string(i + 1));
    cols.push_back("pdf");
    std::vector<double> row = a.x;
    row.push_back(v);
    rows.push_back(row);
  } else {
    wd_dist* raw = nullptr;
    if (a.dist == "gsc")
      check(wd_gsc_create(a.alpha, a.sigma, a.d, a.p, &raw));
    else if (a.dist == "fcm")
      check(wd_fcm_create(a.alpha, a.k, &raw));
    else if (a.dist == "gsas")
      check(wd_gsas_create(a.alpha, a.k, &raw));
    else if (a.dist == "gep")
      check(wd_gep_create(a.alpha, a.k, &raw));
    else if (a.dist == "gas")
      check(wd_gas_create(a.alpha, a.k, a.theta, &raw));
    else
      usage_error("unknown distribution '" + a.dist + "'");
    DistPtr dist(raw);
    const wd_family fam = wd_dist_family(raw);
    const bool has_cdf = fam == WD_FCM || fam == WD_GSAS || fam == WD_GEP;
    if (has_cdf) cols.push_back("cdf");
    for (double x : eval_points(a)) {
      double pdf = 0.0, cdf = 0.0;
      check(wd_dist_pdf(raw, x, &pdf));
      if (has_cdf) {
        check(wd_dist_cdf(raw, x, &cdf));
        rows.push_back({x, pdf, cdf});
      } else {
        rows.push_back({x, pdf});
      }
    }
  }
  if (a.format == Format::json) {
    json out = json::array();
    for (const auto& r : rows) {
      json o;
      for (size_t c = 0; c < cols.size(); ++c) o[cols[c]] = jnum(r[c]);
      out.push_back(o);
    }
    std::cout << out.dump(2) << "\n";
  } else {
    const char* sep = a.format == Format::tsv ? "\t" : "  ";
    for (size_t c = 0; c < cols.size(); ++c) std::cout << (c ? sep : "") << cols[c];
    std::cout << "\n";
    for (const auto& r : rows) {
      for (size_t c = 0; c < r.size(); ++c) std::cout << (c ? sep : "") << num(r[c]);
      std::cout << "\n";
    }
  }
  return kExitOk;
}

// ---- grid -----------------------------------------------------------------

struct GridArgs {
  double exkurt = std::numeric_limits<double>::quiet_NaN();
  double std_peak = std::numeric_limits<double>::quiet_NaN();
  std::string csv;
  int bins = 200;
  std::vector<double> alpha_range{0.3, 2.0}, k_range{0.5, 12.0};
  int n_alpha = 200, n_k = 200;
  int threads = 0;
  bool s_coordinate = false;
  std::string out, lines_prefix;
};

wd_grid_opts grid_opts(const GridArgs& a) {
  wd_grid_opts o;
  wd_grid_opts_default(&o);
  if (a.alpha_range.size() != 2 || a.k_range.size() != 2) usage_error("ranges take two values: lo hi");
  o.alpha_lo = a.alpha_range[0];
  o.alpha_hi = a.alpha_range[1];
  o.k_lo = a.k_range[0];
  o.k_hi = a.k_range[1];
  o.n_alpha = a.n_alpha;
  o.n_k = a.n_k;
  o.threads = a.threads;
  o.uniform_in_s = a.s_coordinate ? 1 : 0;
  return o;
}

wd_fit_target grid_target(const GridArgs& a) {
  wd_fit_target t{};
  if (!a.csv.empty()) {
    wd_series* raw = nullptr;
    check(wd_series_read_csv(a.csv.c_str(), &raw));
    SeriesPtr s(raw);
    check(wd_summarize(raw, a.bins, &t));
  }
  if (!std::isnan(a.exkurt)) t.exkurt = a.exkurt;
  if (!std::isnan(a.std_peak)) t.std_peak = a.std_peak;
  if (!(t.std_peak > 0.0)) usage_error("targets needed: --exkurt and --std-peak, or --csv");
  return t;
}

void write_polylines(const wd_grid* g, wd_level which, bool s_coord, const std::string& path) {
  auto f = open_out(path);
  f << "line\t" << (s_coord ? "k\ts" : "alpha\tk") << "\n";
  const int n = wd_grid_polyline_count(g, which);
  for (int i = 0; i < n; ++i) {
    size_t m = 0;
    check(wd_grid_polyline_size(g, which, i, &m));
    std::vector<double> al(m), kk(m);
    check(wd_grid_polyline(g, which, i, al.data(), kk.data(), m));
    for (size_t v = 0; v < m; ++v) {
      if (s_coord)
        f << i << "\t" << num(kk[v]) << "\t" << num(1.0 / al[v]) << "\n";
      else
        f << i << "\t" << num(al[v]) << "\t" << num(kk[v]) << "\n";
    }
  }
}

int run_grid(const GridArgs& a) {
  const wd_fit_target t = grid_target(a);
  const wd_grid_opts o = grid_opts(a);
  wd_grid* raw = nullptr;
  check(wd_grid_create(&t, &o, &raw));
  GridPtr grid(raw);
  std::ofstream file;
  if (!a.out.empty()) file = open_out(a.out);
  std::ostream& os = a.out.empty() ? std::cout : file;
  os << (a.s_coordinate ? "k\ts" : "alpha\tk") << "\tstd_peak\texkurt\tvalid\n";
  int na = 0, nk = 0;
  wd_grid_dims(raw, &na, &nk);
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < nk; ++j) {
      double al, k, sp, ek;
      int valid;
      check(wd_grid_cell(raw, i, j, &al, &k, &sp, &ek, &valid));
      if (a.s_coordinate)
        os << num(k) << "\t" << num(1.0 / al);
      else
        os << num(al) << "\t" << num(k);
      os << "\t" << num(sp) << "\t" << num(ek) << "\t" << valid << "\n";
    }
  if (!a.lines_prefix.empty()) {
    write_polylines(raw, WD_LEVEL_STD_PEAK, a.s_coordinate, a.lines_prefix + ".std_peak.tsv");
    write_polylines(raw, WD_LEVEL_EXKURT, a.s_coordinate, a.lines_prefix + ".exkurt.tsv");
  }
  return kExitOk;
}

// ---- fit ------------------------------------------------------------------

struct FitArgs {
  std::string csv, with;
  std::string mode = "adaptive";
  int bins = 200;
  bool skew = false;
  std::string hist_out;
  GridArgs grid;
};

json fit_json(const wd_fit_result& r) {
  json o;
  o["alpha"] = jnum(r.alpha);
  o["k"] = jnum(r.k);
  o["theta"] = jnum(r.theta);
  o["scale"] = jnum(r.scale);
  o["location"] = jnum(r.location);
  o["at_boundary"] = r.at_boundary != 0;
  return o;
}

json diag_json(const wd_fit_result& r) {
  json o;
  o["res_std_peak"] = jnum(r.res_peak);
  o["res_exkurt"] = jnum(r.res_exkurt);
  o["res_skewness"] = jnum(r.res_skew);
  o["candidates"] = r.candidates;
  o["std_peak_polylines"] = r.peak_polylines;
  o["exkurt_polylines"] = r.exkurt_polylines;
  return o;
}

json target_json(const wd_fit_target& t) {
  json o;
  o["exkurt"] = jnum(t.exkurt);
  o["std_peak"] = jnum(t.std_peak);
  o["skewness"] = jnum(t.skewness);
  o["mean"] = jnum(t.mean);
  o["sd"] = jnum(t.sd);
  o["max_abs_z"] = jnum(t.max_abs_z);
  return o;
}

SeriesPtr read_series(const std::string& path) {
  wd_series* raw = nullptr;
  check(wd_series_read_csv(path.c_str(), &raw));
  return SeriesPtr(raw);
}

// Standardized histogram against the unit-variance symmetric model.
void write_fit_histogram(const wd_series* s, const wd_fit_target& t, const wd_fit_result& r, int bins,
                         const std::string& path) {
  const size_t n = wd_series_length(s);
  const double* v = wd_series_values(s);
  std::vector<double> z(n);
  for (size_t i = 0; i < n; ++i) z[i] = (v[i] - t.mean) / t.sd;
  const auto [lo, hi] = std::minmax_element(z.begin(), z.end());
  const double width = (*hi - *lo) / bins;
  std::vector<int> counts(bins, 0);
  for (double x : z) ++counts[std::min(bins - 1, static_cast<int>((x - *lo) / width))];
  auto f = open_out(path);
  f << "z\tempirical\tmodel\n";
  DistPtr model;
  double sd = 1.0;
  if (!r.at_boundary) {
    wd_dist* raw = nullptr;
    check(wd_gsas_create(r.alpha, r.k, &raw));
    model.reset(raw);
    double m2;
    check(wd_dist_moment(raw, 2.0, &m2));
    sd = std::sqrt(m2);
  }
  for (int b = 0; b < bins; ++b) {
    const double c = *lo + (b + 0.5) * width;
    double m;
    if (model) {
      check(wd_dist_pdf(model.get(), c * sd, &m));
      m *= sd;
    } else {
      m = std::exp(-0.5 * c * c) / std::sqrt(2.0 * M_PI);
    }
    f << num(c) << "\t" << num(counts[b] / (n * width)) << "\t" << num(m) << "\n";
  }
}

int run_fit(const FitArgs& a) {
  const wd_grid_opts o = grid_opts(a.grid);
  auto series = read_series(a.csv);
  json out;
  if (!a.with.empty()) {
    if (a.mode != "adaptive" && a.mode != "elliptical") usage_error("--mode is adaptive or elliptical");
    auto other = read_series(a.with);
    wd_bivariate_fit b;
    check(wd_fit_bivariate(series.get(), other.get(), a.mode == "elliptical" ? WD_MV_ELLIPTICAL : WD_MV_ADAPTIVE,
                           a.bins, &o, &b));
    out["mode"] = a.mode;
    out["marginals"] = json::array({fit_json(b.marginal[0]), fit_json(b.marginal[1])});
    json shapes = json::array();
    for (int i = 0; i < b.n_shapes; ++i) shapes.push_back({{"alpha", b.alphas[i]}, {"k", b.ks[i]}});
    out["shapes"] = shapes;
    out["sample_cov"] = {b.sample_cov[0], b.sample_cov[1], b.sample_cov[2], b.sample_cov[3]};
    out["sample_peak"] = jnum(b.sample_peak);
    out["adjust"] = {{"factor", b.adjust.factor},
                     {"rho", b.adjust.rho},
                     {"model_cov",
                      {b.adjust.model_cov[0], b.adjust.model_cov[1], b.adjust.model_cov[2], b.adjust.model_cov[3]}},
                     {"model_peak", b.adjust.model_peak},
                     {"deviation", b.adjust.deviation}};
    std::cout << out.dump(2) << "\n";
    return kExitOk;
  }
  wd_fit_target t;
  check(wd_summarize(series.get(), a.bins, &t));
  wd_grid* graw = nullptr;
  check(wd_grid_create(&t, &o, &graw));
  GridPtr grid(graw);
  wd_fit_result r;
  check(wd_trace_solution(&t, graw, &r));
  if (a.skew && !r.at_boundary) {
    wd_fit_result sk;
    check(wd_fit_skew(series.get(), &r, nullptr, &sk));
    r.theta = sk.theta;
    r.scale = sk.scale;
    r.location = sk.location;
    r.res_skew = sk.res_skew;
  }
  out["input"] = a.csv;
  out["observations"] = wd_series_length(series.get());
  out["targets"] = target_json(t);
  out["fit"] = fit_json(r);
  out["diagnostics"] = diag_json(r);
  if (!a.hist_out.empty()) write_fit_histogram(series.get(), t, r, a.bins, a.hist_out);
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

// ---- simulate -------------------------------------------------------------

struct SimArgs {
  std::string dist;
  double alpha = 0.813, k = 3.292, sigma = 1.0, d = 1.0, p = 1.0;
  wd_sde_opts sde{};
  int count = 10000;
  double spacing = 0.0;
  int ks_points = 400;
  std::string out_prefix = "sim";
};

// Largest gap between the empirical CDF of v and cdf. The model cdf is
// evaluated at every stride-th order statistic; between checkpoints both
// curves are monotone, so the result overstates the exact distance by at
// most (stride - 1) / n.
template <class F>
double ks_distance(std::vector<double> v, F&& cdf, size_t max_evals) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  const size_t stride = std::max<size_t>(1, n / max_evals);
  const double dn = static_cast<double>(n);
  double d = 0.0, prev = 0.0;
  size_t prev_i = 0;
  for (size_t i = 0;; i = std::min(n - 1, i + stride)) {
    const double c = cdf(v[i]);
    // empirical cdf runs from prev_i/n to (i+1)/n over [v[prev_i], v[i]]
    d = std::max({d, std::fabs(c - i / dn), std::fabs((i + 1) / dn - c), (i + 1) / dn - prev, c - prev_i / dn});
    prev = c;
    prev_i = i;
    if (i == n - 1) break;
  }
  return d;
}

int run_simulate(SimArgs a) {
  const std::string& kind = a.dist;
  SamplesPtr samples;
  DistPtr theory;
  double scale = 1.0;  // theory(x) = pdf(x / scale) / scale
  bool size_biased = false;
  double bias_mean = 1.0;
  wd_samples* raw = nullptr;
  if (kind == "fcm" || kind == "fcm-inverse" || kind == "gsc" || kind == "cir") {
    wd_drift* draw = nullptr;
    wd_dist* traw = nullptr;
    if (kind == "fcm") {
      check(wd_drift_fcm(a.alpha, a.k, a.sde.drift_cache_step, &draw));
      check(wd_fcm_create(a.alpha, a.k, &traw));
    } else if (kind == "fcm-inverse") {
      check(wd_drift_fcm_inverse(a.alpha, a.k, a.sde.drift_cache_step, &draw));
      check(wd_fcm_create(a.alpha, a.k, &traw));
      size_biased = true;
    } else if (kind == "gsc") {
      check(wd_drift_gsc(a.alpha, a.sigma, a.d, a.p, a.sde.drift_cache_step, &draw));
      check(wd_gsc_create(a.alpha, a.sigma, a.d, a.p, &traw));
    } else {
      // square-root diffusion: the alpha = 0, p = 1 member, a gamma law of shape d + 1
      check(wd_drift_gsc(0.0, a.sigma, a.d, 1.0, a.sde.drift_cache_step, &draw));
      check(wd_gsc_create(0.0, a.sigma, a.d, 1.0, &traw));
    }
    DriftPtr drift(draw);
    theory.reset(traw);
    if (size_biased) check(wd_dist_moment(traw, 1.0, &bias_mean));
    scale = a.sde.theta_u;
    check(wd_sde_run(draw, &a.sde, &raw));
  } else if (kind == "gsas") {
    check(wd_sample_gsas(a.alpha, a.k, &a.sde, a.count, a.spacing, &raw));
    wd_dist* traw = nullptr;
    check(wd_gsas_create(a.alpha, a.k, &traw));
    theory.reset(traw);
  } else if (kind == "gep") {
    check(wd_sample_gep(a.alpha, a.k, &a.sde, a.count, a.spacing, &raw));
    wd_dist* traw = nullptr;
    check(wd_gep_create(a.alpha, a.k, &traw));
    theory.reset(traw);
  } else {
    usage_error("unknown simulation '" + kind + "'");
  }
  samples.reset(raw);
  const size_t n = wd_samples_length(raw);
  const double* data = wd_samples_data(raw);
  std::vector<double> v(data, data + n);
  if (v.empty()) throw CliError{kExitNumeric, "simulation produced no samples"};

  auto pdf = [&](double x) {
    double y = 0.0;
    const double u = x / scale;
    check(wd_dist_pdf(theory.get(), u, &y));
    if (size_biased) y *= u / bias_mean;
    return y / scale;
  };

  // histogram: from the run when present, otherwise over the sample range
  std::vector<double> edges, dens;
  if (wd_samples_hist_bins(raw) > 0) {
    const size_t b = wd_samples_hist_bins(raw);
    edges.assign(wd_samples_hist_edges(raw), wd_samples_hist_edges(raw) + b + 1);
    dens.assign(wd_samples_hist_density(raw), wd_samples_hist_density(raw) + b);
  } else {
    const int b = a.sde.hist_bins;
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    const double w = (*hi - *lo) / b;
    for (int i = 0; i <= b; ++i) edges.push_back(*lo + i * w);
    dens.assign(b, 0.0);
    for (double x : v) dens[std::min(b - 1, static_cast<int>((x - *lo) / w))] += 1.0 / (n * w);
  }
  {
    auto f = open_out(a.out_prefix + ".samples.tsv");
    for (double x : v) f << num(x) << "\n";
  }
  {
    auto f = open_out(a.out_prefix + ".hist.tsv");
    f << "lo\thi\tdensity\n";
    for (size_t i = 0; i < dens.size(); ++i) f << num(edges[i]) << "\t" << num(edges[i + 1]) << "\t" << num(dens[i]) << "\n";
  }
  {
    auto f = open_out(a.out_prefix + ".theory.tsv");
    f << "x\tpdf\n";
    for (size_t i = 0; i < dens.size(); ++i) {
      const double c = 0.5 * (edges[i] + edges[i + 1]);
      f << num(c) << "\t" << num(pdf(c)) << "\n";
    }
  }
  wd_moments m;
  check(wd_samples_moments(raw, &m));
  json out;
  out["dist"] = kind;
  out["samples"] = n;
  out["files"] = {a.out_prefix + ".samples.tsv", a.out_prefix + ".hist.tsv", a.out_prefix + ".theory.tsv"};
  out["sample_moments"] = {{"mean", jnum(m.mean)}, {"var", jnum(m.var)}, {"skew", jnum(m.skew)},
                           {"exkurt", jnum(m.exkurt)}};
  double mean = std::numeric_limits<double>::quiet_NaN();
  if (kind == "gsas" || kind == "gep") {
    mean = 0.0;
  } else {
    double m1 = 0.0;
    if (wd_dist_moment(theory.get(), size_biased ? 2.0 : 1.0, &m1) == WD_OK)
      mean = scale * (size_biased ? m1 / bias_mean : m1);
  }
  out["theory_mean"] = jnum(mean);
  if (std::isfinite(mean) && mean != 0.0) out["mean_rel_err"] = jnum((m.mean - mean) / mean);
  if (kind == "fcm" || kind == "gsas" || kind == "gep") {
    // fcm runs scale the state by theta_u
    const double ks = ks_distance(v, [&](double x) {
      double c = 0.0;
      check(wd_dist_cdf(theory.get(), x / scale, &c));
      return c;
    }, static_cast<size_t>(std::max(1, a.ks_points)));
    out["ks_distance"] = jnum(ks);
    out["ks_slack"] = jnum(static_cast<double>(std::max<size_t>(1, n / std::max(1, a.ks_points)) - 1) / n);
  }
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

// ---- selftest -------------------------------------------------------------

struct Check {
  std::string name;
  double max_err = 0.0, tol = 0.0;
  bool pass() const { return max_err <= tol; }
};

double student_t_pdf(double k, double x) {
  return std::exp(std::lgamma((k + 1) / 2) - std::lgamma(k / 2)) / std::sqrt(k * M_PI) *
         std::pow(1 + x * x / k, -(k + 1) / 2);
}

// Each reference value is shifted by perturb, which must make checks fail.
std::vector<Check> selftest_checks(double perturb) {
  std::vector<Check> out;
  auto eval = [](wd_dist* d, double x) {
    double v = 0.0;
    check(wd_dist_pdf(d, x, &v));
    return v;
  };
  {
    Check c{"student_t_alpha1", 0.0, 1e-7};
    for (double k : {1.0, 2.0, 4.0, 10.0}) {
      wd_dist* raw = nullptr;
      check(wd_gsas_create(1.0, k, &raw));
      DistPtr d(raw);
      for (double x = -8.0; x <= 8.0; x += 0.25)
        c.max_err = std::max(c.max_err, std::fabs(eval(raw, x) - (student_t_pdf(k, x) + perturb)));
    }
    out.push_back(c);
  }
  {
    Check c{"cauchy", 0.0, 1e-9};
    wd_dist* raw = nullptr;
    check(wd_gsas_create(1.0, 1.0, &raw));
    DistPtr d(raw);
    for (double x : {0.0, 0.5, 1.0, 3.0, 10.0})
      c.max_err = std::max(c.max_err, std::fabs(eval(raw, x) - (1.0 / (M_PI * (1 + x * x)) + perturb)));
    out.push_back(c);
  }
  {
    Check c{"laplace", 0.0, 1e-8};
    wd_dist* raw = nullptr;
    check(wd_gep_create(1.0, 1.0, &raw));
    DistPtr d(raw);
    for (double x : {0.0, 0.5, 1.0, 2.0, 4.0})
      c.max_err = std::max(c.max_err, std::fabs(eval(raw, x) - (0.5 * std::exp(-x) + perturb)));
    out.push_back(c);
  }
  {
    Check c{"exponential_power", 0.0, 1e-6};
    for (double a : {0.7, 1.0, 1.5}) {
      wd_dist* raw = nullptr;
      check(wd_gsas_create(a, -1.0, &raw));
      DistPtr d(raw);
      for (double x = 0.0; x <= 4.0; x += 0.5) {
        const double ref = std::exp(-std::pow(x, a)) / (2.0 * std::tgamma(1.0 / a + 1.0));
        c.max_err = std::max(c.max_err, std::fabs(eval(raw, x) - (ref + perturb)));
      }
    }
    out.push_back(c);
  }
  {
    Check c{"fcm_reflection", 0.0, 1e-8};
    for (double a : {0.8, 1.0, 1.5})
      for (double k : {2.0, 3.5, 5.0}) {
        wd_dist *pr = nullptr, *nr = nullptr;
        check(wd_fcm_create(a, k, &pr));
        DistPtr pos(pr);
        check(wd_fcm_create(a, -k, &nr));
        DistPtr neg(nr);
        double mean = 0.0;
        check(wd_dist_moment(pr, 1.0, &mean));
        for (double x : {0.5, 1.0, 2.0}) {
          const double ref = eval(pr, 1.0 / x) / (x * x * x * mean);
          c.max_err = std::max(c.max_err, std::fabs(eval(nr, x) - (ref + perturb)));
        }
      }
    out.push_back(c);
  }
  {
    Check c{"wright_recurrence", 0.0, 1e-9};
    for (double lam : {0.3, 0.5, 0.8})
      for (double mu : {0.5, 1.0, 1.7})
        for (double z : {-2.0, -0.5, 0.7, 1.5}) {
          double w1, w2, w3;
          check(wd_wright(lam, lam + mu, z, &w1));
          check(wd_wright(lam, mu - 1.0, z, &w2));
          check(wd_wright(lam, mu, z, &w3));
          c.max_err = std::max(c.max_err, std::fabs(lam * z * w1 - w2 - (1.0 - mu) * w3 - perturb));
        }
    out.push_back(c);
  }
  return out;
}

int run_selftest(double perturb, Format format) {
  const auto checks = selftest_checks(perturb);
  bool all = true;
  json out = json::array();
  for (const auto& c : checks) {
    all = all && c.pass();
    if (format == Format::json)
      out.push_back({{"check", c.name}, {"max_err", c.max_err}, {"tol", c.tol}, {"pass", c.pass()}});
    else
      std::cout << (c.pass() ? "PASS" : "FAIL") << "  " << c.name << "  max_err=" << num(c.max_err)
                << "  tol=" << num(c.tol) << "\n";
  }
  if (format == Format::json) std::cout << out.dump(2) << "\n";
  return all ? kExitOk : kExitSelftest;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wright-function distributions: evaluation, fitting, simulation"};
  app.set_config("--config", "", "key = value file; command-line flags take precedence");
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", wd_version());

  const std::map<std::string, Format> formats{{"text", Format::text}, {"tsv", Format::tsv}, {"json", Format::json}};

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Evaluate pdf and cdf");
  eval->add_option("dist", ev.dist, "gsc, fcm, gsas, gas, gep, mv-ell or mv-adp")
      ->required()
      ->check(CLI::IsMember({"gsc", "fcm", "gsas", "gas", "gep", "mv-ell", "mv-adp"}));
  eval->add_option("--alpha", ev.alpha, "Shape alpha");
  eval->add_option("--k", ev.k, "Degrees of freedom k");
  eval->add_option("--theta", ev.theta, "Skewness (gas)");
  eval->add_option("--sigma", ev.sigma, "Scale (gsc)");
  eval->add_option("--d", ev.d, "Power d (gsc)");
  eval->add_option("--p", ev.p, "Exponent p (gsc)");
  eval->add_option("--x", ev.x, "Points; for mv-* one point with one value per dimension");
  eval->add_option("--range", ev.range, "lo hi step")->expected(3);
  eval->add_option("--cov", ev.cov, "Scale matrix, row-major (mv-*)");
  eval->add_option("--alphas", ev.alphas, "Per-dimension alpha (mv-adp)");
  eval->add_option("--ks", ev.ks, "Per-dimension k (mv-adp)");
  eval->add_option("--format", ev.format, "text, tsv or json")->transform(CLI::CheckedTransformer(formats));

  GridArgs gr;
  auto add_grid_flags = [](CLI::App* c, GridArgs& g) {
    c->add_option("--alpha-range", g.alpha_range, "lo hi")->expected(2);
    c->add_option("--k-range", g.k_range, "lo hi")->expected(2);
    c->add_option("--n-alpha", g.n_alpha, "Nodes along alpha");
    c->add_option("--n-k", g.n_k, "Nodes along k");
    c->add_option("--threads", g.threads, "Worker threads, 0 for all cores")->envname("WD_THREADS");
  };
  auto* grid = app.add_subcommand("grid", "Export the std-peak and excess-kurtosis grid with level sets");
  grid->add_option("--exkurt", gr.exkurt, "Excess kurtosis level");
  grid->add_option("--std-peak", gr.std_peak, "Standardized peak level");
  grid->add_option("--csv", gr.csv, "Take levels from a return series");
  grid->add_option("--bins", gr.bins, "Histogram bins for --csv");
  grid->add_flag("--s-coordinate", gr.s_coordinate, "Use (k, s = 1/alpha) coordinates");
  grid->add_option("--out", gr.out, "Grid TSV path (default stdout)");
  grid->add_option("--lines-prefix", gr.lines_prefix, "Write PREFIX.std_peak.tsv and PREFIX.exkurt.tsv polylines");
  add_grid_flags(grid, gr);

  FitArgs fa;
  auto* fit = app.add_subcommand("fit", "Fit (alpha, k) to a return series");
  fit->add_option("csv", fa.csv, "Return series")->required();
  fit->add_option("--bins", fa.bins, "Histogram bins");
  fit->add_flag("--skew", fa.skew, "Also fit the GAS skewness theta");
  fit->add_option("--hist-out", fa.hist_out, "Histogram vs model TSV");
  fit->add_option("--with", fa.with, "Second series for a bivariate fit");
  fit->add_option("--mode", fa.mode, "Bivariate mode: adaptive or elliptical")
      ->check(CLI::IsMember({"adaptive", "elliptical"}));
  add_grid_flags(fit, fa.grid);

  SimArgs sa;
  wd_sde_opts_default(&sa.sde);
  auto* sim = app.add_subcommand("simulate", "Run the mean-reverting diffusion or draw GSaS/GEP samples");
  sim->add_option("dist", sa.dist, "fcm, fcm-inverse, gsc, cir, gsas or gep")
      ->required()
      ->check(CLI::IsMember({"fcm", "fcm-inverse", "gsc", "cir", "gsas", "gep"}));
  sim->add_option("--alpha", sa.alpha, "Shape alpha");
  sim->add_option("--k", sa.k, "Degrees of freedom k");
  sim->add_option("--sigma", sa.sigma, "Scale (gsc, cir)");
  sim->add_option("--d", sa.d, "Power d (gsc); cir has gamma shape d + 1");
  sim->add_option("--p", sa.p, "Exponent p (gsc)");
  sim->add_option("--dt", sa.sde.dt, "Time step in years");
  sim->add_option("--sigma-u", sa.sde.sigma_u, "Diffusion scale");
  sim->add_option("--theta-u", sa.sde.theta_u, "State scale");
  sim->add_option("--years", sa.sde.horizon_years, "Horizon in years");
  sim->add_option("--seed", sa.sde.seed, "Random seed");
  sim->add_option("--burn-in", sa.sde.burn_in_years, "Burn-in years, negative for automatic");
  sim->add_option("--thin", sa.sde.thin, "Keep every n-th step");
  sim->add_option("--bins", sa.sde.hist_bins, "Histogram bins");
  sim->add_option("--x0", sa.sde.x0, "Start value, negative for the drift fixed point");
  sim->add_option("--floor", sa.sde.reflect_floor, "Reflection floor");
  sim->add_option("--ceiling", sa.sde.ceiling, "Explosion ceiling");
  sim->add_option("--cache-step", sa.sde.drift_cache_step, "Drift table spacing");
  sim->add_option("--count", sa.count, "Draws (gsas, gep)");
  sim->add_option("--spacing", sa.spacing, "Minimum years between draws (gsas, gep)");
  sim->add_option("--ks-points", sa.ks_points, "Model cdf evaluations for the KS distance");
  sim->add_option("--out-prefix", sa.out_prefix, "Prefix for the .samples/.hist/.theory TSV files");

  double perturb = 0.0;
  Format st_format = Format::text;
  auto* self = app.add_subcommand("selftest", "Run the built-in identity checks");
  self->add_option("--perturb", perturb, "Shift every reference value, to confirm failures are caught");
  self->add_option("--format", st_format, "text or json")->transform(CLI::CheckedTransformer(formats));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*eval) return run_eval(ev);
    if (*grid) return run_grid(gr);
    if (*fit) return run_fit(fa);
    if (*sim) return run_simulate(sa);
    if (*self) return run_selftest(perturb, st_format);
  } catch (const CliError& e) {
    std::cerr << "wdist: " << e.message << "\n";
    return e.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "wdist: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}
