#include "wd/wd.h"

#include <cmath>
#include <limits>
#include <new>
#include <optional>
#include <string>
#include <variant>

#include <boost/math/tools/minima.hpp>

#include "error.hpp"
#include "fit.hpp"
#include "simulate.hpp"

using namespace wd;

struct wd_dist {
  wd_family family;
  std::variant<GscParams, FcmShape, SkewShape, GepShape> shape;
  QuadSpec quad;
  OscQuadSpec osc;
};

struct wd_series {
  ReturnSeries series;
};

struct wd_grid {
  ContourGrid grid;
};

struct wd_drift {
  DriftFn fn;
};

struct wd_samples {
  std::vector<double> data, edges, density;
};

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

thread_local std::string g_last_error;

struct LogHook {
  wd_log_fn fn = nullptr;
  void* user = nullptr;
};
LogHook g_log;

wd_status record(wd_status s, const char* msg) {
  g_last_error = msg;
  return s;
}

struct Unsupported {
  const char* what;
};

// Runs f, mapping exceptions onto status codes.
template <class F>
wd_status guard(F&& f) {
  try {
    f();
    return WD_OK;
  } catch (const Error& e) {
    return record(static_cast<wd_status>(static_cast<int>(e.code())), e.what());
  } catch (const Unsupported& u) {
    return record(WD_E_UNSUPPORTED, u.what);
  } catch (const std::bad_alloc&) {
    return record(WD_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return record(WD_E_INTERNAL, e.what());
  }
}

#define WD_REQUIRE(p)                                                 \
  do {                                                                \
    if (!(p)) return record(WD_E_NULL_ARGUMENT, #p " must not be NULL"); \
  } while (0)

QuadSpec to_quad(const wd_quad_opts& o) {
  QuadSpec q;
  q.rel_tol = o.rel_tol;
  q.abs_tol = o.abs_tol;
  q.max_panels = o.max_panels;
  q.s_upper_policy = o.fixed_upper ? UpperPolicy::fixed : UpperPolicy::tail_bound;
  q.s_upper = o.s_upper;
  validate(q);
  return q;
}

OscQuadSpec to_osc(const wd_osc_opts* o) {
  OscQuadSpec s;
  if (!o) return s;
  s.t_cut = o->t_cut;
  s.zero_crossing_segmentation = o->zero_crossing_segmentation != 0;
  s.rel_tol = o->rel_tol;
  s.max_segments = o->max_segments;
  validate(s);
  return s;
}

SdeConfig to_sde(const wd_sde_opts* o) {
  SdeConfig c;
  if (!o) return c;
  c.dt = o->dt;
  c.sigma_u = o->sigma_u;
  c.theta_u = o->theta_u;
  c.horizon_years = o->horizon_years;
  c.seed = o->seed;
  c.drift_cache_step = o->drift_cache_step;
  c.reflect_floor = o->reflect_floor;
  c.ceiling = o->ceiling;
  c.burn_in_years = o->burn_in_years;
  c.thin = o->thin;
  c.hist_bins = o->hist_bins;
  c.x0 = o->x0;
  validate(c);
  return c;
}

GridSpec to_grid(const wd_grid_opts* o) {
  GridSpec g;
  if (!o) return g;
  g.alpha_lo = o->alpha_lo;
  g.alpha_hi = o->alpha_hi;
  g.k_lo = o->k_lo;
  g.k_hi = o->k_hi;
  g.n_alpha = o->n_alpha;
  g.n_k = o->n_k;
  g.threads = o->threads;
  g.uniform_in_s = o->uniform_in_s != 0;
  return g;
}

FitTarget to_target(const wd_fit_target& t) {
  FitTarget f;
  f.exkurt = t.exkurt;
  f.std_peak = t.std_peak;
  f.skewness = t.skewness;
  f.mean = t.mean;
  f.sd = t.sd;
  f.max_abs_z = t.max_abs_z;
  return f;
}

void from_fit(const FitResult& r, wd_fit_result* out) {
  out->alpha = r.alpha;
  out->k = r.k;
  out->theta = r.theta;
  out->scale = r.scale;
  out->location = r.location;
  out->res_peak = r.res_peak;
  out->res_exkurt = r.res_exkurt;
  out->res_skew = r.res_skew;
  out->at_boundary = r.at_boundary ? 1 : 0;
  out->candidates = static_cast<int>(r.candidates.size());
  out->peak_polylines = r.peak_polylines;
  out->exkurt_polylines = r.exkurt_polylines;
}

FitResult to_fit(const wd_fit_result& r) {
  FitResult f;
  f.alpha = r.alpha;
  f.k = r.k;
  f.theta = r.theta;
  f.scale = r.scale;
  f.location = r.location;
  f.res_peak = r.res_peak;
  f.res_exkurt = r.res_exkurt;
  f.res_skew = r.res_skew;
  f.at_boundary = r.at_boundary != 0;
  f.peak_polylines = r.peak_polylines;
  f.exkurt_polylines = r.exkurt_polylines;
  return f;
}

MvShapes to_shapes(const double* alphas, const double* ks, int n) {
  if (n < 1) fail(Errc::invalid_params, "at least one shape required");
  MvShapes s;
  for (int i = 0; i < n; ++i) s.push_back({alphas[i], ks[i]});
  return s;
}

Eigen::MatrixXd to_matrix(const double* m, int n) {
  if (n < 1) fail(Errc::invalid_params, "dimension must be >= 1");
  Eigen::MatrixXd out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = m[i * n + j];
  return out;
}

const FcmShape& fcm_of(const wd_dist* d) { return std::get<FcmShape>(d->shape); }

// Mode of a density on (0, inf) by Brent search in log x around the mean.
double density_peak(const std::function<double(double)>& pdf, double centre) {
  auto neg = [&](double u) { return -pdf(std::exp(u)); };
  const double c = std::log(centre);
  const auto r = boost::math::tools::brent_find_minima(neg, c - 6.0, c + 6.0, 40);
  return -r.second;
}

}  // namespace

extern "C" {

const char* wd_status_name(wd_status s) {
  switch (s) {
    case WD_OK:
      return "Ok";
    case WD_E_NULL_ARGUMENT:
      return "NullArgument";
    case WD_E_UNSUPPORTED:
      return "Unsupported";
    case WD_E_INTERNAL:
      return "Internal";
    default:
      if (s >= WD_E_INVALID_PARAMS && s <= WD_E_IO) return errc_name(static_cast<Errc>(static_cast<int>(s)));
      return "Unknown";
  }
}

const char* wd_last_error(void) { return g_last_error.c_str(); }

const char* wd_version(void) { return "1.0.0"; }

void wd_set_log_callback(wd_log_fn fn, void* user) {
  g_log = {fn, user};
  if (fn)
    set_log_sink([](const char* msg, void*) { g_log.fn(msg, g_log.user); }, nullptr);
  else
    set_log_sink(nullptr, nullptr);
}

void wd_quad_opts_default(wd_quad_opts* o) {
  if (!o) return;
  const QuadSpec q;
  *o = {q.rel_tol, q.abs_tol, q.max_panels, 0, 0.0};
}

void wd_osc_opts_default(wd_osc_opts* o) {
  if (!o) return;
  const OscQuadSpec s;
  *o = {s.t_cut, s.zero_crossing_segmentation ? 1 : 0, s.rel_tol, s.max_segments};
}

wd_status wd_m_wright(double alpha, double z, double* out) {
  WD_REQUIRE(out);
  return guard([&] { *out = m_wright(alpha, z); });
}

wd_status wd_wright(double lambda, double delta, double z, double* out) {
  WD_REQUIRE(out);
  return guard([&] { *out = wright({lambda, delta, z}); });
}

wd_status wd_wright4(double a, double b, double lambda, double mu, double z, double* out) {
  WD_REQUIRE(out);
  return guard([&] { *out = wright4({a, b, lambda, mu, z}); });
}

wd_status wd_gsc_create(double alpha, double sigma, double d, double p, wd_dist** out) {
  WD_REQUIRE(out);
  *out = nullptr;
  return guard([&] {
    const GscParams g{alpha, sigma, d, p};
    validate(g);
    *out = new wd_dist{WD_GSC, g, {}, {}};
  });
}

wd_status wd_fcm_create(double alpha, double k, wd_dist** out) {
  WD_REQUIRE(out);
  *out = nullptr;
  return guard([&] {
    const FcmShape s{alpha, k};
    validate(s);
    *out = new wd_dist{WD_FCM, s, {}, {}};
  });
}

wd_status wd_gsas_create(double alpha, double k, wd_dist** out) {
  WD_REQUIRE(out);
  *out = nullptr;
  return guard([&] {
    const FcmShape s{alpha, k};
    validate(s);
    *out = new wd_dist{WD_GSAS, s, {}, {}};
  });
}

wd_status wd_gep_create(double alpha, double k, wd_dist** out) {
  WD_REQUIRE(out);
  *out = nullptr;
  return guard([&] {
    const GepShape g{alpha, k};
    validate(g);
    *out = new wd_dist{WD_GEP, g, {}, {}};
  });
}

wd_status wd_gas_create(double alpha, double k, double theta, wd_dist** out) {
  WD_REQUIRE(out);
  *out = nullptr;
  return guard([&] {
    const SkewShape s{alpha, k, theta};
    validate(s);
    *out = new wd_dist{WD_GAS, s, {}, {}};
  });
}

void wd_dist_free(wd_dist* d) { delete d; }

wd_family wd_dist_family(const wd_dist* d) { return d ? d->family : WD_GSC; }

wd_status wd_dist_set_quad(wd_dist* d, const wd_quad_opts* o) {
  WD_REQUIRE(d);
  WD_REQUIRE(o);
  return guard([&] { d->quad = to_quad(*o); });
}

wd_status wd_dist_set_osc(wd_dist* d, const wd_osc_opts* o) {
  WD_REQUIRE(d);
  WD_REQUIRE(o);
  return guard([&] { d->osc = to_osc(o); });
}

wd_status wd_dist_pdf(const wd_dist* d, double x, double* out) {
  WD_REQUIRE(d);
  WD_REQUIRE(out);
  return guard([&] {
    switch (d->family) {
      case WD_GSC:
        *out = gsc_pdf(std::get<GscParams>(d->shape), x);
        break;
      case WD_FCM:
        *out = fcm_pdf(fcm_of(d), x);
        break;
      case WD_GSAS:
        *out = gsas_pdf(fcm_of(d), x, d->quad);
        break;
      case WD_GEP:
        *out = gep_pdf(std::get<GepShape>(d->shape), x, d->quad);
        break;
      case WD_GAS:
        *out = gas_pdf(std::get<SkewShape>(d->shape), x, d->quad, d->osc);
        break;
    }
  });
}

wd_status wd_dist_cdf(const wd_dist* d, double x, double* out) {
  WD_REQUIRE(d);
  WD_REQUIRE(out);
  return guard([&] {
    switch (d->family) {
      case WD_FCM:
        *out = fcm_cdf(fcm_of(d), x);
        break;
      case WD_GSAS:
        *out = gsas_cdf(fcm_of(d), x, d->quad);
        break;
      case WD_GEP:
        *out = gep_cdf(std::get<GepShape>(d->shape), x, d->quad);
        break;
      default:
        throw Unsupported{"cdf is available for FCM, GSaS and GEP"};
    }
  });
}

wd_status wd_dist_quantile(const wd_dist* d, double prob, double* out) {
  WD_REQUIRE(d);
  WD_REQUIRE(out);
  return guard([&] {
    if (d->family != WD_GSAS) throw Unsupported{"quantile is available for GSaS"};
    *out = gsas_quantile(fcm_of(d), prob, d->quad);
  });
}

wd_status wd_dist_cf(const wd_dist* d, double zeta, double* out) {
  WD_REQUIRE(d);
  WD_REQUIRE(out);
  return guard([&] {
    if (d->family != WD_GSAS) throw Unsupported{"characteristic function is available for GSaS"};
    *out = gsas_cf(fcm_of(d), zeta, d->quad);
  });
}

wd_status wd_dist_moment(const wd_dist* d, double n, double* out) {
  WD_REQUIRE(d);
  WD_REQUIRE(out);
  return guard([&] {
    switch (d->family) {
      case WD_GSC:
        *out = gsc_moment(std::get<GscParams>(d->shape), n);
        break;
      case WD_FCM:
        *out = fcm_moment(fcm_of(d), n);
        break;
      case WD_GSAS:
        *out = gsas_moment(fcm_of(d), n);
        break;
      case WD_GEP:
        *out = gep_moment(std::get<GepShape>(d->shape), n);
        break;
      case WD_GAS:
        throw Unsupported{"moments are not available for GAS"};
    }
  });
}

wd_status wd_dist_summary(const wd_dist* d, wd_summary* out) {
  WD_REQUIRE(d);
  WD_REQUIRE(out);
  return guard([&] {
    wd_summary s{kNaN, kNaN, kNaN, kNaN, kNaN};
    // raw moments 1..4 of a positive law, NaN where they diverge
    auto positive = [&](auto moment, auto pdf) {
      double m[5] = {1.0, kNaN, kNaN, kNaN, kNaN};
      for (int n = 1; n <= 4; ++n) {
        try {
          m[n] = moment(n);
        } catch (const Error& e) {
          if (e.code() != Errc::moment_undefined) throw;
        }
      }
      s.mean = m[1];
      s.variance = m[2] - m[1] * m[1];
      const double c4 = m[4] - 4 * m[3] * m[1] + 6 * m[2] * m[1] * m[1] - 3 * std::pow(m[1], 4);
      s.exkurt = c4 / (s.variance * s.variance) - 3.0;
      s.peak = density_peak(pdf, std::isfinite(m[1]) ? m[1] : 1.0);
      s.std_peak = s.peak * std::sqrt(s.variance);
    };
    switch (d->family) {
      case WD_GSC: {
        const auto& g = std::get<GscParams>(d->shape);
        positive([&](int n) { return gsc_moment(g, n); }, [&](double x) { return gsc_pdf(g, x); });
        break;
      }
      case WD_FCM: {
        const auto& f = fcm_of(d);
        if (f.alpha == 2.0) {
          s.mean = fcm_delta_point(f);
          s.variance = 0.0;
          s.peak = std::numeric_limits<double>::infinity();
          break;
        }
        positive([&](int n) { return fcm_moment(f, n); }, [&](double x) { return fcm_pdf(f, x); });
        break;
      }
      case WD_GSAS: {
        const auto m = gsas_summary(fcm_of(d));
        s = {0.0, m.m2, m.exkurt, m.peak, m.std_peak};
        break;
      }
      case WD_GEP: {
        const auto& g = std::get<GepShape>(d->shape);
        s.mean = 0.0;
        s.variance = gep_moment(g, 2.0);
        s.exkurt = gep_exkurt(g);
        s.peak = gep_pdf(g, 0.0, d->quad);
        s.std_peak = s.peak * std::sqrt(s.variance);
        break;
      }
      case WD_GAS:
        throw Unsupported{"summary is not available for GAS"};
    }
    *out = s;
  });
}

wd_status wd_gas_symmetry_check(const wd_dist* d, double x, double* at_neg_x, double* mirrored) {
  WD_REQUIRE(d);
  WD_REQUIRE(at_neg_x);
  WD_REQUIRE(mirrored);
  return guard([&] {
    if (d->family != WD_GAS) throw Unsupported{"symmetry check needs a GAS handle"};
    const auto r = gas_symmetry_check(std::get<SkewShape>(d->shape), x, d->quad, d->osc);
    *at_neg_x = r.first;
    *mirrored = r.second;
  });
}

wd_status wd_gas_kernel(const wd_dist* d, double x, double s, double* out) {
  WD_REQUIRE(d);
  WD_REQUIRE(out);
  return guard([&] {
    if (d->family != WD_GAS) throw Unsupported{"skew kernel needs a GAS handle"};
    *out = skew_kernel(std::get<SkewShape>(d->shape), x, s, d->osc);
  });
}

wd_status wd_series_read_csv(const char* path, wd_series** out) {
  WD_REQUIRE(path);
  WD_REQUIRE(out);
  *out = nullptr;
  return guard([&] { *out = new wd_series{read_series_csv_file(path)}; });
}

wd_status wd_series_from_values(const double* values, size_t n, wd_series** out) {
  WD_REQUIRE(out);
  *out = nullptr;
  if (n > 0) WD_REQUIRE(values);
  return guard([&] {
    ReturnSeries s;
    s.values.assign(values, values + n);
    for (double v : s.values)
      if (!std::isfinite(v)) fail(Errc::invalid_params, "series values must be finite");
    *out = new wd_series{std::move(s)};
  });
}

size_t wd_series_length(const wd_series* s) { return s ? s->series.values.size() : 0; }

const double* wd_series_values(const wd_series* s) { return s ? s->series.values.data() : nullptr; }

void wd_series_free(wd_series* s) { delete s; }

wd_status wd_summarize(const wd_series* s, int bins, wd_fit_target* out) {
  WD_REQUIRE(s);
  WD_REQUIRE(out);
  return guard([&] {
    const auto t = summarize(s->series, bins);
    *out = {t.exkurt, t.std_peak, t.skewness, t.mean, t.sd, t.max_abs_z};
  });
}

void wd_grid_opts_default(wd_grid_opts* o) {
  if (!o) return;
  const GridSpec g;
  *o = {g.alpha_lo, g.alpha_hi, g.k_lo, g.k_hi, g.n_alpha, g.n_k, g.threads, 0};
}

wd_status wd_grid_create(const wd_fit_target* t, const wd_grid_opts* o, wd_grid** out) {
  WD_REQUIRE(t);
  WD_REQUIRE(out);
  *out = nullptr;
  return guard([&] { *out = new wd_grid{contour_grid(to_target(*t), to_grid(o))}; });
}

void wd_grid_free(wd_grid* g) { delete g; }

void wd_grid_dims(const wd_grid* g, int* n_alpha, int* n_k) {
  if (n_alpha) *n_alpha = g ? static_cast<int>(g->grid.alphas.size()) : 0;
  if (n_k) *n_k = g ? static_cast<int>(g->grid.ks.size()) : 0;
}

wd_status wd_grid_cell(const wd_grid* g, int i, int j, double* alpha, double* k, double* std_peak, double* exkurt,
                       int* valid) {
  WD_REQUIRE(g);
  const auto& G = g->grid;
  if (i < 0 || j < 0 || i >= static_cast<int>(G.alphas.size()) || j >= static_cast<int>(G.ks.size()))
    return record(WD_E_INVALID_PARAMS, "grid index out of range");
  if (alpha) *alpha = G.alphas[i];
  if (k) *k = G.ks[j];
  if (std_peak) *std_peak = G.std_peak[i][j];
  if (exkurt) *exkurt = G.exkurt[i][j];
  if (valid) *valid = G.valid[i][j] ? 1 : 0;
  return WD_OK;
}

int wd_grid_polyline_count(const wd_grid* g, wd_level which) {
  if (!g) return 0;
  return static_cast<int>((which == WD_LEVEL_STD_PEAK ? g->grid.peak_lines : g->grid.exkurt_lines).size());
}

wd_status wd_grid_polyline_size(const wd_grid* g, wd_level which, int index, size_t* n) {
  WD_REQUIRE(g);
  WD_REQUIRE(n);
  const auto& lines = which == WD_LEVEL_STD_PEAK ? g->grid.peak_lines : g->grid.exkurt_lines;
  if (index < 0 || index >= static_cast<int>(lines.size()))
    return record(WD_E_INVALID_PARAMS, "polyline index out of range");
  *n = lines[index].size();
  return WD_OK;
}

wd_status wd_grid_polyline(const wd_grid* g, wd_level which, int index, double* alpha, double* k, size_t cap) {
  WD_REQUIRE(g);
  WD_REQUIRE(alpha);
  WD_REQUIRE(k);
  const auto& lines = which == WD_LEVEL_STD_PEAK ? g->grid.peak_lines : g->grid.exkurt_lines;
  if (index < 0 || index >= static_cast<int>(lines.size()))
    return record(WD_E_INVALID_PARAMS, "polyline index out of range");
  const auto& pl = lines[index];
  for (size_t v = 0; v < pl.size() && v < cap; ++v) {
    alpha[v] = pl[v].first;
    k[v] = pl[v].second;
  }
  return WD_OK;
}

wd_status wd_trace_solution(const wd_fit_target* t, const wd_grid* g, wd_fit_result* out) {
  WD_REQUIRE(t);
  WD_REQUIRE(g);
  WD_REQUIRE(out);
  return guard([&] { from_fit(trace_solution(to_target(*t), g->grid), out); });
}

wd_status wd_fit_skew(const wd_series* s, const wd_fit_result* base, const wd_osc_opts* osc, wd_fit_result* out) {
  WD_REQUIRE(s);
  WD_REQUIRE(base);
  WD_REQUIRE(out);
  return guard([&] { from_fit(fit_skew(s->series, to_fit(*base), to_osc(osc)), out); });
}

wd_status wd_gas_truncated_skewness(double alpha, double k, double theta, double limit, double* out) {
  WD_REQUIRE(out);
  return guard([&] { *out = gas_truncated_skewness({alpha, k, theta}, limit); });
}

wd_status wd_mv_pdf(wd_mv_mode mode, const double* alphas, const double* ks, int n_shapes, const double* cov, int n,
                    const double* x, double* out) {
  WD_REQUIRE(alphas);
  WD_REQUIRE(ks);
  WD_REQUIRE(cov);
  WD_REQUIRE(x);
  WD_REQUIRE(out);
  return guard([&] {
    const auto shapes = to_shapes(alphas, ks, n_shapes);
    const CovMatrix sigma(to_matrix(cov, n));
    const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(x, n);
    if (mode == WD_MV_ELLIPTICAL) {
      if (n_shapes != 1) fail(Errc::dimension_mismatch, "elliptical mode takes one shape");
      *out = mv_ell_pdf(shapes[0], sigma, v);
    } else {
      *out = mv_adp_pdf(shapes, sigma, v);
    }
  });
}

wd_status wd_mv_peak(wd_mv_mode mode, const double* alphas, const double* ks, int n_shapes, const double* cov, int n,
                     double* out) {
  WD_REQUIRE(alphas);
  WD_REQUIRE(ks);
  WD_REQUIRE(cov);
  WD_REQUIRE(out);
  return guard([&] {
    const auto shapes = to_shapes(alphas, ks, n_shapes);
    const CovMatrix sigma(to_matrix(cov, n));
    if (mode == WD_MV_ELLIPTICAL) {
      if (n_shapes != 1) fail(Errc::dimension_mismatch, "elliptical mode takes one shape");
      *out = mv_ell_summary(shapes[0], sigma).peak;
    } else {
      *out = mv_adp_peak(shapes, sigma);
    }
  });
}

wd_status wd_mv_covariance(wd_mv_mode mode, const double* alphas, const double* ks, int n_shapes, const double* cov,
                           int n, double* out) {
  WD_REQUIRE(alphas);
  WD_REQUIRE(ks);
  WD_REQUIRE(cov);
  WD_REQUIRE(out);
  return guard([&] {
    const auto shapes = to_shapes(alphas, ks, n_shapes);
    const CovMatrix sigma(to_matrix(cov, n));
    Eigen::MatrixXd c;
    if (mode == WD_MV_ELLIPTICAL) {
      if (n_shapes != 1) fail(Errc::dimension_mismatch, "elliptical mode takes one shape");
      c = mv_ell_summary(shapes[0], sigma).cov;
    } else {
      c = mv_adp_cov(shapes, sigma);
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out[i * n + j] = c(i, j);
  });
}

wd_status wd_peak_ratio_correlation(const double* cov, int n, double* out) {
  WD_REQUIRE(cov);
  WD_REQUIRE(out);
  return guard([&] { *out = peak_ratio_correlation(CovMatrix(to_matrix(cov, n))); });
}

namespace {
void from_adjust(const CovAdjustResult& r, wd_cov_adjust_result* out) {
  out->factor = r.factor;
  out->rho = r.rho;
  const auto& m = r.sigma.matrix();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out->model_cov[i * 2 + j] = m(i, j);
  out->model_peak = r.model_peak;
  out->deviation = r.deviation;
}
}  // namespace

wd_status wd_covariance_adjust(wd_mv_mode mode, const double* alphas, const double* ks, int n_shapes,
                               const double sample_cov[4], double sample_peak, wd_cov_adjust_result* out) {
  WD_REQUIRE(alphas);
  WD_REQUIRE(ks);
  WD_REQUIRE(sample_cov);
  WD_REQUIRE(out);
  return guard([&] {
    Eigen::Matrix2d c;
    c << sample_cov[0], sample_cov[1], sample_cov[2], sample_cov[3];
    const auto r = covariance_adjust(mode == WD_MV_ELLIPTICAL ? MvMode::elliptical : MvMode::adaptive,
                                     to_shapes(alphas, ks, n_shapes), c, sample_peak);
    from_adjust(r, out);
  });
}

wd_status wd_fit_bivariate(const wd_series* a, const wd_series* b, wd_mv_mode mode, int bins,
                           const wd_grid_opts* grid, wd_bivariate_fit* out) {
  WD_REQUIRE(a);
  WD_REQUIRE(b);
  WD_REQUIRE(out);
  return guard([&] {
    const auto r = fit_bivariate(a->series, b->series,
                                 mode == WD_MV_ELLIPTICAL ? MvMode::elliptical : MvMode::adaptive, bins, to_grid(grid));
    from_fit(r.marginal_a, &out->marginal[0]);
    from_fit(r.marginal_b, &out->marginal[1]);
    out->n_shapes = static_cast<int>(r.shapes.size());
    for (int i = 0; i < 2; ++i) {
      const auto& s = r.shapes[std::min<size_t>(i, r.shapes.size() - 1)];
      out->alphas[i] = s.alpha;
      out->ks[i] = s.k;
    }
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) out->sample_cov[i * 2 + j] = r.sample_cov(i, j);
    out->sample_peak = r.sample_peak;
    from_adjust(*r.adjust, &out->adjust);
  });
}

void wd_sde_opts_default(wd_sde_opts* o) {
  if (!o) return;
  const SdeConfig c;
  *o = {c.dt,   c.sigma_u,       c.theta_u, c.horizon_years, c.seed,      c.drift_cache_step,
        c.reflect_floor, c.ceiling, c.burn_in_years, c.thin, c.hist_bins, c.x0};
}

wd_status wd_drift_fcm(double alpha, double k, double step, wd_drift** out) {
  WD_REQUIRE(out);
  *out = nullptr;
  return guard([&] { *out = new wd_drift{make_drift_fcm({alpha, k}, step)}; });
}

wd_status wd_drift_fcm_inverse(double alpha, double k, double step, wd_drift** out) {
  WD_REQUIRE(out);
  *out = nullptr;
  return guard([&] { *out = new wd_drift{make_drift_fcm_inverse({alpha, k}, step)}; });
}

wd_status wd_drift_gsc(double alpha, double sigma, double d, double p, double step, wd_drift** out) {
  WD_REQUIRE(out);
  *out = nullptr;
  return guard([&] { *out = new wd_drift{make_drift_gsc({alpha, sigma, d, p}, step)}; });
}

void wd_drift_free(wd_drift* d) { delete d; }

wd_status wd_drift_eval(const wd_drift* d, double x, double* out) {
  WD_REQUIRE(d);
  WD_REQUIRE(out);
  return guard([&] { *out = d->fn.exact(x); });
}

wd_status wd_drift_fixed_point(const wd_drift* d, double* x, double* slope) {
  WD_REQUIRE(d);
  if (x) *x = d->fn.fixed_point();
  if (slope) *slope = d->fn.reversion_slope();
  return WD_OK;
}

wd_status wd_half_life_years(const wd_drift* d, const wd_sde_opts* o, double* out) {
  WD_REQUIRE(d);
  WD_REQUIRE(out);
  return guard([&] { *out = half_life_years(d->fn, to_sde(o)); });
}

wd_status wd_sde_run(const wd_drift* d, const wd_sde_opts* o, wd_samples** out) {
  WD_REQUIRE(d);
  WD_REQUIRE(out);
  *out = nullptr;
  return guard([&] {
    auto r = sde_run(d->fn, to_sde(o));
    *out = new wd_samples{std::move(r.samples), std::move(r.hist_edges), std::move(r.hist_density)};
  });
}

wd_status wd_sample_gsas(double alpha, double k, const wd_sde_opts* o, int count, double spacing_years,
                         wd_samples** out) {
  WD_REQUIRE(out);
  *out = nullptr;
  return guard([&] { *out = new wd_samples{sample_gsas({alpha, k}, to_sde(o), count, spacing_years), {}, {}}; });
}

wd_status wd_sample_gep(double alpha, double k, const wd_sde_opts* o, int count, double spacing_years,
                        wd_samples** out) {
  WD_REQUIRE(out);
  *out = nullptr;
  return guard([&] { *out = new wd_samples{sample_gep({alpha, k}, to_sde(o), count, spacing_years), {}, {}}; });
}

void wd_samples_free(wd_samples* s) { delete s; }
size_t wd_samples_length(const wd_samples* s) { return s ? s->data.size() : 0; }
const double* wd_samples_data(const wd_samples* s) { return s ? s->data.data() : nullptr; }
size_t wd_samples_hist_bins(const wd_samples* s) { return s ? s->density.size() : 0; }
const double* wd_samples_hist_edges(const wd_samples* s) { return s ? s->edges.data() : nullptr; }
const double* wd_samples_hist_density(const wd_samples* s) { return s ? s->density.data() : nullptr; }

wd_status wd_samples_moments(const wd_samples* s, wd_moments* out) {
  WD_REQUIRE(s);
  WD_REQUIRE(out);
  return guard([&] {
    const auto m = sample_moments(s->data);
    *out = {m.mean, m.var, m.skew, m.exkurt};
  });
}

}  // extern "C"
