#include "doctest.h"

#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "error.hpp"
#include "fit.hpp"
#include "simulate.hpp"

using namespace wd;

namespace {

double rel(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc{};
}

ReturnSeries parse(const std::string& text) {
  std::istringstream in(text);
  return read_series_csv(in);
}

ReturnSeries normal_series(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  ReturnSeries s;
  for (std::size_t i = 0; i < n; ++i) s.values.push_back(nd(rng));
  return s;
}

std::string error_message(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("csv: single column with header and comments") {
  const auto s = parse("# returns\nret\n0.01\n  -0.02 \n\n# mid\n0.5e-2\n");
  REQUIRE(s.values.size() == 3);
  CHECK(s.values[1] == -0.02);
  CHECK(s.timestamps.empty());
}

TEST_CASE("csv: date,value pairs") {
  const auto s = parse("date,ret\n2020-01-02,0.01\n2020-01-03,-0.03\n");
  REQUIRE(s.values.size() == 2);
  CHECK(s.timestamps[1] == "2020-01-03");
  CHECK(s.values[1] == -0.03);
}

TEST_CASE("csv: errors carry the line number") {
  CHECK(code_of([] { parse("1\n2\nabc\n"); }) == Errc::parse_error);
  CHECK(error_message([] { parse("1\n2\nabc\n"); }).find("line 3") != std::string::npos);
  CHECK(code_of([] { parse("1\n2,3\n"); }) == Errc::parse_error);
  CHECK(code_of([] { parse("1\nnan\n"); }) == Errc::parse_error);
  CHECK(code_of([] { parse("1,2,3\n"); }) == Errc::parse_error);
  CHECK(code_of([] { read_series_csv_file("/nonexistent/returns.csv"); }) == Errc::io_error);
}

TEST_CASE("summarize a normal sample") {
  const auto s = normal_series(400000, 11);
  const FitTarget t = summarize(s);
  CHECK(std::fabs(t.mean) < 0.01);
  CHECK(std::fabs(t.sd - 1.0) < 0.01);
  CHECK(std::fabs(t.exkurt) < 0.05);
  CHECK(std::fabs(t.skewness) < 0.02);
  // 1/sqrt(2 pi) up to histogram noise and bin smoothing
  CHECK(std::fabs(t.std_peak - 0.3989) < 0.01);
  CHECK(code_of([] { summarize(normal_series(50, 1)); }) == Errc::degenerate_sample);
  ReturnSeries flat;
  flat.values.assign(200, 0.5);
  CHECK(code_of([&] { summarize(flat); }) == Errc::degenerate_sample);
}

TEST_CASE("shape stats agree with the gsas summary") {
  for (auto [a, k] : {std::pair{0.7, 6.0}, std::pair{1.3, 8.0}, std::pair{0.82, 3.28}}) {
    const ShapeStats st = gsas_shape_stats(a, k);
    const GsasMoments m = gsas_summary({a, k});
    CHECK(st.valid);
    CHECK(rel(st.std_peak, m.std_peak) < 1e-10);
    CHECK(rel(st.exkurt, m.exkurt) < 1e-10);
  }
  CHECK_FALSE(gsas_shape_stats(1.0, 1.5).valid);
}

TEST_CASE("contour grid layout and level sets") {
  FitTarget t;
  t.exkurt = 20.0;
  t.std_peak = 0.71;
  GridSpec spec;
  spec.n_alpha = 60;
  spec.n_k = 50;
  spec.threads = 2;
  const ContourGrid g = contour_grid(t, spec);
  REQUIRE(g.alphas.size() == 60);
  REQUIRE(g.ks.size() == 50);
  CHECK(g.alphas.front() == spec.alpha_lo);
  CHECK(g.alphas.back() == spec.alpha_hi);
  CHECK(g.peak_level == 0.71);
  CHECK_FALSE(g.peak_lines.empty());
  CHECK_FALSE(g.exkurt_lines.empty());
  // vertices of a level set sit on the level, up to the bilinear interpolation
  for (const auto& line : g.peak_lines)
    for (const auto& [a, k] : line) {
      const ShapeStats st = gsas_shape_stats(a, k);
      if (st.valid) CHECK(std::fabs(st.std_peak - 0.71) < 0.02);
    }
  spec.threads = 1;
  const ContourGrid one = contour_grid(t, spec);
  bool same = true;  // deterministic across thread counts, NaN cells included
  for (std::size_t i = 0; i < g.alphas.size(); ++i)
    for (std::size_t j = 0; j < g.ks.size(); ++j) {
      const double x = one.std_peak[i][j], y = g.std_peak[i][j];
      same = same && (x == y || (std::isnan(x) && std::isnan(y))) && one.valid[i][j] == g.valid[i][j];
    }
  CHECK(same);
  spec.threads = 2;

  spec.uniform_in_s = true;
  const ContourGrid gs = contour_grid(t, spec);
  CHECK(gs.alphas.front() == doctest::Approx(spec.alpha_lo));
  CHECK(gs.alphas.back() == doctest::Approx(spec.alpha_hi));
  const double ds0 = 1.0 / gs.alphas[0] - 1.0 / gs.alphas[1];
  const double ds1 = 1.0 / gs.alphas[40] - 1.0 / gs.alphas[41];
  CHECK(ds0 == doctest::Approx(ds1));

  GridSpec bad;
  bad.n_alpha = 0;
  CHECK(code_of([&] { contour_grid(t, bad); }) == Errc::invalid_params);
  bad = GridSpec{};
  bad.alpha_hi = 2.5;
  CHECK(code_of([&] { contour_grid(t, bad); }) == Errc::invalid_params);
}

TEST_CASE("trace_solution finds the lowest-k crossing") {
  FitTarget t;
  t.exkurt = 20.0;
  t.std_peak = 0.71;
  GridSpec spec;
  spec.n_alpha = 120;
  spec.n_k = 120;
  const FitResult r = trace_solution(t, contour_grid(t, spec));
  CHECK(std::fabs(r.alpha - 0.8218) < 2e-3);
  CHECK(std::fabs(r.k - 3.2823) < 5e-3);
  CHECK(std::fabs(r.res_peak) < 1e-8);
  CHECK(std::fabs(r.res_exkurt) < 1e-8);
  REQUIRE(r.candidates.size() >= 1);
  for (const auto& c : r.candidates) CHECK(c.k >= r.k);
  const ShapeStats st = gsas_shape_stats(r.alpha, r.k);
  CHECK(rel(st.exkurt, 20.0) < 1e-7);
  CHECK(rel(st.std_peak, 0.71) < 1e-7);
}

TEST_CASE("trace_solution reports the normal limit and misses") {
  GridSpec spec;
  spec.n_alpha = 60;
  spec.n_k = 60;
  FitTarget normal;
  normal.exkurt = 0.01;
  normal.std_peak = 1.0 / std::sqrt(2.0 * kPi);
  const FitResult r = trace_solution(normal, contour_grid(normal, spec));
  CHECK(r.at_boundary);
  CHECK(r.alpha == 2.0);
  CHECK(std::isinf(r.k));

  FitTarget odd;  // a peak no shape on the grid can produce
  odd.exkurt = 5.0;
  odd.std_peak = 0.05;
  CHECK(code_of([&] { trace_solution(odd, contour_grid(odd, spec)); }) == Errc::no_intersection);
}

TEST_CASE("fit round trip on simulated gsas draws") {
  SdeConfig c;
  c.seed = 5;
  ReturnSeries s;
  s.values = sample_gsas({1.0, 6.0}, c, 200000);
  const FitTarget t = summarize(s);
  const FitResult r = trace_solution(t, contour_grid(t));
  CHECK(std::fabs(r.alpha - 1.0) < 0.2);
  CHECK(std::fabs(r.k - 6.0) < 1.5);
}

TEST_CASE("truncated skewness is odd in theta") {
  const double a = gas_truncated_skewness({1.2, 4.0, 0.05}, 6.0);
  const double b = gas_truncated_skewness({1.2, 4.0, -0.05}, 6.0);
  CHECK(std::fabs(a + b) < 1e-8);
  CHECK(a > 0.0);
  CHECK(gas_truncated_skewness({1.2, 4.0, 0.0}, 6.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(code_of([] { gas_truncated_skewness({1.2, 4.0, 0.05}, -1.0); }) == Errc::invalid_params);
}

TEST_CASE("fit_skew leaves a symmetric sample near theta = 0") {
  SdeConfig c;
  c.seed = 17;
  ReturnSeries s;
  s.values = sample_gsas({1.2, 5.0}, c, 50000);
  // symmetrize exactly so only the fit's own bias remains
  const std::size_t n = s.values.size();
  for (std::size_t i = 0; i < n; ++i) s.values.push_back(-s.values[i]);
  const FitTarget t = summarize(s);
  FitResult base;
  base.alpha = 1.2;
  base.k = 5.0;
  const FitResult r = fit_skew(s, base);
  CHECK(std::fabs(r.theta) < 0.02);
  CHECK(r.scale > 0.0);
  CHECK(r.location == doctest::Approx(t.mean));
}

TEST_CASE("2-D histogram peak") {
  std::vector<double> a, b;
  for (int i = 0; i < 1000; ++i) {
    a.push_back((i % 10) / 10.0);
    b.push_back((i / 100) / 10.0);
  }
  // ten distinct columns and rows, uniform on a 10 x 10 lattice of cells
  const double p = histogram_peak_2d(a, b, 10);
  CHECK(rel(p, 100.0 / 81.0) < 1e-12);
  CHECK(code_of([&] { histogram_peak_2d(a, {1.0, 2.0}, 10); }) == Errc::dimension_mismatch);
}

TEST_CASE("drift closed forms and table") {
  const FcmShape s{1.0, 4.0};
  for (double x : {0.3, 1.0, 2.5}) CHECK(std::fabs(drift_mu_fcm(s, x) - 4.0 * (1 - x * x) / 2.0) < 1e-8);
  const DriftFn d = make_drift_fcm(s, 0.01);
  CHECK(std::fabs(d.fixed_point() - 1.0) < 1e-8);
  CHECK(d.reversion_slope() == doctest::Approx(4.0).epsilon(1e-6));
  for (double x : {0.305, 1.234, 2.001}) CHECK(std::fabs(d(x) - d.exact(x)) < 1e-3);
  CHECK(d(d.x_hi() * 2.0) == doctest::Approx(d.exact(d.x_hi() * 2.0)));
}

TEST_CASE("sde runs are reproducible and reject bad configs") {
  SdeConfig c;
  c.horizon_years = 5.0;
  c.seed = 9;
  const DriftFn d = make_drift_fcm({1.0, 4.0});
  const SdeSummary a = sde_run(d, c), b = sde_run(d, c);
  CHECK(a.samples == b.samples);
  CHECK(a.hist_edges.size() == a.hist_density.size() + 1);
  double mass = 0.0;
  for (std::size_t i = 0; i < a.hist_density.size(); ++i) mass += a.hist_density[i] * (a.hist_edges[i + 1] - a.hist_edges[i]);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
  const auto paths = sde_run_paths(d, c, 3, 2);
  REQUIRE(paths.size() == 3);
  CHECK(paths[0].samples == a.samples);
  CHECK(paths[1].samples != a.samples);
  for (auto tweak : std::vector<std::function<void(SdeConfig&)>>{
           [](SdeConfig& x) { x.dt = 0.0; }, [](SdeConfig& x) { x.sigma_u = -1.0; },
           [](SdeConfig& x) { x.thin = 0; }, [](SdeConfig& x) { x.hist_bins = 0; }}) {
    SdeConfig bad;
    tweak(bad);
    CHECK(code_of([&] { validate(bad); }) == Errc::invalid_params);
  }
}

TEST_CASE("sample moments") {
  const MomentSummary m = sample_moments({1.0, 2.0, 3.0, 4.0});
  CHECK(m.mean == 2.5);
  CHECK(m.var == doctest::Approx(1.25));
  CHECK(m.skew == doctest::Approx(0.0));
  CHECK(m.exkurt == doctest::Approx(1.64 - 3.0));
}
