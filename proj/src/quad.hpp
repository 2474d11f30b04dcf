#pragma once

// Globally adaptive Gauss-Kronrod (10/21) integration, plus a half-line driver
// that works in log space (s = e^u) with breakpoints seeded by the caller.

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace wd::quad {

struct Options {
  double rel_tol = 1e-10;
  double abs_tol = 1e-300;
  int max_intervals = 4000;
};

struct Result {
  double value = 0.0;
  double error = 0.0;
  int evals = 0;
  bool converged = false;
  double lo = 0.0, hi = 0.0;  // range actually covered
};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

// One G10/K21 panel; error estimate follows the usual QUADPACK heuristic.
template <class F>
Panel gk21(F& f, double a, double b) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
  using G = boost::math::quadrature::gauss<double, 10>;
  static const auto& x = GK::abscissa();
  static const auto& wk = GK::weights();
  static const auto& wg = G::weights();
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double fv[21];
  fv[0] = f(c);
  double rk = fv[0] * wk[0], rg = 0.0, rabs = std::fabs(rk);
  for (unsigned i = 1; i < x.size(); ++i) {
    const double fp = f(c + h * x[i]);
    const double fm = f(c - h * x[i]);
    fv[2 * i - 1] = fp;
    fv[2 * i] = fm;
    rk += (fp + fm) * wk[i];
    rabs += (std::fabs(fp) + std::fabs(fm)) * wk[i];
    if (i & 1) rg += (fp + fm) * wg[i / 2];
  }
  const double mean = 0.5 * rk;
  double asc = std::fabs(fv[0] - mean) * wk[0];
  for (unsigned i = 1; i < x.size(); ++i)
    asc += (std::fabs(fv[2 * i - 1] - mean) + std::fabs(fv[2 * i] - mean)) * wk[i];
  double err = std::fabs((rk - rg) * h);
  asc *= std::fabs(h);
  rabs *= std::fabs(h);
  if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
  const double eps = std::numeric_limits<double>::epsilon();
  if (rabs > std::numeric_limits<double>::min() / (50 * eps))
    err = std::max(50 * eps * rabs, err);
  return {a, b, rk * h, err};
}

// Integrates over the union of [pts[i], pts[i+1]]; pts must be sorted.
template <class F>
Result integrate(F&& f, const std::vector<double>& pts, const Options& opt = {}) {
  Result r;
  if (pts.size() < 2) return r;
  std::priority_queue<Panel> heap;
  double total = 0.0, err = 0.0;
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    if (!(pts[i + 1] > pts[i])) continue;
    Panel p = gk21(f, pts[i], pts[i + 1]);
    r.evals += 21;
    total += p.value;
    err += p.error;
    heap.push(p);
  }
  int count = static_cast<int>(heap.size());
  while (!heap.empty()) {
    if (err <= std::max(opt.abs_tol, opt.rel_tol * std::fabs(total)) || !std::isfinite(total)) break;
    if (count >= opt.max_intervals) break;
    Panel p = heap.top();
    const double m = 0.5 * (p.a + p.b);
    if (!(m > p.a && m < p.b)) break;  // interval exhausted at double resolution
    heap.pop();
    Panel l = gk21(f, p.a, m), h = gk21(f, m, p.b);
    r.evals += 42;
    total += l.value + h.value - p.value;
    err += l.error + h.error - p.error;
    heap.push(l);
    heap.push(h);
    ++count;
  }
  // Re-sum to shed drift from the running updates.
  total = 0.0;
  err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  r.value = total;
  r.error = err;
  r.lo = pts.front();
  r.hi = pts.back();
  r.converged = std::isfinite(total) && err <= std::max(opt.abs_tol, opt.rel_tol * std::fabs(total));
  return r;
}

template <class F>
Result integrate(F&& f, double a, double b, const Options& opt = {}) {
  return integrate(std::forward<F>(f), std::vector<double>{a, b}, opt);
}

// Location hint in log space: a feature near u = log(s) of width w.
struct Hint {
  double u;
  double w;
};

// Integrates f over (0, inf) in u = log s. The u-range grows outward from the
// hints until |f(s) s| drops below rel_tol * 1e-4 of the largest value seen.
// Optional bounds [u_min, u_max] clip the range.
template <class F>
Result integrate_half_line(F&& f, std::vector<Hint> hints, const Options& opt = {},
                           double u_min = -std::numeric_limits<double>::infinity(),
                           double u_max = std::numeric_limits<double>::infinity(),
                           int max_scan = 400) {
  auto g = [&](double u) {
    const double s = std::exp(u);
    const double v = f(s) * s;
    return std::isfinite(v) ? v : 0.0;
  };
  if (hints.empty()) hints.push_back({0.0, 1.0});
  std::vector<double> pts;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& h : hints) {
    const double w = std::clamp(h.w, 1e-4, 1.0);
    for (int j = -8; j <= 8; ++j) {
      const double u = h.u + j * w;
      if (u > u_min && u < u_max) pts.push_back(u);
    }
    lo = std::min(lo, h.u - 8 * w);
    hi = std::max(hi, h.u + 8 * w);
  }
  lo = std::clamp(lo, u_min, u_max);
  hi = std::clamp(hi, u_min, u_max);
  if (std::isfinite(u_min)) pts.push_back(u_min);
  if (std::isfinite(u_max)) pts.push_back(u_max);
  double gmax = 0.0;
  for (double u = lo; u <= hi; u += 0.25) gmax = std::max(gmax, std::fabs(g(u)));
  for (double p : pts) gmax = std::max(gmax, std::fabs(g(p)));
  const double tiny = std::max(opt.rel_tol * 1e-4, 1e-18);
  auto scan = [&](double start, double dir, double bound) {
    double u = start;
    int quiet = 0;
    for (int n = 0; n < max_scan; ++n) {
      if ((dir < 0 && u <= bound) || (dir > 0 && u >= bound)) return true;
      u += dir;
      if ((dir < 0 && u <= bound) || (dir > 0 && u >= bound)) return true;
      pts.push_back(u);
      const double v = std::fabs(g(u));
      gmax = std::max(gmax, v);
      quiet = (v <= tiny * gmax) ? quiet + 1 : 0;
      if (quiet >= 3 && gmax > 0) return true;
    }
    return gmax == 0.0;
  };
  const bool ok_lo = scan(lo, -1.0, u_min);
  const bool ok_hi = scan(hi, +1.0, u_max);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  Result r = integrate(g, pts, opt);
  if (!(ok_lo && ok_hi)) r.converged = false;
  r.lo = pts.front();
  r.hi = pts.back();
  return r;
}

}  // namespace wd::quad
