#include "fit.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>

#include "error.hpp"

namespace wd {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Below this excess kurtosis a target with no interior solution is reported
// as the normal limit instead of an error.
constexpr double kNormalExkurtTol = 0.05;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto r = std::from_chars(first, last, out);
  return r.ec == std::errc() && r.ptr == last;
}

std::string at_line(int line, const std::string& what) {
  return "line " + std::to_string(line) + ": " + what;
}

}  // namespace

ReturnSeries read_series_csv(std::istream& in) {
  ReturnSeries out;
  std::string raw;
  int line = 0, columns = 0;
  bool seen_data = false, header_skipped = false;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(body);
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(trim(f));
    if (fields.size() > 2) fail(Errc::parse_error, at_line(line, "expected one or two columns"));
    double v;
    if (!parse_double(fields.back(), v)) {
      if (!seen_data && !header_skipped) {
        header_skipped = true;
        continue;
      }
      fail(Errc::parse_error, at_line(line, "cannot parse value '" + fields.back() + "'"));
    }
    if (!std::isfinite(v)) fail(Errc::parse_error, at_line(line, "value is not finite"));
    const int n = static_cast<int>(fields.size());
    if (columns == 0) columns = n;
    if (n != columns) fail(Errc::parse_error, at_line(line, "column count changed"));
    if (n == 2) out.timestamps.push_back(fields[0]);
    out.values.push_back(v);
    seen_data = true;
  }
  return out;
}

ReturnSeries read_series_csv_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(Errc::io_error, "cannot open " + path);
  return read_series_csv(f);
}

FitTarget summarize(const ReturnSeries& series, int bins) {
  const auto& v = series.values;
  if (bins < 2) fail(Errc::invalid_params, "bins must be >= 2");
  if (v.size() < kMinFitLength)
    fail(Errc::degenerate_sample, "series has " + std::to_string(v.size()) + " values, need at least " +
                                      std::to_string(kMinFitLength));
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double x : v) {
    const double d = x - mean, d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  if (!(m2 > 0.0)) fail(Errc::degenerate_sample, "series has zero variance");
  FitTarget t;
  t.mean = mean;
  t.sd = std::sqrt(m2);
  t.skewness = m3 / (m2 * t.sd);
  t.exkurt = m4 / (m2 * m2) - 3.0;
  const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
  const double lo = (*lo_it - mean) / t.sd, hi = (*hi_it - mean) / t.sd;
  t.max_abs_z = std::max(-lo, hi);
  const double width = (hi - lo) / bins;
  std::vector<int> counts(bins, 0);
  for (double x : v) {
    const int b = std::min(bins - 1, static_cast<int>(((x - mean) / t.sd - lo) / width));
    ++counts[b];
  }
  t.std_peak = *std::max_element(counts.begin(), counts.end()) / (n * width);
  return t;
}

ShapeStats gsas_shape_stats(double alpha, double k) {
  ShapeStats s;
  const FcmShape sh{alpha, k};
  try {
    const auto m = gsas_summary(sh);
    s.std_peak = m.std_peak;
    s.exkurt = m.exkurt;
    s.valid = std::isfinite(m.std_peak) && std::isfinite(m.exkurt);
  } catch (const Error&) {
    s.valid = false;
  }
  if (!s.valid) s.std_peak = s.exkurt = kNaN;
  return s;
}

namespace {

using Polyline = std::vector<std::pair<double, double>>;

// Marching squares over the valid cells of field f at level c. Edge ids:
// 2 * (i * nk + j) for the alpha-direction edge from node (i, j), +1 for the
// k-direction edge.
std::vector<Polyline> level_set(const ContourGrid& g, const std::vector<std::vector<double>>& f, double c) {
  const int na = static_cast<int>(g.alphas.size()), nk = static_cast<int>(g.ks.size());
  auto edge_id = [nk](int i, int j, int dir) { return 2L * (static_cast<long>(i) * nk + j) + dir; };
  auto crossing = [&](int i, int j, int dir) {
    const int i2 = dir == 0 ? i + 1 : i, j2 = dir == 0 ? j : j + 1;
    const double a = f[i][j] - c, b = f[i2][j2] - c;
    const double w = a / (a - b);
    return std::make_pair(g.alphas[i] + w * (g.alphas[i2] - g.alphas[i]), g.ks[j] + w * (g.ks[j2] - g.ks[j]));
  };
  std::vector<std::pair<long, long>> segs;
  for (int i = 0; i + 1 < na; ++i) {
    for (int j = 0; j + 1 < nk; ++j) {
      if (!(g.valid[i][j] && g.valid[i + 1][j] && g.valid[i][j + 1] && g.valid[i + 1][j + 1])) continue;
      // corners counter-clockwise: (i,j) (i+1,j) (i+1,j+1) (i,j+1)
      const bool above[4] = {f[i][j] >= c, f[i + 1][j] >= c, f[i + 1][j + 1] >= c, f[i][j + 1] >= c};
      const long edges[4] = {edge_id(i, j, 0), edge_id(i + 1, j, 1), edge_id(i, j + 1, 0), edge_id(i, j, 1)};
      std::vector<long> hit;
      for (int e = 0; e < 4; ++e)
        if (above[e] != above[(e + 1) % 4]) hit.push_back(edges[e]);
      if (hit.size() == 2) {
        segs.push_back({hit[0], hit[1]});
      } else if (hit.size() == 4) {
        const double centre = 0.25 * (f[i][j] + f[i + 1][j] + f[i + 1][j + 1] + f[i][j + 1]);
        // hit[e] sits on the edge leaving corner e; pair edges around the corners
        // that differ from the centre.
        if ((centre >= c) == above[0]) {
          segs.push_back({hit[0], hit[1]});
          segs.push_back({hit[2], hit[3]});
        } else {
          segs.push_back({hit[3], hit[0]});
          segs.push_back({hit[1], hit[2]});
        }
      }
    }
  }
  std::map<long, std::vector<int>> by_edge;
  for (int s = 0; s < static_cast<int>(segs.size()); ++s) {
    by_edge[segs[s].first].push_back(s);
    by_edge[segs[s].second].push_back(s);
  }
  auto point = [&](long id) {
    const int dir = static_cast<int>(id % 2);
    const long node = id / 2;
    return crossing(static_cast<int>(node / nk), static_cast<int>(node % nk), dir);
  };
  std::vector<char> used(segs.size(), 0);
  std::vector<Polyline> lines;
  auto walk = [&](long from, int seg, std::vector<long>& chain) {
    while (true) {
      used[seg] = 1;
      const long next = segs[seg].first == from ? segs[seg].second : segs[seg].first;
      chain.push_back(next);
      int nseg = -1;
      for (int s : by_edge[next])
        if (!used[s]) nseg = s;
      if (nseg < 0) return;
      from = next;
      seg = nseg;
    }
  };
  for (int s = 0; s < static_cast<int>(segs.size()); ++s) {
    if (used[s]) continue;
    std::vector<long> fwd{segs[s].first}, back;
    walk(segs[s].first, s, fwd);
    for (int t : by_edge[segs[s].first])
      if (!used[t]) {
        back.push_back(segs[s].first);
        walk(segs[s].first, t, back);
        break;
      }
    Polyline pl;
    for (auto it = back.rbegin(); it != back.rend(); ++it)
      if (it + 1 != back.rend()) pl.push_back(point(*it));
    for (long id : fwd) pl.push_back(point(id));
    lines.push_back(std::move(pl));
  }
  return lines;
}

}  // namespace

ContourGrid contour_grid(const FitTarget& t, const GridSpec& spec) {
  if (spec.n_alpha < 1 || spec.n_k < 1) fail(Errc::invalid_params, "grid needs at least one node per axis");
  if (!(spec.alpha_lo > 0.0 && spec.alpha_lo <= spec.alpha_hi && spec.alpha_hi <= 2.0))
    fail(Errc::invalid_params, "alpha range must lie in (0, 2]");
  if (!(spec.k_lo <= spec.k_hi) || (spec.k_lo <= 0.0 && spec.k_hi >= 0.0))
    fail(Errc::invalid_params, "k range must be increasing and exclude 0");
  ContourGrid g;
  g.peak_level = t.std_peak;
  g.exkurt_level = t.exkurt;
  // a single node sits at the lower end of its range
  auto axis = [](double lo, double hi, int n) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(n == 1 ? lo : i == n - 1 ? hi : lo + (hi - lo) * i / (n - 1));
    return v;
  };
  if (spec.uniform_in_s) {
    // ascending alpha means descending s
    for (double sv : axis(1.0 / spec.alpha_hi, 1.0 / spec.alpha_lo, spec.n_alpha)) g.alphas.insert(g.alphas.begin(), 1.0 / sv);
    g.alphas.front() = spec.alpha_lo;
    if (spec.n_alpha > 1) g.alphas.back() = spec.alpha_hi;
  } else {
    g.alphas = axis(spec.alpha_lo, spec.alpha_hi, spec.n_alpha);
  }
  g.ks = axis(spec.k_lo, spec.k_hi, spec.n_k);
  g.std_peak.assign(spec.n_alpha, std::vector<double>(spec.n_k));
  g.exkurt = g.std_peak;
  g.valid.assign(spec.n_alpha, std::vector<char>(spec.n_k));
  int threads = spec.threads > 0 ? spec.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, spec.n_alpha);
  auto rows = [&](int first) {
    for (int i = first; i < spec.n_alpha; i += threads)
      for (int j = 0; j < spec.n_k; ++j) {
        const auto s = gsas_shape_stats(g.alphas[i], g.ks[j]);
        g.std_peak[i][j] = s.std_peak;
        g.exkurt[i][j] = s.exkurt;
        g.valid[i][j] = s.valid;
      }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < threads; ++w) pool.emplace_back(rows, w);
  rows(0);
  for (auto& th : pool) th.join();
  g.peak_lines = level_set(g, g.std_peak, g.peak_level);
  g.exkurt_lines = level_set(g, g.exkurt, g.exkurt_level);
  return g;
}

namespace {

struct Residual {
  double peak, kurt;
  bool valid;
};

Residual residual(const FitTarget& t, double a, double k) {
  if (!(a > 0.0 && a <= 2.0) || k == 0.0) return {kNaN, kNaN, false};
  const auto s = gsas_shape_stats(a, k);
  if (!s.valid) return {kNaN, kNaN, false};
  // relative residuals keep both equations on one scale
  return {(s.std_peak - t.std_peak) / t.std_peak, (s.exkurt - t.exkurt) / std::max(std::fabs(t.exkurt), 1.0), true};
}

// Damped Newton on both residuals with a forward-difference Jacobian.
bool newton(const FitTarget& t, double& a, double& k, Residual& r) {
  r = residual(t, a, k);
  if (!r.valid) return false;
  for (int it = 0; it < 60; ++it) {
    const double norm = std::hypot(r.peak, r.kurt);
    if (norm < 1e-12) return true;
    const double ha = 1e-7 * std::max(1.0, a), hk = 1e-7 * std::max(1.0, std::fabs(k));
    const double da_sign = a + ha > 2.0 ? -1.0 : 1.0;
    const Residual ra = residual(t, a + da_sign * ha, k), rk = residual(t, a, k + hk);
    if (!ra.valid || !rk.valid) return false;
    const double j11 = (ra.peak - r.peak) / (da_sign * ha), j21 = (ra.kurt - r.kurt) / (da_sign * ha);
    const double j12 = (rk.peak - r.peak) / hk, j22 = (rk.kurt - r.kurt) / hk;
    const double det = j11 * j22 - j12 * j21;
    if (det == 0.0 || !std::isfinite(det)) return false;
    const double step_a = -(j22 * r.peak - j12 * r.kurt) / det;
    const double step_k = -(-j21 * r.peak + j11 * r.kurt) / det;
    double lam = 1.0;
    bool moved = false;
    for (int h = 0; h < 30; ++h, lam *= 0.5) {
      const double na = a + lam * step_a, nk = k + lam * step_k;
      const Residual nr = residual(t, na, nk);
      if (nr.valid && std::hypot(nr.peak, nr.kurt) < norm) {
        a = na;
        k = nk;
        r = nr;
        moved = true;
        break;
      }
    }
    if (!moved) return norm < 1e-9;
  }
  return std::hypot(r.peak, r.kurt) < 1e-9;
}

}  // namespace

FitResult trace_solution(const FitTarget& t, const ContourGrid& grid) {
  if (!(t.std_peak > 0.0) || !std::isfinite(t.exkurt)) fail(Errc::invalid_params, "targets must be finite");
  FitResult out;
  out.peak_polylines = static_cast<int>(grid.peak_lines.size());
  out.exkurt_polylines = static_cast<int>(grid.exkurt_lines.size());
  // Walk the peak contour and look for sign changes of the kurtosis residual.
  double nearest = std::numeric_limits<double>::infinity();
  std::pair<double, double> nearest_at{kNaN, kNaN};
  for (const auto& line : grid.peak_lines) {
    std::vector<Residual> rs;
    for (const auto& [a, k] : line) {
      rs.push_back(residual(t, a, k));
      if (rs.back().valid && std::fabs(rs.back().kurt) < nearest) {
        nearest = std::fabs(rs.back().kurt);
        nearest_at = {a, k};
      }
    }
    for (size_t v = 0; v + 1 < line.size(); ++v) {
      if (!rs[v].valid || !rs[v + 1].valid) continue;
      if ((rs[v].kurt < 0.0) == (rs[v + 1].kurt < 0.0)) continue;
      const double w = rs[v].kurt / (rs[v].kurt - rs[v + 1].kurt);
      double a = line[v].first + w * (line[v + 1].first - line[v].first);
      double k = line[v].second + w * (line[v + 1].second - line[v].second);
      Residual r;
      if (!newton(t, a, k, r)) continue;
      bool dup = false;
      for (const auto& c : out.candidates) dup |= std::hypot(c.alpha - a, c.k - k) < 1e-6;
      if (!dup) out.candidates.push_back({a, k, r.peak, r.kurt});
    }
  }
  if (out.candidates.empty()) {
    if (t.exkurt < kNormalExkurtTol) {
      out.at_boundary = true;
      out.alpha = 2.0;
      out.k = std::numeric_limits<double>::infinity();
      out.scale = t.sd;
      out.location = t.mean;
      out.res_exkurt = t.exkurt;
      return out;
    }
    std::ostringstream msg;
    msg << "contours do not intersect: " << out.peak_polylines << " std-peak and " << out.exkurt_polylines
        << " exkurt polylines";
    if (std::isfinite(nearest))
      msg << "; nearest approach on the std-peak contour at alpha=" << nearest_at.first
          << " k=" << nearest_at.second << " with relative exkurt residual " << nearest;
    fail(Errc::no_intersection, msg.str());
  }
  std::sort(out.candidates.begin(), out.candidates.end(),
            [](const FitCandidate& x, const FitCandidate& y) { return x.k < y.k; });
  const auto& best = out.candidates.front();
  out.alpha = best.alpha;
  out.k = best.k;
  out.res_peak = best.res_peak;
  out.res_exkurt = best.res_exkurt;
  out.location = t.mean;
  out.scale = t.sd / std::sqrt(gsas_moment(FcmShape{out.alpha, out.k}, 2.0));
  return out;
}

namespace {

// GAS density through its characteristic function,
//   pdf(x) = (1/pi) int_0^inf cos(x z + sin(theta pi/2) z^alpha) C(q z) dz,
// with C the GSaS characteristic function. This is the kernel integral with
// the s and t integrations swapped; C is summed over fixed nodes of chi-bar so
// that one shape serves many x cheaply.
class CfDensity {
 public:
  CfDensity(const SkewShape& sh, double x_max) {
    validate(sh);
    const FcmShape fs{sh.alpha, sh.k};
    const double q = skew_q(sh), st = std::sin(sh.theta * kPi / 2.0);
    using GL = boost::math::quadrature::gauss<double, 10>;
    const auto& xa = GL::abscissa();
    const auto& wa = GL::weights();
    auto panel_nodes = [&](double a, double b, auto&& emit) {
      const double c = 0.5 * (a + b), h = 0.5 * (b - a);
      for (size_t i = 0; i < xa.size(); ++i)
        for (int sgn : {-1, 1}) {
          if (xa[i] == 0.0 && sgn < 0) continue;
          emit(c + sgn * h * xa[i], wa[i] * h);
        }
    };
    // chi-bar nodes in u = log s, weight s chi-bar(s) du
    std::vector<std::pair<double, double>> chi;
    if (sh.alpha == 2.0) {
      chi.push_back({fcm_delta_point(fs), 1.0});
    } else {
      auto dens = [&](double u) { return std::exp(u) * fcm_pdf(fs, std::exp(u)); };
      const double u0 = std::log(fcm_moment(fs, 1.0));
      double peak = dens(u0);
      auto edge = [&](double dir) {
        double u = u0;
        for (int n = 0, quiet = 0; n < 4000 && quiet < 3; ++n) {
          u += dir * 0.25;
          const double v = dens(u);
          peak = std::max(peak, v);
          quiet = v < 1e-17 * peak ? quiet + 1 : 0;
        }
        return u;
      };
      const double lo = edge(-1.0), hi = edge(1.0);
      for (double u = lo; u < hi; u += 0.25)
        panel_nodes(u, u + 0.25, [&](double uu, double w) {
          const double v = w * dens(uu);
          if (v > 0.0) chi.push_back({std::exp(uu), v});
        });
    }
    auto cf = [&](double z) {
      double t = 0.0;
      for (const auto& [s, w] : chi) t += w * std::exp(-0.5 * z * z / (s * s));
      return t;
    };
    // z range: until C falls below 1e-17
    double z_hi = 1.0;
    while (cf(q * z_hi) > 1e-17 && z_hi < 1e6) z_hi *= 1.25;
    const double h = std::min(0.1, 1.0 / std::max(x_max, 1.0));
    const int panels = static_cast<int>(std::ceil(z_hi / h));
    if (panels > 2000000) fail(Errc::oscillation_too_fast, "characteristic-function grid too large");
    for (int p = 0; p < panels; ++p)
      panel_nodes(p * h, (p + 1) * h, [&](double z, double w) {
        const double c = cf(q * z);
        if (c == 0.0) return;
        z_.push_back(z);
        phase_.push_back(st * std::pow(z, sh.alpha));
        w_.push_back(w * c / kPi);
      });
  }

  double operator()(double x) const {
    double t = 0.0;
    for (size_t j = 0; j < z_.size(); ++j) t += w_[j] * std::cos(x * z_[j] + phase_[j]);
    return t;
  }

 private:
  std::vector<double> z_, phase_, w_;
};

// Window in model units: limit standard deviations of the symmetric shape.
double model_window(const SkewShape& sh, double limit) {
  const FcmShape base{sh.alpha, sh.k};
  const double sd = gsas_moment_exists(base, 2.0) ? std::sqrt(gsas_moment(base, 2.0)) : 1.0;
  return limit * sd;
}

double truncated_skewness(const CfDensity& pdf, double L) {
  using GL = boost::math::quadrature::gauss<double, 10>;
  // panels evenly spaced in asinh(x) so the centre is resolved finely
  const int panels = 40;
  const double umax = std::asinh(L);
  double m0 = 0.0, m1 = 0.0, m2 = 0.0, m3 = 0.0;
  const auto& xa = GL::abscissa();
  const auto& wa = GL::weights();
  for (int p = 0; p < panels; ++p) {
    const double u0 = -umax + 2.0 * umax * p / panels, u1 = u0 + 2.0 * umax / panels;
    const double c = 0.5 * (u0 + u1), h = 0.5 * (u1 - u0);
    for (size_t i = 0; i < xa.size(); ++i)
      for (int sgn : {-1, 1}) {
        if (xa[i] == 0.0 && sgn < 0) continue;
        const double u = c + sgn * h * xa[i];
        const double x = std::sinh(u);
        const double w = wa[i] * h * std::cosh(u) * pdf(x);
        m0 += w;
        m1 += w * x;
        m2 += w * x * x;
        m3 += w * x * x * x;
      }
  }
  const double mu = m1 / m0;
  const double var = m2 / m0 - mu * mu;
  const double c3 = m3 / m0 - 3.0 * mu * m2 / m0 + 2.0 * mu * mu * mu;
  return c3 / std::pow(var, 1.5);
}

// Throws PositivityViolation when the density dips below -1e-6 on [-R, R].
void check_positive(const CfDensity& pdf, double R, double theta) {
  for (int i = 0; i <= 600; ++i) {
    const double x = std::sinh(std::asinh(R) * (i / 300.0 - 1.0));
    const double v = pdf(x);
    if (v < -1e-6) {
      std::ostringstream os;
      os << "GAS density " << v << " at x=" << x << "; theta=" << theta << " is outside the valid range";
      fail(Errc::positivity_violation, os.str());
    }
  }
}

// Positivity is checked over the moment window only. For k > 1 any theta != 0
// eventually turns one far tail negative, so a wider reach would pin theta to 0.
constexpr double kPositivityReach = 1.0;

}  // namespace

double gas_truncated_skewness(const SkewShape& sh, double limit) {
  validate(sh);
  if (!(limit > 0.0)) fail(Errc::invalid_params, "truncation limit must be > 0");
  const double L = model_window(sh, limit);
  const CfDensity pdf(sh, kPositivityReach * L);
  check_positive(pdf, kPositivityReach * L, sh.theta);
  return truncated_skewness(pdf, L);
}

FitResult fit_skew(const ReturnSeries& series, const FitResult& base, const OscQuadSpec& osc) {
  if (base.at_boundary) fail(Errc::invalid_params, "skew fit needs an interior symmetric solution");
  if (!(base.k > 0.0)) fail(Errc::invalid_params, "skew fit needs k > 0");
  const FitTarget t = summarize(series);
  FitResult out = base;
  const double limit = t.max_abs_z;
  auto skew_at = [&](double th) { return gas_truncated_skewness({base.alpha, base.k, th}, limit); };
  auto admissible = [&](double th) {
    try {
      skew_at(th);
      return true;
    } catch (const Error& e) {
      if (e.code() != Errc::positivity_violation) throw;
      return false;
    }
  };
  // L(-x; theta) = L(x; -theta): one bound serves both signs.
  double th_max = 0.999 * std::min({base.alpha, 2.0 - base.alpha, 1.0});
  if (!admissible(th_max)) {
    double lo = 0.0, hi = th_max;
    for (int it = 0; it < 30 && hi - lo > 1e-5; ++it) {
      const double m = 0.5 * (lo + hi);
      (admissible(m) ? lo : hi) = m;
    }
    th_max = lo;
  }
  if (th_max < 1e-6) fail(Errc::positivity_violation, "no theta keeps the GAS density non-negative");
  const double s_hi = skew_at(th_max), s_lo = -s_hi;
  auto err = [&](double th) { return skew_at(th) - t.skewness; };
  double theta;
  if ((s_lo - t.skewness) * (s_hi - t.skewness) < 0.0) {
    std::uintmax_t it = 60;
    auto tol = [](double a, double b) { return std::fabs(a - b) < 1e-6; };
    const auto br =
        boost::math::tools::toms748_solve(err, -th_max, th_max, s_lo - t.skewness, s_hi - t.skewness, tol, it);
    theta = 0.5 * (br.first + br.second);
  } else {
    // target out of reach: take the nearer end of the admissible range
    theta = std::fabs(s_lo - t.skewness) < std::fabs(s_hi - t.skewness) ? -th_max : th_max;
  }
  // cross-check the fast density against the kernel route at the centre
  const SkewShape fitted{base.alpha, base.k, theta};
  const double direct = gas_pdf(fitted, 0.0, {}, osc);
  const double fast = CfDensity(fitted, 1.0)(0.0);
  if (std::fabs(direct - fast) > 1e-6 * direct)
    fail(Errc::quadrature_failed, "characteristic-function density disagrees with the kernel integral");
  out.theta = theta;
  out.res_skew = err(theta);
  return out;
}

double histogram_peak_2d(const std::vector<double>& a, const std::vector<double>& b, int bins) {
  if (a.size() != b.size()) fail(Errc::dimension_mismatch, "series lengths differ");
  if (bins < 2) fail(Errc::invalid_params, "bins must be >= 2");
  if (a.empty()) fail(Errc::degenerate_sample, "empty series");
  const auto [alo, ahi] = std::minmax_element(a.begin(), a.end());
  const auto [blo, bhi] = std::minmax_element(b.begin(), b.end());
  const double wa = (*ahi - *alo) / bins, wb = (*bhi - *blo) / bins;
  if (!(wa > 0.0 && wb > 0.0)) fail(Errc::degenerate_sample, "series has zero range");
  std::vector<int> counts(static_cast<size_t>(bins) * bins, 0);
  for (size_t i = 0; i < a.size(); ++i) {
    const int ia = std::min(bins - 1, static_cast<int>((a[i] - *alo) / wa));
    const int ib = std::min(bins - 1, static_cast<int>((b[i] - *blo) / wb));
    ++counts[static_cast<size_t>(ia) * bins + ib];
  }
  return *std::max_element(counts.begin(), counts.end()) / (a.size() * wa * wb);
}

BivariateFit fit_bivariate(const ReturnSeries& a, const ReturnSeries& b, MvMode mode, int bins,
                           const GridSpec& grid) {
  // Align on timestamps when both series carry them, else by position.
  ReturnSeries x, y;
  if (!a.timestamps.empty() && !b.timestamps.empty()) {
    std::map<std::string, double> bm;
    for (size_t i = 0; i < b.values.size(); ++i) bm[b.timestamps[i]] = b.values[i];
    for (size_t i = 0; i < a.values.size(); ++i) {
      const auto it = bm.find(a.timestamps[i]);
      if (it == bm.end()) continue;
      x.values.push_back(a.values[i]);
      y.values.push_back(it->second);
    }
  } else {
    if (a.values.size() != b.values.size()) fail(Errc::dimension_mismatch, "series lengths differ");
    x.values = a.values;
    y.values = b.values;
  }
  const FitTarget ta = summarize(x, bins), tb = summarize(y, bins);
  BivariateFit out;
  out.mode = mode;
  out.marginal_a = trace_solution(ta, contour_grid(ta, grid));
  out.marginal_b = trace_solution(tb, contour_grid(tb, grid));
  if (out.marginal_a.at_boundary || out.marginal_b.at_boundary)
    fail(Errc::no_intersection, "a marginal fit reached the normal limit");
  const FcmShape sa{out.marginal_a.alpha, out.marginal_a.k}, sb{out.marginal_b.alpha, out.marginal_b.k};
  if (mode == MvMode::elliptical)
    out.shapes = {FcmShape{0.5 * (sa.alpha + sb.alpha), 0.5 * (sa.k + sb.k)}};
  else
    out.shapes = {sa, sb};
  const double n = static_cast<double>(x.values.size());
  double ma = 0.0, mb = 0.0;
  for (size_t i = 0; i < x.values.size(); ++i) {
    ma += x.values[i];
    mb += y.values[i];
  }
  ma /= n;
  mb /= n;
  double caa = 0.0, cbb = 0.0, cab = 0.0;
  for (size_t i = 0; i < x.values.size(); ++i) {
    const double da = x.values[i] - ma, db = y.values[i] - mb;
    caa += da * da;
    cbb += db * db;
    cab += da * db;
  }
  out.sample_cov << caa / n, cab / n, cab / n, cbb / n;
  out.sample_peak = histogram_peak_2d(x.values, y.values, bins);
  out.adjust = covariance_adjust(mode, out.shapes, out.sample_cov, out.sample_peak);
  return out;
}

}  // namespace wd
