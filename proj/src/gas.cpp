#include "gas.hpp"

#include <cmath>
#include <complex>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "error.hpp"

namespace wd {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;
// exp(-t^2/2) is below 1e-31 past this point
constexpr double kGaussCut = 12.0;

// Breakpoints where the phase envelope |tau| (s t)^a + |w| t crosses j pi, so no
// panel holds more than half an oscillation.
std::vector<double> phase_breaks(double tau, double a, double s, double w, double T, const OscQuadSpec& osc) {
  std::vector<double> pts{0.0};
  const double ta = std::fabs(tau) * std::pow(s, a), aw = std::fabs(w);
  auto env = [&](double t) { return ta * std::pow(t, a) + aw * t; };
  const double total = env(T);
  if (!osc.zero_crossing_segmentation) {
    for (double t = 1.0; t < T; t += 1.0) pts.push_back(t);
    pts.push_back(T);
    return pts;
  }
  const double n = std::floor(total / kPi);
  if (n > osc.max_segments)
    fail(Errc::oscillation_too_fast, "skew kernel needs " + std::to_string(static_cast<long long>(n)) +
                                         " segments, budget " + std::to_string(osc.max_segments));
  boost::math::tools::eps_tolerance<double> tol(45);
  double lo = 0.0;
  for (int j = 1; j <= static_cast<int>(n); ++j) {
    const double target = j * kPi;
    std::uintmax_t it = 60;
    auto f = [&](double t) { return env(t) - target; };
    const auto br = boost::math::tools::toms748_solve(f, lo, T, f(lo), f(T), tol, it);
    lo = 0.5 * (br.first + br.second);
    if (lo > pts.back()) pts.push_back(lo);
  }
  if (T > pts.back()) pts.push_back(T);
  return pts;
}

template <class F>
double osc_integrate(F&& f, const std::vector<double>& pts, const OscQuadSpec& osc) {
  quad::Options opt;
  opt.rel_tol = osc.rel_tol;
  opt.abs_tol = 1e-17;
  opt.max_intervals = static_cast<int>(pts.size()) + 4000;
  const auto r = quad::integrate(f, pts, opt);
  if (!std::isfinite(r.value)) fail(Errc::quadrature_failed, "skew kernel integral is not finite");
  return r.value;
}

// Above this many half-periods an alpha < 1 kernel is evaluated on a rotated ray.
constexpr double kRotateAbove = 400.0;

bool use_rotation(double a, double w, double T) { return a < 1.0 && std::fabs(w) * T / kPi > kRotateAbove; }

// Re int_0^inf exp(i (tau s^a t^a + w t) - t^2/2) dt along t = r e^{i phi}.
// The Gaussian keeps the arc at infinity silent for |phi| < pi/4, and with
// phi on the side of w the linear phase turns into decay e^{-|w| r sin|phi|}.
// For a < 1 the tau term grows at most like a bounded exponential there.
double rotated_kernel(double tau, double a, double s, double w) {
  const double phi = (w > 0 ? 1.0 : -1.0) * kPi / 6.0;
  const std::complex<double> e1 = std::polar(1.0, phi), ea = std::polar(1.0, a * phi), e2 = std::polar(1.0, 2 * phi);
  const std::complex<double> I(0.0, 1.0);
  const double ts = tau * std::pow(s, a);
  auto f = [&](double r) {
    const std::complex<double> ex = I * (ts * std::pow(r, a) * ea + w * r * e1) - 0.5 * r * r * e2;
    return (std::exp(ex) * e1).real();
  };
  const double decay = std::fabs(w) * std::sin(std::fabs(phi));
  const double R = 50.0 / decay;
  const double step = kPi / (std::fabs(w) * std::cos(phi));
  std::vector<double> pts{0.0};
  for (double r = step; r < R; r += step) pts.push_back(r);
  pts.push_back(R);
  quad::Options opt;
  opt.rel_tol = 1e-12;
  opt.abs_tol = 1e-18;
  opt.max_intervals = static_cast<int>(pts.size()) + 2000;
  const auto res = quad::integrate(f, pts, opt);
  if (!std::isfinite(res.value)) fail(Errc::quadrature_failed, "rotated skew kernel integral is not finite");
  return res.value;
}

}  // namespace

void validate(const SkewShape& s) {
  validate(FcmShape{s.alpha, s.k});
  if (!std::isfinite(s.theta)) fail(Errc::invalid_params, "theta must be finite");
  const double bound = std::min(s.alpha, 2.0 - s.alpha);
  if (std::fabs(s.theta) > bound) fail(Errc::invalid_params, "theta outside |theta| <= min(alpha, 2 - alpha)");
  if (std::fabs(s.theta) >= 1.0) fail(Errc::invalid_params, "|theta| must be < 1");
  if (s.theta != 0.0 && s.k < 0) fail(Errc::invalid_params, "skewness is only defined for k > 0");
}

double skew_q(const SkewShape& s) { return std::pow(std::cos(s.theta * kPi / 2.0), 1.0 / s.alpha); }
double skew_tau(const SkewShape& s) { return std::tan(s.theta * kPi / 2.0); }

void validate(const OscQuadSpec& o) {
  if (!(o.t_cut > 0.0)) fail(Errc::invalid_params, "t_cut must be > 0");
  if (!(o.rel_tol > 0.0)) fail(Errc::invalid_params, "oscillatory rel_tol must be > 0");
  if (o.max_segments < 1) fail(Errc::invalid_params, "max_segments must be positive");
}

double skew_kernel(const SkewShape& sh, double x, double s, const OscQuadSpec& osc) {
  validate(sh);
  validate(osc);
  if (!(s >= 0.0)) fail(Errc::domain_error, "skew kernel needs s >= 0");
  const double q = skew_q(sh), tau = skew_tau(sh);
  if (s == 0.0) return kInvSqrt2Pi / q;
  if (sh.theta == 0.0) return kInvSqrt2Pi * std::exp(-0.5 * x * x * s * s);
  if (sh.alpha == 1.0) {
    const double y = (tau + x / q) * s;
    return kInvSqrt2Pi * std::exp(-0.5 * y * y) / q;
  }
  const double a = sh.alpha, w = x / q * s, sa = std::pow(s, a);
  const double T = std::min(osc.t_cut, kGaussCut);
  if (use_rotation(a, w, T)) return rotated_kernel(tau, a, s, w) / (q * kPi);
  auto f = [&](double t) { return std::cos(tau * sa * std::pow(t, a) + w * t) * std::exp(-0.5 * t * t); };
  return osc_integrate(f, phase_breaks(tau, a, s, w, T, osc), osc) / (q * kPi);
}

double skew_kernel_tail(const SkewShape& sh, double x, double s, const OscQuadSpec& osc) {
  validate(sh);
  validate(osc);
  if (!(s >= 0.0)) fail(Errc::domain_error, "skew kernel needs s >= 0");
  const double q = skew_q(sh), tau = skew_tau(sh);
  if (sh.theta == 0.0) return 0.0;
  if (s == 0.0) return 0.0;
  const double a = sh.alpha, w = x / q * s, sa = std::pow(s, a);
  if (a == 1.0) {
    const double y0 = x / q * s, y1 = (tau + x / q) * s;
    return kInvSqrt2Pi * (std::exp(-0.5 * y1 * y1) - std::exp(-0.5 * y0 * y0)) / q;
  }
  const double T = std::min(osc.t_cut, kGaussCut);
  if (use_rotation(a, w, T)) return rotated_kernel(tau, a, s, w) / (q * kPi) - kInvSqrt2Pi * std::exp(-0.5 * w * w) / q;
  // cos(A) - cos(B) = -2 sin((A+B)/2) sin((A-B)/2) with A - B = tau (s t)^a
  auto f = [&](double t) {
    const double h = 0.5 * tau * sa * std::pow(t, a);
    return -2.0 * std::sin(h + w * t) * std::sin(h) * std::exp(-0.5 * t * t);
  };
  return osc_integrate(f, phase_breaks(tau, a, s, w, T, osc), osc) / (q * kPi);
}

double gas_pdf(const SkewShape& sh, double x, const QuadSpec& q, const OscQuadSpec& osc) {
  validate(sh);
  validate(osc);
  if (std::isnan(x)) fail(Errc::domain_error, "x is NaN");
  const FcmShape fs{sh.alpha, sh.k};
  if (sh.theta == 0.0) return gsas_pdf(fs, x, q);
  const double qq = skew_q(sh), tau = skew_tau(sh);
  if (sh.alpha == 1.0) return gsas_pdf(fs, tau + x / qq, q) / qq;
  // Gaussian part in closed form through GSaS, the remainder by quadrature.
  const double base = gsas_pdf(fs, x / qq, q) / qq;
  std::vector<quad::Hint> extra;
  if (x != 0.0) extra.push_back({-std::log(std::fabs(x / qq)), 1.0});
  double s_reach = 0.0;
  const double corr = integrate_over_fcm(
      fs,
      [&](double s) {
        const double v = s * skew_kernel_tail(sh, x, s, osc);
        if (v != 0.0) s_reach = std::max(s_reach, s);
        return v;
      },
      extra, q, "GAS tail-kernel integral", nullptr, 2.0 * kInvSqrt2Pi / qq);
  const double nominal = 100.0 * (fcm_moment_exists(fs, 1.0) ? fcm_moment(fs, 1.0) : 1.0);
  if (s_reach > nominal) {
    std::ostringstream os;
    os << "GAS: tail-kernel s-range extended to " << s_reach << " (alpha=" << sh.alpha << ", theta=" << sh.theta
       << ")";
    log_message(os.str());
  }
  const double v = base + corr;
  if (v < -1e-6) {
    std::ostringstream os;
    os << "GAS density " << v << " at x=" << x << "; theta=" << sh.theta << " is outside the valid range";
    fail(Errc::positivity_violation, os.str());
  }
  return std::max(v, 0.0);
}

std::pair<double, double> gas_symmetry_check(const SkewShape& sh, double x, const QuadSpec& q,
                                             const OscQuadSpec& osc) {
  SkewShape neg = sh;
  neg.theta = -sh.theta;
  return {gas_pdf(sh, -x, q, osc), gas_pdf(neg, x, q, osc)};
}

}  // namespace wd
