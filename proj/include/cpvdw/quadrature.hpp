#pragma once
#include "cpvdw/errors.hpp"
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

namespace cpvdw {

struct QuadratureSpec {
  double rel_tol = 1e-10;
  /// Absolute tolerance relative to the integral of |f| over the range.
  double abs_tol = 1e-14;
  int max_subdivisions = 200;
  /// Frequency scale beyond which the integrand decays.
  double decay_scale = 1.0;
  /// Extra initial breakpoints (structure in the integrand).
  std::vector<double> hints{};
  /// Each initial panel is split into 2^refinement pieces.
  int refinement = 0;

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
      throw InputError("quadrature tolerances must be > 0");
    if (max_subdivisions < 1)
      throw InputError("quadrature max_subdivisions must be >= 1");
    if (!(decay_scale > 0.0) || !std::isfinite(decay_scale))
      throw InputError("quadrature decay_scale must be finite and > 0");
    if (refinement < 0 || refinement > 16)
      throw InputError("quadrature refinement must be in [0, 16]");
  }
};

template <typename T> struct QuadratureResult {
  T value{};
  double error = 0.0;
  int evaluations = 0;
  int subdivisions = 0;
};

namespace detail {

// 21-point Kronrod / 10-point Gauss abscissae and weights on [-1, 1].
inline constexpr std::array<double, 11> xgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
inline constexpr std::array<double, 11> wgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> wg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

template <typename T> double mag(const T &v) { return std::abs(v); }

/// Integrable map of a parameter t in [lo, hi] to the frequency axis.
struct Segment {
  double lo, hi;
  bool tail = false; // omega = start + scale t/(1-t), t in [0, 1)
  double start = 0.0;
  double scale = 1.0;
};

template <typename T> struct Panel {
  Segment seg;
  T value{};
  double error = 0.0;
  double resabs = 0.0;
};

template <typename T, typename F>
Panel<T> gk21(const F &f, const Segment &s, int &nevals) {
  const double c = 0.5 * (s.lo + s.hi);
  const double h = 0.5 * (s.hi - s.lo);
  auto g = [&](double t) -> T {
    if (!s.tail)
      return f(t);
    const double om = 1.0 - t;
    const T v = f(s.start + s.scale * t / om);
    if (v == T{})
      return T{};
    return v * (s.scale / (om * om));
  };
  std::array<T, 21> fv;
  fv[10] = g(c);
  for (int j = 0; j < 10; ++j) {
    fv[j] = g(c - h * xgk[j]);
    fv[20 - j] = g(c + h * xgk[j]);
  }
  nevals += 21;
  T rk = fv[10] * wgk[10];
  T rg{};
  double rabs = mag(fv[10]) * wgk[10];
  for (int j = 0; j < 10; ++j) {
    const T pair = fv[j] + fv[20 - j];
    rk += wgk[j] * pair;
    rabs += wgk[j] * (mag(fv[j]) + mag(fv[20 - j]));
    if (j % 2 == 1)
      rg += wg[j / 2] * pair;
  }
  const T mean = rk * 0.5;
  double rasc = 0.0;
  for (int j = 0; j < 21; ++j)
    rasc += wgk[j < 11 ? j : 20 - j] * mag(fv[j] - mean);
  rk *= h;
  rg *= h;
  rabs *= std::abs(h);
  rasc *= std::abs(h);
  double err = mag(rk - rg);
  if (rasc != 0.0 && err != 0.0)
    err = rasc * std::min(1.0, std::pow(200.0 * err / rasc, 1.5));
  constexpr double epm = std::numeric_limits<double>::epsilon();
  if (rabs > std::numeric_limits<double>::min() / (50.0 * epm))
    err = std::max(50.0 * epm * rabs, err);
  if (!std::isfinite(mag(rk)))
    throw DomainError("quadrature: non-finite integrand value");
  return {s, rk, err, rabs};
}

/// Globally adaptive bisection of the worst panel.
template <typename T, typename F>
QuadratureResult<T> adapt(const F &f, std::vector<Segment> segs,
                          const QuadratureSpec &spec) {
  spec.validate();
  for (int r = 0; r < spec.refinement; ++r) {
    std::vector<Segment> finer;
    for (const auto &s : segs) {
      const double m = 0.5 * (s.lo + s.hi);
      Segment a = s, b = s;
      a.hi = m;
      b.lo = m;
      finer.push_back(a);
      finer.push_back(b);
    }
    segs = std::move(finer);
  }
  QuadratureResult<T> res;
  std::vector<Panel<T>> panels;
  for (const auto &s : segs)
    panels.push_back(gk21<T>(f, s, res.evaluations));

  auto totals = [&](T &v, double &e, double &l1) {
    v = T{};
    e = 0.0;
    l1 = 0.0;
    for (const auto &p : panels) {
      v += p.value;
      e += p.error;
      l1 += p.resabs;
    }
  };
  T v;
  double e, l1;
  totals(v, e, l1);
  for (;;) {
    const double tol = std::max(spec.rel_tol * mag(v), spec.abs_tol * l1);
    if (e <= tol)
      break;
    if (res.subdivisions >= spec.max_subdivisions)
      throw ConvergenceError("quadrature did not converge in " +
                                 std::to_string(spec.max_subdivisions) +
                                 " subdivisions",
                             std::real(v), e);
    auto worst = std::max_element(
        panels.begin(), panels.end(),
        [](const auto &a, const auto &b) { return a.error < b.error; });
    const Segment s = worst->seg;
    const double m = 0.5 * (s.lo + s.hi);
    Segment a = s, b = s;
    a.hi = m;
    b.lo = m;
    const auto idx = worst - panels.begin();
    panels[idx] = gk21<T>(f, a, res.evaluations);
    panels.insert(panels.begin() + idx + 1, gk21<T>(f, b, res.evaluations));
    ++res.subdivisions;
    totals(v, e, l1);
  }
  res.value = v;
  res.error = e;
  return res;
}

inline std::vector<double> sorted_points(std::vector<double> p, double lo,
                                         double hi) {
  std::vector<double> out{lo};
  std::sort(p.begin(), p.end());
  for (double x : p)
    if (x > lo && x < hi && x > out.back() + 1e-12 * std::abs(x))
      out.push_back(x);
  out.push_back(hi);
  return out;
}

} // namespace detail

//==============================================================================
/// Adaptive Gauss-Kronrod 21 on [a, b]; spec.hints become breakpoints.
template <typename T = double, typename F>
QuadratureResult<T> integrate_interval(const F &f, double a, double b,
                                       const QuadratureSpec &spec = {}) {
  if (!(b > a))
    throw InputError("integrate_interval: need b > a");
  const auto pts = detail::sorted_points(spec.hints, a, b);
  std::vector<detail::Segment> segs;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    segs.push_back({pts[i], pts[i + 1]});
  return detail::adapt<T>(f, std::move(segs), spec);
}

/// Integral over [a, inf) with the whole range mapped onto one tail panel
/// of scale spec.decay_scale (suits algebraic decay).
template <typename T = double, typename F>
QuadratureResult<T> integrate_from(const F &f, double a,
                                   const QuadratureSpec &spec = {}) {
  return detail::adapt<T>(f, {{0.0, 1.0, true, a, spec.decay_scale}}, spec);
}

/// Integral over (0, inf): panels at the hints and at geometric points up to
/// 40 decay scales, then a mapped tail panel.
template <typename T = double, typename F>
QuadratureResult<T> integrate_halfline(const F &f,
                                       const QuadratureSpec &spec = {}) {
  spec.validate();
  const double L = 40.0 * spec.decay_scale;
  std::vector<double> p = spec.hints;
  for (double x = spec.decay_scale / 64.0; x < L; x *= 4.0)
    p.push_back(x);
  const auto pts = detail::sorted_points(p, 0.0, L);
  std::vector<detail::Segment> segs;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    segs.push_back({pts[i], pts[i + 1]});
  segs.push_back({0.0, 1.0, true, L, spec.decay_scale});
  return detail::adapt<T>(f, std::move(segs), spec);
}

//==============================================================================
/// int dw [1/(a-w-i0) + 1/(a+w-i0)][1/(b-w-i0) + 1/(b+w-i0)] over the real
/// line.
inline std::complex<double> identity_two_denominators(double EvA, double EvB) {
  if (EvA + EvB == 0.0)
    throw DomainError("identity_two_denominators: EvA + EvB = 0");
  return {0.0, 4.0 * std::numbers::pi / (EvA + EvB)};
}

/// Numerical companion: the integrand is even, so twice the positive half
/// line, which passes above the poles at +EvA, +EvB on a semicircle.
inline QuadratureResult<std::complex<double>>
identity_two_denominators_numeric(double EvA, double EvB,
                                  QuadratureSpec spec = {}) {
  if (!(EvA > 0.0) || !(EvB > 0.0))
    throw DomainError("identity_two_denominators_numeric: energies must be "
                      "positive");
  using C = std::complex<double>;
  auto f = [=](C w) {
    return (2.0 * EvA / (EvA * EvA - w * w)) *
           (2.0 * EvB / (EvB * EvB - w * w));
  };
  const double lo = std::min(EvA, EvB);
  const double hi = std::max(EvA, EvB);
  const double c = 0.5 * (lo + hi);
  const double rho = 0.5 * (hi - lo) + 0.5 * lo;
  spec.decay_scale = c + rho;
  spec.hints.clear();
  auto left = integrate_interval<C>([&](double w) { return f(w); }, 0.0,
                                    c - rho, spec);
  auto right = integrate_from<C>([&](double w) { return f(w); }, c + rho,
                                 spec);
  // w = c + rho e^{i th}, th from pi to 0
  auto arc = integrate_interval<C>(
      [&](double th) {
        const C e = std::polar(1.0, th);
        return -f(c + rho * e) * C(0.0, rho) * e;
      },
      0.0, std::numbers::pi, spec);
  QuadratureResult<C> r;
  r.value = 2.0 * (left.value + right.value + arc.value);
  r.error = 2.0 * (left.error + right.error + arc.error);
  r.evaluations = left.evaluations + right.evaluations + arc.evaluations;
  r.subdivisions = left.subdivisions + right.subdivisions + arc.subdivisions;
  return r;
}

/// int dw [1/(a+iw) + 1/(a-iw)][1/(b+iw) + 1/(b-iw)] over the real line.
inline double identity_wick_denominators(double EmA, double EqB) {
  if (EmA == 0.0 || EqB == 0.0)
    throw DomainError("identity_wick_denominators: zero energy");
  const double s = (EmA > 0 ? 1.0 : -1.0) * (EqB > 0 ? 1.0 : -1.0);
  return 4.0 * std::numbers::pi * s / (std::abs(EmA) + std::abs(EqB));
}

inline QuadratureResult<double>
identity_wick_denominators_numeric(double EmA, double EqB,
                                   QuadratureSpec spec = {}) {
  if (EmA == 0.0 || EqB == 0.0)
    throw DomainError("identity_wick_denominators_numeric: zero energy");
  auto f = [=](double w) {
    return (2.0 * EmA / (EmA * EmA + w * w)) *
           (2.0 * EqB / (EqB * EqB + w * w));
  };
  spec.decay_scale = std::max(std::abs(EmA), std::abs(EqB));
  spec.hints = {std::abs(EmA), std::abs(EqB)};
  auto r = integrate_halfline<double>(f, spec);
  r.value *= 2.0;
  r.error *= 2.0;
  return r;
}

} // namespace cpvdw
