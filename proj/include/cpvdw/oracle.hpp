#pragma once
// Brute-force cross-checks. Deliberately independent of the shift engine:
// own matrix elements, own polarizability sums, own propagator.
#include "cpvdw/atom.hpp"
#include "cpvdw/quadrature.hpp"
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <vector>

namespace cpvdw {

namespace oracle_detail {

using C = std::complex<double>;

inline std::array<double, 3> element(const AtomModel &at, const std::string &a,
                                     const std::string &b) {
  std::array<double, 3> d{0, 0, 0};
  for (const auto &e : at.dipoles())
    if ((e.from_label == a && e.to_label == b) ||
        (e.from_label == b && e.to_label == a))
      for (int i = 0; i < 3; ++i)
        d[i] += e.d_vector[i];
  return d;
}

inline std::array<std::array<double, 3>, 3> beta(const Eigen::Vector3d &axis) {
  const Eigen::Vector3d n = axis.normalized();
  std::array<std::array<double, 3>, 3> b{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      b[i][j] = (i == j ? 1.0 : 0.0) - 3.0 * n[i] * n[j];
  return b;
}

/// <v q| beta_ij d_Ai d_Bj |a b> at R = 1
inline double coupling(const std::array<std::array<double, 3>, 3> &b,
                       const std::array<double, 3> &dA,
                       const std::array<double, 3> &dB) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      s += b[i][j] * dA[i] * dB[j];
  return s;
}

} // namespace oracle_detail

/// Second-order perturbation theory over the product basis; returns C6 with
/// Delta E = -C6/R^6.
inline double brute_force_vdw(const PairSystem &pair, double tol = 1e-12) {
  using namespace oracle_detail;
  pair.validate();
  const auto b = beta(pair.axis);
  const double Ea = pair.atom_a.level(pair.ref_a).energy;
  const double Eb = pair.atom_b.level(pair.ref_b).energy;
  double c6 = 0.0;
  for (const auto &v : pair.atom_a.levels())
    for (const auto &q : pair.atom_b.levels()) {
      if (v.label == pair.ref_a && q.label == pair.ref_b)
        continue;
      const double M =
          coupling(b, element(pair.atom_a, v.label, pair.ref_a),
                   element(pair.atom_b, q.label, pair.ref_b));
      if (M == 0.0)
        continue;
      const double den = (v.energy - Ea) + (q.energy - Eb);
      if (std::abs(den) <= tol)
        throw ResonanceError("product state (" + v.label + ", " + q.label +
                                 ") is degenerate with the reference",
                             {v.label, q.label});
      c6 += M * M / den;
    }
  return c6;
}

/// Exchange matrix element <psi_B psi_A|V G V|psi_A psi_B> as C6_mix with
/// Delta E_mix = -C6_mix/R^6.
inline double brute_force_vdw_mixing(const PairSystem &pair,
                                     double tol = 1e-12) {
  using namespace oracle_detail;
  pair.validate();
  if (!pair.identical)
    throw PreconditionError("exchange term needs identical atoms");
  const auto b = beta(pair.axis);
  const auto &at = pair.atom_a;
  const auto &a = pair.ref_a;
  const auto &bb = pair.ref_b;
  const double E0 = at.level(a).energy + at.level(bb).energy;
  double c6 = 0.0;
  for (const auto &v : at.levels())
    for (const auto &q : at.levels()) {
      if ((v.label == a && q.label == bb) || (v.label == bb && q.label == a))
        continue;
      const double ket =
          coupling(b, element(at, v.label, a), element(at, q.label, bb));
      const double bra =
          coupling(b, element(at, bb, v.label), element(at, a, q.label));
      if (ket * bra == 0.0)
        continue;
      const double den = v.energy + q.energy - E0;
      if (std::abs(den) <= tol)
        throw ResonanceError("product state (" + v.label + ", " + q.label +
                                 ") is degenerate with the reference",
                             {v.label, q.label});
      c6 += bra * ket / den;
    }
  return c6;
}

//==============================================================================
struct ContourSpec {
  /// Empty: {1e-2, 5e-3, 2.5e-3} times the smallest pole gap.
  std::vector<double> epsilon_values{};
  /// Breakpoints placed at p +- eps 4^k, k < panel_density.
  int panel_density = 6;
  /// Number of epsilon values entering the extrapolation.
  int extrapolation_order = 3;
  double rel_tol = 1e-10;
  int max_subdivisions = 4000;
};

struct ContourResult {
  std::complex<double> value;
  std::vector<double> epsilon_values;
  std::vector<std::complex<double>> raw_values;
};

namespace oracle_detail {

struct Pole {
  double E;
  Eigen::Matrix3d dd;
};

inline std::vector<Pole> states(const AtomModel &at, const std::string &ref) {
  const double E0 = at.level(ref).energy;
  std::vector<Pole> out;
  for (const auto &l : at.levels()) {
    if (l.label == ref)
      continue;
    const auto d = element(at, l.label, ref);
    if (d[0] == 0.0 && d[1] == 0.0 && d[2] == 0.0)
      continue;
    Eigen::Vector3d v(d[0], d[1], d[2]);
    out.push_back({l.energy - E0, v * v.transpose()});
  }
  return out;
}

/// sum dd [1/(E - w - i eps) + 1/(E + w - i eps)]
inline Eigen::Matrix3cd alpha_eps(const std::vector<Pole> &ps, C w,
                                  double eps) {
  const C ie(0.0, eps);
  Eigen::Matrix3cd a = Eigen::Matrix3cd::Zero();
  for (const auto &p : ps)
    a += p.dd.cast<C>() * (1.0 / (p.E - w - ie) + 1.0 / (p.E + w - ie));
  return a;
}

/// w^2 D_ij for w in the closed first quadrant.
inline Eigen::Matrix3cd w2D(C w, const Eigen::Vector3d &n, double R,
                            double c) {
  const C I(0.0, 1.0);
  const C pref = std::exp(I * w * R / c) / (c * c * R);
  const C tcoef = w * w;
  const C lcoef = I * w * c / R - c * c / (R * R);
  Eigen::Matrix3cd M;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double d = i == j ? 1.0 : 0.0;
      M(i, j) = pref * (tcoef * (d - n[i] * n[j]) +
                        lcoef * (d - 3.0 * n[i] * n[j]));
    }
  return M;
}

/// w^4 D_ij D_kl a_ik b_jl, written out index by index.
inline C integrand(C w, const std::vector<Pole> &pa,
                   const std::vector<Pole> &pb, const Eigen::Vector3d &n,
                   double R, double c, double eps) {
  const auto M = w2D(w, n, R, c);
  const auto a = alpha_eps(pa, w, eps);
  const auto b = alpha_eps(pb, w, eps);
  C s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          s += M(i, j) * M(k, l) * a(i, k) * b(j, l);
  return s;
}

/// Neville extrapolation of (x_i, y_i) to x = 0.
inline C extrapolate_to_zero(const std::vector<double> &x,
                             std::vector<C> y) {
  const std::size_t n = x.size();
  for (std::size_t m = 1; m < n; ++m)
    for (std::size_t i = 0; i + m < n; ++i)
      y[i] = (x[i + m] * y[i] - x[i] * y[i + 1]) / (x[i + m] - x[i]);
  return y[0];
}

} // namespace oracle_detail

/// (i/2pi) int_0^inf dw w^4 D D alpha_A alpha_B on the real axis with finite
/// displacements, extrapolated to eps -> 0. The range beyond 20 max|E| is
/// closed by a vertical ray where the photon factor decays exponentially.
inline ContourResult contour_shift_direct(const PairSystem &pair, double R,
                                          const ContourSpec &spec = {}) {
  using namespace oracle_detail;
  pair.validate();
  if (!(R > 0.0))
    throw InputError("contour_shift_direct: R must be > 0");
  const auto pa = states(pair.atom_a, pair.ref_a);
  const auto pb = states(pair.atom_b, pair.ref_b);
  const double c = pair.units.c;
  const Eigen::Vector3d n = pair.axis.normalized();

  std::vector<double> locs;
  for (const auto *ps : {&pa, &pb})
    for (const auto &p : *ps)
      locs.push_back(std::abs(p.E));
  std::sort(locs.begin(), locs.end());
  if (locs.empty())
    return {0.0, {}, {}};
  double gap = locs.front();
  for (std::size_t i = 1; i < locs.size(); ++i)
    if (locs[i] - locs[i - 1] > 1e-12)
      gap = std::min(gap, locs[i] - locs[i - 1]);

  std::vector<double> eps = spec.epsilon_values;
  if (eps.empty())
    eps = {1e-2 * gap, 5e-3 * gap, 2.5e-3 * gap};
  if (spec.extrapolation_order < 1 ||
      std::size_t(spec.extrapolation_order) > eps.size())
    throw InputError("contour: extrapolation order exceeds epsilon list");
  eps.resize(spec.extrapolation_order);
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0) || (i > 0 && !(eps[i] < eps[i - 1])))
      throw InputError("contour: epsilon values must be positive and "
                       "decreasing");
    if (eps[i] > 0.1 * gap)
      throw PreconditionError("contour: epsilon " + std::to_string(eps[i]) +
                              " does not resolve pole gap " +
                              std::to_string(gap));
  }

  const double Om = 20.0 * locs.back();
  const C pref(0.0, 1.0 / (2.0 * std::numbers::pi));
  ContourResult res;
  res.epsilon_values = eps;
  for (double e : eps) {
    QuadratureSpec q;
    q.rel_tol = spec.rel_tol;
    q.max_subdivisions = spec.max_subdivisions;
    for (double p : locs) {
      q.hints.push_back(p);
      for (int k = 0; k < spec.panel_density; ++k) {
        q.hints.push_back(p - e * std::pow(4.0, k));
        q.hints.push_back(p + e * std::pow(4.0, k));
      }
    }
    auto real_part = integrate_interval<C>(
        [&](double w) { return integrand(w, pa, pb, n, R, c, e); }, 0.0, Om,
        q);
    QuadratureSpec t;
    t.rel_tol = spec.rel_tol;
    t.max_subdivisions = spec.max_subdivisions;
    t.decay_scale = c / (2.0 * R);
    auto ray = integrate_halfline<C>(
        [&](double s) {
          return integrand(C(Om, s), pa, pb, n, R, c, e) * C(0.0, 1.0);
        },
        t);
    res.raw_values.push_back(pref * (real_part.value + ray.value));
  }
  res.value = extrapolate_to_zero(eps, res.raw_values);
  return res;
}

} // namespace cpvdw
