#pragma once
#include "cpvdw/atom.hpp"
#include "cpvdw/polarizability.hpp"
#include "cpvdw/quadrature.hpp"
#include "cpvdw/tensor.hpp"
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace cpvdw {

struct EngineOptions {
  QuadratureSpec quadrature{};
  /// Levels closer than this share one pole.
  double degeneracy_tol = 1e-12;
  /// |E_q -+ w0| below this is a resonance.
  double resonance_tol = 1e-12;
};

struct PoleContribution {
  std::string state_label;
  char atom = 'A';
  double E_m;
  cplx Q;
  double P;
  double Gamma;
  /// Mixing poles only: P obtained with the transposed numerator against the
  /// exchange response at -E_m, minus the exact residue P. Zero whenever
  /// that response is symmetric.
  std::optional<double> printed_form_deviation{};
};

struct ShiftBreakdown {
  double R = 0.0;
  double wick_dir = 0.0;
  std::vector<PoleContribution> poles_dir{};
  std::optional<double> wick_mix{};
  std::optional<std::vector<PoleContribution>> poles_mix{};
  double total_plus = 0.0;
  double total_minus = 0.0;
  double width_total_plus = 0.0;
  double width_total_minus = 0.0;

  static double sum_P(const std::vector<PoleContribution> &v) {
    double s = 0.0;
    for (const auto &p : v)
      s += p.P;
    return s;
  }
  static double sum_Gamma(const std::vector<PoleContribution> &v) {
    double s = 0.0;
    for (const auto &p : v)
      s += p.Gamma;
    return s;
  }
  double pole_real_dir() const { return sum_P(poles_dir); }
  double width_dir() const { return sum_Gamma(poles_dir); }
  std::optional<double> pole_real_mix() const {
    if (!poles_mix)
      return {};
    return sum_P(*poles_mix);
  }
  std::optional<double> width_mix() const {
    if (!poles_mix)
      return {};
    return sum_Gamma(*poles_mix);
  }
  /// W + sum Q of the direct part.
  cplx direct_complex() const {
    cplx s = wick_dir;
    for (const auto &p : poles_dir)
      s += p.Q;
    return s;
  }
};

//==============================================================================
/// The four dyadic contractions sum X_ij Y_kl N_ik T_jl with X, Y in
/// {alpha, beta}.
struct PoleCoefficients {
  double aa, ab, ba, bb;
  double cross() const { return ab + ba; }
};

inline PoleCoefficients pole_coefficients(const Eigen::Matrix3d &N,
                                          const Eigen::Matrix3d &T,
                                          const Eigen::Vector3d &R_vec) {
  const Dyadic a = transverse_dyadic(R_vec);
  const Dyadic b = longitudinal_dyadic(R_vec);
  return {contract(a, a, N, T), contract(a, b, N, T), contract(b, a, N, T),
          contract(b, b, N, T)};
}

/// scale * (cos_coef cos 2x + sin_coef sin 2x)
struct TrigForm {
  double scale;
  double cos_coef;
  double sin_coef;
  double x;

  double value() const {
    return scale * (cos_coef * std::cos(2.0 * x) + sin_coef * std::sin(2.0 * x));
  }
  /// cos -> sin, sin -> -cos, times two.
  TrigForm width_substitution() const {
    return {2.0 * scale, -sin_coef, cos_coef, x};
  }
};

/// Residue of one lower pole, x = E_m R / c, as a complex number.
inline cplx pole_Q_closed(const PoleCoefficients &k, double x, double R) {
  const cplx I(0.0, 1.0);
  const double x2 = x * x;
  const cplx br = k.bb * (1.0 + 2.0 * I * x) - (k.cross() + k.bb) * x2 -
                  I * k.cross() * x2 * x + k.aa * x2 * x2;
  return -std::exp(-2.0 * I * x) * br / std::pow(R, 6);
}

inline TrigForm pole_P_form(const PoleCoefficients &k, double x, double R) {
  const double x2 = x * x;
  const double cc = k.bb - (k.cross() + k.bb) * x2 + k.aa * x2 * x2;
  const double sc = 2.0 * x * (k.bb - 0.5 * k.cross() * x2);
  return {-1.0 / std::pow(R, 6), cc, sc, x};
}

/// Induced width written out on its own.
inline double pole_Gamma_closed(const PoleCoefficients &k, double x,
                                double R) {
  const double x2 = x * x;
  const double s2 = std::sin(2.0 * x);
  const double c2 = std::cos(2.0 * x);
  return -2.0 / std::pow(R, 6) *
         (s2 * (k.bb - (k.cross() + k.bb) * x2 + k.aa * x2 * x2) -
          2.0 * x * c2 * (k.bb - 0.5 * k.cross() * x2));
}

namespace detail {

inline void check_R(double R) {
  if (!(R > 0.0) || !std::isfinite(R))
    throw InputError("separation R must be finite and > 0");
}

inline void check_resonance(const SpectralSum &other, double w0,
                            const std::string &label, double tol) {
  for (const auto &t : other.terms())
    if (std::abs(t.E - w0) <= tol || std::abs(t.E + w0) <= tol)
      throw ResonanceError("resonance between lower state '" + label +
                               "' and level '" + t.label + "'",
                           {label, t.label});
}

/// Lower poles of `src` (terms with E < 0) against the response `other`.
inline std::vector<PoleContribution>
poles_of(const SpectralSum &src, const SpectralSum &other, char atom,
         double R, const Eigen::Vector3d &R_vec, const UnitsSystem &units,
         double res_tol) {
  std::vector<PoleContribution> out;
  for (const auto &t : src.terms()) {
    if (!(t.E < 0.0))
      continue;
    const double w0 = -t.E;
    check_resonance(other, w0, t.label, res_tol);
    const Eigen::Matrix3d T = other(w0).real();
    const auto k = pole_coefficients(t.B, T, R_vec);
    const double x = t.E * R / units.c;
    out.push_back({t.label, atom, t.E, pole_Q_closed(k, x, R),
                   pole_P_form(k, x, R).value(), pole_Gamma_closed(k, x, R)});
  }
  return out;
}

inline SpectralSum lower_only(const SpectralSum &s) {
  std::vector<SpectralTerm> t;
  for (const auto &x : s.terms())
    if (x.E < 0.0)
      t.push_back(x);
  return SpectralSum(std::move(t));
}

inline SpectralSum only_term(const SpectralSum &s, const std::string &label) {
  for (const auto &x : s.terms())
    if (x.label == label)
      return SpectralSum({x});
  throw InputError("no lower state '" + label + "'");
}

} // namespace detail

//==============================================================================
/// -(1/2pi) int_0^inf dxi e^{-2 xi R/c}/(c^4 R^2) T_ij T_kl a_ik(i xi) b_jl(i xi)
/// with T = xi^2 alpha + beta (xi c/R + c^2/R^2).
inline double wick_term_spectral(const SpectralSum &a, const SpectralSum &b,
                                 double R, const Eigen::Vector3d &axis,
                                 const UnitsSystem &units,
                                 const EngineOptions &opt = {}) {
  detail::check_R(R);
  const Eigen::Vector3d Rv = R * axis.normalized();
  const Dyadic al = transverse_dyadic(Rv);
  const Dyadic be = longitudinal_dyadic(Rv);
  const double c = units.c;
  const double c4R2 = c * c * c * c * R * R;
  auto f = [&](double xi) {
    const cplx w(0.0, xi);
    const Eigen::Matrix3d T = xi * xi * al + (xi * c / R + c * c / (R * R)) * be;
    const cplx v = contract(T, T, a(w), b(w));
    return std::exp(-2.0 * xi * R / c) / c4R2 * v.real();
  };
  QuadratureSpec spec = opt.quadrature;
  spec.decay_scale = c / (2.0 * R);
  spec.hints.clear();
  for (const auto *s : {&a, &b})
    for (const auto &t : s->terms())
      spec.hints.push_back(std::abs(t.E));
  const auto r = integrate_halfline<double>(f, spec);
  return -r.value / (2.0 * std::numbers::pi);
}

inline double wick_term_direct(const PairSystem &pair, double R,
                               const EngineOptions &opt = {}) {
  pair.validate();
  return wick_term_spectral(direct_spectrum(pair.atom_a, pair.ref_a),
                            direct_spectrum(pair.atom_b, pair.ref_b), R,
                            pair.axis, pair.units, opt);
}

/// Scalar form for isotropic reference states.
inline double wick_term_sstate(const PairSystem &pair, double R,
                               const EngineOptions &opt = {}) {
  pair.validate();
  detail::check_R(R);
  const auto sa = direct_spectrum(pair.atom_a, pair.ref_a);
  const auto sb = direct_spectrum(pair.atom_b, pair.ref_b);
  isotropic_part(sa(cplx(0.0, 1.0)), "polarizability of '" + pair.ref_a + "'");
  isotropic_part(sb(cplx(0.0, 1.0)), "polarizability of '" + pair.ref_b + "'");
  const double c = pair.units.c;
  auto f = [&](double xi) {
    const cplx w(0.0, xi);
    const double aA =
        isotropic_part(sa(w), "polarizability of '" + pair.ref_a + "'").real();
    const double aB =
        isotropic_part(sb(w), "polarizability of '" + pair.ref_b + "'").real();
    const double u = c / R;
    const double poly =
        xi * (xi * (xi * (xi + 2.0 * u) + 5.0 * u * u) + 6.0 * u * u * u) +
        3.0 * u * u * u * u;
    return std::exp(-2.0 * xi * R / c) * poly * aA * aB;
  };
  QuadratureSpec spec = opt.quadrature;
  spec.decay_scale = c / (2.0 * R);
  spec.hints.clear();
  for (const auto *s : {&sa, &sb})
    for (const auto &t : s->terms())
      spec.hints.push_back(std::abs(t.E));
  const auto r = integrate_halfline<double>(f, spec);
  return -r.value / (std::numbers::pi * c * c * c * c * R * R);
}

/// Share of the Wick term carried by one virtual state of atom A.
inline double wick_share(const PairSystem &pair, const std::string &label,
                         double R, const EngineOptions &opt = {}) {
  pair.validate();
  const auto sa = direct_spectrum(pair.atom_a, pair.ref_a, opt.degeneracy_tol);
  return wick_term_spectral(detail::only_term(sa, label),
                            direct_spectrum(pair.atom_b, pair.ref_b), R,
                            pair.axis, pair.units, opt);
}

//==============================================================================
inline std::vector<PoleContribution>
pole_terms_direct(const PairSystem &pair, double R,
                  const EngineOptions &opt = {}) {
  pair.validate();
  detail::check_R(R);
  const auto sa = direct_spectrum(pair.atom_a, pair.ref_a, opt.degeneracy_tol);
  const auto sb = direct_spectrum(pair.atom_b, pair.ref_b, opt.degeneracy_tol);
  auto out = detail::poles_of(sa, sb, 'A', R, pair.R_vec(R), pair.units,
                              opt.resonance_tol);
  auto bside = detail::poles_of(sb, sa, 'B', R, -pair.R_vec(R), pair.units,
                                opt.resonance_tol);
  out.insert(out.end(), bside.begin(), bside.end());
  return out;
}

/// Pole of one lower state m of atom A (group label for degenerate levels).
inline PoleContribution pole_term_direct(const PairSystem &pair,
                                         const std::string &m_label, double R,
                                         const EngineOptions &opt = {}) {
  pair.validate();
  detail::check_R(R);
  const auto sa = direct_spectrum(pair.atom_a, pair.ref_a, opt.degeneracy_tol);
  for (const auto &t : sa.terms())
    if (t.label == m_label || ("+" + t.label + "+").find("+" + m_label + "+") !=
                                  std::string::npos) {
      if (!(t.E < 0.0))
        throw PreconditionError("state '" + m_label +
                                "' is not below the reference of atom A");
      const auto sb =
          direct_spectrum(pair.atom_b, pair.ref_b, opt.degeneracy_tol);
      return detail::poles_of(SpectralSum({t}), sb, 'A', R, pair.R_vec(R),
                              pair.units, opt.resonance_tol)
          .front();
    }
  throw InputError("'" + m_label + "' is not a virtual state of atom A");
}

inline ShiftBreakdown total_direct(const PairSystem &pair, double R,
                                   const EngineOptions &opt = {}) {
  ShiftBreakdown b;
  b.R = R;
  b.poles_dir = pole_terms_direct(pair, R, opt);
  b.wick_dir = wick_term_direct(pair, R, opt);
  b.total_plus = b.total_minus = b.wick_dir + b.pole_real_dir();
  b.width_total_plus = b.width_total_minus = b.width_dir();
  return b;
}

//==============================================================================
namespace detail {
inline void require_identical(const PairSystem &pair) {
  pair.validate();
  if (!pair.identical)
    throw PreconditionError("mixing terms need a pair of identical atoms");
}
} // namespace detail

inline double mixing_wick(const PairSystem &pair, double R,
                          const EngineOptions &opt = {}) {
  detail::require_identical(pair);
  const auto &at = pair.atom_a;
  return wick_term_spectral(
      mixed_spectrum(at, pair.ref_a, pair.ref_b, Anchor::a_side),
      mixed_spectrum(at, pair.ref_a, pair.ref_b, Anchor::b_side), R, pair.axis,
      pair.units, opt);
}

namespace detail {

inline SpectralSum merge_degenerate(const SpectralSum &s, double tol) {
  auto terms = s.terms();
  std::stable_sort(terms.begin(), terms.end(),
                   [](const auto &a, const auto &b) { return a.E < b.E; });
  std::vector<SpectralTerm> out;
  std::vector<int> count;
  double prevE = 0.0;
  for (const auto &t : terms) {
    if (out.empty() || t.E - prevE > tol) {
      out.push_back({t.label, 0.0, Eigen::Matrix3d::Zero(),
                     Eigen::Matrix3d::Zero()});
      count.push_back(0);
    } else {
      out.back().label += "+" + t.label;
    }
    out.back().E += t.E;
    out.back().F += t.F;
    out.back().B += t.B;
    ++count.back();
    prevE = t.E;
  }
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i].E /= count[i];
  return SpectralSum(std::move(out));
}

inline std::vector<PoleContribution>
mixing_poles_oriented(const AtomModel &at, const std::string &psi_a,
                      const std::string &psi_b, char atom, double R,
                      const Eigen::Vector3d &R_vec, const UnitsSystem &units,
                      const EngineOptions &opt) {
  const auto sa = merge_degenerate(
      mixed_spectrum(at, psi_a, psi_b, Anchor::a_side), opt.degeneracy_tol);
  const auto sb = mixed_spectrum(at, psi_a, psi_b, Anchor::b_side);
  auto out = poles_of(sa, sb, atom, R, R_vec, units, opt.resonance_tol);
  // printed pairing: transposed numerator against the response at w0
  for (auto &p : out) {
    for (const auto &t : sa.terms())
      if (t.label == p.state_label) {
        const Eigen::Matrix3d T = sb(-t.E).real();
        const auto k = pole_coefficients(t.F, T, R_vec);
        const double x = t.E * R / units.c;
        p.printed_form_deviation = pole_P_form(k, x, R).value() - p.P;
      }
  }
  return out;
}

} // namespace detail

inline std::vector<PoleContribution>
mixing_pole_terms(const PairSystem &pair, double R,
                  const EngineOptions &opt = {}) {
  detail::require_identical(pair);
  detail::check_R(R);
  auto out = detail::mixing_poles_oriented(pair.atom_a, pair.ref_a, pair.ref_b,
                                           'A', R, pair.R_vec(R), pair.units,
                                           opt);
  auto bside = detail::mixing_poles_oriented(pair.atom_a, pair.ref_b,
                                             pair.ref_a, 'B', R,
                                             -pair.R_vec(R), pair.units, opt);
  out.insert(out.end(), bside.begin(), bside.end());
  return out;
}

/// Mixing pole of one lower state m (energy relative to psi_A).
inline PoleContribution mixing_pole(const PairSystem &pair,
                                    const std::string &m_label, double R,
                                    const EngineOptions &opt = {}) {
  detail::require_identical(pair);
  detail::check_R(R);
  const auto &at = pair.atom_a;
  const double E = at.level(m_label).energy - at.level(pair.ref_a).energy;
  if (!(E < 0.0))
    throw PreconditionError("state '" + m_label + "' is not below '" +
                            pair.ref_a + "'");
  for (const auto &p : detail::mixing_poles_oriented(
           at, pair.ref_a, pair.ref_b, 'A', R, pair.R_vec(R), pair.units, opt))
    if (("+" + p.state_label + "+").find("+" + m_label + "+") !=
        std::string::npos)
      return p;
  throw InputError("'" + m_label + "' does not couple both '" + pair.ref_a +
                   "' and '" + pair.ref_b + "'");
}

inline ShiftBreakdown total_shift(const PairSystem &pair, double R,
                                  const EngineOptions &opt = {}) {
  ShiftBreakdown b = total_direct(pair, R, opt);
  if (!pair.identical)
    return b;
  b.poles_mix = mixing_pole_terms(pair, R, opt);
  b.wick_mix = mixing_wick(pair, R, opt);
  const double dir = b.wick_dir + b.pole_real_dir();
  const double mix = *b.wick_mix + *b.pole_real_mix();
  b.total_plus = dir + mix;
  b.total_minus = dir - mix;
  b.width_total_plus = b.width_dir() + *b.width_mix();
  b.width_total_minus = b.width_dir() - *b.width_mix();
  return b;
}

} // namespace cpvdw
