#pragma once
#include "cpvdw/quadrature.hpp"
#include "cpvdw/shift.hpp"
#include <cmath>
#include <numbers>
#include <optional>
#include <string>

namespace cpvdw {

namespace detail {

inline double vdw_sum(const SpectralSum &a, bool a_backward,
                      const SpectralSum &b, const Eigen::Vector3d &axis,
                      double tol) {
  const Dyadic be = longitudinal_dyadic(axis);
  double s = 0.0;
  for (const auto &v : a.terms())
    for (const auto &q : b.terms()) {
      const double den = v.E + q.E;
      if (std::abs(den) <= tol)
        throw ResonanceError("vanishing denominator between '" + v.label +
                                 "' and '" + q.label + "'",
                             {v.label, q.label});
      s += contract(be, be, a_backward ? v.B : v.F, q.F) / den;
    }
  return s;
}

} // namespace detail

/// C6 with Delta E -> -C6/R^6, lower states included with their physical
/// denominators.
inline double vdw_limit(const PairSystem &pair, const EngineOptions &opt = {}) {
  pair.validate();
  return detail::vdw_sum(direct_spectrum(pair.atom_a, pair.ref_a), false,
                         direct_spectrum(pair.atom_b, pair.ref_b), pair.axis,
                         opt.resonance_tol);
}

/// Exchange analogue: Delta E_mix -> -C6_mix/R^6.
inline double vdw_limit_mixing(const PairSystem &pair,
                               const EngineOptions &opt = {}) {
  detail::require_identical(pair);
  const auto &at = pair.atom_a;
  return detail::vdw_sum(
      mixed_spectrum(at, pair.ref_a, pair.ref_b, Anchor::a_side), true,
      mixed_spectrum(at, pair.ref_a, pair.ref_b, Anchor::b_side), pair.axis,
      opt.resonance_tol);
}

/// C7 with W -> -C7/R^7 from the static responses.
inline double c7_from_static(const Eigen::Matrix3d &a0,
                             const Eigen::Matrix3d &b0,
                             const Eigen::Vector3d &axis,
                             const UnitsSystem &units) {
  const auto k = pole_coefficients(a0, b0, axis);
  return units.c / (8.0 * std::numbers::pi) *
         (3.0 * k.aa + 2.5 * k.cross() + 5.0 * k.bb);
}

inline double casimir_polder_c7(const PairSystem &pair) {
  pair.validate();
  return c7_from_static(direct_spectrum(pair.atom_a, pair.ref_a)(0.0).real(),
                        direct_spectrum(pair.atom_b, pair.ref_b)(0.0).real(),
                        pair.axis, pair.units);
}

inline double casimir_polder_c7_mixing(const PairSystem &pair) {
  detail::require_identical(pair);
  const auto &at = pair.atom_a;
  return c7_from_static(
      mixed_spectrum(at, pair.ref_a, pair.ref_b, Anchor::a_side)(0.0).real(),
      mixed_spectrum(at, pair.ref_a, pair.ref_b, Anchor::b_side)(0.0).real(),
      pair.axis, pair.units);
}

//==============================================================================
enum class Channel { wick, pole, width };
enum class Kind { direct, mix };
enum class Regime { short_range, long_range };

/// A lower pole located for the closed asymptotic forms.
struct LocatedPole {
  std::string label;
  double E_m;
  Eigen::Matrix3d N;        // numerator dyadic of the pole
  Eigen::Matrix3d T;        // partner response at -E_m
  SpectralSum partner;      // partner response, term by term
  Eigen::Vector3d axis;     // oriented from the pole's atom
};

/// Label "m" or "A:m" selects atom A, "B:m" atom B.
inline LocatedPole locate_pole(const PairSystem &pair, Kind kind,
                               const std::string &label,
                               const EngineOptions &opt = {}) {
  pair.validate();
  if (kind == Kind::mix)
    detail::require_identical(pair);
  std::string name = label;
  bool bside = false;
  if (name.rfind("A:", 0) == 0)
    name = name.substr(2);
  else if (name.rfind("B:", 0) == 0) {
    name = name.substr(2);
    bside = true;
  }
  const auto &own = bside ? pair.atom_b : pair.atom_a;
  const auto &oref = bside ? pair.ref_b : pair.ref_a;
  const auto &other = bside ? pair.atom_a : pair.atom_b;
  const auto &pref = bside ? pair.ref_a : pair.ref_b;
  SpectralSum src, partner;
  if (kind == Kind::direct) {
    src = direct_spectrum(own, oref, opt.degeneracy_tol);
    partner = direct_spectrum(other, pref);
  } else {
    src = detail::merge_degenerate(
        mixed_spectrum(own, oref, pref, Anchor::a_side), opt.degeneracy_tol);
    partner = mixed_spectrum(own, oref, pref, Anchor::b_side);
  }
  for (const auto &t : src.terms())
    if (("+" + t.label + "+").find("+" + name + "+") != std::string::npos) {
      if (!(t.E < 0.0))
        throw InputError("'" + label + "' is not a lower state");
      detail::check_resonance(partner, -t.E, t.label, opt.resonance_tol);
      const Eigen::Vector3d ax =
          bside ? Eigen::Vector3d(-pair.axis.normalized())
                : Eigen::Vector3d(pair.axis.normalized());
      return {t.label, t.E, t.B, partner(-t.E).real(), partner, ax};
    }
  throw InputError("no lower state '" + label + "'");
}

/// Closed asymptotic forms, one per valid selector.
inline double asymptotic_shift(const PairSystem &pair, Channel channel,
                               Kind kind, Regime regime,
                               const std::optional<std::string> &m_label,
                               double R, const EngineOptions &opt = {}) {
  detail::check_R(R);
  const double c = pair.units.c;
  if (channel == Channel::wick && regime == Regime::long_range) {
    const double c7 = kind == Kind::direct ? casimir_polder_c7(pair)
                                           : casimir_polder_c7_mixing(pair);
    return -c7 / std::pow(R, 7);
  }
  const bool valid =
      (channel == Channel::wick && kind == Kind::direct) ||
      (channel == Channel::width) ||
      (channel == Channel::pole &&
       (kind == Kind::mix ? regime == Regime::long_range : true));
  if (!valid)
    throw InputError("no closed asymptotic form for this selector");
  if (!m_label)
    throw InputError("this selector needs a lower state label");
  const auto lp = locate_pole(pair, kind, *m_label, opt);
  const auto k = pole_coefficients(lp.N, lp.T, lp.axis);
  const double x = lp.E_m * R / c;
  const double em4 = std::pow(lp.E_m / c, 4);

  if (channel == Channel::wick) {
    // lower-state share at short range: sign-flipped denominators
    const Dyadic be = longitudinal_dyadic(lp.axis);
    double s = 0.0;
    for (const auto &q : lp.partner.terms())
      s += contract(be, be, lp.N, q.F) *
           identity_wick_denominators(lp.E_m, q.E);
    return -s / (4.0 * std::numbers::pi * std::pow(R, 6));
  }
  if (channel == Channel::pole) {
    if (regime == Regime::short_range)
      return -k.bb / std::pow(R, 6);
    return -em4 * std::cos(2.0 * x) * k.aa / (R * R);
  }
  if (regime == Regime::short_range)
    return -4.0 / 3.0 * std::pow(lp.E_m / c, 3) / std::pow(R, 3) *
           (k.bb - 1.5 * k.cross());
  return -2.0 * em4 * std::sin(2.0 * x) * k.aa / (R * R);
}

} // namespace cpvdw
