#pragma once
// Named self-checks shared by the `validate` verb and the acceptance runner.
#include "cpvdw/asymptotic.hpp"
#include "cpvdw/fixtures.hpp"
#include "cpvdw/oracle.hpp"
#include "cpvdw/regimes.hpp"
#include "cpvdw/shift.hpp"
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace cpvdw {

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail{};
};

namespace checks {

inline double rel(cplx a, cplx b) {
  return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

inline CheckResult within(std::string name, double measured, double tol,
                          std::string detail = {}) {
  return {std::move(name), measured <= tol, measured, tol, std::move(detail)};
}

/// |value - target| <= tol
inline CheckResult near(std::string name, double value, double target,
                        double tol, std::string detail = {}) {
  const double d = std::abs(value - target);
  CheckResult r{std::move(name), d <= tol, value, tol, std::move(detail)};
  return r;
}

//==============================================================================
inline CheckResult identity_two_denominators_random() {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> U(0.05, 5.0);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double a = U(rng), b = U(rng);
    worst = std::max(worst, rel(identity_two_denominators_numeric(a, b).value,
                                identity_two_denominators(a, b)));
  }
  return within("identity_two_denominators: 50 random pairs", worst, 1e-8);
}

inline CheckResult identity_wick_denominators_random() {
  std::mt19937_64 rng(20240602);
  std::uniform_real_distribution<double> U(0.05, 5.0);
  std::bernoulli_distribution S(0.5);
  double worst = 0.0;
  int flipped = 0;
  for (int i = 0; i < 50; ++i) {
    const double a = U(rng) * (S(rng) ? -1.0 : 1.0);
    const double b = U(rng) * (S(rng) ? -1.0 : 1.0);
    const double exact = identity_wick_denominators(a, b);
    flipped += (a * b < 0.0) == (exact < 0.0);
    worst = std::max(worst,
                     rel(identity_wick_denominators_numeric(a, b).value, exact));
  }
  auto r = within("identity_wick_denominators: 50 random signed pairs", worst,
                  1e-8);
  if (flipped != 50) {
    r.passed = false;
    r.detail = "sign structure violated";
  }
  return r;
}

inline CheckResult propagator_contraction_random() {
  std::mt19937_64 rng(20240603);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const UnitsSystem u;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double w = 0.05 + 4.95 * U(rng);
    const double wrc = std::pow(10.0, -2.0 + 4.0 * U(rng));
    const double R = wrc * u.c / w;
    Eigen::Vector3d dir(U(rng) - 0.5, U(rng) - 0.5, U(rng) - 0.5);
    const cplx omega = i % 2 ? cplx(w, 0.0) : cplx(0.0, w);
    const auto D = photon_propagator(omega, R * dir.normalized(), u).entries;
    const cplx entrywise = D.cwiseProduct(D).sum();
    worst = std::max(worst,
                     rel(entrywise, propagator_double_contraction(omega, R, u)));
  }
  return within("propagator_double_contraction: 100 random (omega, R)", worst,
                1e-12);
}

/// Retardation parameter of the excited fixture, x = |E_m| R / c.
inline double excited_R(double x) {
  return x * UnitsSystem{}.c / 0.1;
}

inline std::vector<CheckResult> vdw_restoration() {
  const auto pair = fixtures::excited_pair();
  const double c6 = brute_force_vdw(pair);
  auto dev = [&](double x) {
    const double R = excited_R(x);
    return std::abs(total_direct(pair, R).total_plus * std::pow(R, 6) / -c6 -
                    1.0);
  };
  std::vector<double> xs, ds;
  for (int i = 0; i <= 8; ++i) {
    xs.push_back(1e-3 * std::pow(10.0, 0.25 * i));
    ds.push_back(dev(xs.back()));
  }
  const double slope = *fit_loglog_slope(xs, ds);
  return {within("short range: total R^6 vs brute-force C6 at x = 1e-3", ds[0],
                 1e-4),
          near("short range: deviation slope over x in [1e-3, 1e-1]", slope,
               2.0, 0.2)};
}

inline std::vector<CheckResult> sign_flip_lemma() {
  const auto pair = fixtures::excited_pair();
  const double R = excited_R(1e-4);
  const double share = wick_share(pair, "m", R);
  const std::optional<std::string> m("m");
  const double wapprox = asymptotic_shift(pair, Channel::wick, Kind::direct,
                                          Regime::short_range, m, R);
  const double papprox = asymptotic_shift(pair, Channel::pole, Kind::direct,
                                          Regime::short_range, m, R);
  // vdW share of m: -beta beta N M_q/(E_m + E_q)
  const auto lp = locate_pole(pair, Kind::direct, "m");
  const Dyadic be = longitudinal_dyadic(lp.axis);
  double vdw = 0.0;
  for (const auto &q : lp.partner.terms())
    vdw -= contract(be, be, lp.N, q.F) / (lp.E_m + q.E);
  vdw /= std::pow(R, 6);
  auto r1 = within("lower-state Wick share vs sign-flipped form",
                   std::abs(share / wapprox - 1.0), 1e-5);
  auto r2 = within("Wick share + short pole = vdW share",
                   std::abs((wapprox + papprox) / vdw - 1.0), 1e-6);
  const double gap = std::abs(wapprox / vdw - 1.0);
  auto r3 = CheckResult{"Wick share alone differs from the vdW share",
                        gap > 1e-2, gap, 1e-2, "relative gap must be large"};
  return {r1, r2, r3};
}

inline CheckResult casimir_polder_coefficient() {
  const auto pair = fixtures::ground_pair();
  const double c = pair.units.c;
  const double R = 1e3 * c / 0.5;
  const double a0 = static_polarizability(pair.atom_a, pair.ref_a);
  const double target = -(23.0 / (4.0 * std::numbers::pi)) * c * a0 * a0;
  const double got = wick_term_direct(pair, R) * std::pow(R, 7);
  return within("Wick R^7 -> -(23/4pi) c alpha(0)^2 on the ground pair",
                std::abs(got / target - 1.0), 1e-3);
}

inline std::vector<CheckResult> long_range_pole() {
  const auto pair = fixtures::excited_pair();
  const auto lp = locate_pole(pair, Kind::direct, "m");
  const auto k = pole_coefficients(lp.N, lp.T, lp.axis);
  const double c = pair.units.c;
  auto envelope = [&](double R) {
    return std::pow(lp.E_m / c, 4) * std::abs(k.aa) / (R * R);
  };
  const double R50 = 50.0 * c / std::abs(lp.E_m);
  const double ratio =
      std::abs(pole_Q_closed(k, lp.E_m * R50 / c, R50)) / envelope(R50);
  // maxima of |P| sit where sin 2x = 0
  std::vector<double> Rs, Ps;
  for (int j = 0; j < 12; ++j) {
    const double x = 50.0 * std::pow(100.0, j / 11.0);
    const double xk = std::round(2.0 * x / std::numbers::pi) *
                      std::numbers::pi / 2.0;
    const double R = xk * c / std::abs(lp.E_m);
    Rs.push_back(R);
    Ps.push_back(std::abs(pole_P_form(k, lp.E_m * R / c, R).value()));
  }
  const double slope = *fit_loglog_slope(Rs, Ps);
  return {within("long-range pole: |Q| / asymptotic envelope at x = 50",
                 std::abs(ratio - 1.0), 1e-3),
          near("long-range pole: envelope slope through maxima", slope, -2.0,
               0.05)};
}

inline CheckResult width_substitution_random() {
  std::mt19937_64 rng(20240604);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const auto ex = fixtures::excited_pair();
  const auto id = fixtures::identical_pair();
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double x = std::pow(10.0, -3.0 + 5.0 * U(rng));
    const bool mix = i % 2;
    const auto &pair = mix ? id : ex;
    const auto lp = locate_pole(pair, mix ? Kind::mix : Kind::direct, "m");
    const double R = x * pair.units.c / std::abs(lp.E_m);
    const auto k = pole_coefficients(lp.N, lp.T, lp.axis);
    const double xe = lp.E_m * R / pair.units.c;
    const auto P = pole_P_form(k, xe, R);
    const double G = pole_Gamma_closed(k, xe, R);
    const double G2 = P.width_substitution().value();
    const double scale =
        2.0 * std::abs(P.scale) * (std::abs(P.cos_coef) + std::abs(P.sin_coef));
    worst = std::max(worst, std::abs(G - G2) / scale);
  }
  return within("width = transformed pole real part (20 random cases)", worst,
                1e-14);
}

inline CheckResult crossover_slope() {
  const auto pair = fixtures::excited_pair();
  std::vector<double> grid;
  const double R0 = 50.0 * pair.units.c / 0.1;
  for (int i = 0; i < 12; ++i)
    grid.push_back(R0 * std::pow(100.0, i / 11.0));
  const auto rep = crossover_report(pair, grid);
  return near("crossover: log-log slope of envelope/|W| in the CP range",
              rep.fitted_slope.value_or(0.0), 5.0, 0.1);
}

inline std::vector<CheckResult> oracle_decomposition() {
  const auto pair = fixtures::excited_pair();
  std::vector<CheckResult> out;
  for (double R : {50.0, 500.0}) {
    const cplx engine = total_direct(pair, R).direct_complex();
    const cplx oracle = contour_shift_direct(pair, R).value;
    out.push_back(within("contour oracle = W + sum P - (i/2) sum Gamma at R = " +
                             std::to_string(int(R)),
                         rel(engine, oracle), 1e-4));
  }
  return out;
}

inline std::vector<CheckResult> prescription_evenness() {
  std::mt19937_64 rng(20240605);
  std::uniform_real_distribution<double> U(0.05, 2.0);
  const std::vector<std::pair<AtomModel, std::string>> atoms = {
      {fixtures::two_level_isotropic(), "g"},
      {fixtures::three_level(), "n"},
      {fixtures::four_level(), "n"},
      {fixtures::four_level(), "g"}};
  double worst = 0.0;
  bool feynman_even = true, retarded_odd = false;
  for (const auto &[at, ref] : atoms)
    for (int i = 0; i < 10; ++i) {
      const cplx w = i % 2 ? cplx(U(rng), 0.0) : cplx(0.0, U(rng));
      const auto s = direct_spectrum(at, ref);
      const auto f = make_tensor(s, w, Prescription::feynman);
      const auto fr = reflected(s, w, Prescription::feynman);
      const double scale = f.entries.cwiseAbs().maxCoeff();
      worst = std::max(worst,
                       (f.entries - fr.entries).cwiseAbs().maxCoeff() / scale);
      feynman_even = feynman_even && same_response(f, fr, 1e-14);
      retarded_odd =
          retarded_odd || !same_response(make_tensor(s, w, Prescription::retarded),
                                         reflected(s, w, Prescription::retarded),
                                         1e-14);
    }
  auto r1 = within("feynman polarizability even in omega", worst, 1e-14);
  r1.passed = r1.passed && feynman_even;
  CheckResult r2{"retarded polarizability not even in omega", retarded_odd,
                 retarded_odd ? 1.0 : 0.0, 0.0,
                 "pole displacement sides differ under omega -> -omega"};
  return {r1, r2};
}

inline std::vector<CheckResult> mixing_collapse() {
  std::vector<CheckResult> out;
  double worst = 0.0;
  bool structural = true;
  for (const char *ref : {"g", "n"}) {
    PairSystem p = fixtures::identical_pair();
    p.ref_a = p.ref_b = ref;
    const auto &at = p.atom_a;
    for (double R : {5.0, 500.0, 5e4}) {
      worst = std::max(worst, rel(mixing_wick(p, R), wick_term_direct(p, R)));
      worst = std::max(worst, rel(asymptotic_shift(p, Channel::wick, Kind::mix,
                                                   Regime::long_range, {}, R),
                                  asymptotic_shift(p, Channel::wick,
                                                   Kind::direct,
                                                   Regime::long_range, {}, R)));
    }
    for (double w : {0.0, 0.23, 0.7})
      for (Anchor an : {Anchor::a_side, Anchor::b_side}) {
        const auto m = mixed_polarizability(p, an, w).entries;
        const auto d =
            polarizability_tensor(at, ref, w, Prescription::feynman).entries;
        worst = std::max(worst, (m - d).cwiseAbs().maxCoeff() /
                                    d.cwiseAbs().maxCoeff());
      }
    structural = structural &&
                 mixed_spectrum(at, ref, ref, Anchor::a_side) ==
                     direct_spectrum(at, ref) &&
                 mixed_spectrum(at, ref, ref, Anchor::b_side) ==
                     direct_spectrum(at, ref);
    // identical atoms in the same excited state resonate; both paths must
    // report the same colliding levels
    std::vector<std::string> ed, em;
    try {
      pole_terms_direct(p, 100.0);
    } catch (const ResonanceError &e) {
      ed = e.labels();
    }
    try {
      mixing_pole_terms(p, 100.0);
    } catch (const ResonanceError &e) {
      em = e.labels();
    }
    structural = structural && ed == em;
    if (std::string(ref) == "g") {
      worst = std::max(worst, rel(vdw_limit_mixing(p), vdw_limit(p)));
      worst = std::max(worst,
                       rel(brute_force_vdw_mixing(p), brute_force_vdw(p)));
      structural = structural && mixing_pole_terms(p, 100.0).empty() &&
                   pole_terms_direct(p, 100.0).empty();
    }
  }
  // a pole-carrying collapse: the excited atom against a distinct copy
  {
    PairSystem p = fixtures::identical_pair();
    p.ref_a = p.ref_b = "n";
    const auto sa = direct_spectrum(p.atom_a, "n", 1e-12);
    const auto sm = detail::merge_degenerate(
        mixed_spectrum(p.atom_a, "n", "n", Anchor::a_side), 1e-12);
    structural = structural && sa == sm;
  }
  auto r = within("mixing operations collapse to direct ones for psi_A = psi_B",
                  worst, 1e-12);
  r.passed = r.passed && structural;
  if (!structural)
    r.detail = "structural collapse failed";
  out.push_back(r);
  return out;
}

} // namespace checks

/// All library-level checks in a fixed order.
inline std::vector<CheckResult> run_library_checks() {
  using namespace checks;
  std::vector<CheckResult> out;
  auto add = [&](std::vector<CheckResult> v) {
    out.insert(out.end(), v.begin(), v.end());
  };
  out.push_back(near("identity_two_denominators(1,1) = 2 pi i",
                     identity_two_denominators(1, 1).imag(),
                     2.0 * std::numbers::pi, 1e-15));
  out.push_back(identity_two_denominators_random());
  out.push_back(identity_wick_denominators_random());
  out.push_back(propagator_contraction_random());
  add(vdw_restoration());
  add(sign_flip_lemma());
  out.push_back(casimir_polder_coefficient());
  add(long_range_pole());
  out.push_back(width_substitution_random());
  out.push_back(crossover_slope());
  add(oracle_decomposition());
  add(prescription_evenness());
  add(mixing_collapse());
  return out;
}

} // namespace cpvdw
