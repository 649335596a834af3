#include "cpvdw/asymptotic.hpp"
#include "cpvdw/fixtures.hpp"
#include "cpvdw/oracle.hpp"
#include "cpvdw/shift.hpp"
#include <gtest/gtest.h>
#include <numbers>
#include <random>

using namespace cpvdw;
using std::numbers::pi;

namespace {
const double c = UnitsSystem{}.c;

double rel(double a, double b) { return std::abs(a / b - 1.0); }

PairSystem with_b(PairSystem p, AtomModel b) {
  p.atom_b = std::move(b);
  return p;
}
} // namespace

//==============================================================================
TEST(Wick, GroundPairShortRangeIsMinusSixOverR6) {
  const auto p = fixtures::ground_pair();
  const double R = 1e-3 * c / 0.5;
  EXPECT_LE(rel(wick_term_direct(p, R) * std::pow(R, 6), -6.0), 1e-4);
  EXPECT_DOUBLE_EQ(brute_force_vdw(p), 6.0);
}

TEST(Wick, GroundPairLongRangeCasimirPolder) {
  const auto p = fixtures::ground_pair();
  const double R = 1e3 * c / 0.5;
  const double target = -(23.0 / (4.0 * pi)) * c * 16.0;
  EXPECT_LE(rel(wick_term_direct(p, R) * std::pow(R, 7), target), 1e-3);
}

TEST(Wick, ShortRangeDeviationShrinksAsRSquared) {
  const auto p = fixtures::ground_pair();
  std::vector<double> xs, ds;
  for (double x : {1e-3, 1e-2, 1e-1}) {
    const double R = x * c / 0.5;
    xs.push_back(x);
    ds.push_back(rel(wick_term_direct(p, R) * std::pow(R, 6), -6.0));
  }
  const double slope = std::log(ds[2] / ds[0]) / std::log(xs[2] / xs[0]);
  EXPECT_NEAR(slope, 2.0, 0.2);
}

TEST(Wick, VanishesWithoutDipolesOnB) {
  const AtomModel dark({{"g", 0.0}, {"e", 0.5}}, {});
  const auto p = with_b(fixtures::ground_pair(), dark);
  for (double R : {1.0, 100.0, 1e5})
    EXPECT_EQ(wick_term_direct(p, R), 0.0);
}

TEST(Wick, QuarticInDipoles) {
  auto p = fixtures::excited_pair();
  const double R = 37.0;
  const double w1 = wick_term_direct(p, R);
  p.atom_a = p.atom_a.scaled_dipoles(2.0);
  p.atom_b = p.atom_b.scaled_dipoles(2.0);
  EXPECT_LE(rel(wick_term_direct(p, R), 16.0 * w1), 1e-12);
}

TEST(Wick, SymmetricUnderRoleExchange) {
  for (const auto &p : {fixtures::excited_pair(), fixtures::ground_pair()})
    for (double R : {3.0, 300.0, 3e4})
      EXPECT_LE(rel(wick_term_direct(p.swapped(), R), wick_term_direct(p, R)),
                1e-12);
}

TEST(Wick, ScalarFormMatchesTensorFormOnIsotropicPairs) {
  auto p = fixtures::ground_pair();
  p.atom_b = fixtures::two_level_isotropic(0.31, 1.7);
  for (double R : {2.0, 200.0, 2e4})
    EXPECT_LE(rel(wick_term_sstate(p, R), wick_term_direct(p, R)), 1e-10);
  EXPECT_THROW(wick_term_sstate(fixtures::excited_pair(), 10.0),
               PreconditionError);
}

TEST(Wick, RejectsBadSeparation) {
  const auto p = fixtures::ground_pair();
  EXPECT_THROW(wick_term_direct(p, 0.0), InputError);
  EXPECT_THROW(wick_term_direct(p, -1.0), InputError);
  EXPECT_THROW(wick_term_direct(p, std::numeric_limits<double>::infinity()),
               InputError);
}

//==============================================================================
TEST(Pole, GroundPairHasNoPoles) {
  EXPECT_TRUE(pole_terms_direct(fixtures::ground_pair(), 10.0).empty());
  const auto b = total_direct(fixtures::ground_pair(), 10.0);
  EXPECT_TRUE(b.poles_dir.empty());
  EXPECT_EQ(b.width_dir(), 0.0);
}

TEST(Pole, ComplexResidueSplitsIntoShiftAndWidth) {
  const auto p = fixtures::excited_pair();
  for (double R : {5.0, 500.0, 5e4}) {
    const auto q = pole_term_direct(p, "m", R);
    EXPECT_EQ(q.atom, 'A');
    EXPECT_DOUBLE_EQ(q.E_m, -0.1);
    EXPECT_LE(std::abs(q.P - q.Q.real()), 1e-12 * std::abs(q.Q));
    EXPECT_LE(std::abs(q.Gamma + 2.0 * q.Q.imag()), 1e-12 * std::abs(q.Q));
  }
}

TEST(Pole, ShortRangeMatchesBothDenominatorSum) {
  const auto p = fixtures::excited_pair();
  const double R = 1e-4 * c / 0.1;
  const auto q = pole_term_direct(p, "m", R);
  const Dyadic be = longitudinal_dyadic(p.axis);
  const Eigen::Matrix3d N = p.atom_a.dipole("n", "m") *
                            p.atom_a.dipole("n", "m").transpose();
  double s = 0.0;
  for (const auto &v : virtual_states(p.atom_b, p.ref_b))
    for (double sign : {1.0, -1.0})
      s += contract(be, be, N, v.dyadic()) / (sign * -0.1 + v.E);
  EXPECT_LE(rel(q.P, -s / std::pow(R, 6)), 1e-6);
}

TEST(Pole, WidthFollowsFromShiftBySubstitution) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> U(-3.0, 2.0);
  const auto p = fixtures::excited_pair();
  const auto lp = locate_pole(p, Kind::direct, "m");
  const auto k = pole_coefficients(lp.N, lp.T, lp.axis);
  for (int i = 0; i < 20; ++i) {
    const double x = -std::pow(10.0, U(rng));
    const double R = -x * c / 0.1;
    const auto P = pole_P_form(k, x, R);
    const double scale =
        2.0 * std::abs(P.scale) * (std::abs(P.cos_coef) + std::abs(P.sin_coef));
    EXPECT_LE(std::abs(pole_Gamma_closed(k, x, R) -
                       P.width_substitution().value()),
              1e-14 * scale);
  }
}

TEST(Pole, LongRangeDominatesWickAtEnvelopeMaxima) {
  const auto p = fixtures::excited_pair();
  for (double x : {11.0, 40.0, 300.0}) {
    const double xk = std::round(2.0 * x / pi) * pi / 2.0;
    const double R = xk * c / 0.1;
    const auto q = pole_term_direct(p, "m", R);
    EXPECT_GT(std::abs(q.P), std::abs(wick_term_direct(p, R))) << "x = " << xk;
  }
}

TEST(Pole, ResonanceNamesBothLevels) {
  // B has a transition at exactly |E_m| = 0.1
  const AtomModel b({{"g", 0.0}, {"e", 0.1}}, {{"g", "e", {0, 0, 1}}});
  const auto p = with_b(fixtures::excited_pair(), b);
  try {
    pole_terms_direct(p, 10.0);
    FAIL() << "expected ResonanceError";
  } catch (const ResonanceError &e) {
    EXPECT_EQ(e.labels(), (std::vector<std::string>{"m", "e"}));
  }
}

TEST(Pole, UnknownOrUpperStateIsRejected) {
  const auto p = fixtures::excited_pair();
  EXPECT_THROW(pole_term_direct(p, "zz", 10.0), InputError);
  EXPECT_THROW(pole_term_direct(p, "v", 10.0), PreconditionError);
}

TEST(Pole, LowerStateOfAtomBIsCountedOnce) {
  const auto p = fixtures::excited_pair();
  const auto s = p.swapped();
  for (double R : {7.0, 700.0}) {
    const auto a = pole_terms_direct(p, R);
    const auto b = pole_terms_direct(s, R);
    ASSERT_EQ(a.size(), 1u);
    ASSERT_EQ(b.size(), 1u);
    EXPECT_EQ(b[0].atom, 'B');
    EXPECT_LE(std::abs(a[0].Q - b[0].Q), 1e-14 * std::abs(a[0].Q));
  }
}

TEST(Pole, DegenerateLowerLevelsShareOneResidue) {
  // two lower sublevels at the same energy with orthogonal dipoles
  const AtomModel a({{"n", 0.0}, {"m1", -0.1}, {"m2", -0.1}, {"v", 0.4}},
                    {{"n", "m1", {1, 0, 0}},
                     {"n", "m2", {0, 1, 0}},
                     {"n", "v", {0, 0, 1}}});
  PairSystem p = fixtures::excited_pair();
  p.atom_a = a;
  const auto poles = pole_terms_direct(p, 50.0);
  ASSERT_EQ(poles.size(), 1u);
  EXPECT_EQ(poles[0].state_label, "m1+m2");
  const double sum = pole_term_direct(p, "m1", 50.0).P;
  EXPECT_EQ(sum, poles[0].P);
}

//==============================================================================
TEST(TotalDirect, RestoresVdwLimitAtShortRange) {
  const auto p = fixtures::excited_pair();
  const double c6 = brute_force_vdw(p);
  EXPECT_LE(rel(c6, vdw_limit(p)), 1e-12);
  const double R = 1e-2 * c / 0.1;
  const auto b = total_direct(p, R);
  EXPECT_LE(rel(b.total_plus * std::pow(R, 6), -c6), 5e-3);
  // the Wick term alone misses the lower-state sign flip
  EXPECT_GT(rel(b.wick_dir * std::pow(R, 6), -c6), 0.1);
}

TEST(TotalDirect, WidthsStayOutOfTotals) {
  const auto b = total_direct(fixtures::excited_pair(), 1234.0);
  EXPECT_EQ(b.total_plus, b.wick_dir + b.pole_real_dir());
  EXPECT_EQ(b.total_minus, b.total_plus);
  EXPECT_EQ(b.width_total_plus, b.width_dir());
  EXPECT_NE(b.width_dir(), 0.0);
  EXPECT_LE(std::abs(b.direct_complex() -
                     cplx(b.total_plus, -0.5 * b.width_dir())),
            1e-14 * std::abs(b.direct_complex()));
}

TEST(TotalShift, NonIdenticalPairHasNoMixing) {
  const auto p = fixtures::excited_pair();
  const auto b = total_shift(p, 80.0);
  EXPECT_FALSE(b.wick_mix.has_value());
  EXPECT_FALSE(b.poles_mix.has_value());
  EXPECT_FALSE(b.pole_real_mix().has_value());
  EXPECT_EQ(b.total_plus, b.total_minus);
  EXPECT_EQ(b.total_plus, total_direct(p, 80.0).total_plus);
}

TEST(TotalShift, IdenticalPairSplitsSymmetricAndAntisymmetric) {
  const auto p = fixtures::identical_pair();
  const auto b = total_shift(p, 80.0);
  ASSERT_TRUE(b.wick_mix && b.poles_mix);
  const double dir = b.wick_dir + b.pole_real_dir();
  const double mix = *b.wick_mix + *b.pole_real_mix();
  EXPECT_EQ(b.total_plus, dir + mix);
  EXPECT_EQ(b.total_minus, dir - mix);
  EXPECT_EQ(b.width_total_plus, b.width_dir() + *b.width_mix());
  EXPECT_EQ(b.width_total_minus, b.width_dir() - *b.width_mix());
}

//==============================================================================
TEST(Mixing, RequiresIdenticalAtoms) {
  const auto p = fixtures::excited_pair();
  EXPECT_THROW(mixing_wick(p, 10.0), PreconditionError);
  EXPECT_THROW(mixing_pole_terms(p, 10.0), PreconditionError);
  EXPECT_THROW(vdw_limit_mixing(p), PreconditionError);
}

TEST(Mixing, CollapsesForEqualGroundStates) {
  PairSystem p = fixtures::identical_pair();
  p.ref_b = "g";
  p.ref_a = "g";
  for (double R : {4.0, 400.0, 4e4})
    EXPECT_LE(rel(mixing_wick(p, R), wick_term_direct(p, R)), 1e-12);
  EXPECT_TRUE(mixing_pole_terms(p, 40.0).empty());
}

TEST(Mixing, ShortRangeMatchesExchangePerturbationTheory) {
  const auto p = fixtures::identical_pair();
  const double c6 = brute_force_vdw_mixing(p);
  EXPECT_LE(rel(vdw_limit_mixing(p), c6), 1e-12);
  const double R = 1e-3 * c / 0.1;
  const double mix =
      mixing_wick(p, R) + ShiftBreakdown::sum_P(mixing_pole_terms(p, R));
  EXPECT_LE(rel(mix * std::pow(R, 6), -c6), 1e-4);
}

TEST(Mixing, LongRangeWickMatchesStaticExchangeCoefficient) {
  const auto p = fixtures::identical_pair();
  const double R = 2e3 * c / 0.1;
  EXPECT_LE(rel(mixing_wick(p, R),
                asymptotic_shift(p, Channel::wick, Kind::mix,
                                 Regime::long_range, {}, R)),
            1e-3);
}

TEST(Mixing, VanishesWithoutCrossDipoles) {
  const AtomModel at({{"g", -0.5}, {"n", 0.0}, {"a", 0.3}, {"b", 0.6}},
                     {{"g", "a", {1, 0, 0}}, {"n", "b", {0, 1, 0}}});
  const PairSystem p{at, at, "n", "g", true, {}};
  EXPECT_EQ(mixing_wick(p, 30.0), 0.0);
  EXPECT_TRUE(mixing_pole_terms(p, 30.0).empty());
}

TEST(Mixing, PoleCarriesPrintedPairingDeviation) {
  const auto p = fixtures::identical_pair();
  const auto m = mixing_pole(p, "m", 300.0);
  ASSERT_TRUE(m.printed_form_deviation.has_value());
  EXPECT_TRUE(std::isfinite(*m.printed_form_deviation));
  EXPECT_LE(std::abs(m.P - m.Q.real()), 1e-12 * std::abs(m.Q));
  EXPECT_THROW(mixing_pole(p, "v", 300.0), PreconditionError);
}
