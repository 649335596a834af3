#include "cpvdw/fixtures.hpp"
#include "cpvdw/polarizability.hpp"
#include <gtest/gtest.h>
#include <numbers>
#include <random>

using namespace cpvdw;

namespace {
const AtomModel no_dipoles({{"g", 0.0}, {"e", 0.5}}, {});
const AtomModel z_only({{"g", 0.0}, {"e", 0.5}}, {{"g", "e", {0, 0, 1}}});

std::vector<std::pair<AtomModel, std::string>> all_fixtures() {
  return {{fixtures::two_level_isotropic(), "g"},
          {fixtures::three_level(), "n"},
          {fixtures::four_level(), "n"},
          {fixtures::four_level(), "g"}};
}
} // namespace

TEST(Prescription, RoundTripsThroughText) {
  for (auto p : {Prescription::feynman, Prescription::retarded})
    EXPECT_EQ(parse_prescription(to_string(p)), p);
  EXPECT_THROW(parse_prescription("advanced"), InputError);
}

TEST(Polarizability, StaticTwoLevelIsFourTimesIdentity) {
  const auto a = polarizability_tensor(fixtures::two_level_isotropic(), "g",
                                       0.0, Prescription::feynman);
  EXPECT_LE((a.entries - 4.0 * Matrix3c::Identity()).cwiseAbs().maxCoeff(),
            1e-15);
}

TEST(Polarizability, NoDipolesGivesZero) {
  for (cplx w : {cplx(0.3, 0), cplx(0, 2.0)})
    EXPECT_TRUE(polarizability_tensor(no_dipoles, "g", w, Prescription::feynman)
                    .entries.isZero(0.0));
  EXPECT_EQ(static_polarizability(no_dipoles, "g"), 0.0);
}

TEST(Polarizability, EvaluationOnAPoleNamesTheLevel) {
  try {
    polarizability_tensor(fixtures::three_level(), "n", 0.4,
                          Prescription::feynman);
    FAIL() << "expected DomainError";
  } catch (const DomainError &e) {
    EXPECT_EQ(e.label(), "v");
  }
}

TEST(Polarizability, PoleBookkeepingPerPrescription) {
  const auto s = direct_spectrum(fixtures::three_level(), "n");
  const auto f = s.poles(Prescription::feynman);
  const auto r = s.poles(Prescription::retarded);
  // F terms sit at +E below the axis, B terms at -E above it
  const std::vector<PoleSite> expect = {
      {-0.4, true}, {-0.1, false}, {0.1, true}, {0.4, false}};
  EXPECT_EQ(f, expect);
  ASSERT_EQ(r.size(), 4u);
  for (const auto &p : r)
    EXPECT_FALSE(p.upper);
}

TEST(Polarizability, FeynmanIsEvenRetardedIsNot) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> U(0.05, 2.0);
  bool retarded_differs = false;
  for (const auto &[at, ref] : all_fixtures()) {
    const auto s = direct_spectrum(at, ref);
    for (int i = 0; i < 10; ++i) {
      const cplx w = i % 2 ? cplx(U(rng), 0) : cplx(0, U(rng));
      const auto f = make_tensor(s, w, Prescription::feynman);
      const auto fr = reflected(s, w, Prescription::feynman);
      EXPECT_TRUE(same_response(f, fr, 1e-14));
      retarded_differs =
          retarded_differs ||
          !same_response(make_tensor(s, w, Prescription::retarded),
                         reflected(s, w, Prescription::retarded), 1e-14);
    }
  }
  EXPECT_TRUE(retarded_differs);
}

TEST(Polarizability, RegularizedValuesShowTheRetardedAsymmetry) {
  const auto s = direct_spectrum(fixtures::two_level_isotropic(), "g");
  const double eps = 1e-3, w = 0.3;
  const Matrix3c f1 = s.regularized(w, eps, Prescription::feynman);
  const Matrix3c f2 = s.regularized(-w, eps, Prescription::feynman);
  EXPECT_LE((f1 - f2).cwiseAbs().maxCoeff(), 1e-14);
  const Matrix3c r1 = s.regularized(w, eps, Prescription::retarded);
  const Matrix3c r2 = s.regularized(-w, eps, Prescription::retarded);
  EXPECT_GT((r1 - r2).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LE((r1 - r2.conjugate()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Polarizability, RealSymmetricOnImaginaryAxis) {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> U(0.01, 5.0);
  for (const auto &[at, ref] : all_fixtures())
    for (auto p : {Prescription::feynman, Prescription::retarded})
      for (int i = 0; i < 5; ++i) {
        const auto a = polarizability_tensor(at, ref, cplx(0, U(rng)), p);
        EXPECT_EQ(a.entries.imag().cwiseAbs().maxCoeff(), 0.0);
        EXPECT_LE((a.entries - a.entries.transpose()).cwiseAbs().maxCoeff(),
                  1e-15);
      }
}

TEST(Polarizability, ZeroDipoleLevelChangesNothing) {
  const auto at = fixtures::three_level();
  auto levels = at.levels();
  levels.push_back({"dark", 0.77});
  const AtomModel ext(levels, at.dipoles());
  for (cplx w : {cplx(0.23, 0), cplx(0, 0.9)})
    EXPECT_EQ(polarizability_tensor(at, "n", w, Prescription::feynman).entries,
              polarizability_tensor(ext, "n", w, Prescription::feynman).entries);
}

TEST(ScalarPolarizability, TwoLevelValues) {
  const auto at = fixtures::two_level_isotropic();
  EXPECT_NEAR(scalar_polarizability(at, "g", 0.0).real(), 4.0, 1e-15);
  EXPECT_NEAR(static_polarizability(at, "g"), 4.0, 1e-15);
  // 2 d^2 E / (E^2 - w^2) at w = 0.2
  EXPECT_NEAR(scalar_polarizability(at, "g", 0.2).real(),
              2.0 * 0.5 / (0.25 - 0.04), 1e-14);
}

TEST(ScalarPolarizability, ReproducesIsotropicTensor) {
  const auto at = fixtures::two_level_isotropic(0.37, 1.3);
  for (cplx w : {cplx(0.1, 0), cplx(0, 0.8)}) {
    const auto t = polarizability_tensor(at, "g", w, Prescription::feynman);
    const cplx s = scalar_polarizability(at, "g", w);
    EXPECT_LE((t.entries - s * Matrix3c::Identity()).cwiseAbs().maxCoeff(),
              1e-12 * std::abs(s));
  }
}

TEST(ScalarPolarizability, AnisotropicIsPreconditionError) {
  EXPECT_THROW(scalar_polarizability(z_only, "g", 0.1), PreconditionError);
  EXPECT_THROW(static_polarizability(fixtures::three_level(), "n"),
               PreconditionError);
}

TEST(MixedPolarizability, CollapsesForEqualStates) {
  const auto at = fixtures::four_level();
  for (const char *ref : {"g", "n"})
    for (Anchor an : {Anchor::a_side, Anchor::b_side}) {
      EXPECT_TRUE(mixed_spectrum(at, ref, ref, an) == direct_spectrum(at, ref));
      for (cplx w : {cplx(0.0), cplx(0.23), cplx(0, 1.1)})
        EXPECT_EQ(mixed_polarizability(at, ref, ref, an, w).entries,
                  polarizability_tensor(at, ref, w, Prescription::feynman)
                      .entries);
    }
}

TEST(MixedPolarizability, ZeroCrossDipolesGiveZero) {
  // n and g couple to disjoint levels
  const AtomModel at({{"g", -0.5}, {"n", 0.0}, {"a", 0.3}, {"b", 0.6}},
                     {{"g", "a", {1, 0, 0}}, {"n", "b", {0, 1, 0}}});
  EXPECT_TRUE(mixed_spectrum(at, "n", "g", Anchor::a_side).terms().empty());
  EXPECT_TRUE(
      mixed_polarizability(at, "n", "g", Anchor::a_side, 0.1).entries.isZero(0.0));
}

TEST(MixedPolarizability, NumeratorIsCrossDyadicWithTransposedBackwardTerm) {
  const auto at = fixtures::four_level();
  const auto s = mixed_spectrum(at, "n", "g", Anchor::a_side);
  ASSERT_EQ(s.terms().size(), 2u);
  for (const auto &t : s.terms()) {
    const Eigen::Matrix3d F =
        at.dipole("n", t.label) * at.dipole(t.label, "g").transpose();
    EXPECT_EQ(t.F, F);
    EXPECT_EQ(t.B, F.transpose());
    EXPECT_DOUBLE_EQ(t.E, at.level(t.label).energy - at.level("n").energy);
  }
  const auto sb = mixed_spectrum(at, "n", "g", Anchor::b_side);
  for (const auto &t : sb.terms())
    EXPECT_DOUBLE_EQ(t.E, at.level(t.label).energy - at.level("g").energy);
}

TEST(MixedPolarizability, PairLevelRequiresIdenticalAtoms) {
  EXPECT_THROW(mixed_polarizability(fixtures::excited_pair(), Anchor::a_side, 0.1),
               PreconditionError);
  EXPECT_NO_THROW(
      mixed_polarizability(fixtures::identical_pair(), Anchor::a_side, 0.2));
}

TEST(Permittivity, VacuumAndStaticValue) {
  const auto at = fixtures::two_level_isotropic();
  EXPECT_EQ(relative_permittivity(at, "g", 0.0, 0.2).value, cplx(1.0, 0.0));
  const double n = 0.01 / (4.0 * std::numbers::pi);
  // N/eps0 = 0.01 with eps0 = 1/(4 pi)
  const auto e = relative_permittivity(at, "g", n, 0.0);
  EXPECT_NEAR(e.value.real(), 1.0 + 0.01 * 4.0, 1e-15);
  EXPECT_EQ(e.prescription, Prescription::retarded);
  EXPECT_FALSE(e.convention.empty());
}

TEST(Permittivity, LinearInDensity) {
  const auto at = fixtures::two_level_isotropic();
  const cplx w(0.17, 0.0);
  const cplx e1 = relative_permittivity(at, "g", 1e-3, w).value - 1.0;
  const cplx e3 = relative_permittivity(at, "g", 3e-3, w).value - 1.0;
  EXPECT_NEAR(std::abs(e3 - 3.0 * e1), 0.0, 1e-15);
  EXPECT_THROW(relative_permittivity(at, "g", -1.0, w), InputError);
}
