#include "cpvdw/tensor.hpp"
#include <gtest/gtest.h>
#include <random>

using namespace cpvdw;

namespace {
Eigen::Vector3d random_dir(std::mt19937_64 &rng) {
  std::normal_distribution<double> N;
  return Eigen::Vector3d(N(rng), N(rng), N(rng)).normalized();
}
} // namespace

TEST(Dyadics, AlongZ) {
  const Eigen::Vector3d R(0, 0, 3.0);
  EXPECT_EQ(transverse_dyadic(R), Eigen::Vector3d(1, 1, 0).asDiagonal().toDenseMatrix());
  EXPECT_EQ(longitudinal_dyadic(R), Eigen::Vector3d(1, 1, -2).asDiagonal().toDenseMatrix());
}

TEST(Dyadics, ZeroSeparationIsInputError) {
  EXPECT_THROW(unit_separation(Eigen::Vector3d::Zero()), InputError);
  EXPECT_THROW(transverse_dyadic(Eigen::Vector3d::Zero()), InputError);
}

TEST(Dyadics, ProjectorRelationsForRandomDirections) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 50; ++i) {
    const auto n = random_dir(rng);
    const Eigen::Matrix3d P = n * n.transpose();
    const auto a = transverse_dyadic(n * 2.5);
    const auto b = longitudinal_dyadic(n * 2.5);
    EXPECT_LE((a + P - Dyadic::Identity()).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LE((b + 3.0 * P - Dyadic::Identity()).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(Dyadics, Contractions) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 50; ++i) {
    const auto n = random_dir(rng);
    const auto a = transverse_dyadic(n);
    const auto b = longitudinal_dyadic(n);
    EXPECT_NEAR(a.cwiseProduct(a).sum(), 2.0, 1e-14);
    EXPECT_NEAR(b.cwiseProduct(b).sum(), 6.0, 1e-14);
    EXPECT_NEAR(a.cwiseProduct(b).sum(), 2.0, 1e-14);
    EXPECT_NEAR(a.trace(), 2.0, 1e-14);
    EXPECT_NEAR(b.trace(), 0.0, 1e-14);
  }
}

TEST(FrequencyBranch, RealAndImaginaryInputs) {
  EXPECT_EQ(frequency_branch(2.0), cplx(2.0, 0.0));
  EXPECT_EQ(frequency_branch(-2.0), cplx(2.0, 0.0));
  EXPECT_EQ(frequency_branch(cplx(0.0, 1.5)), cplx(0.0, 1.5));
  EXPECT_EQ(frequency_branch(cplx(-0.0, 1.5)), cplx(0.0, 1.5));
  EXPECT_EQ(frequency_branch(cplx(0.0, -1.5)), cplx(0.0, 1.5));
  EXPECT_THROW(frequency_branch(0.0), DomainError);
}

TEST(FrequencyBranch, UpperHalfPlaneRootOfOmegaSquared) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> U(-3.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    const cplx w(U(rng), U(rng));
    const cplx b = frequency_branch(w);
    EXPECT_GE(b.imag(), 0.0);
    EXPECT_LE(std::abs(b * b - w * w), 1e-14 * std::norm(w));
    if (w.real() >= 0.0 && w.imag() >= 0.0)
      EXPECT_LE(std::abs(b - w), 1e-15 * std::abs(w));
  }
}

TEST(Propagator, ContractionFactorTendsToTwoForSmallU) {
  const UnitsSystem u;
  const double w = 1.0, R = 1e9;
  const cplx f = propagator_double_contraction(w, R, u) * std::pow(u.c, 4) *
                 R * R / std::exp(cplx(0, 2.0 * w * R / u.c));
  EXPECT_NEAR(f.real(), 2.0, 1e-6);
  EXPECT_NEAR(f.imag(), 0.0, 1e-6);
}

TEST(Propagator, EvenInRealFrequency) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> U(0.05, 3.0);
  const UnitsSystem u;
  for (int i = 0; i < 50; ++i) {
    const auto R = random_dir(rng) * (10.0 * U(rng));
    const double w = U(rng);
    EXPECT_EQ(photon_propagator(w, R, u).entries,
              photon_propagator(-w, R, u).entries);
  }
}

TEST(Propagator, ContractionMatchesEntrywiseSum) {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const UnitsSystem u;
  for (int i = 0; i < 100; ++i) {
    const double w = 0.05 + 4.95 * U(rng);
    const double R = std::pow(10.0, -2.0 + 4.0 * U(rng)) * u.c / w;
    const cplx omega = i % 2 ? cplx(w, 0) : cplx(0, w);
    const auto D = photon_propagator(omega, random_dir(rng) * R, u).entries;
    const cplx direct = D.cwiseProduct(D).sum();
    const cplx closed = propagator_double_contraction(omega, R, u);
    EXPECT_LE(std::abs(direct - closed), 1e-12 * std::abs(closed));
  }
}

TEST(Propagator, RealOnImaginaryAxis) {
  const UnitsSystem u;
  const auto D = photon_propagator(cplx(0, 0.7), Eigen::Vector3d(1, 2, 3), u);
  EXPECT_EQ(D.entries.imag().cwiseAbs().maxCoeff(), 0.0);
}

TEST(Propagator, ReducesToCloseRangeFormForSmallSeparation) {
  const UnitsSystem u;
  const Eigen::Vector3d R(0.3, -0.2, 0.5);
  const cplx w(0.0, 1e-3);
  const auto D = photon_propagator(w, R, u).entries;
  const auto S = close_range_propagator(w, R, u).entries;
  EXPECT_LE((D - S).cwiseAbs().maxCoeff(), 1e-4 * S.cwiseAbs().maxCoeff());
  EXPECT_EQ(S.imag().cwiseAbs().maxCoeff(), 0.0);
  EXPECT_THROW(close_range_propagator(0.0, R, u), DomainError);
}

TEST(Propagator, ZeroInputsAreDomainErrors) {
  const UnitsSystem u;
  EXPECT_THROW(photon_propagator(1.0, Eigen::Vector3d::Zero(), u), DomainError);
  EXPECT_THROW(photon_propagator(0.0, Eigen::Vector3d(0, 0, 1), u), DomainError);
  EXPECT_THROW(propagator_double_contraction(1.0, 0.0, u), DomainError);
}

TEST(Contract, MatchesIndexLoop) {
  std::mt19937_64 rng(16);
  std::normal_distribution<double> N;
  Eigen::Matrix3d X, Y, A, B;
  for (auto *M : {&X, &Y, &A, &B})
    for (int i = 0; i < 9; ++i)
      (*M)(i / 3, i % 3) = N(rng);
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          s += X(i, j) * Y(k, l) * A(i, k) * B(j, l);
  EXPECT_NEAR(contract(X, Y, A, B), s, 1e-12 * std::abs(s));
}
