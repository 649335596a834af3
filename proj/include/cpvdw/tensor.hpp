#pragma once
#include "cpvdw/errors.hpp"
#include "cpvdw/units.hpp"
#include <Eigen/Dense>
#include <cmath>
#include <complex>

namespace cpvdw {

using cplx = std::complex<double>;
using Dyadic = Eigen::Matrix3d;
using Matrix3c = Eigen::Matrix3cd;

inline Eigen::Vector3d unit_separation(const Eigen::Vector3d &R_vec) {
  const double R = R_vec.norm();
  if (!(R > 0.0) || !std::isfinite(R))
    throw InputError("separation vector must be nonzero and finite");
  return R_vec / R;
}

/// alpha_ij = delta_ij - n_i n_j
inline Dyadic transverse_dyadic(const Eigen::Vector3d &R_vec) {
  const auto n = unit_separation(R_vec);
  return Dyadic::Identity() - n * n.transpose();
}

/// beta_ij = delta_ij - 3 n_i n_j
inline Dyadic longitudinal_dyadic(const Eigen::Vector3d &R_vec) {
  const auto n = unit_separation(R_vec);
  return Dyadic::Identity() - 3.0 * n * n.transpose();
}

/// sqrt(omega^2 + i0): the root in the closed upper half-plane, cut along
/// positive real omega^2. Equals omega on the closed first quadrant and
/// i*xi for omega = i*xi.
inline cplx frequency_branch(cplx omega) {
  if (omega == cplx(0.0, 0.0))
    throw DomainError("frequency_branch: omega = 0");
  const cplx w2 = omega * omega;
  if (w2.imag() == 0.0) {
    // signed zero of the imaginary part would otherwise pick the cut side
    if (w2.real() < 0.0)
      return {0.0, std::sqrt(-w2.real())};
    return {std::sqrt(w2.real()), 0.0};
  }
  const cplx r = std::sqrt(w2);
  return r.imag() < 0.0 ? -r : r;
}

struct PropagatorTensor {
  Matrix3c entries;
  cplx omega;
  Eigen::Vector3d separation;
};

/// Temporal-gauge propagator D_ij(omega, R) (hbar = 4 pi eps0 = 1).
inline PropagatorTensor photon_propagator(cplx omega,
                                          const Eigen::Vector3d &R_vec,
                                          const UnitsSystem &units) {
  const double R = R_vec.norm();
  if (!(R > 0.0))
    throw DomainError("photon_propagator: R = 0");
  const cplx b = frequency_branch(omega);
  const double c = units.c;
  const cplx I(0.0, 1.0);
  const cplx u = c / (b * R);
  const cplx pref = std::exp(I * b * R / c) / (c * c * R);
  const Matrix3c M = transverse_dyadic(R_vec).cast<cplx>() +
                     (u * (I - u)) * longitudinal_dyadic(R_vec).cast<cplx>();
  return {pref * M, omega, R_vec};
}

/// Closed form of sum_ij D_ij D_ij.
inline cplx propagator_double_contraction(cplx omega, double R,
                                          const UnitsSystem &units) {
  if (!(R > 0.0))
    throw DomainError("propagator_double_contraction: R <= 0");
  const cplx b = frequency_branch(omega);
  const double c = units.c;
  const cplx I(0.0, 1.0);
  const cplx u = c / (b * R);
  const cplx poly = 1.0 + u * (2.0 * I + u * (-5.0 + u * (-6.0 * I + 3.0 * u)));
  const double c4 = c * c * c * c;
  return 2.0 * std::exp(2.0 * I * b * R / c) / (c4 * R * R) * poly;
}

/// Static near-zone limit -beta/(omega^2 R^3).
inline PropagatorTensor close_range_propagator(cplx omega,
                                               const Eigen::Vector3d &R_vec,
                                               const UnitsSystem &units) {
  units.validate();
  const double R = R_vec.norm();
  if (!(R > 0.0))
    throw DomainError("close_range_propagator: R = 0");
  if (omega == cplx(0.0, 0.0))
    throw DomainError("close_range_propagator: omega = 0");
  const Matrix3c M =
      -longitudinal_dyadic(R_vec).cast<cplx>() / (omega * omega * R * R * R);
  return {M, omega, R_vec};
}

/// sum_{ijkl} X_ij Y_kl N_ik T_jl
template <typename MX, typename MY, typename MN, typename MT>
auto contract(const MX &X, const MY &Y, const MN &N, const MT &T) {
  return (X.transpose() * N * Y).cwiseProduct(T).sum();
}

} // namespace cpvdw
