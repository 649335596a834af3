#pragma once
// Small model atoms used by the tests, the validation suite and the sample
// configurations.
#include "cpvdw/atom.hpp"

namespace cpvdw::fixtures {

/// Ground state g and a threefold degenerate P level at 0.5 with unit
/// dipoles along x, y, z.
inline AtomModel two_level_isotropic(double E0 = 0.5, double d = 1.0) {
  return AtomModel({{"g", 0.0, "S"},
                    {"px", E0, "P"},
                    {"py", E0, "P"},
                    {"pz", E0, "P"}},
                   {{"g", "px", Eigen::Vector3d(d, 0, 0)},
                    {"g", "py", Eigen::Vector3d(0, d, 0)},
                    {"g", "pz", Eigen::Vector3d(0, 0, d)}});
}

/// Excited reference n at 0 with one lower level m and one upper level v.
inline AtomModel three_level() {
  return AtomModel({{"n", 0.0}, {"m", -0.1}, {"v", 0.4}},
                   {{"n", "m", Eigen::Vector3d(1.0, 0.0, 0.0)},
                    {"n", "v", Eigen::Vector3d(0.3, 0.4, 1.2)}});
}

/// Four levels; n and g both couple to m and v. The cross dipoles satisfy
/// sum_v <n|d_i|v><v|d_j|g> = sum_v <n|d_j|v><v|d_i|g>, as they must for
/// commuting dipole components in a complete basis, while the individual
/// terms are not symmetric.
inline AtomModel four_level() {
  return AtomModel({{"g", -0.5}, {"m", -0.1}, {"n", 0.0}, {"v", 0.4}},
                   {{"g", "m", Eigen::Vector3d(0.3, 0.8, 0.0)},
                    {"g", "v", Eigen::Vector3d(1.2, -0.5, 0.0)},
                    {"n", "m", Eigen::Vector3d(1.0, 0.0, 0.0)},
                    {"n", "v", Eigen::Vector3d(0.4, 0.5, 0.0)}});
}

inline PairSystem ground_pair() {
  return {two_level_isotropic(), two_level_isotropic(), "g", "g", false, {}};
}

/// Excited three-level atom A next to a ground-state isotropic atom B.
inline PairSystem excited_pair() {
  return {three_level(), two_level_isotropic(), "n", "g", false, {}};
}

/// Identical four-level atoms in different states (A in n, B in g).
inline PairSystem identical_pair() {
  return {four_level(), four_level(), "n", "g", true, {}};
}

} // namespace cpvdw::fixtures
