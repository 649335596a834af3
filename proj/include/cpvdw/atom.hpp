#pragma once
#include "cpvdw/errors.hpp"
#include "cpvdw/units.hpp"
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace cpvdw {

struct AtomLevel {
  std::string label;
  double energy = 0.0;
  std::string symmetry_tag{};
  friend bool operator==(const AtomLevel &, const AtomLevel &) = default;
};

/// Real dipole matrix element <from|d|to> = <to|d|from>.
struct DipoleElement {
  std::string from_label;
  std::string to_label;
  Eigen::Vector3d d_vector = Eigen::Vector3d::Zero();

  bool connects(const std::string &a, const std::string &b) const {
    return (from_label == a && to_label == b) ||
           (from_label == b && to_label == a);
  }
  friend bool operator==(const DipoleElement &x, const DipoleElement &y) {
    return x.from_label == y.from_label && x.to_label == y.to_label &&
           x.d_vector == y.d_vector;
  }
};

//==============================================================================
class AtomModel {
public:
  AtomModel() = default;
  AtomModel(std::vector<AtomLevel> levels, std::vector<DipoleElement> dipoles)
      : m_levels(std::move(levels)), m_dipoles(std::move(dipoles)) {
    validate();
  }

  const std::vector<AtomLevel> &levels() const { return m_levels; }
  const std::vector<DipoleElement> &dipoles() const { return m_dipoles; }

  bool has_level(const std::string &label) const {
    return std::any_of(m_levels.begin(), m_levels.end(),
                       [&](const auto &l) { return l.label == label; });
  }

  const AtomLevel &level(const std::string &label) const {
    for (const auto &l : m_levels)
      if (l.label == label)
        return l;
    throw InputError("unknown level label '" + label + "'");
  }

  /// Sum of all listed elements between a and b (zero if unconnected).
  Eigen::Vector3d dipole(const std::string &a, const std::string &b) const {
    Eigen::Vector3d d = Eigen::Vector3d::Zero();
    for (const auto &e : m_dipoles)
      if (e.connects(a, b))
        d += e.d_vector;
    return d;
  }

  /// Copy with every dipole vector multiplied by s.
  AtomModel scaled_dipoles(double s) const {
    auto dips = m_dipoles;
    for (auto &e : dips)
      e.d_vector *= s;
    return AtomModel(m_levels, dips);
  }

  friend bool operator==(const AtomModel &, const AtomModel &) = default;

private:
  void validate() const {
    if (m_levels.empty())
      throw InputError("atom model needs at least one level");
    for (std::size_t i = 0; i < m_levels.size(); ++i) {
      if (m_levels[i].label.empty())
        throw InputError("empty level label");
      if (!std::isfinite(m_levels[i].energy))
        throw InputError("non-finite energy for level '" +
                         m_levels[i].label + "'");
      for (std::size_t j = 0; j < i; ++j)
        if (m_levels[i].label == m_levels[j].label)
          throw InputError("duplicate level label '" + m_levels[i].label +
                           "'");
    }
    for (const auto &e : m_dipoles) {
      if (!has_level(e.from_label))
        throw InputError("dipole references unknown level '" +
                         e.from_label + "'");
      if (!has_level(e.to_label))
        throw InputError("dipole references unknown level '" + e.to_label +
                         "'");
      if (e.from_label == e.to_label)
        throw InputError("diagonal dipole element on '" + e.from_label +
                         "' (permanent moments are not supported)");
      if (!e.d_vector.allFinite())
        throw InputError("non-finite dipole vector " + e.from_label + "-" +
                         e.to_label);
    }
  }

  std::vector<AtomLevel> m_levels{};
  std::vector<DipoleElement> m_dipoles{};
};

//==============================================================================
/// A dipole-connected intermediate state relative to a reference:
/// E = E_v - E_ref, dyadic = d d^T with d = <ref|d|v>.
struct VirtualState {
  std::string label;
  double E;
  Eigen::Vector3d d;
  Eigen::Matrix3d dyadic() const { return d * d.transpose(); }
};

/// All dipole-connected states of `ref`, in level order.
inline std::vector<VirtualState> virtual_states(const AtomModel &atom,
                                                const std::string &ref) {
  const double Eref = atom.level(ref).energy;
  std::vector<VirtualState> out;
  for (const auto &l : atom.levels()) {
    if (l.label == ref)
      continue;
    const auto d = atom.dipole(ref, l.label);
    if (d.isZero(0.0))
      continue;
    const double E = l.energy - Eref;
    if (E == 0.0)
      throw InputError("level '" + l.label +
                       "' is dipole-connected to and degenerate with "
                       "reference '" +
                       ref + "'");
    out.push_back({l.label, E, d});
  }
  return out;
}

struct LowerState {
  std::string label;
  double E_m;
};

inline std::vector<LowerState> lower_virtual_states(const AtomModel &atom,
                                                    const std::string &ref) {
  std::vector<LowerState> out;
  for (const auto &v : virtual_states(atom, ref))
    if (v.E < 0.0)
      out.push_back({v.label, v.E});
  return out;
}

/// Virtual states sharing one pole location.
struct EnergyGroup {
  std::vector<std::string> labels;
  double E;
  Eigen::Matrix3d dyadic;
  std::string name() const {
    std::string s;
    for (std::size_t i = 0; i < labels.size(); ++i)
      s += (i ? "+" : "") + labels[i];
    return s;
  }
};

/// Groups virtual states by energy (single linkage on the sorted list).
inline std::vector<EnergyGroup>
degenerate_energy_groups(const AtomModel &atom, const std::string &ref,
                         double tol = 1e-12) {
  if (!(tol >= 0.0))
    throw InputError("degeneracy tolerance must be >= 0");
  auto vs = virtual_states(atom, ref);
  std::stable_sort(vs.begin(), vs.end(),
                   [](const auto &a, const auto &b) { return a.E < b.E; });
  std::vector<EnergyGroup> out;
  double sumE = 0.0;
  double prevE = 0.0;
  for (const auto &v : vs) {
    if (out.empty() || v.E - prevE > tol) {
      if (!out.empty())
        out.back().E = sumE / double(out.back().labels.size());
      out.push_back({{}, 0.0, Eigen::Matrix3d::Zero()});
      sumE = 0.0;
    }
    out.back().labels.push_back(v.label);
    out.back().dyadic += v.dyadic();
    sumE += v.E;
    prevE = v.E;
  }
  if (!out.empty())
    out.back().E = sumE / double(out.back().labels.size());
  return out;
}

//==============================================================================
struct PairSystem {
  AtomModel atom_a;
  AtomModel atom_b;
  std::string ref_a;
  std::string ref_b;
  bool identical = false;
  UnitsSystem units{};
  /// Direction of R = r_B - r_A (normalised on use).
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();

  void validate() const {
    units.validate();
    atom_a.level(ref_a);
    atom_b.level(ref_b);
    if (!axis.allFinite() || axis.norm() == 0.0)
      throw InputError("pair axis must be a nonzero finite vector");
    if (identical && !(atom_a == atom_b))
      throw InputError("pair marked identical but atom models differ");
    virtual_states(atom_a, ref_a);
    virtual_states(atom_b, ref_b);
  }

  Eigen::Vector3d R_vec(double R) const { return R * axis.normalized(); }

  /// Same physical system with the roles of A and B exchanged.
  PairSystem swapped() const {
    PairSystem p = *this;
    std::swap(p.atom_a, p.atom_b);
    std::swap(p.ref_a, p.ref_b);
    p.axis = -axis;
    return p;
  }
};

} // namespace cpvdw
