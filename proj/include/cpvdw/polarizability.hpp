#pragma once
#include "cpvdw/atom.hpp"
#include "cpvdw/tensor.hpp"
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace cpvdw {

enum class Prescription { feynman, retarded };

inline const char *to_string(Prescription p) {
  return p == Prescription::feynman ? "feynman" : "retarded";
}

inline Prescription parse_prescription(const std::string &s) {
  if (s == "feynman")
    return Prescription::feynman;
  if (s == "retarded")
    return Prescription::retarded;
  throw InputError("unknown prescription '" + s + "'");
}

/// Location of a pole on the real frequency axis and the half-plane the
/// infinitesimal displacement pushes it into.
struct PoleSite {
  double location;
  bool upper;
  friend bool operator==(const PoleSite &, const PoleSite &) = default;
};

struct PolarizabilityTensor {
  Matrix3c entries;
  cplx omega;
  Prescription prescription;
  std::vector<PoleSite> poles; // sorted
};

//==============================================================================
/// One pole pair of a sum-over-states response:
///   F/(E - omega) + B/(E + omega)
struct SpectralTerm {
  std::string label;
  double E;
  Eigen::Matrix3d F;
  Eigen::Matrix3d B;
};

class SpectralSum {
public:
  SpectralSum() = default;
  explicit SpectralSum(std::vector<SpectralTerm> terms)
      : m_terms(std::move(terms)) {}

  const std::vector<SpectralTerm> &terms() const { return m_terms; }

  /// Value with the infinitesimal displacement dropped. Exactly on a pole
  /// is a DomainError naming the level.
  Matrix3c operator()(cplx omega) const {
    Matrix3c a = Matrix3c::Zero();
    for (const auto &t : m_terms) {
      const cplx dm = t.E - omega;
      const cplx dp = t.E + omega;
      const double guard = 4.0 * std::numeric_limits<double>::epsilon() *
                           std::abs(t.E);
      if (std::abs(dm) <= guard || std::abs(dp) <= guard)
        throw DomainError("polarizability evaluated on the pole of level '" +
                              t.label + "'",
                          t.label);
      a += t.F.cast<cplx>() / dm + t.B.cast<cplx>() / dp;
    }
    return a;
  }

  /// Value with a finite displacement eps in every denominator.
  Matrix3c regularized(cplx omega, double eps, Prescription p) const {
    const cplx I(0.0, 1.0);
    const double s2 = p == Prescription::feynman ? -1.0 : 1.0;
    Matrix3c a = Matrix3c::Zero();
    for (const auto &t : m_terms)
      a += t.F.cast<cplx>() / (t.E - omega - I * eps) +
           t.B.cast<cplx>() / (t.E + omega + s2 * I * eps);
    return a;
  }

  std::vector<PoleSite> poles(Prescription p) const {
    std::vector<PoleSite> out;
    for (const auto &t : m_terms) {
      if (!t.F.isZero(0.0))
        out.push_back({t.E, false});
      if (!t.B.isZero(0.0))
        out.push_back({-t.E, p == Prescription::retarded ? false : true});
    }
    std::sort(out.begin(), out.end(), [](const auto &a, const auto &b) {
      return a.location != b.location ? a.location < b.location
                                      : a.upper < b.upper;
    });
    return out;
  }

  friend bool operator==(const SpectralSum &x, const SpectralSum &y) {
    if (x.m_terms.size() != y.m_terms.size())
      return false;
    for (std::size_t i = 0; i < x.m_terms.size(); ++i) {
      const auto &a = x.m_terms[i];
      const auto &b = y.m_terms[i];
      if (a.label != b.label || a.E != b.E || a.F != b.F || a.B != b.B)
        return false;
    }
    return true;
  }

private:
  std::vector<SpectralTerm> m_terms{};
};

/// alpha_ik = sum_v d_i d_k [1/(E_v - w) + 1/(E_v + w)]; optionally with
/// degenerate states merged into one term per pole.
inline SpectralSum direct_spectrum(const AtomModel &atom,
                                   const std::string &ref,
                                   std::optional<double> group_tol = {}) {
  std::vector<SpectralTerm> t;
  if (group_tol) {
    for (const auto &g : degenerate_energy_groups(atom, ref, *group_tol))
      t.push_back({g.name(), g.E, g.dyadic, g.dyadic});
  } else {
    for (const auto &v : virtual_states(atom, ref))
      t.push_back({v.label, v.E, v.dyadic(), v.dyadic()});
  }
  return SpectralSum(std::move(t));
}

enum class Anchor { a_side, b_side };

/// Exchange response: numerators <a|d_i|v><v|d_j|b> (forward) and
/// <a|d_j|v><v|d_i|b> (backward), energies E_v - E_anchor.
inline SpectralSum mixed_spectrum(const AtomModel &atom,
                                  const std::string &psi_a,
                                  const std::string &psi_b, Anchor anchor) {
  const double Ea = atom.level(psi_a).energy;
  const double Eb = atom.level(psi_b).energy;
  const double E0 = anchor == Anchor::a_side ? Ea : Eb;
  std::vector<SpectralTerm> t;
  for (const auto &l : atom.levels()) {
    const Eigen::Vector3d da = atom.dipole(psi_a, l.label);
    const Eigen::Vector3d db = atom.dipole(l.label, psi_b);
    if (da.isZero(0.0) || db.isZero(0.0))
      continue;
    const double E = l.energy - E0;
    if (E == 0.0)
      throw InputError("level '" + l.label +
                       "' is degenerate with the anchoring state");
    const Eigen::Matrix3d F = da * db.transpose();
    t.push_back({l.label, E, F, F.transpose()});
  }
  return SpectralSum(std::move(t));
}

//==============================================================================
inline PolarizabilityTensor make_tensor(const SpectralSum &s, cplx omega,
                                        Prescription p) {
  return {s(omega), omega, p, s.poles(p)};
}

inline PolarizabilityTensor polarizability_tensor(const AtomModel &atom,
                                                  const std::string &ref,
                                                  cplx omega,
                                                  Prescription presc) {
  return make_tensor(direct_spectrum(atom, ref), omega, presc);
}

/// alpha as a function of -omega, seen at omega: values at -omega, pole
/// locations negated and displacement sides flipped.
inline PolarizabilityTensor reflected(const SpectralSum &s, cplx omega,
                                      Prescription p) {
  PolarizabilityTensor t{s(-omega), omega, p, {}};
  for (const auto &q : s.poles(p))
    t.poles.push_back({-q.location, !q.upper});
  std::sort(t.poles.begin(), t.poles.end(), [](const auto &a, const auto &b) {
    return a.location != b.location ? a.location < b.location
                                    : a.upper < b.upper;
  });
  return t;
}

inline PolarizabilityTensor reflected_polarizability(const AtomModel &atom,
                                                     const std::string &ref,
                                                     cplx omega,
                                                     Prescription presc) {
  return reflected(direct_spectrum(atom, ref), omega, presc);
}

/// Same values (to rel tol) and the same pole bookkeeping.
inline bool same_response(const PolarizabilityTensor &x,
                          const PolarizabilityTensor &y, double tol) {
  const double scale = std::max(x.entries.cwiseAbs().maxCoeff(),
                                y.entries.cwiseAbs().maxCoeff());
  const double diff = (x.entries - y.entries).cwiseAbs().maxCoeff();
  return diff <= tol * scale && x.poles == y.poles;
}

/// Scalar part of an isotropic tensor; anisotropy above 1e-10 (relative) is
/// a PreconditionError.
inline cplx isotropic_part(const Matrix3c &a, const std::string &what) {
  const cplx s = a.trace() / 3.0;
  const double dev =
      (a - s * Matrix3c::Identity()).cwiseAbs().maxCoeff();
  if (dev == 0.0)
    return s;
  if (std::abs(s) == 0.0 || dev > 1e-10 * std::abs(s))
    throw PreconditionError(what + " is anisotropic (deviation " +
                            std::to_string(dev) + ", scalar " +
                            std::to_string(std::abs(s)) + ")");
  return s;
}

inline cplx scalar_polarizability(const AtomModel &atom,
                                  const std::string &ref, cplx omega,
                                  Prescription presc = Prescription::feynman) {
  return isotropic_part(polarizability_tensor(atom, ref, omega, presc).entries,
                        "polarizability of '" + ref + "'");
}

inline double static_polarizability(const AtomModel &atom,
                                    const std::string &ref) {
  return scalar_polarizability(atom, ref, 0.0).real();
}

//==============================================================================
inline PolarizabilityTensor mixed_polarizability(const AtomModel &atom,
                                                 const std::string &psi_a,
                                                 const std::string &psi_b,
                                                 Anchor anchor, cplx omega) {
  return make_tensor(mixed_spectrum(atom, psi_a, psi_b, anchor), omega,
                     Prescription::feynman);
}

inline PolarizabilityTensor mixed_polarizability(const PairSystem &pair,
                                                 Anchor anchor, cplx omega) {
  if (!pair.identical)
    throw PreconditionError("mixed polarizability needs identical atoms");
  return mixed_polarizability(pair.atom_a, pair.ref_a, pair.ref_b, anchor,
                              omega);
}

struct Permittivity {
  cplx value;
  double number_density;
  Prescription prescription = Prescription::retarded;
  std::string convention =
      "eps_r = 1 + N_V alpha/eps0 with 4 pi eps0 = 1, eps0 = 1/(4 pi)";
};

inline Permittivity relative_permittivity(const AtomModel &atom,
                                          const std::string &ref,
                                          double number_density, cplx omega) {
  if (!(number_density >= 0.0) || !std::isfinite(number_density))
    throw InputError("number density must be finite and >= 0");
  const cplx a =
      scalar_polarizability(atom, ref, omega, Prescription::retarded);
  return {1.0 + number_density * a / UnitsSystem::eps0(), number_density};
}

} // namespace cpvdw
