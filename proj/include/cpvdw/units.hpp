#pragma once
#include "cpvdw/errors.hpp"
#include <cmath>
#include <numbers>

namespace cpvdw {

/// Hartree atomic units: hbar = e = 4 pi eps0 = 1. The speed of light is the
/// only adjustable constant (default: 1/alpha).
struct UnitsSystem {
  static constexpr double hbar = 1.0;
  static constexpr double e_charge = 1.0;
  static constexpr double four_pi_eps0 = 1.0;

  double c = 137.035999;

  /// Bare eps0 = 1/(4 pi); only the dilute-gas permittivity needs it.
  static constexpr double eps0() { return 1.0 / (4.0 * std::numbers::pi); }

  void validate() const {
    if (!(c > 0.0) || !std::isfinite(c))
      throw InputError("units: speed of light must be finite and > 0");
  }

  friend bool operator==(const UnitsSystem &, const UnitsSystem &) = default;
};

} // namespace cpvdw
