#pragma once
#include "cpvdw/asymptotic.hpp"
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace cpvdw {

struct PoleEnvelope {
  std::string label;
  char atom;
  double E_m;
  /// |P| envelope = amplitude / R^2
  double amplitude;
  double wavenumber;
};

struct RatioSample {
  double R;
  double envelope;
  double wick;
  double ratio;
};

struct RegimeReport {
  std::optional<double> c6_tensor_sum{};
  double c7_coefficient = 0.0;
  std::vector<PoleEnvelope> pole_envelopes{};
  std::optional<double> crossover_radius{};
  std::vector<RatioSample> rule_of_thumb_ratio_at{};
  std::optional<double> fitted_slope{};
  double cp_threshold = 0.0;
};

struct RegimeOptions {
  EngineOptions engine{};
  /// Grid points with R min|E|/c at or above this enter the slope fit.
  double cp_threshold = 50.0;
};

inline std::vector<PoleEnvelope> pole_envelopes(const PairSystem &pair,
                                                const EngineOptions &opt = {}) {
  pair.validate();
  std::vector<PoleEnvelope> out;
  const double c = pair.units.c;
  for (char side : {'A', 'B'}) {
    const auto &at = side == 'A' ? pair.atom_a : pair.atom_b;
    const auto &ref = side == 'A' ? pair.ref_a : pair.ref_b;
    const auto spec = direct_spectrum(at, ref, opt.degeneracy_tol);
    for (const auto &t : spec.terms()) {
      if (!(t.E < 0.0))
        continue;
      const auto lp = locate_pole(pair, Kind::direct,
                                  std::string(1, side) + ":" + t.label, opt);
      const auto k = pole_coefficients(lp.N, lp.T, lp.axis);
      out.push_back({t.label, side, t.E,
                     std::abs(std::pow(t.E / c, 4) * k.aa),
                     2.0 * std::abs(t.E) / c});
    }
  }
  return out;
}

/// Smallest transition energy of either atom.
inline double min_transition(const PairSystem &pair) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto &v : virtual_states(pair.atom_a, pair.ref_a))
    m = std::min(m, std::abs(v.E));
  for (const auto &v : virtual_states(pair.atom_b, pair.ref_b))
    m = std::min(m, std::abs(v.E));
  return m;
}

inline std::optional<double> fit_loglog_slope(const std::vector<double> &x,
                                              const std::vector<double> &y) {
  if (x.size() < 2)
    return {};
  double mx = 0, my = 0;
  const double n = double(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]) / n;
    my += std::log(y[i]) / n;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0)
    return {};
  return sxy / sxx;
}

inline RegimeReport crossover_report(const PairSystem &pair,
                                     const std::vector<double> &R_grid,
                                     const RegimeOptions &opt = {}) {
  pair.validate();
  for (std::size_t i = 0; i < R_grid.size(); ++i) {
    detail::check_R(R_grid[i]);
    if (i > 0 && !(R_grid[i] > R_grid[i - 1]))
      throw InputError("R grid must be strictly increasing");
  }
  RegimeReport rep;
  rep.cp_threshold = opt.cp_threshold;
  try {
    rep.c6_tensor_sum = vdw_limit(pair, opt.engine);
  } catch (const ResonanceError &) {
    // resonant pairs have no finite C6
  }
  rep.c7_coefficient = casimir_polder_c7(pair);
  rep.pole_envelopes = pole_envelopes(pair, opt.engine);
  if (rep.pole_envelopes.empty())
    return rep;

  double amp = 0.0;
  for (const auto &e : rep.pole_envelopes)
    amp += e.amplitude;
  const double c7 = std::abs(rep.c7_coefficient);
  if (amp > 0.0 && c7 > 0.0) {
    // amp/R^2 = c7/R^7, bisected in log R
    auto g = [&](double lr) {
      const double R = std::exp(lr);
      return std::log(amp / (R * R)) - std::log(c7 / std::pow(R, 7));
    };
    const double R0 = std::pow(c7 / amp, 0.2);
    double lo = std::log(R0 / 10.0), hi = std::log(R0 * 10.0);
    while (hi - lo > 1e-6 * 0.5) {
      const double mid = 0.5 * (lo + hi);
      (g(mid) < 0.0 ? lo : hi) = mid;
    }
    rep.crossover_radius = std::exp(0.5 * (lo + hi));
  }

  const double emin = min_transition(pair);
  std::vector<double> xs, ys;
  for (double R : R_grid) {
    const double env = amp / (R * R);
    const double w = wick_term_direct(pair, R, opt.engine);
    const double ratio = env / std::abs(w);
    rep.rule_of_thumb_ratio_at.push_back({R, env, w, ratio});
    if (R * emin / pair.units.c >= opt.cp_threshold) {
      xs.push_back(R);
      ys.push_back(ratio);
    }
  }
  rep.fitted_slope = fit_loglog_slope(xs, ys);
  return rep;
}

} // namespace cpvdw
