#pragma once
#include "cpvdw/cli/config.hpp"
#include "cpvdw/regimes.hpp"
#include "cpvdw/shift.hpp"
#include "cpvdw/validation.hpp"
#include "json.hpp"
#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>
#include <vector>

#ifndef CPVDW_VERSION
#define CPVDW_VERSION "0.0.0"
#endif

namespace cpvdw::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

enum ExitCode { ok = 0, validation_failed = 1, input_error = 2,
                numerical_error = 3 };

/// Runs `fn`, mapping library errors onto exit codes with a message on err.
template <typename F> int guarded(F &&fn, std::ostream &err) {
  try {
    return fn();
  } catch (const InputError &e) {
    err << "input error: " << e.what() << "\n";
    return input_error;
  } catch (const PreconditionError &e) {
    err << "input error: " << e.what() << "\n";
    return input_error;
  } catch (const ResonanceError &e) {
    err << "resonance: " << e.what() << "\n";
    return numerical_error;
  } catch (const ConvergenceError &e) {
    err << "convergence: " << e.what() << " (last estimate "
        << fmt_number(e.last_estimate()) << ")\n";
    return numerical_error;
  } catch (const DomainError &e) {
    err << "domain error: " << e.what() << "\n";
    return numerical_error;
  } catch (const Error &e) {
    err << "error: " << e.what() << "\n";
    return numerical_error;
  }
}

/// Evaluates fn(i) for i in [0, n) on up to `threads` workers. Results land
/// by index; the lowest failing index rethrows.
template <typename T, typename F>
std::vector<T> parallel_map(std::size_t n, int threads, F &&fn) {
  std::vector<std::optional<T>> out(n);
  std::vector<std::exception_ptr> errs(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next++) < n;) {
      try {
        out[i] = fn(i);
      } catch (...) {
        errs[i] = std::current_exception();
      }
    }
  };
  const int nt = std::max(1, std::min<int>(threads, int(n)));
  std::vector<std::thread> pool;
  for (int t = 1; t < nt; ++t)
    pool.emplace_back(work);
  work();
  for (auto &t : pool)
    t.join();
  std::vector<T> res;
  for (std::size_t i = 0; i < n; ++i) {
    if (errs[i])
      std::rethrow_exception(errs[i]);
    res.push_back(std::move(*out[i]));
  }
  return res;
}

inline int default_threads() {
  if (const char *s = std::getenv("CPVDW_THREADS")) {
    const int n = std::atoi(s);
    if (n > 0)
      return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

inline EngineOptions engine_options(const RunConfig &c) {
  EngineOptions o;
  o.quadrature = c.quadrature;
  return o;
}

inline void require_feynman(const RunConfig &c) {
  if (c.prescription != Prescription::feynman)
    throw InputError("energy shifts are defined with the feynman "
                     "prescription only; retarded is limited to the "
                     "polarizability inspection verb");
}

inline ojson units_block(const UnitsSystem &u) {
  return {{"hbar", u.hbar},
          {"e_charge", u.e_charge},
          {"four_pi_eps0", u.four_pi_eps0},
          {"c", u.c}};
}

inline void write_file(const fs::path &p, const std::string &s) {
  if (p.has_parent_path())
    fs::create_directories(p.parent_path());
  std::ofstream o(p, std::ios::binary);
  if (!o)
    throw InputError("cannot write '" + p.string() + "'");
  o << s;
}

inline std::string csv_value(std::optional<double> v) {
  if (!v)
    return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", *v);
  return buf;
}

//==============================================================================
/// Energy curve over the configured grid: one CSV row per R plus a JSON
/// sidecar.
inline int cmd_curve(const RunConfig &cfg, const fs::path &outdir,
                     int threads) {
  require_feynman(cfg);
  const auto pair = cfg.pair();
  const auto opt = engine_options(cfg);
  const auto grid = cfg.grid.values();
  const auto rows = parallel_map<ShiftBreakdown>(
      grid.size(), threads,
      [&](std::size_t i) { return total_shift(pair, grid[i], opt); });

  std::string csv = "R";
  for (const auto &ch : channel_names())
    csv += "," + ch;
  csv += "\n";
  for (const auto &b : rows) {
    auto put = [&](const std::string &ch, std::optional<double> v) {
      csv += "," + csv_value(cfg.emits(ch) ? v : std::nullopt);
    };
    csv += csv_value(b.R);
    put("wick_dir", b.wick_dir);
    put("pole_real_dir", b.pole_real_dir());
    put("width_dir", b.width_dir());
    put("wick_mix", b.wick_mix);
    put("pole_real_mix", b.pole_real_mix());
    put("width_mix", b.width_mix());
    put("total_plus", b.total_plus);
    put("total_minus", b.total_minus);
    put("width_total_plus", b.width_total_plus);
    csv += "\n";
  }
  write_file(outdir / cfg.csv, csv);

  ojson meta;
  meta["version"] = CPVDW_VERSION;
  meta["config_hash"] = config_hash(cfg);
  meta["units"] = units_block(cfg.units);
  meta["prescription"] = to_string(cfg.prescription);
  meta["grid"] = {{"min", cfg.grid.min},
                  {"max", cfg.grid.max},
                  {"points", cfg.grid.points},
                  {"spacing",
                   cfg.grid.spacing == Spacing::log ? "log" : "linear"}};
  ojson cols = ojson::array({"R"});
  for (const auto &ch : channel_names())
    cols.push_back(ch);
  meta["columns"] = cols;
  meta["channels_emitted"] = cfg.channels;
  meta["null_marker"] = "null";
  meta["identical"] = cfg.identical;
  meta["rows"] = rows.size();
  ojson poles = ojson::array();
  if (!rows.empty())
    for (const auto &p : rows.front().poles_dir)
      poles.push_back({{"state", p.state_label},
                       {"atom", std::string(1, p.atom)},
                       {"E_m", p.E_m}});
  meta["lower_states"] = poles;
  write_file(outdir / cfg.json, meta.dump(2) + "\n");
  return ok;
}

inline ojson regime_json(const RegimeReport &r) {
  ojson j;
  j["c6"] = r.c6_tensor_sum ? ojson(*r.c6_tensor_sum) : ojson(nullptr);
  j["c7"] = r.c7_coefficient;
  ojson env = ojson::array();
  for (const auto &e : r.pole_envelopes)
    env.push_back({{"state", e.label},
                   {"atom", std::string(1, e.atom)},
                   {"E_m", e.E_m},
                   {"amplitude", e.amplitude},
                   {"wavenumber", e.wavenumber}});
  j["pole_envelopes"] = env;
  j["crossover_radius"] =
      r.crossover_radius ? ojson(*r.crossover_radius) : ojson(nullptr);
  j["cp_threshold"] = r.cp_threshold;
  j["fitted_slope"] = r.fitted_slope ? ojson(*r.fitted_slope) : ojson(nullptr);
  ojson s = ojson::array();
  for (const auto &x : r.rule_of_thumb_ratio_at)
    s.push_back({{"R", x.R},
                 {"envelope", x.envelope},
                 {"wick", x.wick},
                 {"ratio", x.ratio}});
  j["ratio_samples"] = s;
  return j;
}

/// Asymptotic coefficients and the pole/Wick crossover.
inline int cmd_regimes(const RunConfig &cfg, const fs::path &outdir,
                       std::ostream &out) {
  require_feynman(cfg);
  const auto pair = cfg.pair();
  RegimeOptions ro;
  ro.engine = engine_options(cfg);
  ro.cp_threshold = cfg.cp_threshold;
  const auto rep = crossover_report(pair, cfg.grid.values(), ro);
  ojson j;
  j["version"] = CPVDW_VERSION;
  j["config_hash"] = config_hash(cfg);
  j["units"] = units_block(cfg.units);
  j["report"] = regime_json(rep);
  const auto text = j.dump(2) + "\n";
  write_file(outdir / cfg.regimes, text);
  out << text;
  return ok;
}

/// Polarizability and dilute-gas permittivity of one atom at given
/// frequencies; the only place the retarded prescription is accepted.
inline int cmd_polarizability(const RunConfig &cfg, const std::string &which,
                              const std::vector<cplx> &omegas,
                              std::optional<double> density,
                              std::ostream &out) {
  if (which != "A" && which != "B")
    throw InputError("atom must be A or B");
  const auto &at = which == "A" ? cfg.atom_a : cfg.atom_b;
  const auto &ref = which == "A" ? cfg.ref_a : cfg.ref_b;
  ojson j;
  j["version"] = CPVDW_VERSION;
  j["atom"] = which;
  j["reference"] = ref;
  j["prescription"] = to_string(cfg.prescription);
  j["units"] = units_block(cfg.units);
  ojson rows = ojson::array();
  for (const auto w : omegas) {
    const auto t = polarizability_tensor(at, ref, w, cfg.prescription);
    ojson re = ojson::array(), im = ojson::array();
    for (int i = 0; i < 3; ++i) {
      ojson rr = ojson::array(), ii = ojson::array();
      for (int k = 0; k < 3; ++k) {
        rr.push_back(t.entries(i, k).real());
        ii.push_back(t.entries(i, k).imag());
      }
      re.push_back(rr);
      im.push_back(ii);
    }
    ojson poles = ojson::array();
    for (const auto &p : t.poles)
      poles.push_back({{"location", p.location},
                       {"half_plane", p.upper ? "upper" : "lower"}});
    ojson row{{"omega", {w.real(), w.imag()}},
              {"real", re},
              {"imag", im},
              {"poles", poles}};
    if (density) {
      const auto e = relative_permittivity(at, ref, *density, w);
      row["permittivity"] = {{"value", {e.value.real(), e.value.imag()}},
                             {"number_density", e.number_density},
                             {"prescription", to_string(e.prescription)},
                             {"convention", e.convention}};
    }
    rows.push_back(row);
  }
  j["values"] = rows;
  out << j.dump(2) << "\n";
  return ok;
}

//==============================================================================
inline std::string read_bytes(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Sample pair for the determinism check: excited three-level atom next to
/// the isotropic ground-state atom, 64 log-spaced distances.
inline RunConfig sample_config() {
  RunConfig c;
  const auto p = fixtures::excited_pair();
  c.atom_a = p.atom_a;
  c.atom_b = p.atom_b;
  c.ref_a = p.ref_a;
  c.ref_b = p.ref_b;
  c.grid = {10.0, 1e4, 64, Spacing::log};
  return c;
}

/// Two curve runs with different thread counts must agree byte for byte.
inline CheckResult curve_determinism(const RunConfig &cfg,
                                     const fs::path &scratch) {
  const auto d1 = scratch / "run1", d2 = scratch / "run2";
  cmd_curve(cfg, d1, 1);
  cmd_curve(cfg, d2, 4);
  const bool same_csv = read_bytes(d1 / cfg.csv) == read_bytes(d2 / cfg.csv);
  const bool same_json =
      read_bytes(d1 / cfg.json) == read_bytes(d2 / cfg.json);
  return {"cmd_curve: byte-identical CSV across two runs", same_csv && same_json,
          same_csv && same_json ? 0.0 : 1.0, 0.0,
          same_csv ? (same_json ? "" : "JSON differs") : "CSV differs"};
}

/// Runs every named check; machine-readable lines on out.
inline int cmd_validate(std::ostream &out, const fs::path &scratch) {
  auto results = run_library_checks();
  results.push_back(curve_determinism(sample_config(), scratch));
  bool all = true;
  for (const auto &r : results) {
    ojson j{{"check", r.name},
            {"pass", r.passed},
            {"measured", r.measured},
            {"tolerance", r.tolerance}};
    if (!r.detail.empty())
      j["detail"] = r.detail;
    out << j.dump() << "\n";
    all = all && r.passed;
  }
  return all ? ok : validation_failed;
}

} // namespace cpvdw::cli
