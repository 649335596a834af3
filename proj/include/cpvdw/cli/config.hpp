#pragma once
// Run configuration: a sectioned key = value text document.
//
//   [units]       c
//   [atom.A]      level = label, energy[, tag]   (repeatable)
//   [atom.B]      dipole = from, to, dx, dy, dz  (repeatable)
//                 file = path                    (same lines, read from file)
//   [pair]        ref_a, ref_b, identical, axis, prescription
//   [grid]        min, max, points, spacing = log|linear
//   [output]      csv, json, regimes, channels
//   [quadrature]  rel_tol, abs_tol, max_subdivisions   (optional)
//   [regimes]     cp_threshold                         (optional)
//
// Energies are absolute level energies in Hartree; lengths in Bohr.
#include "cpvdw/atom.hpp"
#include "cpvdw/polarizability.hpp"
#include "cpvdw/quadrature.hpp"
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace cpvdw::cli {

inline const std::vector<std::string> &channel_names() {
  static const std::vector<std::string> n = {
      "wick_dir", "pole_real_dir", "width_dir",  "wick_mix",  "pole_real_mix",
      "width_mix", "total_plus",   "total_minus", "width_total_plus"};
  return n;
}

enum class Spacing { linear, log };

struct Grid {
  double min = 0.0;
  double max = 0.0;
  int points = 0;
  Spacing spacing = Spacing::log;

  std::vector<double> values() const {
    std::vector<double> v(points);
    for (int i = 0; i < points; ++i) {
      const double t = double(i) / double(points - 1);
      v[i] = spacing == Spacing::log ? min * std::pow(max / min, t)
                                     : min + (max - min) * t;
    }
    v.back() = max;
    return v;
  }
};

struct RunConfig {
  UnitsSystem units{};
  AtomModel atom_a{};
  AtomModel atom_b{};
  std::string ref_a{};
  std::string ref_b{};
  bool identical = false;
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
  Prescription prescription = Prescription::feynman;
  Grid grid{};
  std::string csv = "curve.csv";
  std::string json = "curve.json";
  std::string regimes = "regimes.json";
  std::vector<std::string> channels = channel_names();
  QuadratureSpec quadrature{};
  double cp_threshold = 50.0;

  PairSystem pair() const {
    PairSystem p{atom_a, atom_b, ref_a, ref_b, identical, units, axis};
    p.validate();
    return p;
  }

  bool emits(const std::string &ch) const {
    return std::find(channels.begin(), channels.end(), ch) != channels.end();
  }
};

//==============================================================================
namespace detail {

inline std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string &s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    out.push_back(trim(item));
  if (!s.empty() && s.back() == sep)
    out.push_back({});
  return out;
}

struct Where {
  std::string file;
  int line;
  [[noreturn]] void fail(const std::string &msg) const {
    throw InputError(file + ":" + std::to_string(line) + ": " + msg);
  }
};

inline double to_double(const std::string &s, const Where &w) {
  double v = 0.0;
  const auto *b = s.data();
  const auto *e = s.data() + s.size();
  const auto r = std::from_chars(b, e, v);
  if (s.empty() || r.ec != std::errc() || r.ptr != e || !std::isfinite(v))
    w.fail("expected a finite number, got '" + s + "'");
  return v;
}

inline int to_int(const std::string &s, const Where &w) {
  int v = 0;
  const auto *e = s.data() + s.size();
  const auto r = std::from_chars(s.data(), e, v);
  if (s.empty() || r.ec != std::errc() || r.ptr != e)
    w.fail("expected an integer, got '" + s + "'");
  return v;
}

inline bool to_bool(const std::string &s, const Where &w) {
  if (s == "true")
    return true;
  if (s == "false")
    return false;
  w.fail("expected true or false, got '" + s + "'");
}

struct AtomDraft {
  std::vector<AtomLevel> levels;
  std::vector<DipoleElement> dipoles;
  bool seen = false;
};

inline void atom_line(AtomDraft &a, const std::string &key,
                      const std::string &val, const Where &w);

inline void read_atom_file(AtomDraft &a, const std::filesystem::path &p) {
  std::ifstream in(p);
  if (!in)
    throw InputError("cannot open atom file '" + p.string() + "'");
  std::string raw;
  int n = 0;
  while (std::getline(in, raw)) {
    ++n;
    const auto line = trim(raw.substr(0, raw.find_first_of("#;")));
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    const Where w{p.string(), n};
    if (eq == std::string::npos)
      w.fail("expected key = value");
    const auto key = trim(line.substr(0, eq));
    if (key == "file")
      w.fail("nested atom files are not supported");
    atom_line(a, key, trim(line.substr(eq + 1)), w);
  }
}

inline void atom_line(AtomDraft &a, const std::string &key,
                      const std::string &val, const Where &w) {
  const auto f = split(val, ',');
  if (key == "level") {
    if (f.size() < 2 || f.size() > 3 || f[0].empty())
      w.fail("level needs: label, energy[, tag]");
    a.levels.push_back({f[0], to_double(f[1], w), f.size() == 3 ? f[2] : ""});
  } else if (key == "dipole") {
    if (f.size() != 5)
      w.fail("dipole needs: from, to, dx, dy, dz");
    a.dipoles.push_back({f[0], f[1],
                         Eigen::Vector3d(to_double(f[2], w), to_double(f[3], w),
                                         to_double(f[4], w))});
  } else {
    w.fail("unknown atom key '" + key + "'");
  }
}

} // namespace detail

/// Parses a configuration; `origin` names the source in messages and
/// anchors relative atom-file paths.
inline RunConfig parse_config(const std::string &text,
                              const std::string &origin = "config") {
  using namespace detail;
  RunConfig cfg;
  const auto base = std::filesystem::path(origin).parent_path();
  std::map<std::string, std::vector<std::string>> seen_keys;
  AtomDraft atoms[2];
  bool have_pair = false, have_grid = false, have_min = false,
       have_max = false, have_points = false;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int n = 0;
  while (std::getline(in, raw)) {
    ++n;
    const Where w{origin, n};
    const auto line = trim(raw.substr(0, raw.find_first_of("#;")));
    if (line.empty())
      continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        w.fail("malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      static const std::vector<std::string> known = {
          "units", "atom.A", "atom.B",     "pair",
          "grid",  "output", "quadrature", "regimes"};
      if (std::find(known.begin(), known.end(), section) == known.end())
        w.fail("unknown section [" + section + "]");
      if (seen_keys.count(section))
        w.fail("duplicate section [" + section + "]");
      seen_keys[section];
      if (section == "atom.A")
        atoms[0].seen = true;
      if (section == "atom.B")
        atoms[1].seen = true;
      have_pair |= section == "pair";
      have_grid |= section == "grid";
      continue;
    }
    if (section.empty())
      w.fail("key outside of any section");
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      w.fail("expected key = value");
    const auto key = trim(line.substr(0, eq));
    const auto val = trim(line.substr(eq + 1));
    const bool repeatable =
        section.rfind("atom.", 0) == 0 && (key == "level" || key == "dipole");
    auto &keys = seen_keys[section];
    if (!repeatable) {
      if (std::find(keys.begin(), keys.end(), key) != keys.end())
        w.fail("duplicate key '" + key + "'");
      keys.push_back(key);
    }

    if (section == "units") {
      if (key != "c")
        w.fail("unknown units key '" + key + "'");
      cfg.units.c = to_double(val, w);
      if (!(cfg.units.c > 0.0))
        w.fail("c must be > 0");
    } else if (section.rfind("atom.", 0) == 0) {
      auto &a = atoms[section == "atom.A" ? 0 : 1];
      if (key == "file")
        read_atom_file(a, base / val);
      else
        atom_line(a, key, val, w);
    } else if (section == "pair") {
      if (key == "ref_a")
        cfg.ref_a = val;
      else if (key == "ref_b")
        cfg.ref_b = val;
      else if (key == "identical")
        cfg.identical = to_bool(val, w);
      else if (key == "axis") {
        const auto f = split(val, ',');
        if (f.size() != 3)
          w.fail("axis needs three components");
        cfg.axis = {to_double(f[0], w), to_double(f[1], w), to_double(f[2], w)};
        if (cfg.axis.norm() == 0.0)
          w.fail("axis must be nonzero");
      } else if (key == "prescription") {
        try {
          cfg.prescription = parse_prescription(val);
        } catch (const InputError &e) {
          w.fail(e.what());
        }
      } else
        w.fail("unknown pair key '" + key + "'");
    } else if (section == "grid") {
      if (key == "min") {
        cfg.grid.min = to_double(val, w);
        have_min = true;
      } else if (key == "max") {
        cfg.grid.max = to_double(val, w);
        have_max = true;
      } else if (key == "points") {
        cfg.grid.points = to_int(val, w);
        have_points = true;
      } else if (key == "spacing") {
        if (val == "log")
          cfg.grid.spacing = Spacing::log;
        else if (val == "linear")
          cfg.grid.spacing = Spacing::linear;
        else
          w.fail("spacing must be log or linear");
      } else
        w.fail("unknown grid key '" + key + "'");
    } else if (section == "output") {
      if (key == "csv")
        cfg.csv = val;
      else if (key == "json")
        cfg.json = val;
      else if (key == "regimes")
        cfg.regimes = val;
      else if (key == "channels") {
        cfg.channels.clear();
        const auto f = split(val, ',');
        for (const auto &ch : f) {
          if (ch == "all") {
            cfg.channels = channel_names();
            continue;
          }
          const auto &names = channel_names();
          if (std::find(names.begin(), names.end(), ch) == names.end())
            w.fail("unknown channel '" + ch + "'");
          if (!cfg.emits(ch))
            cfg.channels.push_back(ch);
        }
        // canonical order
        std::vector<std::string> ordered;
        for (const auto &nm : channel_names())
          if (cfg.emits(nm))
            ordered.push_back(nm);
        cfg.channels = ordered;
      } else
        w.fail("unknown output key '" + key + "'");
      if ((key == "csv" || key == "json" || key == "regimes") && val.empty())
        w.fail("empty output path");
    } else if (section == "quadrature") {
      if (key == "rel_tol")
        cfg.quadrature.rel_tol = to_double(val, w);
      else if (key == "abs_tol")
        cfg.quadrature.abs_tol = to_double(val, w);
      else if (key == "max_subdivisions")
        cfg.quadrature.max_subdivisions = to_int(val, w);
      else
        w.fail("unknown quadrature key '" + key + "'");
      try {
        cfg.quadrature.validate();
      } catch (const InputError &e) {
        w.fail(e.what());
      }
    } else if (section == "regimes") {
      if (key != "cp_threshold")
        w.fail("unknown regimes key '" + key + "'");
      cfg.cp_threshold = to_double(val, w);
      if (!(cfg.cp_threshold > 0.0))
        w.fail("cp_threshold must be > 0");
    }
  }

  const Where end{origin, n};
  for (int i = 0; i < 2; ++i) {
    if (!atoms[i].seen)
      end.fail(std::string("missing section [atom.") + (i ? "B" : "A") + "]");
    try {
      (i ? cfg.atom_b : cfg.atom_a) =
          AtomModel(atoms[i].levels, atoms[i].dipoles);
    } catch (const InputError &e) {
      end.fail(std::string("[atom.") + (i ? "B" : "A") + "]: " + e.what());
    }
  }
  if (!have_pair || cfg.ref_a.empty() || cfg.ref_b.empty())
    end.fail("[pair] needs ref_a and ref_b");
  if (!have_grid || !have_min || !have_max || !have_points)
    end.fail("[grid] needs min, max and points");
  if (!(cfg.grid.min > 0.0) || !(cfg.grid.min < cfg.grid.max))
    end.fail("grid needs 0 < min < max");
  if (cfg.grid.points < 2)
    end.fail("grid needs at least 2 points");
  try {
    cfg.pair();
  } catch (const InputError &e) {
    end.fail(e.what());
  }
  return cfg;
}

inline RunConfig load_config(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw InputError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

//==============================================================================
inline std::string fmt_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {
inline void write_atom(std::ostream &o, const AtomModel &a) {
  for (const auto &l : a.levels()) {
    o << "level = " << l.label << ", " << fmt_number(l.energy);
    if (!l.symmetry_tag.empty())
      o << ", " << l.symmetry_tag;
    o << "\n";
  }
  for (const auto &d : a.dipoles())
    o << "dipole = " << d.from_label << ", " << d.to_label << ", "
      << fmt_number(d.d_vector[0]) << ", " << fmt_number(d.d_vector[1]) << ", "
      << fmt_number(d.d_vector[2]) << "\n";
}
} // namespace detail

/// Canonical text form; atom files are inlined.
inline std::string serialize_config(const RunConfig &c) {
  std::ostringstream o;
  o << "[units]\nc = " << fmt_number(c.units.c) << "\n\n[atom.A]\n";
  detail::write_atom(o, c.atom_a);
  o << "\n[atom.B]\n";
  detail::write_atom(o, c.atom_b);
  o << "\n[pair]\nref_a = " << c.ref_a << "\nref_b = " << c.ref_b
    << "\nidentical = " << (c.identical ? "true" : "false")
    << "\naxis = " << fmt_number(c.axis[0]) << ", " << fmt_number(c.axis[1])
    << ", " << fmt_number(c.axis[2])
    << "\nprescription = " << to_string(c.prescription) << "\n\n[grid]\nmin = "
    << fmt_number(c.grid.min) << "\nmax = " << fmt_number(c.grid.max)
    << "\npoints = " << c.grid.points << "\nspacing = "
    << (c.grid.spacing == Spacing::log ? "log" : "linear")
    << "\n\n[output]\ncsv = " << c.csv << "\njson = " << c.json
    << "\nregimes = " << c.regimes << "\nchannels = ";
  for (std::size_t i = 0; i < c.channels.size(); ++i)
    o << (i ? ", " : "") << c.channels[i];
  o << "\n\n[quadrature]\nrel_tol = " << fmt_number(c.quadrature.rel_tol)
    << "\nabs_tol = " << fmt_number(c.quadrature.abs_tol)
    << "\nmax_subdivisions = " << c.quadrature.max_subdivisions
    << "\n\n[regimes]\ncp_threshold = " << fmt_number(c.cp_threshold) << "\n";
  return o.str();
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string &s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string config_hash(const RunConfig &c) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(serialize_config(c))));
  return buf;
}

} // namespace cpvdw::cli
