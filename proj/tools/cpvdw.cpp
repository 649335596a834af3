#include "CLI11.hpp"
#include "cpvdw/cli/commands.hpp"
#include <iostream>
#include <unistd.h>

using namespace cpvdw;
using namespace cpvdw::cli;

namespace {

cplx parse_omega(const std::string &s) {
  const auto f = cli::detail::split(s, ',');
  const cli::detail::Where w{"--omega", 0};
  if (f.size() == 1)
    return {cli::detail::to_double(f[0], w), 0.0};
  if (f.size() == 2)
    return {cli::detail::to_double(f[0], w), cli::detail::to_double(f[1], w)};
  throw InputError("--omega expects re or re,im");
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Two-atom dispersion energies: Wick, pole and width terms"};
  app.require_subcommand(1);
  std::string config_path, out_dir = ".", presc;
  int threads = default_threads();

  auto add_common = [&](CLI::App *sc, bool needs_config) {
    auto *o = sc->add_option("--config", config_path, "run configuration");
    if (needs_config)
      o->required();
    sc->add_option("--out", out_dir, "output directory");
    sc->add_option("--threads", threads,
                   "worker threads (default: $CPVDW_THREADS or all cores)")
        ->check(CLI::PositiveNumber);
    sc->add_option("--prescription", presc, "feynman or retarded")
        ->check(CLI::IsMember({"feynman", "retarded"}));
  };

  auto *curve = app.add_subcommand("curve", "energy curve over the grid");
  add_common(curve, true);
  auto *regimes =
      app.add_subcommand("regimes", "asymptotic coefficients and crossover");
  add_common(regimes, true);
  auto *validate = app.add_subcommand("validate", "run the self-check suite");
  validate->add_option("--out", out_dir, "scratch directory");
  auto *pol = app.add_subcommand("polarizability",
                                 "polarizability and permittivity of one atom");
  add_common(pol, true);
  std::string which = "A";
  std::vector<std::string> omegas{"0"};
  std::optional<double> density;
  pol->add_option("--atom", which, "A or B")->check(CLI::IsMember({"A", "B"}));
  pol->add_option("--omega", omegas, "frequency: re or re,im (repeatable)");
  pol->add_option("--density", density, "number density (per Bohr^3)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : input_error;
  }

  return guarded(
      [&]() -> int {
        if (validate->parsed()) {
          fs::path scratch = out_dir == "."
                                 ? fs::temp_directory_path() /
                                       ("cpvdw-validate-" +
                                        std::to_string(::getpid()))
                                 : fs::path(out_dir);
          const int rc = cmd_validate(std::cout, scratch);
          if (out_dir == ".")
            fs::remove_all(scratch);
          return rc;
        }
        auto cfg = load_config(config_path);
        if (!presc.empty())
          cfg.prescription = parse_prescription(presc);
        if (curve->parsed())
          return cmd_curve(cfg, out_dir, threads);
        if (regimes->parsed())
          return cmd_regimes(cfg, out_dir, std::cout);
        std::vector<cplx> ws;
        for (const auto &s : omegas)
          ws.push_back(parse_omega(s));
        return cmd_polarizability(cfg, which, ws, density, std::cout);
      },
      std::cerr);
}
