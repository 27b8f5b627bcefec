#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sawspin/config.hpp"
#include "sawspin/errors.hpp"
#include "sawspin/experiments.hpp"

// sawspin: simulation of acoustically driven spin transitions of S=1 defect
// ensembles in a Gaussian surface-acoustic-wave cavity.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

namespace {

struct GlobalArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::vector<double> power_mw;
  std::string direction;
};

sawspin::config::RunConfig resolve_config(const GlobalArgs& args) {
  sawspin::config::RunConfig cfg =
      args.config_path.empty()
          ? sawspin::config::default_config()
          : sawspin::config::load_config(args.config_path);
  if (args.seed) {
    cfg.rng_seed = *args.seed;
  }
  if (!args.power_mw.empty()) {
    cfg.autler_townes.power_mw = args.power_mw;
    cfg.rabi.power_mw = args.power_mw;
    cfg.apr.power_mw = args.power_mw.front();
    cfg.map.power_mw = args.power_mw.front();
  }
  if (!args.direction.empty()) {
    if (args.direction != "transverse" && args.direction != "longitudinal" &&
        args.direction != "2d") {
      throw sawspin::config_error(
          "--direction must be 'transverse', 'longitudinal' or '2d'");
    }
    cfg.map.direction = args.direction;
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "sawspin - strain-driven spin transitions in a Gaussian SAW cavity"};
  app.require_subcommand(1);

  GlobalArgs args;
  app.add_option("--config", args.config_path,
                 "JSON run configuration (defaults are built in)");
  app.add_option("--out", args.out_dir, "output directory");
  std::uint64_t seed_value = 0;
  CLI::Option* seed_opt =
      app.add_option("--seed", seed_value, "override config rng_seed");
  app.add_option("--power-mw", args.power_mw,
                 "override experiment powers (mW, repeatable)");
  app.add_option("--direction", args.direction,
                 "map scan direction: transverse | longitudinal | 2d");

  CLI::App* c_rayleigh =
      app.add_subcommand("rayleigh", "solve the Rayleigh wave and decay table");
  CLI::App* c_field =
      app.add_subcommand("field", "export strain and surface slope maps");
  CLI::App* c_apr = app.add_subcommand(
      "apr", "acoustic paramagnetic resonance lock-in scan");
  CLI::App* c_at = app.add_subcommand(
      "autler-townes", "mechanically dressed spectra and splittings");
  CLI::App* c_rabi =
      app.add_subcommand("rabi", "mechanically driven Rabi traces");
  CLI::App* c_map =
      app.add_subcommand("map", "spatial maps of the mechanical drive rate");

  CLI11_PARSE(app, argc, argv);
  if (*seed_opt) {
    args.seed = seed_value;
  }

  try {
    const sawspin::config::RunConfig cfg = resolve_config(args);
    const std::filesystem::path out_dir = args.out_dir;
    nlohmann::json summary;
    if (c_rayleigh->parsed()) {
      summary = sawspin::experiments::cmd_rayleigh(cfg, out_dir);
    } else if (c_field->parsed()) {
      summary = sawspin::experiments::cmd_field(cfg, out_dir);
    } else if (c_apr->parsed()) {
      summary = sawspin::experiments::cmd_apr(cfg, out_dir);
    } else if (c_at->parsed()) {
      summary = sawspin::experiments::cmd_autler_townes(cfg, out_dir);
    } else if (c_rabi->parsed()) {
      summary = sawspin::experiments::cmd_rabi(cfg, out_dir);
    } else if (c_map->parsed()) {
      summary = sawspin::experiments::cmd_map(cfg, out_dir);
    }
    std::printf("%s\n", summary.dump(2).c_str());
    return 0;
  } catch (const sawspin::config_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const sawspin::numeric_error& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
