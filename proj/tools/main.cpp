// kirchhoff check | geometry | solve --config PATH [--set KEY=VALUE]... [--output DIR] [--seed N]

#include <cstdint>
#include <cstdio>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kirchhoff/errors.hpp"
#include "kirchhoff/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Critical points of the radial Kirchhoff energy and checks of its growth hypotheses"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> sets;
  std::string output;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--set", sets, "override KEY=VALUE, dotted keys (grid.n=512, checks.0.range=nonnegative)");
    sub->add_option("--output", output, "output directory (overrides output_dir)");
    sub->add_option("--seed", seed, "random seed (overrides seed)");
  };
  CLI::App* check = app.add_subcommand("check", "verify V1, S1, S2, S3, AR on sampled lattices");
  CLI::App* geometry = app.add_subcommand("geometry", "certify the mountain-pass geometry");
  CLI::App* solve = app.add_subcommand("solve", "find the negative-level minimiser and the mountain-pass point");
  for (CLI::App* sub : {check, geometry, solve}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kirchhoff::exit_config;
  }

  CLI::App* chosen = app.get_subcommands().front();
  const auto seed_opt = chosen->count("--seed") ? std::optional<std::uint64_t>(seed) : std::nullopt;
  const auto out_opt = chosen->count("--output") ? std::optional<std::string>(output) : std::nullopt;

  try {
    const kirchhoff::RunConfig cfg = kirchhoff::load_config_file(config_path, sets, seed_opt, out_opt);
    kirchhoff::RunOutcome out;
    if (chosen == check)
      out = kirchhoff::cmd_check(cfg);
    else if (chosen == geometry)
      out = kirchhoff::cmd_geometry(cfg);
    else
      out = kirchhoff::cmd_solve(cfg);
    for (const std::string& f : out.files) std::fprintf(stderr, "[kirchhoff] wrote %s\n", f.c_str());
    return out.exit_code;
  } catch (const kirchhoff::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kirchhoff::exit_config;
  } catch (const kirchhoff::ShiftViolation& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kirchhoff::exit_config;
  } catch (const kirchhoff::DimensionError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kirchhoff::exit_config;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kirchhoff::exit_nonconvergence;
  }
}
