// allee_patch: command-line front end of the two-patch toolkit.
//
//   allee_patch <command> --config PATH [--out DIR] [--jobs N] [--seed-set NAME] [--svg]
//
// Exit codes: 0 success, 2 configuration or output error, 3 numeric failure.

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <string>

#include "allee/io/commands.hpp"

int main(int argc, char** argv) {
  using namespace allee::io;
  CLI::App app{"Two-patch predator-prey model with Allee effect"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(kToolkitVersion));

  std::string config, out, seed_set;
  int jobs = 1;
  bool svg = false;
  app.add_option("--config", config, "Run configuration (INI)")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out, "Output directory (overrides [output] dir)");
  app.add_option("--jobs", jobs, "Worker threads for sweep (ALLEE_PATCH_JOBS overrides)")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed-set", seed_set, "Seed set: default or symmetric");
  app.add_flag("--svg", svg, "Also write SVG figures");

  const char* help[] = {"Integrate trajectories", "List equilibria", "Eigenvalues of equilibria",
                        "Bifurcation boundary curves", "Classify an (alpha, m) grid",
                        "Scan alpha for the refuge system", "Classify attractors per seed"};
  std::size_t i = 0;
  for (std::string_view name : kCommands) app.add_subcommand(std::string(name), help[i++]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  CommandOptions o;
  if (!out.empty()) o.out_dir = out;
  if (!seed_set.empty()) o.seed_set = seed_set;
  o.svg = svg;
  o.jobs = jobs;
  if (const char* env = std::getenv("ALLEE_PATCH_JOBS"); env && *env) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (*end != '\0' || n < 1) {
      std::cerr << "config error: ALLEE_PATCH_JOBS must be a positive integer, got '" << env << "'\n";
      return kExitConfig;
    }
    o.jobs = static_cast<int>(n);
  }
  return run_command(app.get_subcommands().front()->get_name(), config, o, std::cout, std::cerr);
}
