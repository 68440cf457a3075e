#include <CLI11.hpp>
#include <cstdint>
#include <fmt/format.h>
#include <optional>

#include "wassinc/errors.hpp"
#include "wassinc/scenario.hpp"

namespace {

enum Exit { kPass = 0, kFail = 1, kError = 2 };

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Particle experiments for continuity equations and inclusions in Wasserstein spaces"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> particles;
  std::optional<std::size_t> steps;
  std::optional<double> p;

  for (const char* name : {"simulate", "peano", "filippov", "relax", "verify"}) {
    CLI::App* sub = app.add_subcommand(name, fmt::format("run the {} experiment", name));
    sub->add_option("--config", config_path, "scenario JSON file")->required();
    sub->add_option("--out", out_dir, "output directory")->required();
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--particles", particles, "override N");
    sub->add_option("--steps", steps, "override the number of time steps");
    sub->add_option("--p", p, "override the Wasserstein order");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kError;
  }

  try {
    wassinc::ScenarioConfig config = wassinc::load_config(config_path);
    config.experiment.kind = app.get_subcommands().front()->get_name();
    if (seed) config.seed = *seed;
    if (particles) {
      if (*particles == 0) throw wassinc::ConfigError("--particles must be >= 1");
      config.N = *particles;
    }
    if (steps) {
      if (*steps == 0) throw wassinc::ConfigError("--steps must be >= 1");
      config.steps = *steps;
    }
    if (p) {
      if (!(*p >= 1.0)) throw wassinc::ConfigError("--p must be >= 1");
      config.p = *p;
    }
    const wassinc::RunOutcome outcome = wassinc::run_scenario(config, out_dir);
    for (const auto& w : outcome.warnings) fmt::print(stderr, "warning: {}\n", w);
    fmt::print("{}: {}{}\n", outcome.experiment, outcome.pass ? "pass" : "fail",
               outcome.status.empty() ? "" : fmt::format(" ({})", outcome.status));
    return outcome.pass ? kPass : kFail;
  } catch (const wassinc::ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
  }
  return kError;
}
