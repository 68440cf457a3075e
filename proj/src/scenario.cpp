#include "wassinc/scenario.hpp"

#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <nlohmann/json.hpp>

#include "wassinc/errors.hpp"
#include "wassinc/filippov.hpp"
#include "wassinc/relax.hpp"
#include "wassinc/verify.hpp"

namespace wassinc {

namespace {

std::string num(double x) { return fmt::format("{:.17g}", x); }

class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path root) : root_(std::move(root)) {
    std::filesystem::create_directories(root_);
  }

  void write(const std::string& name, const std::string& content) {
    const std::filesystem::path path = root_ / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    out.close();
    if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
    entries_.push_back({name, sha256_hex(content)});
  }

  const std::vector<ManifestEntry>& entries() const { return entries_; }

 private:
  std::filesystem::path root_;
  std::vector<ManifestEntry> entries_;
};

std::string trajectory_csv(const Trajectory& traj) {
  const std::size_t d = traj.front().dim();
  fmt::memory_buffer out;
  fmt::format_to(std::back_inserter(out), "t,particle");
  for (std::size_t c = 1; c <= d; ++c) fmt::format_to(std::back_inserter(out), ",x{}", c);
  out.push_back('\n');
  for (std::size_t i = 0; i < traj.front().size(); ++i) {
    for (std::size_t k = 0; k < traj.nodes(); ++k) {
      fmt::format_to(std::back_inserter(out), "{},{}", num(traj.grid()[k]), i);
      const auto x = traj.cloud(k).point(i);
      for (Eigen::Index c = 0; c < x.size(); ++c) fmt::format_to(std::back_inserter(out), ",{}", num(x[c]));
      out.push_back('\n');
    }
  }
  return fmt::to_string(out);
}

std::string signal_csv(const ControlSignal& signal) {
  fmt::memory_buffer out;
  fmt::format_to(std::back_inserter(out), "t_start,t_end,control_index\n");
  for (std::size_t k = 0; k < signal.intervals(); ++k) {
    fmt::format_to(std::back_inserter(out), "{},{},{}\n", num(signal.grid()[k]), num(signal.grid()[k + 1]),
                   signal.indices()[k]);
  }
  return fmt::to_string(out);
}

std::string report_csv(const BoundReport& report) {
  fmt::memory_buffer out;
  fmt::format_to(std::back_inserter(out), "t,measured,bound,margin\n");
  for (const auto& r : report.rows) {
    fmt::format_to(std::back_inserter(out), "{},{},{},{}\n", num(r.t), num(r.measured), num(r.bound), num(r.margin()));
  }
  return fmt::to_string(out);
}

std::string columns_csv(const std::vector<std::string>& header, const std::vector<const std::vector<double>*>& cols) {
  fmt::memory_buffer out;
  fmt::format_to(std::back_inserter(out), "{}\n", fmt::join(header, ","));
  for (std::size_t r = 0; r < cols.front()->size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (c > 0) out.push_back(',');
      fmt::format_to(std::back_inserter(out), "{}", num((*cols[c])[r]));
    }
    out.push_back('\n');
  }
  return fmt::to_string(out);
}

struct Context {
  const ScenarioConfig& config;
  std::vector<double> grid;
  ParticleCloud start;
};

const FieldSpec& need(const std::optional<FieldSpec>& spec, const char* key) {
  if (!spec) throw ConfigError(fmt::format("missing key '{}'", key));
  return *spec;
}

ControlledFamily need_family(const Context& ctx) {
  if (!ctx.config.family) throw ConfigError("missing key 'family'");
  return build_family(*ctx.config.family, ctx.config.d, ctx.config.T);
}

ParticleCloud reference_start(const Context& ctx) {
  if (!ctx.config.reference_initial) throw ConfigError("missing key 'reference_initial'");
  return sample_cloud(*ctx.config.reference_initial, ctx.config.d, ctx.config.N, ctx.config.seed, 1);
}

SimulationSetup setup_of(const Context& ctx) {
  return SimulationSetup{ctx.grid, ctx.config.method, ctx.config.p, ctx.config.slack};
}

StrategyKind strategy_kind(const std::string& name) {
  if (name == "first") return StrategyKind::kFirst;
  if (name == "min_norm") return StrategyKind::kMinNorm;
  if (name == "random") return StrategyKind::kRandom;
  throw ConfigError(fmt::format("'experiment.strategy' must be first, min_norm or random (got '{}')", name));
}

void finish_report(RunOutcome& outcome, OutputDir& dir, const BoundReport& report) {
  dir.write("report.csv", report_csv(report));
  outcome.constants.insert(outcome.constants.end(), report.constants.begin(), report.constants.end());
  outcome.constants.emplace_back("min_margin", report.min_margin());
  outcome.constants.emplace_back("slack", report.slack);
}

void run_simulate(const Context& ctx, OutputDir& dir, RunOutcome& outcome) {
  const NonlocalField field = build_field(need(ctx.config.field, "field"), ctx.config.d, ctx.config.T);
  const Trajectory traj = integrate(field, ctx.start, ctx.grid, ctx.config.method);
  dir.write("trajectory.csv", trajectory_csv(traj));
  const BoundReport report = momentum_report(traj, field.rates, field.growth, ctx.config.p, ctx.config.slack);
  finish_report(outcome, dir, report);
  outcome.pass = report.pass();
}

void run_peano(const Context& ctx, OutputDir& dir, RunOutcome& outcome) {
  const ScenarioConfig& c = ctx.config;
  const ExperimentSpec& e = c.experiment;
  const ControlledFamily family = need_family(ctx);
  const SelectionStrategy strategy{strategy_kind(e.strategy), c.seed};

  std::optional<PeanoResult> run;
  if (!e.n_list.empty()) {
    RefinementStudy study = refinement_study(family, ctx.start, c.T, e.n_list, e.substeps, strategy, c.p);
    std::vector<double> coarse, fine, dist;
    for (const auto& row : study.rows) {
      coarse.push_back(static_cast<double>(row.coarse));
      fine.push_back(static_cast<double>(row.fine));
      dist.push_back(row.sup_distance);
    }
    dir.write("refinement.csv", columns_csv({"coarse", "fine", "sup_distance"}, {&coarse, &fine, &dist}));
    double worst_residual = 0.0;
    for (const auto& r : study.runs) {
      for (double v : inclusion_residual(r.trajectory, r.signal, family, r.delay)) worst_residual = std::max(worst_residual, v);
    }
    outcome.constants.emplace_back("max_inclusion_residual_all_runs", worst_residual);
    run = std::move(study.runs.back());
  } else {
    run = peano_solve(family, ctx.start, c.T, PeanoOptions{e.n, e.substeps, strategy, {}});
  }
  double residual = 0.0;
  for (double v : inclusion_residual(run->trajectory, run->signal, family, run->delay)) residual = std::max(residual, v);
  outcome.warnings = run->warnings;
  dir.write("trajectory.csv", trajectory_csv(run->trajectory));
  dir.write("signal.csv", signal_csv(run->signal));
  const BoundReport report =
      momentum_report(run->trajectory, family.rates, family.growth, c.p, c.slack, run->delay);
  outcome.constants.emplace_back("delay", run->delay);
  outcome.constants.emplace_back("max_inclusion_residual", residual);
  finish_report(outcome, dir, report);
  bool residual_zero = residual == 0.0;
  for (const auto& [name, value] : outcome.constants) {
    if (name == "max_inclusion_residual_all_runs") residual_zero = residual_zero && value == 0.0;
  }
  outcome.pass = report.pass() && residual_zero;
}

void run_filippov(const Context& ctx, OutputDir& dir, RunOutcome& outcome) {
  const ScenarioConfig& c = ctx.config;
  const ControlledFamily family = need_family(ctx);
  const NonlocalField w = build_field(need(c.reference_field, "reference_field"), c.d, c.T);
  const Trajectory reference = integrate(w, reference_start(ctx), ctx.grid, c.method);
  FilippovOptions options;
  options.p = c.p;
  options.R = c.experiment.R.empty() ? std::numeric_limits<double>::infinity() : c.experiment.R.front();
  options.tol = c.experiment.tol;
  options.max_iter = c.experiment.max_iter;
  const FilippovResult result = filippov_track(family, reference, w, ctx.start, options);
  const FilippovCertificate& cert = result.certificate;

  dir.write("trajectory.csv", trajectory_csv(result.trajectory));
  dir.write("signal.csv", signal_csv(result.signal));
  dir.write("filippov.csv",
            columns_csv({"t", "eta", "chi", "error_term", "bound", "measured", "velocity_gap", "velocity_bound"},
                        {&cert.grid, &cert.eta, &cert.chi, &cert.error_term, &cert.bound, &cert.measured,
                         &cert.velocity_gap, &cert.velocity_bound}));
  BoundReport report{"filippov", {}, {}, c.slack};
  for (std::size_t k = 0; k < cert.grid.size(); ++k) report.rows.push_back({cert.grid[k], cert.measured[k], cert.bound[k]});
  report.constants = {{"C_p", cert.constants.C_p},           {"C_p_prime", cert.constants.C_p_prime},
                      {"script_C", cert.constants.script_C}, {"script_C_T", cert.constants.script_C_T},
                      {"R", cert.constants.R},               {"iterations", static_cast<double>(cert.iterations)}};
  finish_report(outcome, dir, report);
  outcome.status = cert.status;
  outcome.pass = cert.distance_holds(c.slack) && cert.velocity_holds(c.slack);
}

void run_relax(const Context& ctx, OutputDir& dir, RunOutcome& outcome) {
  const ScenarioConfig& c = ctx.config;
  const ExperimentSpec& e = c.experiment;
  const ControlledFamily family = need_family(ctx);
  const ConvexifiedFamily convexified = convexify(family, e.q, e.weight_steps);

  std::vector<double> target = e.relaxed_control;
  if (target.empty()) target.assign(family.size(), 1.0 / static_cast<double>(family.size()));
  if (target.size() != family.size()) {
    throw ConfigError(fmt::format("'experiment.relaxed_control' needs {} weights", family.size()));
  }
  std::optional<std::size_t> chosen;
  for (std::size_t u = 0; u < convexified.chattering.size() && !chosen; ++u) {
    const ChatteringControl& cc = convexified.chattering[u];
    std::vector<double> weights(family.size(), 0.0);
    for (std::size_t j = 0; j < cc.base_indices.size(); ++j) weights[cc.base_indices[j]] += cc.weight(j);
    bool same = true;
    for (std::size_t i = 0; i < weights.size(); ++i) same = same && std::abs(weights[i] - target[i]) <= 1e-12;
    if (same) chosen = u;
  }
  if (!chosen) {
    throw ConfigError("'experiment.relaxed_control' is not on the chattering grid (check q and weight_steps)");
  }
  const ControlSignal relaxed_signal(ctx.grid, std::vector<std::size_t>(ctx.grid.size() - 1, *chosen));
  const Trajectory relaxed =
      integrate(signal_field(convexified.family, relaxed_signal), ctx.start, ctx.grid, Method::kEuler);

  RelaxOptions options;
  options.p = c.p;
  options.rescale = e.rescale;
  options.tol = e.tol;
  options.max_iter = e.max_iter;
  if (e.policy == "empirical") {
    options.policy = RadiusPolicy::kEmpirical;
  } else if (e.policy == "recurrence") {
    options.policy = RadiusPolicy::kRecurrence;
  } else {
    throw ConfigError(fmt::format("'experiment.policy' must be empirical or recurrence (got '{}')", e.policy));
  }
  const RelaxResult result = relax_approximate(family, relaxed, relaxed_signal, convexified, e.delta, options);
  const RelaxReport& r = result.report;

  dir.write("trajectory.csv", trajectory_csv(result.trajectory));
  dir.write("signal.csv", signal_csv(result.signal));
  BoundReport report{"relax", {}, {}, 0.0};
  for (std::size_t k = 0; k < r.grid.size(); ++k) report.rows.push_back({r.grid[k], r.deviation[k], r.delta});
  report.constants = {{"delta", r.delta},
                      {"rescaled_delta", r.rescaled_delta},
                      {"target", r.target},
                      {"script_C", r.script_C},
                      {"script_C_T", r.script_C_T},
                      {"R_delta", r.R_delta},
                      {"block_budget", r.block_budget},
                      {"blocks", static_cast<double>(r.blocks)},
                      {"reblocked", static_cast<double>(r.reblocked.size())},
                      {"snapped", static_cast<double>(r.snapped.size())},
                      {"measured", r.measured}};
  finish_report(outcome, dir, report);
  outcome.status = r.filippov_status;
  outcome.pass = r.pass;
}

void run_verify(const Context& ctx, OutputDir& dir, RunOutcome& outcome) {
  const ScenarioConfig& c = ctx.config;
  const std::string& kind = c.experiment.verify;
  if (kind.empty()) throw ConfigError("missing key 'experiment.verify'");
  const SimulationSetup setup = setup_of(ctx);
  BoundReport report;
  if (kind == "momentum" || kind == "equi_integrability" || kind == "abs_continuity") {
    const NonlocalField field = build_field(need(c.field, "field"), c.d, c.T);
    dir.write("trajectory.csv", trajectory_csv(integrate(field, ctx.start, ctx.grid, c.method)));
    if (kind == "momentum") {
      report = verify_momentum(field, ctx.start, setup);
    } else if (kind == "abs_continuity") {
      report = verify_abs_continuity(field, ctx.start, setup);
    } else {
      const std::vector<double> radii = c.experiment.R.empty() ? std::vector<double>{1.0, 2.0, 5.0} : c.experiment.R;
      report = verify_equi_integrability(field, ctx.start, setup, radii);
    }
  } else if (kind == "gronwall_global" || kind == "gronwall_local") {
    const NonlocalField v = build_field(need(c.field, "field"), c.d, c.T);
    const NonlocalField w = build_field(need(c.reference_field, "reference_field"), c.d, c.T);
    const ParticleCloud nu0 = reference_start(ctx);
    StabilityInputs in{&v, &w, &ctx.start, &nu0};
    if (kind == "gronwall_local") {
      if (c.experiment.R.empty()) throw ConfigError("missing key 'experiment.R'");
      in.R = c.experiment.R.front();
      if (!std::isfinite(in.R)) throw ConfigError("'experiment.R' must be finite for gronwall_local");
    }
    in.include_error_term = c.experiment.include_error_term;
    dir.write("trajectory.csv", trajectory_csv(integrate(v, ctx.start, ctx.grid, c.method)));
    report = verify_stability(in, setup);
  } else if (kind == "hypotheses_probe") {
    std::vector<NonlocalField> members;
    if (c.field) members.push_back(build_field(*c.field, c.d, c.T));
    if (c.family) {
      const ControlledFamily family = build_family(*c.family, c.d, c.T);
      for (std::size_t u = 0; u < family.size(); ++u) members.push_back(family.slice(u));
    }
    if (members.empty()) throw ConfigError("missing key 'field' or 'family'");
    dir.write("trajectory.csv", trajectory_csv(integrate(members.front(), ctx.start, ctx.grid, c.method)));
    report = verify_hypotheses(members, ctx.start, setup, c.experiment.samples, c.seed);
  } else {
    throw ConfigError(fmt::format("unknown verify kind '{}' in 'experiment.verify'", kind));
  }
  finish_report(outcome, dir, report);
  outcome.pass = report.pass();
}

nlohmann::ordered_json json_number(double x) {
  if (std::isfinite(x)) return x;
  return num(x);
}

}  // namespace

RunOutcome run_scenario(const ScenarioConfig& config, const std::filesystem::path& out_dir) {
  Context ctx{config, uniform_grid(config.T, config.steps),
              sample_cloud(config.initial, config.d, config.N, config.seed, 0)};
  OutputDir dir(out_dir);
  RunOutcome outcome;
  const std::string& kind = config.experiment.kind;
  outcome.experiment = kind == "verify" ? "verify:" + config.experiment.verify : kind;
  if (kind == "simulate") {
    run_simulate(ctx, dir, outcome);
  } else if (kind == "peano") {
    run_peano(ctx, dir, outcome);
  } else if (kind == "filippov") {
    run_filippov(ctx, dir, outcome);
  } else if (kind == "relax") {
    run_relax(ctx, dir, outcome);
  } else if (kind == "verify") {
    run_verify(ctx, dir, outcome);
  } else {
    throw ConfigError(fmt::format("unknown experiment kind '{}' in 'experiment.kind'", kind));
  }
  outcome.files = dir.entries();

  nlohmann::ordered_json manifest;
  manifest["experiment"] = outcome.experiment;
  manifest["verdict"] = outcome.pass ? "pass" : "fail";
  if (!outcome.status.empty()) manifest["status"] = outcome.status;
  manifest["seed"] = config.seed;
  nlohmann::ordered_json constants = nlohmann::ordered_json::object();
  for (const auto& [name, value] : outcome.constants) constants[name] = json_number(value);
  manifest["constants"] = constants;
  manifest["warnings"] = outcome.warnings;
  nlohmann::ordered_json files = nlohmann::ordered_json::array();
  for (const auto& entry : outcome.files) files.push_back({{"file", entry.file}, {"sha256", entry.sha256}});
  manifest["files"] = files;
  std::ofstream out(out_dir / "manifest.json", std::ios::binary | std::ios::trunc);
  out << manifest.dump(2) << '\n';
  out.close();
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", (out_dir / "manifest.json").string()));
  return outcome;
}

}  // namespace wassinc
