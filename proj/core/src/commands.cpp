#include "mdpabs/commands.hpp"

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "mdpabs/artifacts.hpp"
#include "mdpabs/errors.hpp"
#include "mdpabs/estimator.hpp"
#include "mdpabs/lp.hpp"
#include "mdpabs/parallel.hpp"
#include "mdpabs/scenario.hpp"
#include "mdpabs/synth.hpp"

namespace mdpabs {

namespace {

namespace fs = std::filesystem;

std::uint64_t resolve_seed(const RunConfig& config, const CommandOptions& options) {
  if (options.seed_entropy) {
    std::random_device rd;
    const std::uint64_t seed =
        (static_cast<std::uint64_t>(rd()) << 32) ^ static_cast<std::uint64_t>(rd());
    std::printf("seed (entropy): %" PRIu64 "\n", seed);
    return seed;
  }
  require(config.seed.has_value(), ErrorCode::config_error,
          "seed: required (or pass --seed-entropy for a drawn seed)");
  return *config.seed;
}

std::string out_path(const CommandOptions& options, const char* name) {
  fs::create_directories(options.out_dir);
  return (fs::path(options.out_dir) / name).string();
}

int workers_or_default(const CommandOptions& options) {
  return options.workers > 0 ? options.workers : default_worker_count();
}

double resolve_variance_bound(const RunConfig& config, const BlackBoxSystem& sys,
                              const Grid& grid, const SbfBasis& basis,
                              const DecisionBounds& bounds, NoiseStream stream) {
  const ScenarioSection& sc = *config.scenario;
  if (sc.variance_bound) return *sc.variance_bound;
  // Pilot pass: heuristic estimate on a fixed candidate template.
  require(config.sbf && config.sbf->pilot_coefficients, ErrorCode::config_error,
          "sbf.pilot_coefficients: required when scenario.variance_pilot is used");
  const double alpha = bounds.alpha_frozen.value_or(bounds.alpha_min);
  const double psi = bounds.psi_frozen.value_or(0.0);
  SbfTemplate pilot(basis, *config.sbf->pilot_coefficients, alpha, psi);
  const double bound = estimate_variance_bound(sys, grid, pilot, *sc.pilot_points,
                                               *sc.pilot_realizations, stream);
  std::printf("variance bound (pilot heuristic, inflated x2): %.17g\n", bound);
  return bound;
}

ScenarioConfig build_scenario_config(const RunConfig& config, const BlackBoxSystem& sys,
                                     const SbfBasis& basis, const DecisionBounds& bounds,
                                     double variance_bound,
                                     const LipschitzConstant& lipschitz) {
  const ScenarioSection& sc = *config.scenario;
  ScenarioConfig out;
  out.gap = sc.gap;
  out.beta_scenario = sc.beta_scenario;
  out.beta_empirical = sc.beta_empirical;
  out.mean_error = sc.mean_error;
  out.variance_bound = variance_bound;
  out.lipschitz = lipschitz.value;
  out.state_dim = sys.dim();
  out.decision_vars = sc.decision_vars.value_or(bounds.free_vars(basis.size()));
  out.validate();
  return out;
}

}  // namespace

int cmd_complexity(const RunConfig& config, const CommandOptions& options) {
  const std::uint64_t seed = resolve_seed(config, options);
  const BlackBoxSystem sys = make_system(config);
  const Grid grid = make_grid(config, sys.state_box());
  const SbfBasis basis = make_basis(config, sys.dim());
  const DecisionBounds bounds = make_decision_bounds(config, basis.size());
  const LipschitzConstant lipschitz = resolve_lipschitz(config, sys, grid);
  const double variance_bound = resolve_variance_bound(config, sys, grid, basis, bounds,
                                                       NoiseStream(seed).derive(0x0b5));
  const ScenarioConfig sc =
      build_scenario_config(config, sys, basis, bounds, variance_bound, lipschitz);

  const double violation = sc.violation_level();
  const std::uint64_t samples = sc.min_samples();
  const std::uint64_t realizations = sc.min_realizations();

  std::printf("lipschitz: drift %.6g, gap %.6g, max %.6g\n", lipschitz.drift_component,
              lipschitz.gap_component, lipschitz.value);
  std::printf("violation level: %.6g\n", violation);
  std::printf("decision vars: %d\n", sc.decision_vars);
  std::printf("min sampled states N: %" PRIu64 "\n", samples);
  std::printf("min realizations M: %" PRIu64 "\n", realizations);

  std::string summary = "{\n";
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "  \"lipschitz\": %.17g,\n  \"lipschitz_drift\": %.17g,\n"
                "  \"lipschitz_gap\": %.17g,\n  \"violation_level\": %.17g,\n"
                "  \"decision_vars\": %d,\n  \"min_samples\": %" PRIu64
                ",\n  \"min_realizations\": %" PRIu64 ",\n",
                lipschitz.value, lipschitz.drift_component, lipschitz.gap_component, violation,
                sc.decision_vars, samples, realizations);
  summary += buf;
  double beta_intervals = 0.0;
  if (config.imdp) {
    const std::uint64_t per_pair =
        min_transition_sample_count(config.imdp->half_width, config.imdp->confidence);
    const std::size_t entries = grid.cell_count() * (grid.cell_count() + 1) *
                                static_cast<std::size_t>(sys.inputs().size());
    beta_intervals = config.imdp->confidence * static_cast<double>(entries);
    std::printf("min transition samples G (per pair): %" PRIu64 "\n", per_pair);
    std::printf("interval entries: %zu, beta_intervals: %.6g%s\n", entries, beta_intervals,
                beta_intervals >= 1.0 ? "  [VACUOUS]" : "");
    std::snprintf(buf, sizeof buf,
                  "  \"min_transition_samples\": %" PRIu64
                  ",\n  \"interval_entries\": %zu,\n  \"beta_intervals\": %.17g,\n",
                  per_pair, entries, beta_intervals);
    summary += buf;
  }
  const double confidence = 1.0 - sc.beta_empirical - sc.beta_scenario - beta_intervals;
  std::printf("beta ledger: empirical %.6g + scenario %.6g + intervals %.6g -> confidence %.6g\n",
              sc.beta_empirical, sc.beta_scenario, beta_intervals, std::max(0.0, confidence));
  std::snprintf(buf, sizeof buf,
                "  \"beta_empirical\": %.17g,\n  \"beta_scenario\": %.17g,\n"
                "  \"confidence\": %.17g\n}\n",
                sc.beta_empirical, sc.beta_scenario, std::max(0.0, confidence));
  summary += buf;
  const std::string path = out_path(options, "complexity.json");
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::io_error, "cannot open '" + path + "' for writing");
  out << summary;
  return 0;
}

int cmd_certify(const RunConfig& config, const CommandOptions& options) {
  const std::uint64_t seed = resolve_seed(config, options);
  const int workers = workers_or_default(options);
  const BlackBoxSystem sys = make_system(config);
  const Grid grid = make_grid(config, sys.state_box());
  const SbfBasis basis = make_basis(config, sys.dim());
  const DecisionBounds bounds = make_decision_bounds(config, basis.size());
  const LipschitzConstant lipschitz = resolve_lipschitz(config, sys, grid);
  NoiseStream root(seed);
  const double variance_bound =
      resolve_variance_bound(config, sys, grid, basis, bounds, root.derive(0x0b5));
  const ScenarioConfig sc =
      build_scenario_config(config, sys, basis, bounds, variance_bound, lipschitz);

  const ScenarioSection& section = *config.scenario;
  const std::uint64_t samples = section.samples.value_or(sc.min_samples());
  const std::uint64_t realizations = section.realizations.value_or(sc.min_realizations());

  if (sys.noise_mode() == NoiseMode::independent) {
    std::printf("warning: independent noise mode; the coupled one-step expectation is "
                "approximated with decoupled draws\n");
  }

  const auto t0 = std::chrono::steady_clock::now();
  const ScenarioProgram program = assemble_program(sys, grid, basis, samples, realizations,
                                                   sc.mean_error, root.derive(0x5c9), workers);
  const auto t1 = std::chrono::steady_clock::now();
  const LinearProgram lp = to_linear_program(program, bounds);
  const LpSolution solution = solve(lp, 1e-9, workers);
  const auto t2 = std::chrono::steady_clock::now();

  if (solution.status == LpStatus::infeasible) {
    throw_error(ErrorCode::solver_failure,
                "scenario program is infeasible under the configured freezes and bounds");
  }
  if (solution.status == LpStatus::unbounded) {
    throw_error(ErrorCode::solver_failure, "scenario program is unbounded; check the bounds");
  }

  const SbfCertificate certificate =
      certify(program, sc, solution, options.override_samples);

  if (section.dump_program) {
    const std::string dump_path = out_path(options, "program.txt");
    std::ofstream dump(dump_path, std::ios::binary);
    require(dump.good(), ErrorCode::io_error, "cannot open '" + dump_path + "' for writing");
    program.dump(dump);
  }

  const CertificateFile file{seed,
                             certificate,
                             sc.mean_error,
                             sc.variance_bound,
                             sc.lipschitz,
                             sc.violation_level(),
                             sc.state_dim,
                             program.rows(),
                             solution.outer_iterations,
                             solution.simplex_pivots,
                             solution.max_violation,
                             program.paired_noise};
  save_certificate(out_path(options, "certificate.json"), file);

  const auto ms = [](auto a, auto b) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(b - a).count();
  };
  std::printf("rows: %zu  (assembly %lld ms, solve %lld ms)\n", program.rows(),
              static_cast<long long>(ms(t0, t1)), static_cast<long long>(ms(t1, t2)));
  std::printf("optimum: %.17g  margin: %.17g\n", certificate.optimum, certificate.margin);
  std::printf("verdict: %s  confidence: %.6g\n", verdict_name(certificate.verdict),
              certificate.confidence);
  return certificate.verdict == Verdict::certified ? 0 : 2;
}

int cmd_abstract(const RunConfig& config, const CommandOptions& options,
                 const std::string& mode) {
  const std::uint64_t seed = resolve_seed(config, options);
  const int workers = workers_or_default(options);
  const BlackBoxSystem sys = make_system(config);
  const Grid grid = make_grid(config, sys.state_box());
  NoiseStream root(seed);

  AbstractionFile file;
  file.seed = seed;
  if (mode == "imdp") {
    require(config.imdp.has_value(), ErrorCode::config_error,
            "imdp: section required for mode imdp");
    file.kind = "imdp";
    file.imdp = estimate_imdp(sys, grid, config.imdp->half_width, config.imdp->confidence,
                              root.derive(0x1d9), workers);
    const double beta3 = file.imdp->beta_total();
    std::printf("interval abstraction: G %" PRIu64 " per pair, beta_intervals %.6g%s\n",
                file.imdp->samples_per_pair, beta3, beta3 >= 1.0 ? "  [VACUOUS]" : "");
  } else if (mode == "mle") {
    require(config.mle.has_value(), ErrorCode::config_error,
            "mle: section required for mode mle");
    file.kind = "mdp";
    file.mdp = mle_abstraction(sys, grid, config.mle->residuals, config.mle->pilot,
                               root.derive(0x317), workers);
    std::printf("gaussian abstraction: %" PRIu64 " residuals, pilot %" PRIu64 " per pair\n",
                config.mle->residuals, config.mle->pilot);
  } else if (mode == "model") {
    // Model-backed twin: deterministic means from a zero-noise copy of the
    // configured family plus the configured noise scale as the exact stddev.
    require(config.system.has_value(), ErrorCode::config_error, "system: section required");
    RunConfig twin_config = config;
    twin_config.system->noise_scale = 0.0;
    const BlackBoxSystem twin = make_system(twin_config);
    const StepMeans means = estimate_step_means(twin, grid, 1, root.derive(0x371), workers);
    const std::vector<double> stddev(static_cast<std::size_t>(sys.dim()),
                                     config.system->noise_scale);
    file.kind = "mdp";
    file.mdp = mdp_from_gaussian(grid, sys.inputs(), means, stddev,
                                 FiniteMdp::Provenance::model);
    std::printf("model-backed abstraction (exact means, stddev %.6g)\n",
                config.system->noise_scale);
  } else {
    throw_error(ErrorCode::config_error, "unknown abstraction mode '" + mode +
                                             "' (expected imdp | mle | model)");
  }
  save_abstraction(out_path(options, "abstraction.json"), file);
  return 0;
}

int cmd_synthesize(const RunConfig& config, const CommandOptions& options,
                   const std::string& abstraction_path) {
  const std::uint64_t seed = resolve_seed(config, options);
  const int workers = workers_or_default(options);
  const AbstractionFile abstraction = load_abstraction(abstraction_path);
  const SafetySpec spec = make_safety_spec(config);
  const Grid& grid = abstraction.grid();

  require(config.spec.has_value(), ErrorCode::config_error, "spec: section required");
  const std::vector<double>& initial = config.spec->initial;
  const Projection proj = project(grid, initial);
  require(!proj.absorbing, ErrorCode::config_error,
          "spec.initial: initial state must lie inside the state box");

  SynthesisResult result = abstraction.imdp
                               ? robust_safety_value_iteration(*abstraction.imdp, spec, workers)
                               : safety_value_iteration(*abstraction.mdp, spec, workers);

  PolicyFile file{seed,
                  abstraction.imdp.has_value(),
                  spec,
                  grid,
                  std::move(result.policy),
                  std::move(result.values),
                  initial,
                  proj.cell,
                  0.0,
                  result.safe.safe_count,
                  result.safe.straddling,
                  result.repaired_rows};
  file.initial_value = file.values.at(0, proj.cell);
  save_policy(out_path(options, "policy.json"), file);

  std::printf("safe cells: %zu (straddling %zu)%s\n", file.safe_cells, file.straddling_cells,
              result.safe.deflated_empty ? "  [DEFLATION EMPTIED THE SAFE SET]" : "");
  if (file.repaired_rows > 0) {
    std::printf("repaired interval rows: %zu\n", file.repaired_rows);
  }
  std::printf("value at initial cell %zu: %.17g\n", file.initial_cell, file.initial_value);
  return 0;
}

int cmd_simulate(const RunConfig& config, const CommandOptions& options,
                 const std::string& policy_path, const std::string& compare_policy_path) {
  const std::uint64_t seed = resolve_seed(config, options);
  const BlackBoxSystem sys = make_system(config);
  const PolicyFile policy = load_policy(policy_path);
  const int runs = config.simulate.runs;

  const SimulationResult result =
      closed_loop_sim(sys, *policy.grid, policy.policy, policy.spec, policy.initial, runs,
                      NoiseStream(seed).derive(0x51a));
  write_trajectories_csv(out_path(options, "trajectories.csv"), result, sys.dim());
  std::printf("runs: %d  empirical safety frequency: %.6g\n", runs, result.safety_frequency);

  if (!compare_policy_path.empty()) {
    const PolicyFile other = load_policy(compare_policy_path);
    // Same derived stream: both closed loops see identical realizations.
    const SimulationResult other_result =
        closed_loop_sim(sys, *other.grid, other.policy, other.spec, policy.initial, runs,
                        NoiseStream(seed).derive(0x51a));
    std::vector<std::vector<double>> distances;
    distances.reserve(result.runs.size());
    for (std::size_t r = 0; r < result.runs.size(); ++r) {
      distances.push_back(trajectory_distance(result.runs[r], other_result.runs[r]));
    }
    write_distance_csv(out_path(options, "distance.csv"), distances);
    std::printf("comparison frequency: %.6g (distance.csv written)\n",
                other_result.safety_frequency);
  }
  return 0;
}

int cmd_report(const RunConfig& config, const CommandOptions& options,
               const std::string& certificate_path, const std::string& abstraction_path,
               const std::string& policy_path) {
  (void)config;
  const CertificateFile certificate = load_certificate(certificate_path);
  const AbstractionFile abstraction = load_abstraction(abstraction_path);
  const PolicyFile policy = load_policy(policy_path);

  require(policy.spec.deflation > 0.0, ErrorCode::config_error,
          "spec.deflation: the closeness radius must be positive to compose the guarantee");
  const Grid& grid = *policy.grid;
  const auto rep = grid.center(policy.initial_cell);
  const double s_initial =
      certificate.certificate.sbf.evaluate(policy.initial, rep);
  const DeviationBound delta =
      deviation_bound(s_initial, certificate.certificate.sbf.alpha,
                      certificate.certificate.sbf.psi, policy.spec.horizon,
                      policy.spec.deflation);

  double rho = 0.0;
  double beta_intervals = 0.0;
  if (abstraction.imdp) {
    rho = interval_value_gap(*abstraction.imdp, policy.spec.horizon);
    beta_intervals = abstraction.imdp->beta_total();
  }

  ReportFile report;
  report.guarantee = compose_guarantee(policy.initial_value, delta.raw, rho,
                                       certificate.certificate.beta_empirical,
                                       certificate.certificate.beta_scenario, beta_intervals);
  report.guarantee.epsilon = policy.spec.deflation;
  report.guarantee.horizon = policy.spec.horizon;
  report.s_initial = s_initial;
  report.alpha = certificate.certificate.sbf.alpha;
  report.psi = certificate.certificate.sbf.psi;
  report.horizon_independent = delta.horizon_independent;
  report.abstraction_has_intervals = abstraction.imdp.has_value();
  report.initial = policy.initial;
  report.initial_rep.assign(rep.begin(), rep.end());
  report.verdict = verdict_name(certificate.certificate.verdict);
  save_report(out_path(options, "report.json"), report);

  const GuaranteeReport& g = report.guarantee;
  std::printf("deviation bound delta: %.6g (raw %.6g)%s%s\n", g.delta, g.delta_raw,
              delta.vacuous ? "  [VACUOUS]" : "",
              delta.horizon_independent ? "  [horizon-independent]" : "");
  std::printf("interval gap rho: %.6g\n", g.rho);
  std::printf("abstract satisfaction: %.6g\n", g.abstract_probability);
  std::printf("lower bound: %.6g (raw %.17g)%s\n", g.lower_bound, g.lower_bound_raw,
              g.vacuous ? "  [VACUOUS]" : "");
  std::printf("confidence: %.6g (betas %.6g + %.6g + %.6g)\n", g.confidence, g.beta_empirical,
              g.beta_scenario, g.beta_intervals);
  return 0;
}

}  // namespace mdpabs
