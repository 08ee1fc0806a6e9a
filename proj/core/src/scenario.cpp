#include "mdpabs/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "mdpabs/errors.hpp"
#include "mdpabs/parallel.hpp"

namespace mdpabs {

namespace {

/// log of sum_{i=0}^{c-1} C(N,i) eps^i (1-eps)^(N-i), evaluated stably.
/// Requires eps in (0, 1).
double log_binomial_tail(std::uint64_t n, double eps, int c) {
  const double log_eps = std::log(eps);
  const double log_1m = std::log1p(-eps);
  const double lg_n1 = std::lgamma(static_cast<double>(n) + 1.0);
  double max_term = -std::numeric_limits<double>::infinity();
  std::vector<double> terms;
  const int kmax = static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(c) - 1, n));
  terms.reserve(static_cast<std::size_t>(kmax) + 1);
  for (int i = 0; i <= kmax; ++i) {
    const double lt = lg_n1 - std::lgamma(i + 1.0) -
                      std::lgamma(static_cast<double>(n - static_cast<std::uint64_t>(i)) + 1.0) +
                      i * log_eps + static_cast<double>(n - static_cast<std::uint64_t>(i)) * log_1m;
    terms.push_back(lt);
    max_term = std::max(max_term, lt);
  }
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - max_term);
  return max_term + std::log(acc);
}

}  // namespace

std::uint64_t min_sample_count(double violation, double confidence, int decision_vars) {
  require(violation >= 0.0 && violation <= 1.0, ErrorCode::invalid_parameter,
          "violation level must lie in [0, 1]");
  require(confidence > 0.0 && confidence <= 1.0, ErrorCode::invalid_parameter,
          "confidence must lie in (0, 1]");
  require(decision_vars >= 1, ErrorCode::invalid_parameter,
          "decision variable count must be at least 1");
  if (confidence >= 1.0) return 1;
  require(violation > 0.0, ErrorCode::unsatisfiable,
          "a zero violation level keeps the binomial tail at 1 for every N");
  if (violation == 1.0) {
    // Each term carries (1-eps)^(N-i) = 0^(N-i), so the tail is 1 while
    // N <= c-1 (the i = N term survives) and 0 from N = c on.
    return static_cast<std::uint64_t>(decision_vars);
  }
  const double log_beta = std::log(confidence);
  std::uint64_t hi = 1;
  while (log_binomial_tail(hi, violation, decision_vars) > log_beta) {
    require(hi < (std::uint64_t{1} << 62), ErrorCode::unsatisfiable,
            "sample bound exceeds representable range");
    hi *= 2;
  }
  std::uint64_t lo = std::max<std::uint64_t>(1, hi / 2);
  while (lo < hi) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (log_binomial_tail(mid, violation, decision_vars) <= log_beta) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

std::uint64_t min_realization_count(double variance_bound, double confidence,
                                    double mean_error) {
  require(variance_bound > 0.0, ErrorCode::invalid_parameter,
          "variance bound must be positive");
  require(confidence > 0.0 && confidence <= 1.0, ErrorCode::invalid_parameter,
          "confidence must lie in (0, 1]");
  require(mean_error > 0.0, ErrorCode::invalid_parameter, "mean error must be positive");
  const double raw = variance_bound / (confidence * mean_error * mean_error);
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(raw)));
}

std::uint64_t min_transition_sample_count(double half_width, double confidence) {
  require(half_width > 0.0 && half_width <= 1.0, ErrorCode::invalid_parameter,
          "half width must lie in (0, 1]");
  require(confidence > 0.0 && confidence < 1.0, ErrorCode::invalid_parameter,
          "confidence must lie in (0, 1)");
  const double raw = 1.0 / (4.0 * confidence * half_width * half_width);
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(raw)));
}

LipschitzConstant lipschitz_linear(const LinearSystemBounds& b, double cell_diameter) {
  require(b.dynamics_gain >= 0.0 && b.input_gain >= 0.0 && b.state_radius >= 0.0 &&
              b.input_radius >= 0.0 && b.lambda_min >= 0.0 && b.lambda_max >= 0.0,
          ErrorCode::invalid_parameter, "norm bounds must be nonnegative");
  require(b.lambda_min <= b.lambda_max, ErrorCode::invalid_parameter,
          "lambda_min must not exceed lambda_max");
  require(cell_diameter >= 0.0, ErrorCode::invalid_parameter,
          "cell diameter must be nonnegative");
  const double drift =
      2.0 * b.lambda_max *
      (2.0 * b.dynamics_gain * b.dynamics_gain * b.state_radius +
       2.0 * b.dynamics_gain * b.input_gain * b.input_radius +
       b.dynamics_gain * cell_diameter + 2.0 * b.state_radius);
  const double gap = 4.0 * b.state_radius * (b.lambda_min + b.lambda_max);
  return {drift, gap, std::max(drift, gap)};
}

LipschitzConstant lipschitz_nonlinear(const NonlinearSystemBounds& b, double cell_diameter) {
  require(b.dynamics_bound >= 0.0 && b.jacobian_bound >= 0.0 && b.state_radius >= 0.0 &&
              b.lambda_min >= 0.0 && b.lambda_max >= 0.0,
          ErrorCode::invalid_parameter, "norm bounds must be nonnegative");
  require(b.lambda_min <= b.lambda_max, ErrorCode::invalid_parameter,
          "lambda_min must not exceed lambda_max");
  require(cell_diameter >= 0.0, ErrorCode::invalid_parameter,
          "cell diameter must be nonnegative");
  const double drift = 2.0 * b.lambda_max *
                       (2.0 * b.dynamics_bound * b.jacobian_bound +
                        b.dynamics_bound * cell_diameter + 2.0 * b.state_radius);
  const double gap = 4.0 * b.state_radius * (b.lambda_min + b.lambda_max);
  return {drift, gap, std::max(drift, gap)};
}

void ScenarioConfig::validate() const {
  require(gap >= 0.0 && gap <= 1.0, ErrorCode::invalid_parameter, "gap must lie in [0, 1]");
  require(lipschitz > 0.0, ErrorCode::invalid_parameter,
          "Lipschitz constant must be positive");
  require(gap <= lipschitz, ErrorCode::invalid_parameter,
          "gap must not exceed the Lipschitz constant");
  require(beta_scenario > 0.0 && beta_scenario <= 1.0, ErrorCode::invalid_parameter,
          "scenario confidence must lie in (0, 1]");
  require(beta_empirical > 0.0 && beta_empirical <= 1.0, ErrorCode::invalid_parameter,
          "empirical confidence must lie in (0, 1]");
  require(mean_error >= 0.0, ErrorCode::invalid_parameter, "mean error must be nonnegative");
  require(variance_bound > 0.0, ErrorCode::invalid_parameter,
          "variance bound must be positive");
  require(state_dim >= 1, ErrorCode::invalid_parameter, "state dimension must be positive");
  require(decision_vars >= 1, ErrorCode::invalid_parameter,
          "decision variable count must be positive");
}

double ScenarioConfig::violation_level() const {
  return std::pow(gap / lipschitz, static_cast<double>(state_dim));
}

std::uint64_t ScenarioConfig::min_samples() const {
  return min_sample_count(violation_level(), beta_scenario, decision_vars);
}

std::uint64_t ScenarioConfig::min_realizations() const {
  return min_realization_count(variance_bound, beta_empirical, mean_error);
}

std::string RowProvenance::tag() const {
  std::ostringstream os;
  os << (kind == RowKind::lower_bound ? "lb" : "dr") << ' ' << sample << ' ' << cell << ' '
     << input;
  return os.str();
}

RowProvenance RowProvenance::parse(const std::string& tag) {
  std::istringstream is(tag);
  std::string kind;
  RowProvenance p{};
  is >> kind >> p.sample >> p.cell >> p.input;
  require(!is.fail() && (kind == "lb" || kind == "dr"), ErrorCode::incompatible_file,
          "malformed row provenance tag");
  p.kind = kind == "lb" ? RowKind::lower_bound : RowKind::drift;
  return p;
}

ScenarioProgram assemble_program(const BlackBoxSystem& sys, const Grid& grid,
                                 const SbfBasis& basis, std::size_t samples,
                                 std::size_t realizations, double mean_error,
                                 NoiseStream stream, int workers) {
  require(samples >= 1, ErrorCode::invalid_parameter, "at least one sampled state required");
  require(realizations >= 1, ErrorCode::invalid_parameter,
          "at least one noise realization required");
  require(mean_error >= 0.0, ErrorCode::invalid_parameter, "mean error must be nonnegative");
  require(basis.dim() == sys.dim(), ErrorCode::invalid_parameter,
          "basis dimension must match the system");
  require(grid.dim() == sys.dim(), ErrorCode::invalid_parameter,
          "grid dimension must match the system");

  const std::size_t n_cells = grid.cell_count();
  const std::size_t n_inputs = static_cast<std::size_t>(sys.inputs().size());
  const std::size_t r = basis.size();
  const std::size_t n = static_cast<std::size_t>(sys.dim());
  const bool paired = sys.noise_mode() == NoiseMode::paired;

  const auto points = sample_states(sys.state_box(), samples, stream.derive(0x5a11));
  const NoiseStream pair_root = stream.derive(0x9a17);

  ScenarioProgram program(basis);
  program.sample_count = samples;
  program.realization_count = realizations;
  program.mean_error = mean_error;
  program.paired_noise = paired;
  const std::size_t vars = program.var_count();
  const std::size_t triples = samples * n_cells * n_inputs;
  program.coeffs.assign(2 * triples * vars, 0.0);
  program.offsets.assign(2 * triples, 0.0);
  program.provenance.resize(2 * triples);

  parallel_for(0, triples, workers, [&](std::size_t t) {
    const std::size_t i = t / (n_cells * n_inputs);
    const std::size_t rest = t % (n_cells * n_inputs);
    const std::size_t cell = rest / n_inputs;
    const std::size_t u = rest % n_inputs;

    const std::span<const double> x{points[i]};
    const auto rep = grid.center(cell);

    std::vector<double> basis_here(r);
    basis.eval_into(x, rep, basis_here);

    // Lower-bound row: alpha ||x - rep||^2 - S(x, rep) - objective <= 0.
    double dist_sq = 0.0;
    for (std::size_t d = 0; d < n; ++d) {
      const double dd = x[d] - rep[d];
      dist_sq += dd * dd;
    }
    const std::size_t row_lb = 2 * t;
    double* lb = program.coeffs.data() + row_lb * vars;
    lb[ScenarioProgram::alpha_index] = dist_sq;
    for (std::size_t j = 0; j < r; ++j) lb[program.coeff_index(j)] = -basis_here[j];
    lb[program.objective_index()] = -1.0;
    program.offsets[row_lb] = 0.0;
    program.provenance[row_lb] = {RowKind::lower_bound, static_cast<std::uint32_t>(i),
                                  static_cast<std::uint32_t>(cell), static_cast<std::uint32_t>(u)};

    // Drift row: mean_z S(next, next_rep) - S(x, rep) - psi + mean_error
    //            - objective <= 0, with the mean expanded over the basis.
    NoiseStream pair_stream = pair_root.derive(i, cell, u);
    std::vector<double> next(n), next_hat(n), basis_next(r), mean(r, 0.0), comp(r, 0.0);
    for (std::size_t z = 0; z < realizations; ++z) {
      const std::uint64_t mark = pair_stream.index();
      sys.step_into(x, static_cast<int>(u), pair_stream, next);
      if (paired) pair_stream.seek(mark);
      sys.step_into(rep, static_cast<int>(u), pair_stream, next_hat);
      const auto next_rep = grid.center(nearest_cell(grid, next_hat));
      basis.eval_into(next, next_rep, basis_next);
      for (std::size_t j = 0; j < r; ++j) {
        const double y = basis_next[j] - comp[j];
        const double s = mean[j] + y;
        comp[j] = (s - mean[j]) - y;
        mean[j] = s;
      }
    }
    const std::size_t row_dr = row_lb + 1;
    double* dr = program.coeffs.data() + row_dr * vars;
    dr[ScenarioProgram::psi_index] = -1.0;
    for (std::size_t j = 0; j < r; ++j) {
      dr[program.coeff_index(j)] =
          mean[j] / static_cast<double>(realizations) - basis_here[j];
    }
    dr[program.objective_index()] = -1.0;
    program.offsets[row_dr] = mean_error;
    program.provenance[row_dr] = {RowKind::drift, static_cast<std::uint32_t>(i),
                                  static_cast<std::uint32_t>(cell), static_cast<std::uint32_t>(u)};
  });
  return program;
}

int DecisionBounds::free_vars(std::size_t basis_size) const {
  int free_count = 1;  // the objective itself
  if (!alpha_frozen) ++free_count;
  if (!psi_frozen) ++free_count;
  for (std::size_t j = 0; j < basis_size; ++j) {
    if (j >= coeff_frozen.size() || !coeff_frozen[j]) ++free_count;
  }
  return free_count;
}

LinearProgram to_linear_program(const ScenarioProgram& program, const DecisionBounds& bounds) {
  require(bounds.alpha_min > 0.0, ErrorCode::invalid_parameter,
          "the alpha lower bound must be positive");
  require(bounds.limit > 0.0, ErrorCode::invalid_parameter,
          "the decision-variable cap must be positive");
  const std::size_t vars = program.var_count();
  LinearProgram lp;
  lp.var_count = static_cast<int>(vars);
  lp.objective.assign(vars, 0.0);
  lp.objective[program.objective_index()] = 1.0;
  lp.lower.assign(vars, -bounds.limit);
  lp.upper.assign(vars, bounds.limit);
  lp.lower[ScenarioProgram::alpha_index] = bounds.alpha_min;
  lp.lower[ScenarioProgram::psi_index] = 0.0;
  const auto apply_range = [&](std::size_t var, const DecisionBounds::Range& range) {
    require(range.first <= range.second, ErrorCode::invalid_parameter,
            "decision-variable range must satisfy lo <= hi");
    lp.lower[var] = std::max(lp.lower[var], range.first);
    lp.upper[var] = std::min(lp.upper[var], range.second);
    require(lp.lower[var] <= lp.upper[var], ErrorCode::invalid_parameter,
            "decision-variable range is incompatible with the hard bounds");
  };
  if (bounds.alpha_range) apply_range(ScenarioProgram::alpha_index, *bounds.alpha_range);
  if (bounds.psi_range) apply_range(ScenarioProgram::psi_index, *bounds.psi_range);
  for (std::size_t j = 0; j < bounds.coeff_range.size() && j < program.basis.size(); ++j) {
    if (bounds.coeff_range[j]) apply_range(program.coeff_index(j), *bounds.coeff_range[j]);
  }
  if (bounds.alpha_frozen) {
    require(*bounds.alpha_frozen > 0.0, ErrorCode::invalid_parameter,
            "frozen alpha must be positive");
    lp.lower[ScenarioProgram::alpha_index] = *bounds.alpha_frozen;
    lp.upper[ScenarioProgram::alpha_index] = *bounds.alpha_frozen;
  }
  if (bounds.psi_frozen) {
    require(*bounds.psi_frozen >= 0.0, ErrorCode::invalid_parameter,
            "frozen psi must be nonnegative");
    lp.lower[ScenarioProgram::psi_index] = *bounds.psi_frozen;
    lp.upper[ScenarioProgram::psi_index] = *bounds.psi_frozen;
  }
  for (std::size_t j = 0; j < bounds.coeff_frozen.size() && j < program.basis.size(); ++j) {
    if (bounds.coeff_frozen[j]) {
      lp.lower[program.coeff_index(j)] = *bounds.coeff_frozen[j];
      lp.upper[program.coeff_index(j)] = *bounds.coeff_frozen[j];
    }
  }
  lp.row_coeffs = program.coeffs;
  lp.row_offsets = program.offsets;
  lp.validate();
  return lp;
}

void ScenarioProgram::dump(std::ostream& os) const {
  std::vector<std::string> tags;
  tags.reserve(provenance.size());
  for (const auto& p : provenance) tags.push_back(p.tag());
  DecisionBounds default_bounds;
  write_program(os, to_linear_program(*this, default_bounds), tags);
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::certified: return "CERTIFIED";
    case Verdict::inconclusive: return "INCONCLUSIVE";
    case Verdict::unsound_scale: return "UNSOUND-SCALE";
  }
  return "UNKNOWN";
}

SbfCertificate certify(const ScenarioProgram& program, const ScenarioConfig& config,
                       const LpSolution& solution, bool allow_undersampled) {
  config.validate();
  require(solution.status == LpStatus::optimal, ErrorCode::invalid_state,
          "certification needs an optimal solve of the scenario program");
  require(solution.point.size() == program.var_count(), ErrorCode::invalid_state,
          "solution dimension does not match the program");

  const std::uint64_t needed = config.min_samples();
  const std::uint64_t realizations_needed = config.min_realizations();
  const bool undersampled = program.sample_count < needed ||
                            program.realization_count < realizations_needed;
  if (undersampled && !allow_undersampled) {
    throw_error(ErrorCode::insufficient_samples,
                "program uses " + std::to_string(program.sample_count) + " sampled states and " +
                    std::to_string(program.realization_count) +
                    " realizations but the configuration requires " + std::to_string(needed) +
                    " and " + std::to_string(realizations_needed));
  }

  const double alpha = solution.point[ScenarioProgram::alpha_index];
  const double psi = solution.point[ScenarioProgram::psi_index];
  std::vector<double> coeffs(program.basis.size());
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    coeffs[j] = solution.point[program.coeff_index(j)];
  }
  const double optimum = solution.point[program.objective_index()];
  const double margin = optimum + config.gap;

  Verdict verdict;
  if (undersampled) {
    verdict = Verdict::unsound_scale;
  } else {
    verdict = margin <= 0.0 ? Verdict::certified : Verdict::inconclusive;
  }
  return SbfCertificate{
      SbfTemplate(program.basis, std::move(coeffs), alpha, std::max(psi, 0.0)),
      optimum,
      config.gap,
      margin,
      verdict,
      std::max(0.0, 1.0 - config.beta_empirical - config.beta_scenario),
      config.beta_empirical,
      config.beta_scenario,
      program.sample_count,
      program.realization_count,
      needed};
}

double estimate_variance_bound(const BlackBoxSystem& sys, const Grid& grid,
                               const SbfTemplate& sbf, std::size_t pilot_points,
                               std::size_t realizations, NoiseStream stream) {
  require(pilot_points >= 1, ErrorCode::invalid_parameter, "pilot point count must be positive");
  require(realizations >= 2, ErrorCode::invalid_parameter,
          "variance estimation needs at least two realizations");
  const std::size_t n = static_cast<std::size_t>(sys.dim());
  const auto points = sample_states(sys.state_box(), pilot_points, stream.derive(0x417));
  const NoiseStream pair_root = stream.derive(0x9a17);
  const bool paired = sys.noise_mode() == NoiseMode::paired;
  double worst = 0.0;
  std::vector<double> next(n), next_hat(n), values(realizations);
  for (std::size_t p = 0; p < points.size(); ++p) {
    for (std::size_t cell = 0; cell < grid.cell_count(); ++cell) {
      const auto rep = grid.center(cell);
      for (int u = 0; u < sys.inputs().size(); ++u) {
        NoiseStream pair_stream = pair_root.derive(p, cell, static_cast<std::uint64_t>(u));
        double mean = 0.0;
        for (std::size_t z = 0; z < realizations; ++z) {
          const std::uint64_t mark = pair_stream.index();
          sys.step_into(points[p], u, pair_stream, next);
          if (paired) pair_stream.seek(mark);
          sys.step_into(rep, u, pair_stream, next_hat);
          const auto next_rep = grid.center(nearest_cell(grid, next_hat));
          values[z] = sbf.evaluate(next, next_rep);
          mean += values[z];
        }
        mean /= static_cast<double>(realizations);
        double var = 0.0;
        for (double v : values) var += (v - mean) * (v - mean);
        var /= static_cast<double>(realizations - 1);
        worst = std::max(worst, var);
      }
    }
  }
  return 2.0 * worst;  // heuristic inflation
}

}  // namespace mdpabs
