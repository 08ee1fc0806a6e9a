#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mdpabs/blackbox.hpp"
#include "mdpabs/grid.hpp"
#include "mdpabs/lp.hpp"
#include "mdpabs/sbf.hpp"

namespace mdpabs {

// ---------------------------------------------------------------------------
// Sample-complexity formulas
// ---------------------------------------------------------------------------

/// Smallest N whose binomial tail sum_{i<c} C(N,i) eps^i (1-eps)^(N-i) drops
/// to `confidence` or below. Exact minimal N; the tail is evaluated in
/// log-space so it stays meaningful at eps ~ 1e-5 and N ~ 1e6.
std::uint64_t min_sample_count(double violation, double confidence, int decision_vars);

/// ceil(variance_bound / (confidence * mean_error^2)), floored at 1: number
/// of noise realizations so the empirical mean sits within mean_error of the
/// expectation with probability confidence.
std::uint64_t min_realization_count(double variance_bound, double confidence,
                                    double mean_error);

/// ceil(1 / (4 * confidence * half_width^2)): per-entry one-step sample count
/// for frequency estimates accurate to half_width with the given confidence.
std::uint64_t min_transition_sample_count(double half_width, double confidence);

// ---------------------------------------------------------------------------
// Lipschitz constants for the constraint functions (quadratic template)
// ---------------------------------------------------------------------------

struct LinearSystemBounds {
  double dynamics_gain;  // >= ||A||
  double input_gain;     // >= ||B||
  double state_radius;   // >= ||x|| over the state box
  double input_radius;   // >= ||u|| over the input set
  double lambda_min;     // smallest eigenvalue of the template matrix
  double lambda_max;     // largest eigenvalue of the template matrix
};

struct NonlinearSystemBounds {
  double dynamics_bound;  // >= ||f(x,u)||
  double jacobian_bound;  // >= ||df/dx||
  double state_radius;
  double lambda_min;
  double lambda_max;
};

struct LipschitzConstant {
  double drift_component;  // dynamics-dependent component
  double gap_component;    // component from the norm-gap condition
  double value;            // max of the two
};

LipschitzConstant lipschitz_linear(const LinearSystemBounds& b, double cell_diameter);
LipschitzConstant lipschitz_nonlinear(const NonlinearSystemBounds& b, double cell_diameter);

// ---------------------------------------------------------------------------
// Scenario program over sampled states
// ---------------------------------------------------------------------------

/// Data/confidence bookkeeping for one certification run. Confidence
/// parameters are failure probabilities (smaller is stronger).
struct ScenarioConfig {
  double gap = 0.0;             // admissible scenario-to-robust optimum gap, in [0,1]
  double beta_scenario = 0.0;   // confidence share of the sampled-state step
  double beta_empirical = 0.0;  // confidence share of the empirical-mean step
  double mean_error = 0.0;      // admissible empirical-mean error
  double variance_bound = 0.0;  // bound on Var[S after one step]
  double lipschitz = 0.0;       // Lipschitz constant of the constraint functions
  int state_dim = 0;
  int decision_vars = 0;        // free decision variables, objective included

  void validate() const;
  /// (gap / lipschitz)^state_dim: per-sample violation level fed to
  /// min_sample_count.
  double violation_level() const;
  std::uint64_t min_samples() const;
  std::uint64_t min_realizations() const;
};

enum class RowKind : std::uint8_t {
  lower_bound,  // alpha ||x - xhat||^2 - S(x, xhat) <= objective
  drift,        // empirical one-step mean of S - S(x, xhat) - psi + mean_error <= objective
};

struct RowProvenance {
  RowKind kind;
  std::uint32_t sample;  // index into the sampled states
  std::uint32_t cell;    // abstract state index
  std::uint32_t input;   // input index

  std::string tag() const;
  static RowProvenance parse(const std::string& tag);
};

/// Decision variables are laid out [alpha; psi; coefficients...; objective].
/// Every row is affine in them: coeffs . vars + offset <= objective is stored
/// with the objective folded in as a -1 coefficient.
struct ScenarioProgram {
  SbfBasis basis;
  std::size_t sample_count = 0;
  std::size_t realization_count = 0;
  double mean_error = 0.0;
  bool paired_noise = true;  // false: assembled with decoupled draws (off-contract)
  std::vector<double> coeffs;   // rows * var_count(), row-major
  std::vector<double> offsets;  // one per row
  std::vector<RowProvenance> provenance;

  explicit ScenarioProgram(SbfBasis basis_in) : basis(std::move(basis_in)) {}

  std::size_t var_count() const { return basis.size() + 3; }
  static constexpr std::size_t alpha_index = 0;
  static constexpr std::size_t psi_index = 1;
  std::size_t coeff_index(std::size_t j) const { return 2 + j; }
  std::size_t objective_index() const { return basis.size() + 2; }
  std::size_t rows() const { return offsets.size(); }

  void dump(std::ostream& os) const;
};

/// Assembles the scenario program: for every (sampled state, abstract state,
/// input) one lower-bound row and one drift row, the latter from
/// `realizations` one-step pairs driven by common noise (the abstract
/// successor is snapped to the nearest representative point). Rows are
/// ordered lexicographically in (sample, cell, input, kind) and the result
/// is bit-identical for a fixed seed regardless of the worker count.
ScenarioProgram assemble_program(const BlackBoxSystem& sys, const Grid& grid,
                                 const SbfBasis& basis, std::size_t samples,
                                 std::size_t realizations, double mean_error,
                                 NoiseStream stream, int workers = 1);

/// Per-variable bounds of the decision vector; the optimizer needs the box
/// to keep the program bounded. Freezing pins a variable to a value; a range
/// narrows it without removing it from the decision vector.
struct DecisionBounds {
  using Range = std::pair<double, double>;

  double alpha_min = 1e-6;
  double limit = 1e6;  // |variable| cap applied to everything else
  std::optional<double> alpha_frozen;
  std::optional<double> psi_frozen;
  std::vector<std::optional<double>> coeff_frozen;  // per basis coefficient
  std::optional<Range> alpha_range;
  std::optional<Range> psi_range;
  std::vector<std::optional<Range>> coeff_range;

  /// Free decision variables (objective included) under the freezes.
  int free_vars(std::size_t basis_size) const;
};

LinearProgram to_linear_program(const ScenarioProgram& program, const DecisionBounds& bounds);

enum class Verdict { certified, inconclusive, unsound_scale };

const char* verdict_name(Verdict v);

/// Scenario certificate: the template found by the optimizer plus the
/// bookkeeping needed to interpret it.
struct SbfCertificate {
  SbfTemplate sbf;
  double optimum;  // scenario optimum
  double gap;      // admissible scenario-to-robust gap
  double margin;   // optimum + gap; certified iff <= 0 at sound scale
  Verdict verdict;
  double confidence;  // 1 - beta_empirical - beta_scenario
  double beta_empirical;
  double beta_scenario;
  std::uint64_t samples_used;
  std::uint64_t realizations_used;
  std::uint64_t min_samples_required;
};

/// Turns an optimal solve of the assembled program into a certificate.
/// Using fewer samples than the config requires is a hard error unless
/// allow_undersampled is set, which downgrades the verdict instead.
SbfCertificate certify(const ScenarioProgram& program, const ScenarioConfig& config,
                       const LpSolution& solution, bool allow_undersampled = false);

/// Pilot estimate of the one-step variance bound for a fixed template:
/// the largest sample variance of S over (point, cell, input) pilot triples,
/// inflated by 2. A heuristic stand-in for a user-supplied bound, and
/// labeled as such wherever it is reported.
double estimate_variance_bound(const BlackBoxSystem& sys, const Grid& grid,
                               const SbfTemplate& sbf, std::size_t pilot_points,
                               std::size_t realizations, NoiseStream stream);

}  // namespace mdpabs
