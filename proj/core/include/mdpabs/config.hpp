#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mdpabs/blackbox.hpp"
#include "mdpabs/grid.hpp"
#include "mdpabs/scenario.hpp"
#include "mdpabs/synth.hpp"

namespace mdpabs {

struct SystemConfig {
  std::string family;  // "jet" | "affine"
  // jet
  double tau = 0.01;
  double noise_scale = 0.01;
  std::optional<std::vector<double>> scalar_inputs;
  // affine
  std::vector<std::vector<double>> a, b;
  std::vector<double> c;
  std::optional<std::vector<double>> box_lo, box_hi;
  std::vector<std::vector<double>> vector_inputs;
  NoiseMode noise_mode = NoiseMode::paired;
};

struct GridConfig {
  std::vector<int> counts;
};

struct SbfConfig {
  std::string basis = "percoord_const";
  std::map<std::string, double> freeze;  // keys: "alpha", "psi", "q1".."qr"
  std::map<std::string, std::pair<double, double>> bounds;  // same keys, [lo, hi]
  double alpha_min = 1e-6;
  double limit = 1e6;
  // Template values used where a concrete S is needed before optimization
  // (pilot variance estimation).
  std::optional<std::vector<double>> pilot_coefficients;
};

struct LipschitzSpec {
  std::string mode;  // "direct" | "linear" | "nonlinear"
  double value = 0.0;
  std::optional<LinearSystemBounds> linear;
  std::optional<NonlinearSystemBounds> nonlinear;
};

struct ScenarioSection {
  double gap = 0.0;
  double beta_scenario = 0.0;
  double beta_empirical = 0.0;
  double mean_error = 0.0;
  std::optional<double> variance_bound;
  std::optional<std::uint64_t> pilot_points;  // variance bound via pilot pass
  std::optional<std::uint64_t> pilot_realizations;
  LipschitzSpec lipschitz;
  std::optional<std::uint64_t> samples;       // N override
  std::optional<std::uint64_t> realizations;  // M override
  std::optional<int> decision_vars;           // c override
  bool dump_program = false;
};

struct ImdpConfig {
  double half_width = 0.0;
  double confidence = 0.0;
};

struct MleConfig {
  std::uint64_t residuals = 0;
  std::uint64_t pilot = 32;
};

struct SpecConfig {
  std::vector<double> safe_lo, safe_hi;
  int horizon = 0;
  double deflation = 0.0;
  std::vector<double> initial;
};

struct SimulateConfig {
  int runs = 10;
};

struct RunConfig {
  std::optional<std::uint64_t> seed;
  std::optional<SystemConfig> system;
  std::optional<GridConfig> grid;
  std::optional<SbfConfig> sbf;
  std::optional<ScenarioSection> scenario;
  std::optional<ImdpConfig> imdp;
  std::optional<MleConfig> mle;
  std::optional<SpecConfig> spec;
  SimulateConfig simulate;
};

/// Loads and range-checks a JSON run configuration; violations are reported
/// with the offending field path.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text);

// Section-to-object builders (each validates the pieces it needs).
BlackBoxSystem make_system(const RunConfig& config);
Grid make_grid(const RunConfig& config, const StateBox& box);
SbfBasis make_basis(const RunConfig& config, int dim);
DecisionBounds make_decision_bounds(const RunConfig& config, std::size_t basis_size);
SafetySpec make_safety_spec(const RunConfig& config);

/// Resolves the Lipschitz constant: direct value or one of the two closed
/// forms, with missing radii derived from the box/input geometry.
LipschitzConstant resolve_lipschitz(const RunConfig& config, const BlackBoxSystem& sys,
                                    const Grid& grid);

}  // namespace mdpabs
