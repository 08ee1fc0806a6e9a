#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mdpabs/estimator.hpp"
#include "mdpabs/scenario.hpp"
#include "mdpabs/sbf.hpp"
#include "mdpabs/synth.hpp"

namespace mdpabs {

inline constexpr int kFileFormatVersion = 1;

/// Certificate document: the optimized template plus every number needed to
/// interpret and re-audit it. Serialization is canonical JSON (sorted keys,
/// round-trip-exact doubles), so save/load/save is byte-identical.
struct CertificateFile {
  std::uint64_t seed = 0;
  SbfCertificate certificate;
  double mean_error = 0.0;
  double variance_bound = 0.0;
  double lipschitz = 0.0;
  double violation_level = 0.0;
  int state_dim = 0;
  // deterministic solve statistics
  std::size_t rows = 0;
  int outer_iterations = 0;
  int simplex_pivots = 0;
  double max_violation = 0.0;
  bool paired_noise = true;
};

void save_certificate(const std::string& path, const CertificateFile& file);
CertificateFile load_certificate(const std::string& path);

/// Abstraction document: the grid, the input set, and either interval
/// estimates (sparse counts) or a dense point MDP.
struct AbstractionFile {
  std::uint64_t seed = 0;
  std::string kind;  // "imdp" | "mdp"
  std::optional<IntervalMdp> imdp;
  std::optional<FiniteMdp> mdp;

  const Grid& grid() const { return imdp ? imdp->grid : mdp->grid; }
  const InputSet& inputs() const { return imdp ? imdp->inputs : mdp->inputs; }
};

void save_abstraction(const std::string& path, const AbstractionFile& file);
AbstractionFile load_abstraction(const std::string& path);

/// Policy document: the lookup table, the grid it indexes, the value table,
/// the specification it was synthesized for, and the value at the configured
/// initial cell.
struct PolicyFile {
  std::uint64_t seed = 0;
  bool robust = false;  // synthesized against interval rows
  SafetySpec spec;
  std::optional<Grid> grid;
  Policy policy;
  ValueTable values;
  std::vector<double> initial;
  std::size_t initial_cell = 0;
  double initial_value = 0.0;
  std::size_t safe_cells = 0;
  std::size_t straddling_cells = 0;
  std::size_t repaired_rows = 0;
};

void save_policy(const std::string& path, const PolicyFile& file);
PolicyFile load_policy(const std::string& path);

/// End-to-end guarantee document produced by the report command.
struct ReportFile {
  GuaranteeReport guarantee;
  double s_initial = 0.0;
  double alpha = 0.0;
  double psi = 0.0;
  bool horizon_independent = false;
  bool abstraction_has_intervals = false;
  std::vector<double> initial;
  std::vector<double> initial_rep;
  std::string verdict;
};

void save_report(const std::string& path, const ReportFile& file);
ReportFile load_report(const std::string& path);

/// CSV with columns run, k, x_1..x_n, input, safe. The input column carries
/// the index applied at step k and -1 on the terminal row.
void write_trajectories_csv(const std::string& path, const SimulationResult& result, int dim);

/// CSV with columns run, k, error.
void write_distance_csv(const std::string& path,
                        const std::vector<std::vector<double>>& per_run_distance);

}  // namespace mdpabs
