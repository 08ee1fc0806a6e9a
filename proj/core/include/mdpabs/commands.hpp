#pragma once

#include <string>

#include "mdpabs/config.hpp"

namespace mdpabs {

struct CommandOptions {
  std::string out_dir = "out";
  int workers = 1;
  bool override_samples = false;  // allow undersampled runs (verdict downgraded)
  bool seed_entropy = false;      // draw the seed instead of requiring it in config
};

/// Prints and writes the data/confidence bookkeeping table: Lipschitz
/// components, violation level, minimum sample counts, and the beta ledger.
int cmd_complexity(const RunConfig& config, const CommandOptions& options);

/// End-to-end certification: sample, assemble, solve, certify; writes
/// certificate.json (and optionally program.txt). Exit 0 when certified,
/// 2 otherwise.
int cmd_certify(const RunConfig& config, const CommandOptions& options);

/// Data-driven abstraction; mode is "imdp", "mle", or "model". Writes
/// abstraction.json.
int cmd_abstract(const RunConfig& config, const CommandOptions& options,
                 const std::string& mode);

/// Synthesizes a safety policy for a stored abstraction; robust value
/// iteration for interval abstractions, standard otherwise. Writes
/// policy.json.
int cmd_synthesize(const RunConfig& config, const CommandOptions& options,
                   const std::string& abstraction_path);

/// Closed-loop rollouts of a stored policy; writes trajectories.csv. With a
/// comparison policy the two loops share noise realizations and the per-step
/// distance lands in distance.csv.
int cmd_simulate(const RunConfig& config, const CommandOptions& options,
                 const std::string& policy_path, const std::string& compare_policy_path = {});

/// Composes certificate + abstraction + policy into the end-to-end guarantee
/// document; writes report.json.
int cmd_report(const RunConfig& config, const CommandOptions& options,
               const std::string& certificate_path, const std::string& abstraction_path,
               const std::string& policy_path);

}  // namespace mdpabs
