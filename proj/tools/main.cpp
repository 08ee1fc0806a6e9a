// Command-line front end: batch pipeline from configuration to certified
// abstraction, synthesized policy, simulations, and the composed guarantee.

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "mdpabs/commands.hpp"
#include "mdpabs/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"data-driven finite MDP abstraction, certification, and safety synthesis"};
  app.require_subcommand(1);

  std::string config_path;
  mdpabs::CommandOptions options;
  options.workers = 0;  // 0: hardware concurrency

  const auto add_common = [&](CLI::App* cmd, bool needs_config = true) {
    if (needs_config) {
      cmd->add_option("--config", config_path, "run configuration (JSON)")->required();
    }
    cmd->add_option("--out", options.out_dir, "output directory")->capture_default_str();
    cmd->add_option("--workers", options.workers, "worker cap (0 = hardware concurrency)");
    cmd->add_flag("--override-samples", options.override_samples,
                  "allow sample counts below the computed minima (verdict downgraded)");
    cmd->add_flag("--seed-entropy", options.seed_entropy,
                  "draw the seed instead of reading it from the config");
  };

  auto* complexity = app.add_subcommand("complexity", "print the data/confidence table");
  add_common(complexity);

  auto* certify = app.add_subcommand("certify", "assemble and solve the scenario program");
  add_common(certify);

  auto* abstract_cmd = app.add_subcommand("abstract", "build a data-driven abstraction");
  std::string mode = "imdp";
  abstract_cmd->add_option("--mode", mode, "imdp | mle | model")->capture_default_str();
  add_common(abstract_cmd);

  auto* synthesize = app.add_subcommand("synthesize", "synthesize a safety policy");
  std::string abstraction_path;
  synthesize->add_option("--abstraction", abstraction_path, "abstraction document")->required();
  add_common(synthesize);

  auto* simulate = app.add_subcommand("simulate", "closed-loop rollouts of a policy");
  std::string policy_path, compare_path;
  simulate->add_option("--policy", policy_path, "policy document")->required();
  simulate->add_option("--compare-policy", compare_path,
                       "second policy driven by the same noise; emits distance.csv");
  add_common(simulate);

  auto* report = app.add_subcommand("report", "compose the end-to-end guarantee");
  std::string certificate_path, report_abstraction_path, report_policy_path;
  report->add_option("--certificate", certificate_path, "certificate document")->required();
  report->add_option("--abstraction", report_abstraction_path, "abstraction document")
      ->required();
  report->add_option("--policy", report_policy_path, "policy document")->required();
  add_common(report);

  CLI11_PARSE(app, argc, argv);

  try {
    const mdpabs::RunConfig config = mdpabs::load_config(config_path);
    if (app.got_subcommand(complexity)) return mdpabs::cmd_complexity(config, options);
    if (app.got_subcommand(certify)) return mdpabs::cmd_certify(config, options);
    if (app.got_subcommand(abstract_cmd)) return mdpabs::cmd_abstract(config, options, mode);
    if (app.got_subcommand(synthesize)) {
      return mdpabs::cmd_synthesize(config, options, abstraction_path);
    }
    if (app.got_subcommand(simulate)) {
      return mdpabs::cmd_simulate(config, options, policy_path, compare_path);
    }
    if (app.got_subcommand(report)) {
      return mdpabs::cmd_report(config, options, certificate_path, report_abstraction_path,
                                report_policy_path);
    }
  } catch (const mdpabs::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
