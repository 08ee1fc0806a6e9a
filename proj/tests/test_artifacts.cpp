#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mdpabs/artifacts.hpp"
#include "mdpabs/commands.hpp"
#include "mdpabs/config.hpp"
#include "mdpabs/errors.hpp"

using namespace mdpabs;

namespace {

namespace fs = std::filesystem;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("mdpabs-test-" + std::to_string(::getpid()) + "-" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string file(const char* name) const { return (path / name).string(); }
};

const char* kTinyConfig = R"json({
  "seed": 2718,
  "system": {"family": "jet", "tau": 0.01, "noise_scale": 0.01,
             "inputs": [-0.5, 0.0, 0.5]},
  "grid": {"counts": [3, 3]},
  "sbf": {"basis": "percoord_const", "freeze": {"psi": 0.047},
          "alpha_min": 1e-6, "limit": 1e6},
  "scenario": {"gap": 0.1, "beta_scenario": 0.05, "beta_empirical": 0.05,
               "mean_error": 0.01, "variance_bound": 1e-5,
               "lipschitz": {"mode": "direct", "value": 1.0},
               "samples": 60, "realizations": 8, "dump_program": false},
  "imdp": {"half_width": 0.2, "confidence": 0.05},
  "mle": {"residuals": 2000, "pilot": 16},
  "spec": {"safe": {"lo": [-0.5, -0.5], "hi": [0.5, 0.5]}, "horizon": 3,
           "deflation": 0.05, "initial": [-0.3, 0.3]},
  "simulate": {"runs": 4}
})json";

}  // namespace

TEST_CASE("config parsing reports offending fields") {
  CHECK_THROWS_AS(parse_config("not json"), Error);
  const auto message_of = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const Error& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message_of(R"({"grid": {"counts": [0]}})").find("grid.counts[0]") !=
        std::string::npos);
  CHECK(message_of(R"({"system": {"family": "warp"}})").find("system.family") !=
        std::string::npos);
  CHECK(message_of(R"({"imdp": {"half_width": 2.0, "confidence": 0.5}})")
            .find("imdp.half_width") != std::string::npos);
  const std::string no_scenario_q =
      R"({"scenario": {"gap": 0.1, "beta_scenario": 0.1, "beta_empirical": 0.1,
          "mean_error": 0.1, "lipschitz": {"mode": "direct", "value": 1.0}}})";
  CHECK(message_of(no_scenario_q).find("variance_bound") != std::string::npos);
}

TEST_CASE("config round trip into domain objects") {
  const RunConfig cfg = parse_config(kTinyConfig);
  CHECK(cfg.seed.value() == 2718);
  const BlackBoxSystem sys = make_system(cfg);
  CHECK(sys.inputs().size() == 3);
  const Grid grid = make_grid(cfg, sys.state_box());
  CHECK(grid.cell_count() == 9);
  const SbfBasis basis = make_basis(cfg, sys.dim());
  CHECK(basis.size() == 3);
  const DecisionBounds bounds = make_decision_bounds(cfg, basis.size());
  CHECK(bounds.psi_frozen.value() == 0.047);
  CHECK(bounds.free_vars(basis.size()) == 5);  // alpha, q1..q3, objective
  const SafetySpec spec = make_safety_spec(cfg);
  CHECK(spec.horizon == 3);
  const LipschitzConstant lips = resolve_lipschitz(cfg, sys, make_grid(cfg, sys.state_box()));
  CHECK(lips.value == 1.0);
}

TEST_CASE("per-variable decision bounds narrow the program box") {
  const char* bounded_cfg = R"json({
    "seed": 5,
    "system": {"family": "jet", "tau": 0.01, "noise_scale": 0.01,
               "inputs": [-0.5, 0.5]},
    "grid": {"counts": [2, 2]},
    "sbf": {"basis": "percoord_const",
            "freeze": {"psi": 0.047, "alpha": 8.005},
            "bounds": {"q1": [-0.01, 0.01], "q2": [-0.01, 0.01], "q3": [0.0, 16.0]}}
  })json";
  const RunConfig cfg = parse_config(bounded_cfg);
  const SbfBasis basis = make_basis(cfg, 2);
  const DecisionBounds bounds = make_decision_bounds(cfg, basis.size());
  CHECK(bounds.alpha_frozen.value() == 8.005);
  CHECK(bounds.free_vars(basis.size()) == 4);  // q1, q2, q3, objective
  const BlackBoxSystem sys = make_system(cfg);
  const Grid grid = make_grid(cfg, sys.state_box());
  const ScenarioProgram program =
      assemble_program(sys, grid, basis, 4, 2, 0.005, NoiseStream(1));
  const LinearProgram lp = to_linear_program(program, bounds);
  CHECK(lp.lower[ScenarioProgram::alpha_index] == 8.005);
  CHECK(lp.upper[ScenarioProgram::alpha_index] == 8.005);
  CHECK(lp.lower[program.coeff_index(0)] == -0.01);
  CHECK(lp.upper[program.coeff_index(2)] == 16.0);
  const LpSolution s = solve(lp);
  REQUIRE(s.status == LpStatus::optimal);
  CHECK(s.point[program.coeff_index(2)] <= 16.0 + 1e-9);
}

TEST_CASE("independent noise mode is carried through assembly") {
  const char* independent_cfg = R"json({
    "seed": 6,
    "system": {"family": "jet", "tau": 0.01, "noise_scale": 0.01,
               "inputs": [0.0], "noise_mode": "independent"},
    "grid": {"counts": [2, 2]}
  })json";
  const RunConfig cfg = parse_config(independent_cfg);
  const BlackBoxSystem sys = make_system(cfg);
  CHECK(sys.noise_mode() == NoiseMode::independent);
  const Grid grid = make_grid(cfg, sys.state_box());
  const ScenarioProgram program = assemble_program(
      sys, grid, SbfBasis::per_coordinate(2, true), 3, 2, 0.0, NoiseStream(2));
  CHECK(!program.paired_noise);
}

TEST_CASE("linear and custom-affine config families") {
  const char* linear_cfg = R"json({
    "seed": 7,
    "system": {"family": "linear", "a": [[1.0, 0.0], [0.0, 1.0]],
               "b": [[0.0], [0.0]], "noise_scale": 0.0,
               "state_box": {"lo": [-1.0, -1.0], "hi": [1.0, 1.0]},
               "inputs": [[0.0]]}
  })json";
  const BlackBoxSystem linear = make_system(parse_config(linear_cfg));
  NoiseStream s(1);
  const std::vector<double> x{0.25, -0.75};
  CHECK(linear.step(x, std::vector<double>{0.0}, s) == x);  // identity, offset defaults to 0

  const char* affine_cfg = R"json({
    "seed": 8,
    "system": {"family": "custom-affine", "a": [[0.0]], "b": [[0.0]], "c": [0.5],
               "noise_scale": 0.0,
               "state_box": {"lo": [0.0], "hi": [1.0]}, "inputs": [[0.0]]}
  })json";
  const BlackBoxSystem affine = make_system(parse_config(affine_cfg));
  CHECK(affine.step(std::vector<double>{0.1}, std::vector<double>{0.0}, s)[0] == 0.5);
}

TEST_CASE("program dump is written when the config asks for it") {
  RunConfig cfg = parse_config(kTinyConfig);
  cfg.scenario->dump_program = true;
  TempDir dir;
  CommandOptions opt{dir.path.string(), 1, true, false};
  cmd_certify(cfg, opt);
  std::ifstream dump(dir.file("program.txt"));
  REQUIRE(dump.good());
  std::vector<std::string> tags;
  const LinearProgram lp = read_program(dump, &tags);
  CHECK(lp.rows() == 2u * 60u * 9u * 3u);
  CHECK(RowProvenance::parse(tags.front()).kind == RowKind::lower_bound);
}

TEST_CASE("closed-form Lipschitz modes derive radii from the geometry") {
  const char* nonlinear_cfg = R"json({
    "seed": 1,
    "system": {"family": "jet", "tau": 0.01, "noise_scale": 0.01},
    "grid": {"counts": [20, 20]},
    "scenario": {"gap": 0.01, "beta_scenario": 0.05, "beta_empirical": 0.05,
                 "mean_error": 0.01, "variance_bound": 1e-5,
                 "lipschitz": {"mode": "nonlinear", "dynamics_bound": 1.0,
                               "jacobian_bound": 1.0, "lambda_min": 0.0001,
                               "lambda_max": 0.02}}
  })json";
  const RunConfig cfg = parse_config(nonlinear_cfg);
  const BlackBoxSystem sys = make_system(cfg);
  const Grid grid = make_grid(cfg, sys.state_box());
  const LipschitzConstant lips = resolve_lipschitz(cfg, sys, grid);
  // state_radius falls back to the box corner norm sqrt(0.5).
  const NonlinearSystemBounds manual{1.0, 1.0, std::sqrt(0.5), 0.0001, 0.02};
  CHECK(lips.value ==
        doctest::Approx(lipschitz_nonlinear(manual, grid.cell_diameter()).value));
}

TEST_CASE("commands produce byte-identical artifacts across reruns and workers") {
  const RunConfig cfg = parse_config(kTinyConfig);
  TempDir dir_a, dir_b;
  CommandOptions opt_a{dir_a.path.string(), 1, false, false};
  CommandOptions opt_b{dir_b.path.string(), 3, false, false};

  // certify (with sample override -> downgraded verdict, still exit 2)
  CommandOptions unsound_a = opt_a;
  unsound_a.override_samples = true;
  CommandOptions unsound_b = opt_b;
  unsound_b.override_samples = true;
  const int rc_a = cmd_certify(cfg, unsound_a);
  const int rc_b = cmd_certify(cfg, unsound_b);
  CHECK(rc_a == rc_b);
  CHECK(slurp(dir_a.file("certificate.json")) == slurp(dir_b.file("certificate.json")));

  CHECK(cmd_abstract(cfg, opt_a, "imdp") == 0);
  CHECK(cmd_abstract(cfg, opt_b, "imdp") == 0);
  CHECK(slurp(dir_a.file("abstraction.json")) == slurp(dir_b.file("abstraction.json")));

  CHECK(cmd_synthesize(cfg, opt_a, dir_a.file("abstraction.json")) == 0);
  CHECK(cmd_synthesize(cfg, opt_b, dir_b.file("abstraction.json")) == 0);
  CHECK(slurp(dir_a.file("policy.json")) == slurp(dir_b.file("policy.json")));

  CHECK(cmd_simulate(cfg, opt_a, dir_a.file("policy.json")) == 0);
  CHECK(cmd_simulate(cfg, opt_b, dir_b.file("policy.json")) == 0);
  CHECK(slurp(dir_a.file("trajectories.csv")) == slurp(dir_b.file("trajectories.csv")));

  CHECK(cmd_report(cfg, opt_a, dir_a.file("certificate.json"), dir_a.file("abstraction.json"),
                   dir_a.file("policy.json")) == 0);
  CHECK(cmd_report(cfg, opt_b, dir_b.file("certificate.json"), dir_b.file("abstraction.json"),
                   dir_b.file("policy.json")) == 0);
  CHECK(slurp(dir_a.file("report.json")) == slurp(dir_b.file("report.json")));

  CHECK(cmd_complexity(cfg, opt_a) == 0);
}

TEST_CASE("artifact round trips are byte-exact") {
  const RunConfig cfg = parse_config(kTinyConfig);
  TempDir dir;
  CommandOptions opt{dir.path.string(), 2, true, false};
  cmd_certify(cfg, opt);
  cmd_abstract(cfg, opt, "imdp");
  cmd_synthesize(cfg, opt, dir.file("abstraction.json"));

  // load -> save -> identical bytes
  const CertificateFile cert = load_certificate(dir.file("certificate.json"));
  save_certificate(dir.file("certificate2.json"), cert);
  CHECK(slurp(dir.file("certificate.json")) == slurp(dir.file("certificate2.json")));

  const AbstractionFile abs_file = load_abstraction(dir.file("abstraction.json"));
  save_abstraction(dir.file("abstraction2.json"), abs_file);
  CHECK(slurp(dir.file("abstraction.json")) == slurp(dir.file("abstraction2.json")));

  const PolicyFile policy = load_policy(dir.file("policy.json"));
  save_policy(dir.file("policy2.json"), policy);
  CHECK(slurp(dir.file("policy.json")) == slurp(dir.file("policy2.json")));

  // Dense point-MDP abstraction round trip.
  CommandOptions opt_mle{dir.path.string(), 2, false, false};
  cmd_abstract(cfg, opt_mle, "mle");
  const AbstractionFile mle_file = load_abstraction(dir.file("abstraction.json"));
  CHECK(mle_file.kind == "mdp");
  save_abstraction(dir.file("abstraction3.json"), mle_file);
  CHECK(slurp(dir.file("abstraction.json")) == slurp(dir.file("abstraction3.json")));
}

TEST_CASE("version and format mismatches are rejected") {
  const RunConfig cfg = parse_config(kTinyConfig);
  TempDir dir;
  CommandOptions opt{dir.path.string(), 1, false, false};
  cmd_abstract(cfg, opt, "imdp");
  // Tamper with the version field.
  std::string text = slurp(dir.file("abstraction.json"));
  const auto pos = text.find("\"version\": 1");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 12, "\"version\": 9");
  std::ofstream(dir.file("bad.json"), std::ios::binary) << text;
  CHECK_THROWS_AS(load_abstraction(dir.file("bad.json")), Error);
  try {
    load_abstraction(dir.file("bad.json"));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::incompatible_file);
  }
  // Wrong document type.
  CHECK_THROWS_AS(load_policy(dir.file("abstraction.json")), Error);
}

TEST_CASE("certify without enough samples is a hard error unless overridden") {
  const RunConfig cfg = parse_config(kTinyConfig);
  TempDir dir;
  CommandOptions opt{dir.path.string(), 1, false, false};
  CHECK_THROWS_AS(cmd_certify(cfg, opt), Error);  // 60 samples are too few
}

TEST_CASE("model-backed abstraction and shared-noise comparison") {
  const RunConfig cfg = parse_config(kTinyConfig);
  TempDir dir;
  CommandOptions opt{dir.path.string(), 2, false, false};
  REQUIRE(cmd_abstract(cfg, opt, "mle") == 0);
  fs::rename(dir.file("abstraction.json"), dir.file("mle.json"));
  REQUIRE(cmd_abstract(cfg, opt, "model") == 0);
  fs::rename(dir.file("abstraction.json"), dir.file("model.json"));

  REQUIRE(cmd_synthesize(cfg, opt, dir.file("mle.json")) == 0);
  fs::rename(dir.file("policy.json"), dir.file("policy_mle.json"));
  REQUIRE(cmd_synthesize(cfg, opt, dir.file("model.json")) == 0);
  fs::rename(dir.file("policy.json"), dir.file("policy_model.json"));

  REQUIRE(cmd_simulate(cfg, opt, dir.file("policy_mle.json"),
                       dir.file("policy_model.json")) == 0);
  const std::string distance = slurp(dir.file("distance.csv"));
  CHECK(distance.rfind("run,k,error", 0) == 0);
  // 4 runs x (horizon 3 + 1) rows plus the header.
  int lines = 0;
  for (char c : distance) lines += c == '\n';
  CHECK(lines == 1 + 4 * 4);
}

TEST_CASE("complexity reproduces the case-study bookkeeping") {
  const char* case_study = R"json({
    "seed": 1,
    "system": {"family": "jet", "tau": 0.01, "noise_scale": 0.01},
    "grid": {"counts": [20, 20]},
    "sbf": {"basis": "percoord_const", "freeze": {"psi": 0.047}},
    "scenario": {"gap": 0.04, "beta_scenario": 0.01, "beta_empirical": 0.01,
                 "mean_error": 0.005, "variance_bound": 1.9575e-4,
                 "lipschitz": {"mode": "direct", "value": 9.39},
                 "decision_vars": 4}
  })json";
  RunConfig cfg = parse_config(case_study);
  TempDir dir;
  CommandOptions opt{dir.path.string(), 1, false, false};
  REQUIRE(cmd_complexity(cfg, opt) == 0);
  const std::string summary = slurp(dir.file("complexity.json"));
  CHECK(summary.find("\"min_samples\": 553559") != std::string::npos);
  CHECK(summary.find("\"min_realizations\": 783") != std::string::npos);
  CHECK(summary.find("\"decision_vars\": 4") != std::string::npos);

  // Doubling the decision-variable count strictly increases the minimum.
  cfg.scenario->decision_vars = 8;
  TempDir dir2;
  CommandOptions opt2{dir2.path.string(), 1, false, false};
  REQUIRE(cmd_complexity(cfg, opt2) == 0);
  const std::string doubled = slurp(dir2.file("complexity.json"));
  const auto extract = [](const std::string& text) {
    const auto pos = text.find("\"min_samples\": ");
    return std::stoull(text.substr(pos + 15));
  };
  CHECK(extract(doubled) > extract(summary));
}

TEST_CASE("an infeasible freeze is surfaced as a solver error") {
  // Everything pinned and the objective box too small for the pinned rows.
  const char* frozen = R"json({
    "seed": 3,
    "system": {"family": "jet", "tau": 0.01, "noise_scale": 0.01,
               "inputs": [-0.5, 0.5]},
    "grid": {"counts": [2, 2]},
    "sbf": {"basis": "percoord_const",
            "freeze": {"alpha": 8.0, "psi": 0.0, "q1": 0.0, "q2": 0.0, "q3": 0.0},
            "limit": 1.0},
    "scenario": {"gap": 0.5, "beta_scenario": 0.5, "beta_empirical": 0.5,
                 "mean_error": 0.005, "variance_bound": 1e-7,
                 "lipschitz": {"mode": "direct", "value": 1.0},
                 "samples": 30, "realizations": 4}
  })json";
  const RunConfig cfg = parse_config(frozen);
  TempDir dir;
  CommandOptions opt{dir.path.string(), 1, true, false};
  try {
    cmd_certify(cfg, opt);
    FAIL("expected a solver error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::solver_failure);
    CHECK(std::string(e.what()).find("infeasible") != std::string::npos);
  }
}

TEST_CASE("seed is mandatory without the entropy flag") {
  RunConfig cfg = parse_config(kTinyConfig);
  cfg.seed.reset();
  TempDir dir;
  CommandOptions opt{dir.path.string(), 1, false, false};
  CHECK_THROWS_AS(cmd_complexity(cfg, opt), Error);
  CommandOptions entropy{dir.path.string(), 1, false, true};
  CHECK(cmd_complexity(cfg, entropy) == 0);
}
