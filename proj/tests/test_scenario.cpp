#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "mdpabs/errors.hpp"
#include "mdpabs/scenario.hpp"
#include "oracles.hpp"

using namespace mdpabs;

TEST_CASE("minimum sampled-state count") {
  // Case-study scale: exact value differs from the published rounding by
  // well under 0.2% because the published violation level is truncated.
  const std::uint64_t n = min_sample_count(1.815e-5, 0.01, 4);
  CHECK(n == 553447);
  CHECK(std::abs(static_cast<double>(n) - 553559.0) <= 0.002 * 553559.0);
  // Unrounded violation level reproduces the published count exactly.
  const double exact = std::pow(0.04 / 9.39, 2.0);
  CHECK(min_sample_count(exact, 0.01, 4) == 553559);

  CHECK(min_sample_count(1.0, 0.5, 1) == 1);
  CHECK(min_sample_count(0.1, 0.05, 2) == 46);
  CHECK_THROWS_AS(min_sample_count(0.0, 0.5, 1), Error);
  try {
    min_sample_count(0.0, 0.5, 1);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::unsatisfiable);
  }
}

TEST_CASE("minimality of the returned sample count") {
  // Exactness: tail(N) <= beta < tail(N-1), checked against direct
  // long-double evaluation.
  const struct {
    double eps, beta;
    int c;
  } cases[] = {{0.1, 0.05, 2}, {0.05, 0.01, 4}, {0.3, 0.2, 1}, {0.01, 0.1, 3}};
  for (const auto& cs : cases) {
    const std::uint64_t n = min_sample_count(cs.eps, cs.beta, cs.c);
    CHECK(oracles::binomial_tail_direct(n, cs.eps, cs.c) <= cs.beta);
    if (n > 1) {
      CHECK(oracles::binomial_tail_direct(n - 1, cs.eps, cs.c) > cs.beta);
    }
  }
}

TEST_CASE("sample count monotonicity") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.01, 0.5);
  for (int t = 0; t < 40; ++t) {
    const double eps = u(rng);
    const double beta = u(rng);
    const int c = 1 + static_cast<int>(u(rng) * 10);
    const std::uint64_t base = min_sample_count(eps, beta, c);
    CHECK(min_sample_count(std::min(1.0, eps * 1.5), beta, c) <= base);
    CHECK(min_sample_count(eps, std::min(1.0, beta * 1.5), c) <= base);
    CHECK(min_sample_count(eps, beta, c + 1) >= base);
  }
}

TEST_CASE("minimum realization count") {
  CHECK(min_realization_count(1.9575e-4, 0.01, 0.005) == 783);
  CHECK(min_realization_count(0.01 * 0.005 * 0.005, 0.01, 0.005) == 1);
  CHECK(min_realization_count(1.0, 0.5, 1.0) == 2);
  CHECK_THROWS_AS(min_realization_count(1.0, 0.5, 0.0), Error);
  CHECK_THROWS_AS(min_realization_count(0.0, 0.5, 1.0), Error);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.01, 2.0);
  for (int t = 0; t < 100; ++t) {
    const double q = u(rng), beta = std::min(1.0, u(rng)), mu = u(rng);
    const std::uint64_t m = min_realization_count(q, beta, mu);
    const double raw = q / (beta * mu * mu);
    CHECK(static_cast<double>(m) >= raw - 1e-9);
    CHECK(static_cast<double>(m) < std::max(raw + 1.0, 2.0));
  }
}

TEST_CASE("minimum transition sample count") {
  CHECK(min_transition_sample_count(0.05, 0.05) == 2000);
  CHECK(min_transition_sample_count(1.0, 0.25) == 1);
  CHECK(min_transition_sample_count(0.01, 0.01) == 250000);
  CHECK_THROWS_AS(min_transition_sample_count(0.0, 0.5), Error);
  CHECK_THROWS_AS(min_transition_sample_count(0.5, 1.0), Error);
}

TEST_CASE("Lipschitz constants, linear form") {
  const LinearSystemBounds degenerate{0.0, 0.0, 1.0, 0.0, 1.0, 1.0};
  const LipschitzConstant d = lipschitz_linear(degenerate, 0.0);
  CHECK(d.drift_component == doctest::Approx(4.0));
  CHECK(d.gap_component == doctest::Approx(8.0));
  CHECK(d.value == doctest::Approx(8.0));

  const LinearSystemBounds b{1.0, 1.0, 0.7071, 0.5, 0.01, 0.02};
  const LipschitzConstant l = lipschitz_linear(b, 0.05);
  CHECK(l.value == doctest::Approx(0.1551).epsilon(1e-3));

  // Homogeneity in the template scale: scaling both eigenvalue bounds by t
  // scales the drift component by t.
  const LinearSystemBounds scaled{1.0, 1.0, 0.7071, 0.5, 0.03, 0.06};
  CHECK(lipschitz_linear(scaled, 0.05).drift_component ==
        doctest::Approx(3.0 * l.drift_component).epsilon(1e-12));
}

TEST_CASE("Lipschitz constants, nonlinear form") {
  const NonlinearSystemBounds degenerate{0.0, 0.0, 1.0, 1.0, 1.0};
  const LipschitzConstant d = lipschitz_nonlinear(degenerate, 0.0);
  CHECK(d.drift_component == doctest::Approx(4.0));
  CHECK(d.value == doctest::Approx(8.0));

  const NonlinearSystemBounds b{1.0, 1.0, 0.7071, 0.01, 0.02};
  CHECK(lipschitz_nonlinear(b, 0.05).value == doctest::Approx(0.1386).epsilon(1e-3));

  // Monotone nondecreasing in every bound.
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int t = 0; t < 100; ++t) {
    NonlinearSystemBounds base{u(rng), u(rng), u(rng), 0.0, 0.0};
    base.lambda_min = u(rng);
    base.lambda_max = base.lambda_min + u(rng);
    const double eta = u(rng);
    const double v = lipschitz_nonlinear(base, eta).value;
    NonlinearSystemBounds more = base;
    more.dynamics_bound += 0.1;
    CHECK(lipschitz_nonlinear(more, eta).value >= v);
    more = base;
    more.jacobian_bound += 0.1;
    CHECK(lipschitz_nonlinear(more, eta).value >= v);
    more = base;
    more.state_radius += 0.1;
    CHECK(lipschitz_nonlinear(more, eta).value >= v);
    CHECK(lipschitz_nonlinear(base, eta + 0.1).value >= v);
  }
}

TEST_CASE("violation level round trip at case-study scale") {
  ScenarioConfig cfg;
  cfg.gap = 0.04;
  cfg.beta_scenario = 0.01;
  cfg.beta_empirical = 0.01;
  cfg.mean_error = 0.005;
  cfg.variance_bound = 1.9575e-4;
  cfg.lipschitz = 9.39;
  cfg.state_dim = 2;
  cfg.decision_vars = 4;
  cfg.validate();
  const double eps2 = cfg.violation_level();
  CHECK(std::abs(eps2 - 1.815e-5) < 6e-9);
  // Printed to three significant figures this is the published value.
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", eps2);
  CHECK(std::string(buf) == "1.81e-05");
  CHECK(cfg.min_samples() == 553559);
  CHECK(cfg.min_realizations() == 783);
}

namespace {

ScenarioProgram tiny_jet_program(std::size_t samples, std::size_t realizations,
                                 std::uint64_t seed, int workers = 1,
                                 double mean_error = 0.005) {
  const BlackBoxSystem jet = jet_engine_system(0.01, 0.01);
  const Grid grid(jet.state_box(), {2, 2});
  const SbfBasis basis = SbfBasis::per_coordinate(2, true);
  return assemble_program(jet, grid, basis, samples, realizations, mean_error,
                          NoiseStream(seed), workers);
}

}  // namespace

TEST_CASE("program shape and row invariants") {
  const BlackBoxSystem jet = jet_engine_system(0.01, 0.01, {-0.5, 0.0, 0.5});
  const Grid grid(jet.state_box(), {2, 2});
  const SbfBasis basis = SbfBasis::per_coordinate(2, true);
  const ScenarioProgram p =
      assemble_program(jet, grid, basis, 10, 3, 0.005, NoiseStream(1));
  CHECK(p.rows() == 2u * 10u * 4u * 3u);  // 240
  CHECK(p.var_count() == 6);
  for (std::size_t r = 0; r < p.rows(); ++r) {
    const double* row = p.coeffs.data() + r * p.var_count();
    CHECK(row[p.objective_index()] == -1.0);
    if (p.provenance[r].kind == RowKind::lower_bound) {
      CHECK(row[ScenarioProgram::psi_index] == 0.0);
      CHECK(p.offsets[r] == 0.0);
      CHECK(row[ScenarioProgram::alpha_index] >= 0.0);
    } else {
      CHECK(row[ScenarioProgram::psi_index] == -1.0);
      CHECK(p.offsets[r] == 0.005);
      CHECK(row[ScenarioProgram::alpha_index] == 0.0);
    }
  }
  // Lexicographic provenance order in (sample, cell, input, kind).
  for (std::size_t r = 1; r < p.rows(); ++r) {
    const auto& a = p.provenance[r - 1];
    const auto& b = p.provenance[r];
    const auto key = [](const RowProvenance& x) {
      return std::tuple(x.sample, x.cell, x.input, static_cast<int>(x.kind));
    };
    CHECK(key(a) < key(b));
  }
}

TEST_CASE("drift rows collapse for identity dynamics on one cell") {
  const BlackBoxSystem sys =
      affine_system({{1.0}}, {{0.0}}, {0.0}, 0.0, StateBox({0.0}, {1.0}),
                    InputSet::scalar({0.0}));
  const Grid grid(sys.state_box(), {1});
  const SbfBasis basis = SbfBasis::per_coordinate(1, true);
  const ScenarioProgram p = assemble_program(sys, grid, basis, 5, 4, 0.0, NoiseStream(3));
  for (std::size_t r = 0; r < p.rows(); ++r) {
    if (p.provenance[r].kind != RowKind::drift) continue;
    const double* row = p.coeffs.data() + r * p.var_count();
    // f = identity and the one-cell representative reproduces itself, so the
    // mean of every basis term equals its value at (x, rep).
    CHECK(std::abs(row[p.coeff_index(0)]) < 1e-15);
    CHECK(std::abs(row[p.coeff_index(1)]) < 1e-15);
    CHECK(row[ScenarioProgram::psi_index] == -1.0);
  }
}

TEST_CASE("empirical means tighten with more realizations") {
  // Spread of the drift coefficients across reseeded assemblies shrinks
  // roughly like 1/sqrt(M).
  const auto spread = [](std::size_t realizations) {
    const ScenarioProgram a = tiny_jet_program(3, realizations, 100);
    const ScenarioProgram b = tiny_jet_program(3, realizations, 200);
    double worst = 0.0;
    for (std::size_t r = 0; r < a.rows(); ++r) {
      if (a.provenance[r].kind != RowKind::drift) continue;
      for (std::size_t j = 0; j < 3; ++j) {
        worst = std::max(worst, std::abs(a.coeffs[r * a.var_count() + a.coeff_index(j)] -
                                         b.coeffs[r * b.var_count() + b.coeff_index(j)]));
      }
    }
    return worst;
  };
  CHECK(spread(1024) < spread(1));
}

TEST_CASE("assembly is deterministic and worker-count invariant") {
  const ScenarioProgram a = tiny_jet_program(8, 5, 42, 1);
  const ScenarioProgram b = tiny_jet_program(8, 5, 42, 4);
  CHECK(a.coeffs == b.coeffs);
  CHECK(a.offsets == b.offsets);
  const ScenarioProgram c = tiny_jet_program(8, 5, 43, 1);
  CHECK(a.coeffs != c.coeffs);
}

TEST_CASE("nested sample sets give a nondecreasing optimum") {
  DecisionBounds bounds;
  bounds.coeff_frozen.assign(3, std::nullopt);
  bounds.psi_frozen = 0.047;
  double prev = -std::numeric_limits<double>::infinity();
  for (std::size_t n : {20u, 40u, 80u}) {
    const ScenarioProgram p = tiny_jet_program(n, 16, 7);
    const LpSolution s = solve(to_linear_program(p, bounds));
    REQUIRE(s.status == LpStatus::optimal);
    CHECK(s.value >= prev - 1e-9);
    prev = s.value;
  }
}

TEST_CASE("certification verdicts") {
  ScenarioConfig cfg;
  cfg.gap = 0.04;
  cfg.beta_scenario = 0.01;
  cfg.beta_empirical = 0.01;
  cfg.mean_error = 0.005;
  cfg.variance_bound = 1e-6;  // keeps the realization minimum small
  cfg.lipschitz = 1.0;
  cfg.state_dim = 1;
  cfg.decision_vars = 2;
  // violation = 0.04, N-bar manageable for a unit test
  const std::uint64_t needed = cfg.min_samples();

  const BlackBoxSystem sys = affine_system({{1.0}}, {{0.0}}, {0.0}, 0.0,
                                           StateBox({0.0}, {1.0}), InputSet::scalar({0.0}));
  const Grid grid(sys.state_box(), {1});
  const SbfBasis basis = SbfBasis::per_coordinate(1, true);
  const std::uint64_t m_needed = cfg.min_realizations();
  const ScenarioProgram p =
      assemble_program(sys, grid, basis, needed, m_needed, cfg.mean_error, NoiseStream(1));

  LpSolution sol;
  sol.status = LpStatus::optimal;
  sol.point = {1.0, 0.047, 0.01, 16.0, -0.041};  // [alpha, psi, q1, q2, objective]
  sol.value = -0.041;

  const SbfCertificate cert = certify(p, cfg, sol);
  CHECK(cert.verdict == Verdict::certified);
  CHECK(cert.margin == doctest::Approx(-0.001).epsilon(1e-9));
  CHECK(cert.confidence == doctest::Approx(0.98));

  LpSolution zero = sol;
  zero.point.back() = -0.04;
  CHECK(certify(p, cfg, zero).verdict == Verdict::certified);  // zero margin

  LpSolution bad = sol;
  bad.point.back() = 0.01;
  CHECK(certify(p, cfg, bad).verdict == Verdict::inconclusive);

  // Undersampled: hard error without the override, downgraded with it.
  const ScenarioProgram small =
      assemble_program(sys, grid, basis, needed - 1, m_needed, cfg.mean_error, NoiseStream(1));
  CHECK_THROWS_AS(certify(small, cfg, sol), Error);
  CHECK(certify(small, cfg, sol, true).verdict == Verdict::unsound_scale);
}

TEST_CASE("program dump parses back through the lp reader") {
  const ScenarioProgram p = tiny_jet_program(3, 2, 11);
  std::ostringstream out;
  p.dump(out);
  std::istringstream in(out.str());
  std::vector<std::string> tags;
  const LinearProgram lp = read_program(in, &tags);
  CHECK(lp.rows() == p.rows());
  CHECK(lp.row_coeffs == p.coeffs);
  CHECK(lp.row_offsets == p.offsets);
  for (std::size_t r = 0; r < p.rows(); ++r) {
    const RowProvenance prov = RowProvenance::parse(tags[r]);
    CHECK(prov.kind == p.provenance[r].kind);
    CHECK(prov.sample == p.provenance[r].sample);
    CHECK(prov.cell == p.provenance[r].cell);
    CHECK(prov.input == p.provenance[r].input);
  }
}

TEST_CASE("pilot variance bound is positive and inflated") {
  const BlackBoxSystem jet = jet_engine_system(0.01, 0.01);
  const Grid grid(jet.state_box(), {2, 2});
  const SbfTemplate cert(SbfBasis::per_coordinate(2, true), {0.01, 0.01, 16.0}, 1.0, 0.047);
  const double q = estimate_variance_bound(jet, grid, cert, 5, 16, NoiseStream(8));
  CHECK(q > 0.0);
  CHECK(q < 1.0);  // S varies by ~0.01 * squared-distance spread around 16
}
