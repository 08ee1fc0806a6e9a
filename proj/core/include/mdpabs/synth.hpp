#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mdpabs/estimator.hpp"
#include "mdpabs/grid.hpp"

namespace mdpabs {

/// Stay-in-set objective: keep the state inside safe_region for `horizon`
/// steps. An optional deflation radius shrinks the region before abstract
/// synthesis so abstraction-level satisfaction transfers to the concrete
/// system.
struct SafetySpec {
  StateBox safe_region;
  int horizon;
  double deflation = 0.0;

  void validate(const StateBox& domain) const;
};

/// Safe/unsafe classification of grid cells by representative-point
/// membership in the (deflated) region. Cells that straddle the region
/// boundary are classified by their center and counted.
struct SafeCells {
  std::vector<std::uint8_t> safe;
  std::size_t safe_count = 0;
  std::size_t straddling = 0;
  bool deflated_empty = false;
};

SafeCells classify_safe_cells(const Grid& grid, const SafetySpec& spec);

/// values[k * states + i] = probability of staying safe from step k to the
/// horizon when starting in cell i; rows k = 0..horizon.
struct ValueTable {
  int horizon = 0;
  std::size_t states = 0;
  std::vector<double> values;

  double at(int k, std::size_t i) const {
    return values[static_cast<std::size_t>(k) * states + i];
  }
};

/// Lookup table: chosen input index per (step, cell), steps 0..horizon-1.
struct Policy {
  int horizon = 0;
  std::size_t states = 0;
  std::vector<std::uint32_t> choice;

  std::uint32_t at(int k, std::size_t i) const {
    return choice[static_cast<std::size_t>(k) * states + i];
  }
};

struct SynthesisResult {
  ValueTable values;
  Policy policy;
  SafeCells safe;
  std::size_t repaired_rows = 0;  // interval rows clipped into consistency
};

/// Finite-horizon safety dynamic program: maximizes the probability of
/// staying in the safe cells; argmax ties resolve to the lowest input index.
SynthesisResult safety_value_iteration(const FiniteMdp& mdp, const SafetySpec& spec,
                                       int workers = 1);

/// Pessimistic counterpart over interval rows: the inner minimization over
/// distributions consistent with the bounds is solved exactly by greedy
/// extreme-point allocation (ascending continuation values get their upper
/// bounds first).
SynthesisResult robust_safety_value_iteration(const IntervalMdp& imdp, const SafetySpec& spec,
                                              int workers = 1);

/// Exact worst-case expectation of `values` over distributions p with
/// lower <= p <= upper, sum p = 1. Exposed for oracle tests.
double worst_case_expectation(std::span<const double> lower, std::span<const double> upper,
                              std::span<const double> values);

struct Trajectory {
  std::vector<std::vector<double>> states;  // horizon + 1 entries
  std::vector<int> inputs;                  // horizon entries
  bool safe = true;                         // all states inside the safe region
};

struct SimulationResult {
  std::vector<Trajectory> runs;
  double safety_frequency = 0.0;
};

/// Closed-loop rollout of a synthesized policy against the sampled system:
/// at each step the concrete state is projected to its cell and the lookup
/// table supplies the input. Out-of-box states keep input 0 and mark the run
/// unsafe. Deterministic per stream.
SimulationResult closed_loop_sim(const BlackBoxSystem& sys, const Grid& grid,
                                 const Policy& policy, const SafetySpec& spec,
                                 std::span<const double> initial, int runs,
                                 NoiseStream stream);

/// Per-step Euclidean distance between two equally long trajectories.
std::vector<double> trajectory_distance(const Trajectory& a, const Trajectory& b);

}  // namespace mdpabs
