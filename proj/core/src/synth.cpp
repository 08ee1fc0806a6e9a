#include "mdpabs/synth.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>

#include "mdpabs/errors.hpp"
#include "mdpabs/parallel.hpp"

namespace mdpabs {

void SafetySpec::validate(const StateBox& domain) const {
  require(horizon >= 0, ErrorCode::invalid_parameter, "horizon must be nonnegative");
  require(deflation >= 0.0, ErrorCode::invalid_parameter,
          "deflation radius must be nonnegative");
  require(safe_region.dim() == domain.dim(), ErrorCode::invalid_parameter,
          "safe region dimension must match the state box");
  for (int d = 0; d < domain.dim(); ++d) {
    require(safe_region.lo(d) >= domain.lo(d) && safe_region.hi(d) <= domain.hi(d),
            ErrorCode::invalid_parameter, "safe region must be contained in the state box");
  }
}

SafeCells classify_safe_cells(const Grid& grid, const SafetySpec& spec) {
  spec.validate(grid.box());
  const DeflatedBox region = deflate(spec.safe_region, spec.deflation, grid.box());
  SafeCells out;
  out.deflated_empty = region.empty;
  out.safe.assign(grid.cell_count(), 0);
  if (region.empty) return out;
  const int n = grid.dim();
  for (std::size_t cell = 0; cell < grid.cell_count(); ++cell) {
    const auto c = grid.center(cell);
    bool center_in = true;
    bool cell_inside = true;
    bool cell_outside = true;
    for (int d = 0; d < n; ++d) {
      const double v = c[static_cast<std::size_t>(d)];
      const double half = 0.5 * grid.widths()[static_cast<std::size_t>(d)];
      center_in = center_in && v >= region.box.lo(d) && v <= region.box.hi(d);
      cell_inside = cell_inside && v - half >= region.box.lo(d) && v + half <= region.box.hi(d);
      cell_outside = cell_outside && (v + half <= region.box.lo(d) || v - half >= region.box.hi(d));
    }
    out.safe[cell] = center_in ? 1 : 0;
    if (center_in) ++out.safe_count;
    if (!cell_inside && !cell_outside) ++out.straddling;
  }
  return out;
}

namespace {

SynthesisResult init_tables(std::size_t states, const SafeCells& safe, int horizon) {
  SynthesisResult r;
  r.safe = safe;
  r.values.horizon = horizon;
  r.values.states = states;
  r.values.values.assign(static_cast<std::size_t>(horizon + 1) * states, 0.0);
  r.policy.horizon = horizon;
  r.policy.states = states;
  r.policy.choice.assign(static_cast<std::size_t>(horizon) * states, 0);
  // Terminal condition: indicator of the safe cells.
  double* terminal = r.values.values.data() + static_cast<std::size_t>(horizon) * states;
  for (std::size_t i = 0; i < states; ++i) terminal[i] = safe.safe[i] ? 1.0 : 0.0;
  return r;
}

}  // namespace

SynthesisResult safety_value_iteration(const FiniteMdp& mdp, const SafetySpec& spec,
                                       int workers) {
  const std::size_t states = mdp.state_count();
  const SafeCells safe = classify_safe_cells(mdp.grid, spec);
  SynthesisResult result = init_tables(states, safe, spec.horizon);

  for (int k = spec.horizon - 1; k >= 0; --k) {
    const double* next = result.values.values.data() + static_cast<std::size_t>(k + 1) * states;
    double* cur = result.values.values.data() + static_cast<std::size_t>(k) * states;
    std::uint32_t* pol = result.policy.choice.data() + static_cast<std::size_t>(k) * states;
    parallel_for(0, states, workers, [&](std::size_t i) {
      if (!safe.safe[i]) {
        cur[i] = 0.0;
        pol[i] = 0;
        return;
      }
      double best = -1.0;
      std::uint32_t best_u = 0;
      for (int u = 0; u < mdp.inputs.size(); ++u) {
        const auto row = mdp.row(i, u);
        double v = 0.0;
        for (std::size_t j = 0; j < states; ++j) v += row[j] * next[j];
        // row[states] (absorbing) contributes zero.
        if (v > best) {
          best = v;
          best_u = static_cast<std::uint32_t>(u);
        }
      }
      cur[i] = std::clamp(best, 0.0, 1.0);
      pol[i] = best_u;
    });
  }
  return result;
}

double worst_case_expectation(std::span<const double> lower, std::span<const double> upper,
                              std::span<const double> values) {
  const std::size_t m = values.size();
  require(lower.size() == m && upper.size() == m, ErrorCode::invalid_parameter,
          "bound vectors must match the value vector");
  double mass = 1.0;
  double total = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    require(lower[j] <= upper[j] + 1e-15, ErrorCode::invalid_interval,
            "interval has lower > upper");
    mass -= lower[j];
    total += lower[j] * values[j];
  }
  require(mass >= -1e-9, ErrorCode::invalid_interval, "interval lower bounds exceed mass 1");
  // Ascending continuation values soak up the remaining mass first;
  // index-ascending tie-break keeps the allocation deterministic.
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (values[a] != values[b]) return values[a] < values[b];
    return a < b;
  });
  for (std::size_t j : order) {
    if (mass <= 0.0) break;
    const double add = std::min(upper[j] - lower[j], mass);
    total += add * values[j];
    mass -= add;
  }
  require(mass <= 1e-9, ErrorCode::invalid_interval, "interval upper bounds cannot reach mass 1");
  return total;
}

SynthesisResult robust_safety_value_iteration(const IntervalMdp& imdp, const SafetySpec& spec,
                                              int workers) {
  const std::size_t states = imdp.state_count();
  const std::size_t cols = imdp.column_count();
  const SafeCells safe = classify_safe_cells(imdp.grid, spec);
  SynthesisResult result = init_tables(states, safe, spec.horizon);

  // Interval rows are extracted once, repaired if inconsistent (proportional
  // clipping onto sum(lower) <= 1 <= sum(upper)), and reused every sweep.
  const std::size_t n_inputs = static_cast<std::size_t>(imdp.inputs.size());
  std::vector<double> lower(states * n_inputs * cols);
  std::vector<double> upper(states * n_inputs * cols);
  std::atomic<std::size_t> repaired{0};
  parallel_for(0, states * n_inputs, workers, [&](std::size_t pair) {
    const std::size_t cell = pair / n_inputs;
    const int u = static_cast<int>(pair % n_inputs);
    double* lo = lower.data() + pair * cols;
    double* hi = upper.data() + pair * cols;
    double lo_sum = 0.0;
    double hi_sum = 0.0;
    for (std::size_t col = 0; col < cols; ++col) {
      lo[col] = imdp.lower(cell, u, col);
      hi[col] = imdp.upper(cell, u, col);
      require(lo[col] <= hi[col], ErrorCode::invalid_interval,
              "interval entry has lower > upper");
      lo_sum += lo[col];
      hi_sum += hi[col];
    }
    bool fixed = false;
    if (lo_sum > 1.0) {
      require(lo_sum > 0.0, ErrorCode::invalid_interval, "degenerate interval row");
      for (std::size_t col = 0; col < cols; ++col) lo[col] /= lo_sum;
      fixed = true;
    }
    if (hi_sum < 1.0) {
      require(hi_sum > 0.0, ErrorCode::invalid_interval,
              "interval row cannot carry probability mass 1");
      for (std::size_t col = 0; col < cols; ++col) hi[col] = std::min(1.0, hi[col] / hi_sum);
      double check = 0.0;
      for (std::size_t col = 0; col < cols; ++col) check += hi[col];
      require(check >= 1.0 - 1e-12, ErrorCode::invalid_interval,
              "interval row cannot be repaired to carry mass 1");
      fixed = true;
    }
    if (fixed) repaired.fetch_add(1, std::memory_order_relaxed);
  });
  result.repaired_rows = repaired.load();

  std::vector<double> padded(cols, 0.0);
  for (int k = spec.horizon - 1; k >= 0; --k) {
    const double* next = result.values.values.data() + static_cast<std::size_t>(k + 1) * states;
    double* cur = result.values.values.data() + static_cast<std::size_t>(k) * states;
    std::uint32_t* pol = result.policy.choice.data() + static_cast<std::size_t>(k) * states;
    // Continuation values with the absorbing column appended at zero.
    std::vector<double> cont(cols, 0.0);
    std::copy(next, next + states, cont.begin());
    cont[states] = 0.0;
    parallel_for(0, states, workers, [&](std::size_t i) {
      if (!safe.safe[i]) {
        cur[i] = 0.0;
        pol[i] = 0;
        return;
      }
      double best = -1.0;
      std::uint32_t best_u = 0;
      for (std::size_t u = 0; u < n_inputs; ++u) {
        const std::size_t pair = i * n_inputs + u;
        const double v = worst_case_expectation(
            {lower.data() + pair * cols, cols}, {upper.data() + pair * cols, cols}, cont);
        if (v > best) {
          best = v;
          best_u = static_cast<std::uint32_t>(u);
        }
      }
      cur[i] = std::clamp(best, 0.0, 1.0);
      pol[i] = best_u;
    });
  }
  return result;
}

SimulationResult closed_loop_sim(const BlackBoxSystem& sys, const Grid& grid,
                                 const Policy& policy, const SafetySpec& spec,
                                 std::span<const double> initial, int runs,
                                 NoiseStream stream) {
  require(runs >= 1, ErrorCode::invalid_parameter, "at least one run required");
  require(policy.horizon >= spec.horizon, ErrorCode::invalid_parameter,
          "policy horizon is shorter than the specification horizon");
  require(policy.states == grid.cell_count(), ErrorCode::invalid_parameter,
          "policy state count does not match the grid");
  spec.validate(grid.box());
  const std::size_t n = static_cast<std::size_t>(sys.dim());
  require(initial.size() == n, ErrorCode::invalid_parameter,
          "initial state dimension mismatch");

  SimulationResult result;
  result.runs.resize(static_cast<std::size_t>(runs));
  int safe_runs = 0;
  for (int r = 0; r < runs; ++r) {
    NoiseStream run_stream = stream.derive(static_cast<std::uint64_t>(r));
    Trajectory traj;
    traj.states.reserve(static_cast<std::size_t>(spec.horizon) + 1);
    traj.inputs.reserve(static_cast<std::size_t>(spec.horizon));
    std::vector<double> x(initial.begin(), initial.end());
    traj.states.push_back(x);
    traj.safe = spec.safe_region.contains(x);
    std::vector<double> next(n);
    for (int k = 0; k < spec.horizon; ++k) {
      const Projection proj = project(grid, x);
      int u = 0;
      if (!proj.absorbing) {
        u = static_cast<int>(policy.at(k, proj.cell));
      } else {
        traj.safe = false;
      }
      sys.step_into(x, u, run_stream, next);
      x.assign(next.begin(), next.end());
      traj.states.push_back(x);
      traj.inputs.push_back(u);
      if (!spec.safe_region.contains(x)) traj.safe = false;
    }
    if (traj.safe) ++safe_runs;
    result.runs[static_cast<std::size_t>(r)] = std::move(traj);
  }
  result.safety_frequency = static_cast<double>(safe_runs) / static_cast<double>(runs);
  return result;
}

std::vector<double> trajectory_distance(const Trajectory& a, const Trajectory& b) {
  require(a.states.size() == b.states.size(), ErrorCode::invalid_state,
          "trajectories differ in length");
  std::vector<double> out(a.states.size());
  for (std::size_t k = 0; k < a.states.size(); ++k) {
    require(a.states[k].size() == b.states[k].size(), ErrorCode::invalid_state,
            "trajectories differ in dimension");
    double s = 0.0;
    for (std::size_t d = 0; d < a.states[k].size(); ++d) {
      const double diff = a.states[k][d] - b.states[k][d];
      s += diff * diff;
    }
    out[k] = std::sqrt(s);
  }
  return out;
}

}  // namespace mdpabs
