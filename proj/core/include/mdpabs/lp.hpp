#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace mdpabs {

/// Linear program in the few-variables, many-rows regime:
/// minimize objective . x  subject to  row_coeffs_i . x + row_offset_i <= 0
/// and per-variable box bounds (entries may be +-infinity).
struct LinearProgram {
  int var_count = 0;
  std::vector<double> objective;     // length var_count
  std::vector<double> row_coeffs;    // rows * var_count, row-major
  std::vector<double> row_offsets;   // one constant per row
  std::vector<double> lower, upper;  // per-variable bounds

  std::size_t rows() const {
    return var_count == 0 ? 0 : row_coeffs.size() / static_cast<std::size_t>(var_count);
  }
  std::span<const double> row(std::size_t r) const {
    return {row_coeffs.data() + r * static_cast<std::size_t>(var_count),
            static_cast<std::size_t>(var_count)};
  }
  void add_row(std::span<const double> coeffs, double offset);
  void validate() const;
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpSolution {
  LpStatus status = LpStatus::optimal;
  std::vector<double> point;
  double value = 0.0;
  std::vector<std::size_t> active_rows;  // rows tight at the optimum
  double max_violation = 0.0;            // over all rows, at the reported point
  int outer_iterations = 0;              // working-set growth steps
  int simplex_pivots = 0;
};

/// Deterministic active-set solve: a small working set of rows is solved
/// exactly by a bounded-variable simplex (Bland's rule), the most violated of
/// the remaining rows is added, and the loop repeats until no row is violated
/// beyond tol. Identical input bytes produce identical output bytes. Row
/// violations are measured relative to the row's magnitude at the point.
LpSolution solve(const LinearProgram& lp, double tol = 1e-9, int workers = 1);

struct CrossCheckReport {
  bool improved = false;          // some candidate beats the reported optimum
  bool violation_flagged = false; // the reported point itself violates a row
  double best_candidate_value = 0.0;
  std::size_t best_candidate = 0;
  double point_violation = 0.0;
};

/// Confirms no candidate is feasible with objective < solution.value - tol;
/// also re-checks feasibility of the reported point. Used by tests against
/// brute-force point oracles.
CrossCheckReport cross_check(const LinearProgram& lp, const LpSolution& solution,
                             const std::vector<std::vector<double>>& candidates,
                             double tol = 1e-9);

/// Kahan-compensated row evaluation: coeffs . x + offset.
double row_value(std::span<const double> coeffs, std::span<const double> x, double offset);

/// Text matrix round-trip (one row per constraint: coefficients, offset,
/// provenance tag). The program dump written by scenario assembly parses
/// back with this.
void write_program(std::ostream& os, const LinearProgram& lp,
                   const std::vector<std::string>& row_tags);
LinearProgram read_program(std::istream& is, std::vector<std::string>* row_tags = nullptr);

}  // namespace mdpabs
