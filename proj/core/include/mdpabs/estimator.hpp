#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mdpabs/blackbox.hpp"
#include "mdpabs/grid.hpp"

namespace mdpabs {

/// Finite MDP over grid cells plus one absorbing out-of-box state. Rows are
/// indexed (cell, input); the last column is the absorbing state. Every row
/// is a probability distribution within 1e-12.
struct FiniteMdp {
  enum class Provenance { empirical, gaussian_mle, model };

  FiniteMdp(Grid grid, InputSet inputs, Provenance provenance);

  Grid grid;
  InputSet inputs;
  Provenance provenance;
  std::vector<double> transitions;  // cells * inputs * (cells + 1)

  std::size_t state_count() const { return grid.cell_count(); }
  std::size_t column_count() const { return grid.cell_count() + 1; }
  std::span<double> row(std::size_t cell, int input);
  std::span<const double> row(std::size_t cell, int input) const;
  void validate() const;
};

/// Interval MDP built from one-step frequencies: each entry carries a point
/// estimate count/samples and the symmetric half-width interval around it,
/// clipped to [0, 1]. Entries exist for every (cell, input, successor)
/// including the absorbing column, and each one spends `entry_confidence`
/// of the confidence budget.
struct IntervalMdp {
  IntervalMdp(Grid grid, InputSet inputs, double half_width, double entry_confidence,
              std::uint64_t samples_per_pair);

  Grid grid;
  InputSet inputs;
  double half_width;
  double entry_confidence;
  std::uint64_t samples_per_pair;
  std::vector<std::uint32_t> counts;  // cells * inputs * (cells + 1)
  /// Optional per-entry half-widths overriding the uniform one.
  std::optional<std::vector<double>> half_widths;

  std::size_t state_count() const { return grid.cell_count(); }
  std::size_t column_count() const { return grid.cell_count() + 1; }
  std::size_t entry_index(std::size_t cell, int input, std::size_t col) const;
  double point(std::size_t cell, int input, std::size_t col) const;
  double width(std::size_t cell, int input, std::size_t col) const;
  double lower(std::size_t cell, int input, std::size_t col) const;
  double upper(std::size_t cell, int input, std::size_t col) const;
  /// Union-bound confidence spend over all tracked entries.
  double beta_total() const;
  void validate() const;
};

/// Estimates the interval MDP by drawing `samples_per_pair` independent
/// one-step transitions from every (representative point, input) pair and
/// binning the successors; out-of-box successors land in the absorbing
/// column. samples_per_pair must meet min_transition_sample_count for the
/// requested half-width/confidence. Bit-reproducible for a fixed stream.
IntervalMdp estimate_imdp(const BlackBoxSystem& sys, const Grid& grid, double half_width,
                          double entry_confidence, NoiseStream stream, int workers = 1);

/// Horizon-scaled worst-row interval mass: 2 * horizon * max over (cell,
/// input) of the summed half-widths over the grid columns. Bounds how far
/// interval-MDP satisfaction probabilities can sit from point-MDP ones.
double interval_value_gap(const IntervalMdp& imdp, int horizon);

/// Per-dimension Gaussian fit: empirical mean and the (count-1)-normalized
/// standard deviation.
struct GaussianFit {
  std::vector<double> mean;
  std::vector<double> stddev;
  std::size_t count = 0;
};

GaussianFit fit_gaussian_mle(const std::vector<std::vector<double>>& samples);

/// One-step conditional means per (cell, input), estimated from pilot draws.
struct StepMeans {
  std::size_t pilot_count = 0;
  std::vector<double> means;  // cells * inputs * dim

  std::span<const double> at(std::size_t cell, int input, int dim, int input_count) const {
    const std::size_t base =
        (cell * static_cast<std::size_t>(input_count) + static_cast<std::size_t>(input)) *
        static_cast<std::size_t>(dim);
    return {means.data() + base, static_cast<std::size_t>(dim)};
  }
};

StepMeans estimate_step_means(const BlackBoxSystem& sys, const Grid& grid,
                              std::size_t pilot_count, NoiseStream stream, int workers = 1);

/// Residuals of fresh one-step draws against the estimated conditional
/// means, spread round-robin over (cell, input) pairs; inputs to the
/// Gaussian fit.
std::vector<std::vector<double>> collect_residuals(const BlackBoxSystem& sys, const Grid& grid,
                                                   const StepMeans& means, std::size_t count,
                                                   NoiseStream stream);

/// Transition rows by integrating the product of per-dimension normal CDFs
/// over each cell, centered at the (cell, input) conditional mean; the
/// absorbing column closes each row exactly. A zero stddev collapses to the
/// indicator of the cell containing the mean.
FiniteMdp mdp_from_gaussian(const Grid& grid, const InputSet& inputs, const StepMeans& means,
                            std::span<const double> stddev, FiniteMdp::Provenance provenance);

/// Point MDP from the interval point estimates; rows are stochastic by
/// construction.
FiniteMdp imdp_to_point_mdp(const IntervalMdp& imdp);

/// Pilot means + residual fit + CDF integration in one call.
FiniteMdp mle_abstraction(const BlackBoxSystem& sys, const Grid& grid,
                          std::size_t residual_count, std::size_t pilot_count,
                          NoiseStream stream, int workers = 1);

}  // namespace mdpabs
