#include "mdpabs/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "mdpabs/errors.hpp"
#include "mdpabs/noise.hpp"
#include "mdpabs/parallel.hpp"
#include "mdpabs/scenario.hpp"

namespace mdpabs {

FiniteMdp::FiniteMdp(Grid grid_in, InputSet inputs_in, Provenance provenance_in)
    : grid(std::move(grid_in)), inputs(std::move(inputs_in)), provenance(provenance_in) {
  transitions.assign(state_count() * static_cast<std::size_t>(inputs.size()) * column_count(),
                     0.0);
}

std::span<double> FiniteMdp::row(std::size_t cell, int input) {
  const std::size_t base =
      (cell * static_cast<std::size_t>(inputs.size()) + static_cast<std::size_t>(input)) *
      column_count();
  return {transitions.data() + base, column_count()};
}

std::span<const double> FiniteMdp::row(std::size_t cell, int input) const {
  const std::size_t base =
      (cell * static_cast<std::size_t>(inputs.size()) + static_cast<std::size_t>(input)) *
      column_count();
  return {transitions.data() + base, column_count()};
}

void FiniteMdp::validate() const {
  for (std::size_t cell = 0; cell < state_count(); ++cell) {
    for (int u = 0; u < inputs.size(); ++u) {
      const auto r = row(cell, u);
      double sum = 0.0;
      for (double p : r) {
        require(p >= 0.0, ErrorCode::invalid_state, "transition probabilities must be nonnegative");
        sum += p;
      }
      require(std::abs(sum - 1.0) <= 1e-12, ErrorCode::invalid_state,
              "transition row does not sum to 1 within 1e-12");
    }
  }
}

IntervalMdp::IntervalMdp(Grid grid_in, InputSet inputs_in, double half_width_in,
                         double entry_confidence_in, std::uint64_t samples_per_pair_in)
    : grid(std::move(grid_in)),
      inputs(std::move(inputs_in)),
      half_width(half_width_in),
      entry_confidence(entry_confidence_in),
      samples_per_pair(samples_per_pair_in) {
  require(half_width > 0.0 && half_width <= 1.0, ErrorCode::invalid_parameter,
          "interval half-width must lie in (0, 1]");
  require(entry_confidence > 0.0 && entry_confidence < 1.0, ErrorCode::invalid_parameter,
          "per-entry confidence must lie in (0, 1)");
  require(samples_per_pair >= 1, ErrorCode::invalid_parameter,
          "at least one sample per pair required");
  counts.assign(state_count() * static_cast<std::size_t>(inputs.size()) * column_count(), 0);
}

std::size_t IntervalMdp::entry_index(std::size_t cell, int input, std::size_t col) const {
  return (cell * static_cast<std::size_t>(inputs.size()) + static_cast<std::size_t>(input)) *
             column_count() +
         col;
}

double IntervalMdp::point(std::size_t cell, int input, std::size_t col) const {
  return static_cast<double>(counts[entry_index(cell, input, col)]) /
         static_cast<double>(samples_per_pair);
}

double IntervalMdp::width(std::size_t cell, int input, std::size_t col) const {
  if (half_widths) return (*half_widths)[entry_index(cell, input, col)];
  return half_width;
}

double IntervalMdp::lower(std::size_t cell, int input, std::size_t col) const {
  return std::max(0.0, point(cell, input, col) - width(cell, input, col));
}

double IntervalMdp::upper(std::size_t cell, int input, std::size_t col) const {
  return std::min(1.0, point(cell, input, col) + width(cell, input, col));
}

double IntervalMdp::beta_total() const {
  return entry_confidence * static_cast<double>(counts.size());
}

void IntervalMdp::validate() const {
  for (std::size_t cell = 0; cell < state_count(); ++cell) {
    for (int u = 0; u < inputs.size(); ++u) {
      std::uint64_t sum = 0;
      for (std::size_t col = 0; col < column_count(); ++col) {
        sum += counts[entry_index(cell, u, col)];
      }
      require(sum == samples_per_pair, ErrorCode::invalid_state,
              "per-pair counts must sum to the sample count");
    }
  }
  if (half_widths) {
    require(half_widths->size() == counts.size(), ErrorCode::invalid_state,
            "per-entry half-width tensor has the wrong size");
  }
}

IntervalMdp estimate_imdp(const BlackBoxSystem& sys, const Grid& grid, double half_width,
                          double entry_confidence, NoiseStream stream, int workers) {
  require(grid.dim() == sys.dim(), ErrorCode::invalid_parameter,
          "grid dimension must match the system");
  const std::uint64_t samples = min_transition_sample_count(half_width, entry_confidence);
  IntervalMdp imdp(grid, sys.inputs(), half_width, entry_confidence, samples);
  const std::size_t n_inputs = static_cast<std::size_t>(sys.inputs().size());
  const std::size_t pairs = grid.cell_count() * n_inputs;
  parallel_for(0, pairs, workers, [&](std::size_t pair) {
    const std::size_t cell = pair / n_inputs;
    const int u = static_cast<int>(pair % n_inputs);
    NoiseStream draw = stream.derive(cell, static_cast<std::uint64_t>(u));
    std::vector<double> next(static_cast<std::size_t>(sys.dim()));
    std::uint32_t* row = imdp.counts.data() + imdp.entry_index(cell, u, 0);
    for (std::uint64_t z = 0; z < samples; ++z) {
      sys.step_into(grid.center(cell), u, draw, next);
      const Projection proj = project(grid, next);
      ++row[proj.absorbing ? grid.cell_count() : proj.cell];
    }
  });
  return imdp;
}

double interval_value_gap(const IntervalMdp& imdp, int horizon) {
  require(horizon >= 0, ErrorCode::invalid_parameter, "horizon must be nonnegative");
  const std::size_t cells = imdp.state_count();
  if (!imdp.half_widths) {
    // Uniform case short-circuit: every row sums to cells * half_width.
    return 2.0 * static_cast<double>(horizon) * imdp.half_width * static_cast<double>(cells);
  }
  double worst = 0.0;
  for (std::size_t cell = 0; cell < cells; ++cell) {
    for (int u = 0; u < imdp.inputs.size(); ++u) {
      double sum = 0.0;
      for (std::size_t col = 0; col < cells; ++col) sum += imdp.width(cell, u, col);
      worst = std::max(worst, sum);
    }
  }
  return 2.0 * static_cast<double>(horizon) * worst;
}

GaussianFit fit_gaussian_mle(const std::vector<std::vector<double>>& samples) {
  require(samples.size() >= 2, ErrorCode::invalid_parameter,
          "the Gaussian fit needs at least two samples");
  const std::size_t dim = samples.front().size();
  require(dim >= 1, ErrorCode::invalid_parameter, "samples must have at least one dimension");
  for (const auto& s : samples) {
    require(s.size() == dim, ErrorCode::invalid_parameter, "samples differ in dimension");
  }
  GaussianFit fit;
  fit.count = samples.size();
  fit.mean.assign(dim, 0.0);
  fit.stddev.assign(dim, 0.0);
  for (const auto& s : samples) {
    for (std::size_t d = 0; d < dim; ++d) fit.mean[d] += s[d];
  }
  for (std::size_t d = 0; d < dim; ++d) fit.mean[d] /= static_cast<double>(fit.count);
  for (const auto& s : samples) {
    for (std::size_t d = 0; d < dim; ++d) {
      const double r = s[d] - fit.mean[d];
      fit.stddev[d] += r * r;
    }
  }
  for (std::size_t d = 0; d < dim; ++d) {
    fit.stddev[d] = std::sqrt(fit.stddev[d] / static_cast<double>(fit.count - 1));
  }
  return fit;
}

StepMeans estimate_step_means(const BlackBoxSystem& sys, const Grid& grid,
                              std::size_t pilot_count, NoiseStream stream, int workers) {
  require(pilot_count >= 1, ErrorCode::invalid_parameter, "pilot count must be positive");
  const std::size_t n = static_cast<std::size_t>(sys.dim());
  const std::size_t n_inputs = static_cast<std::size_t>(sys.inputs().size());
  StepMeans out;
  out.pilot_count = pilot_count;
  out.means.assign(grid.cell_count() * n_inputs * n, 0.0);
  const std::size_t pairs = grid.cell_count() * n_inputs;
  parallel_for(0, pairs, workers, [&](std::size_t pair) {
    const std::size_t cell = pair / n_inputs;
    const int u = static_cast<int>(pair % n_inputs);
    NoiseStream draw = stream.derive(cell, static_cast<std::uint64_t>(u));
    std::vector<double> next(n);
    double* mean = out.means.data() + pair * n;
    for (std::size_t z = 0; z < pilot_count; ++z) {
      sys.step_into(grid.center(cell), u, draw, next);
      for (std::size_t d = 0; d < n; ++d) mean[d] += next[d];
    }
    for (std::size_t d = 0; d < n; ++d) mean[d] /= static_cast<double>(pilot_count);
  });
  return out;
}

std::vector<std::vector<double>> collect_residuals(const BlackBoxSystem& sys, const Grid& grid,
                                                   const StepMeans& means, std::size_t count,
                                                   NoiseStream stream) {
  require(count >= 2, ErrorCode::invalid_parameter, "at least two residuals required");
  const std::size_t n = static_cast<std::size_t>(sys.dim());
  const std::size_t n_inputs = static_cast<std::size_t>(sys.inputs().size());
  const std::size_t pairs = grid.cell_count() * n_inputs;
  std::vector<std::vector<double>> residuals(count);
  std::vector<double> next(n);
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t pair = k % pairs;
    const std::size_t cell = pair / n_inputs;
    const int u = static_cast<int>(pair % n_inputs);
    sys.step_into(grid.center(cell), u, stream, next);
    const auto mean = means.at(cell, u, static_cast<int>(n), static_cast<int>(n_inputs));
    residuals[k].resize(n);
    for (std::size_t d = 0; d < n; ++d) residuals[k][d] = next[d] - mean[d];
  }
  return residuals;
}

FiniteMdp mdp_from_gaussian(const Grid& grid, const InputSet& inputs, const StepMeans& means,
                            std::span<const double> stddev, FiniteMdp::Provenance provenance) {
  const std::size_t n = static_cast<std::size_t>(grid.dim());
  require(stddev.size() == n, ErrorCode::invalid_parameter,
          "stddev must have one entry per dimension");
  for (double s : stddev) {
    require(s >= 0.0, ErrorCode::invalid_parameter, "stddev entries must be nonnegative");
  }
  const std::size_t n_inputs = static_cast<std::size_t>(inputs.size());
  require(means.means.size() == grid.cell_count() * n_inputs * n, ErrorCode::invalid_parameter,
          "step means tensor has the wrong size");
  FiniteMdp mdp(grid, inputs, provenance);

  // Per-dimension CDF masses are computed once per (pair, dimension) against
  // the cell boundaries; rows are products of per-dimension masses and the
  // absorbing column closes each row exactly.
  std::vector<std::vector<double>> dim_mass(n);
  std::vector<int> multi(n);
  for (std::size_t cell = 0; cell < grid.cell_count(); ++cell) {
    for (int u = 0; u < inputs.size(); ++u) {
      const auto mean = means.at(cell, u, static_cast<int>(n), static_cast<int>(n_inputs));
      for (std::size_t d = 0; d < n; ++d) {
        const int k = grid.counts()[d];
        auto& mass = dim_mass[d];
        mass.assign(static_cast<std::size_t>(k), 0.0);
        if (stddev[d] == 0.0) {
          // Degenerate marginal: all mass in the interval containing the
          // mean, honoring the half-open cell rule.
          for (int j = 0; j < k; ++j) {
            const double lo = grid.boundary(static_cast<int>(d), j);
            const double hi = grid.boundary(static_cast<int>(d), j + 1);
            const bool last = j == k - 1;
            const bool inside = mean[d] >= lo && (last ? mean[d] <= hi : mean[d] < hi);
            mass[static_cast<std::size_t>(j)] = inside ? 1.0 : 0.0;
          }
        } else {
          double prev = standard_normal_cdf(
              (grid.boundary(static_cast<int>(d), 0) - mean[d]) / stddev[d]);
          for (int j = 0; j < k; ++j) {
            const double next = standard_normal_cdf(
                (grid.boundary(static_cast<int>(d), j + 1) - mean[d]) / stddev[d]);
            mass[static_cast<std::size_t>(j)] = std::max(0.0, next - prev);
            prev = next;
          }
        }
      }
      auto row = mdp.row(cell, u);
      double sum = 0.0;
      std::fill(multi.begin(), multi.end(), 0);
      for (std::size_t target = 0; target < grid.cell_count(); ++target) {
        double p = 1.0;
        for (std::size_t d = 0; d < n; ++d) {
          p *= dim_mass[d][static_cast<std::size_t>(multi[d])];
        }
        row[target] = p;
        sum += p;
        for (int d = static_cast<int>(n) - 1; d >= 0; --d) {
          int& j = multi[static_cast<std::size_t>(d)];
          if (++j < grid.counts()[static_cast<std::size_t>(d)]) break;
          j = 0;
        }
      }
      row[grid.cell_count()] = std::max(0.0, 1.0 - sum);
    }
  }
  mdp.validate();
  return mdp;
}

FiniteMdp imdp_to_point_mdp(const IntervalMdp& imdp) {
  FiniteMdp mdp(imdp.grid, imdp.inputs, FiniteMdp::Provenance::empirical);
  for (std::size_t cell = 0; cell < imdp.state_count(); ++cell) {
    for (int u = 0; u < imdp.inputs.size(); ++u) {
      auto row = mdp.row(cell, u);
      for (std::size_t col = 0; col < imdp.column_count(); ++col) {
        row[col] = imdp.point(cell, u, col);
      }
    }
  }
  mdp.validate();
  return mdp;
}

FiniteMdp mle_abstraction(const BlackBoxSystem& sys, const Grid& grid,
                          std::size_t residual_count, std::size_t pilot_count,
                          NoiseStream stream, int workers) {
  const StepMeans means = estimate_step_means(sys, grid, pilot_count, stream.derive(1), workers);
  const auto residuals =
      collect_residuals(sys, grid, means, residual_count, stream.derive(2));
  const GaussianFit fit = fit_gaussian_mle(residuals);
  return mdp_from_gaussian(grid, sys.inputs(), means, fit.stddev,
                           FiniteMdp::Provenance::gaussian_mle);
}

}  // namespace mdpabs
