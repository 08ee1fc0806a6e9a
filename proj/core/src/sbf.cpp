#include "mdpabs/sbf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "mdpabs/errors.hpp"

namespace mdpabs {

SbfBasis::SbfBasis(int dim, std::vector<BasisTerm> terms)
    : dim_(dim), terms_(std::move(terms)) {
  require(dim_ >= 1, ErrorCode::invalid_parameter, "basis dimension must be at least 1");
  require(!terms_.empty(), ErrorCode::invalid_parameter, "basis needs at least one term");
  for (const auto& t : terms_) {
    require(t.i >= 0 && t.i < dim_ && t.j >= 0 && t.j < dim_, ErrorCode::invalid_parameter,
            "basis term indexes a coordinate outside the state dimension");
    if (t.kind == BasisTerm::Kind::cross_diff) {
      require(t.i < t.j, ErrorCode::invalid_parameter, "cross terms must have i < j");
    }
  }
}

SbfBasis SbfBasis::per_coordinate(int dim, bool with_constant) {
  std::vector<BasisTerm> terms;
  for (int d = 0; d < dim; ++d) terms.push_back({BasisTerm::Kind::squared_diff, d, d});
  if (with_constant) terms.push_back({BasisTerm::Kind::constant, 0, 0});
  return SbfBasis(dim, std::move(terms));
}

SbfBasis SbfBasis::quadratic(int dim, bool with_constant) {
  std::vector<BasisTerm> terms;
  for (int d = 0; d < dim; ++d) terms.push_back({BasisTerm::Kind::squared_diff, d, d});
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) terms.push_back({BasisTerm::Kind::cross_diff, i, j});
  }
  if (with_constant) terms.push_back({BasisTerm::Kind::constant, 0, 0});
  return SbfBasis(dim, std::move(terms));
}

SbfBasis SbfBasis::named(const std::string& family, int dim) {
  if (family == "percoord") return per_coordinate(dim, false);
  if (family == "percoord_const") return per_coordinate(dim, true);
  if (family == "quadratic") return quadratic(dim, false);
  if (family == "quadratic_const") return quadratic(dim, true);
  throw_error(ErrorCode::invalid_parameter, "unknown basis family '" + family + "'");
}

void SbfBasis::eval_into(std::span<const double> x, std::span<const double> xhat,
                         std::span<double> out) const {
  require(static_cast<int>(x.size()) == dim_ && static_cast<int>(xhat.size()) == dim_,
          ErrorCode::invalid_state, "point dimension does not match the basis");
  for (std::size_t k = 0; k < terms_.size(); ++k) out[k] = terms_[k].eval(x, xhat);
}

SbfTemplate::SbfTemplate(SbfBasis basis_in, std::vector<double> coefficients_in, double alpha_in,
                         double psi_in)
    : basis(std::move(basis_in)),
      coefficients(std::move(coefficients_in)),
      alpha(alpha_in),
      psi(psi_in) {
  require(coefficients.size() == basis.size(), ErrorCode::invalid_parameter,
          "coefficient count must match the basis size");
  require(alpha > 0.0, ErrorCode::invalid_parameter, "alpha must be positive");
  require(psi >= 0.0, ErrorCode::invalid_parameter, "psi must be nonnegative");
}

double SbfTemplate::evaluate(std::span<const double> x, std::span<const double> xhat) const {
  require(static_cast<int>(x.size()) == basis.dim() &&
              static_cast<int>(xhat.size()) == basis.dim(),
          ErrorCode::invalid_state, "point dimension does not match the template");
  double s = 0.0;
  const auto& terms = basis.terms();
  for (std::size_t k = 0; k < terms.size(); ++k) s += coefficients[k] * terms[k].eval(x, xhat);
  return s;
}

DeviationBound deviation_bound(double s_initial, double alpha, double psi, int horizon,
                               double radius) {
  require(alpha > 0.0, ErrorCode::invalid_parameter, "alpha must be positive");
  require(radius > 0.0, ErrorCode::invalid_parameter, "radius must be positive");
  require(psi >= 0.0, ErrorCode::invalid_parameter, "psi must be nonnegative");
  require(horizon >= 0, ErrorCode::invalid_parameter, "horizon must be nonnegative");
  require(s_initial >= 0.0, ErrorCode::invalid_parameter,
          "initial closeness value must be nonnegative");
  const double raw = (s_initial + psi * horizon) / (alpha * radius * radius);
  return {raw, std::min(raw, 1.0), psi == 0.0, raw >= 1.0};
}

GuaranteeReport compose_guarantee(double abstract_probability, double delta, double rho,
                                  double beta_empirical, double beta_scenario,
                                  double beta_intervals) {
  require(abstract_probability >= 0.0 && abstract_probability <= 1.0,
          ErrorCode::invalid_parameter, "abstract satisfaction probability must be in [0,1]");
  require(delta >= 0.0 && rho >= 0.0, ErrorCode::invalid_parameter,
          "error terms must be nonnegative");
  require(beta_empirical >= 0.0 && beta_scenario >= 0.0 && beta_intervals >= 0.0,
          ErrorCode::invalid_parameter, "confidence shares must be nonnegative");
  GuaranteeReport r;
  r.delta_raw = delta;
  r.delta = std::min(delta, 1.0);
  r.rho = rho;
  r.abstract_probability = abstract_probability;
  r.lower_bound_raw = abstract_probability - delta - rho;
  r.lower_bound = std::clamp(r.lower_bound_raw, 0.0, 1.0);
  r.beta_empirical = beta_empirical;
  r.beta_scenario = beta_scenario;
  r.beta_intervals = beta_intervals;
  r.confidence_raw = 1.0 - beta_empirical - beta_scenario - beta_intervals;
  r.confidence = std::clamp(r.confidence_raw, 0.0, 1.0);
  r.vacuous = r.lower_bound_raw <= 0.0 || delta >= 1.0;
  return r;
}

ConditionSlack validate_on_samples(const SbfTemplate& sbf, const BlackBoxSystem& sys,
                                   const Grid& grid,
                                   const std::vector<std::vector<double>>& points,
                                   std::size_t realizations, double mean_error,
                                   NoiseStream stream) {
  require(realizations >= 1, ErrorCode::invalid_parameter,
          "at least one realization is required");
  const int n = sys.dim();
  const std::size_t cells = grid.cell_count();
  const int n_inputs = sys.inputs().size();
  double worst_lower = -std::numeric_limits<double>::infinity();
  double worst_drift = -std::numeric_limits<double>::infinity();
  std::vector<double> next(static_cast<std::size_t>(n));
  std::vector<double> next_hat(static_cast<std::size_t>(n));
  for (std::size_t p = 0; p < points.size(); ++p) {
    const std::span<const double> x{points[p]};
    for (std::size_t cell = 0; cell < cells; ++cell) {
      const auto rep = grid.center(cell);
      double dist_sq = 0.0;
      for (int d = 0; d < n; ++d) {
        const double dd = x[static_cast<std::size_t>(d)] - rep[static_cast<std::size_t>(d)];
        dist_sq += dd * dd;
      }
      worst_lower = std::max(worst_lower, sbf.alpha * dist_sq - sbf.evaluate(x, rep));
      for (int u = 0; u < n_inputs; ++u) {
        NoiseStream pair_stream = stream.derive(p, cell, static_cast<std::uint64_t>(u));
        double mean = 0.0;
        for (std::size_t z = 0; z < realizations; ++z) {
          const std::uint64_t mark = pair_stream.index();
          sys.step_into(x, u, pair_stream, next);
          if (sys.noise_mode() == NoiseMode::paired) pair_stream.seek(mark);
          sys.step_into(rep, u, pair_stream, next_hat);
          const auto rep_next = grid.center(nearest_cell(grid, next_hat));
          mean += sbf.evaluate(next, rep_next);
        }
        mean /= static_cast<double>(realizations);
        const double drift = mean - sbf.evaluate(x, rep) - sbf.psi + mean_error;
        worst_drift = std::max(worst_drift, drift);
      }
    }
  }
  return {worst_lower, worst_drift};
}

}  // namespace mdpabs
