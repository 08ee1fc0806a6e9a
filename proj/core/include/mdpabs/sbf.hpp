#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mdpabs/blackbox.hpp"
#include "mdpabs/grid.hpp"

namespace mdpabs {

/// One basis function of the certificate template. The families are fixed
/// and declarative so constraint assembly stays exact.
struct BasisTerm {
  enum class Kind {
    squared_diff,  // (x_i - xhat_i)^2
    cross_diff,    // (x_i - xhat_i) (x_j - xhat_j), i < j
    constant,      // 1
  };
  Kind kind = Kind::constant;
  int i = 0;
  int j = 0;

  double eval(std::span<const double> x, std::span<const double> xhat) const {
    switch (kind) {
      case Kind::squared_diff: {
        const double d = x[static_cast<std::size_t>(i)] - xhat[static_cast<std::size_t>(i)];
        return d * d;
      }
      case Kind::cross_diff: {
        const double di = x[static_cast<std::size_t>(i)] - xhat[static_cast<std::size_t>(i)];
        const double dj = x[static_cast<std::size_t>(j)] - xhat[static_cast<std::size_t>(j)];
        return di * dj;
      }
      case Kind::constant: return 1.0;
    }
    return 0.0;
  }

  bool operator==(const BasisTerm&) const = default;
};

class SbfBasis {
public:
  SbfBasis(int dim, std::vector<BasisTerm> terms);

  /// (x_d - xhat_d)^2 for every coordinate, optionally followed by 1.
  static SbfBasis per_coordinate(int dim, bool with_constant);

  /// All monomials of the difference vector up to the full quadratic form,
  /// optionally followed by 1.
  static SbfBasis quadratic(int dim, bool with_constant);

  static SbfBasis named(const std::string& family, int dim);

  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return terms_.size(); }
  const std::vector<BasisTerm>& terms() const noexcept { return terms_; }
  void eval_into(std::span<const double> x, std::span<const double> xhat,
                 std::span<double> out) const;

  bool operator==(const SbfBasis&) const = default;

private:
  int dim_;
  std::vector<BasisTerm> terms_;
};

/// Candidate (or certified) closeness function S(x, xhat) = sum_j q_j b_j
/// together with the constants of its two defining conditions:
/// alpha ||x - xhat||^2 <= S, and E[S after one step] <= S + psi.
struct SbfTemplate {
  SbfTemplate(SbfBasis basis, std::vector<double> coefficients, double alpha, double psi);

  SbfBasis basis;
  std::vector<double> coefficients;
  double alpha;  // > 0
  double psi;    // >= 0

  double evaluate(std::span<const double> x, std::span<const double> xhat) const;
};

struct DeviationBound {
  double raw;      // (S(a, ahat) + psi * horizon) / (alpha * radius^2)
  double clamped;  // min(raw, 1)
  bool horizon_independent;  // psi == 0: any horizon gives the same bound
  bool vacuous;              // raw >= 1
};

/// Probability bound on the two trajectories drifting more than `radius`
/// apart within `horizon` steps, given the value of S at the initial pair.
DeviationBound deviation_bound(double s_initial, double alpha, double psi, int horizon,
                               double radius);

struct GuaranteeReport {
  double delta_raw = 0.0;   // trajectory deviation bound, unclamped
  double delta = 0.0;       // clamped to [0,1]
  double rho = 0.0;         // interval-abstraction value gap
  double epsilon = 0.0;     // closeness radius / deflation radius
  int horizon = 0;
  double abstract_probability = 0.0;  // satisfaction probability on the abstraction
  double lower_bound_raw = 0.0;       // abstract_probability - delta - rho
  double lower_bound = 0.0;           // clamped to [0,1]
  double confidence_raw = 0.0;        // 1 - beta_empirical - beta_scenario - beta_intervals
  double confidence = 0.0;            // clamped to [0,1]
  double beta_empirical = 0.0;
  double beta_scenario = 0.0;
  double beta_intervals = 0.0;
  bool vacuous = false;  // lower bound clamped to zero or deviation bound >= 1
};

/// Combines abstraction-level satisfaction with the deviation and interval
/// error terms into the end-to-end lower bound and its confidence ledger.
GuaranteeReport compose_guarantee(double abstract_probability, double delta, double rho,
                                  double beta_empirical, double beta_scenario,
                                  double beta_intervals);

struct ConditionSlack {
  double lower_bound_slack;  // worst alpha ||x-xhat||^2 - S(x, xhat)
  double drift_slack;        // worst empirical one-step drift of S
};

/// A-posteriori sanity check of a template on fresh points: evaluates both
/// defining conditions empirically (common noise, M realizations per pair)
/// and reports the worst slack seen. A sanity check, not a proof.
ConditionSlack validate_on_samples(const SbfTemplate& sbf, const BlackBoxSystem& sys,
                                   const Grid& grid,
                                   const std::vector<std::vector<double>>& points,
                                   std::size_t realizations, double mean_error,
                                   NoiseStream stream);

}  // namespace mdpabs
