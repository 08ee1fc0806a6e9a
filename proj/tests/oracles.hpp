// Brute-force reference implementations the solver-side code is checked
// against. Everything here is deliberately naive.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "mdpabs/estimator.hpp"
#include "mdpabs/lp.hpp"

namespace oracles {

/// Exact LP optimum by vertex enumeration: every choice of var_count active
/// hyperplanes (constraint rows and bound faces) is solved and the feasible
/// candidate with the smallest objective wins. Only sensible for <= 3 vars.
inline double lp_vertex_optimum(const mdpabs::LinearProgram& lp, bool* feasible_out = nullptr) {
  const int v = lp.var_count;
  const std::size_t m = lp.rows();
  // Hyperplanes: rows (a.x = -offset), then bound faces (x_j = lo/hi).
  std::vector<std::vector<double>> normals;
  std::vector<double> rhs;
  for (std::size_t i = 0; i < m; ++i) {
    const auto row = lp.row(i);
    normals.emplace_back(row.begin(), row.end());
    rhs.push_back(-lp.row_offsets[i]);
  }
  for (int j = 0; j < v; ++j) {
    if (std::isfinite(lp.lower[j])) {
      std::vector<double> n(v, 0.0);
      n[j] = 1.0;
      normals.push_back(n);
      rhs.push_back(lp.lower[j]);
    }
    if (std::isfinite(lp.upper[j])) {
      std::vector<double> n(v, 0.0);
      n[j] = 1.0;
      normals.push_back(n);
      rhs.push_back(lp.upper[j]);
    }
  }
  const std::size_t h = normals.size();
  const double tol = 1e-7;
  double best = std::numeric_limits<double>::infinity();
  bool feasible = false;

  std::vector<std::size_t> pick(v);
  const auto consider = [&](const std::vector<std::size_t>& idx) {
    Eigen::MatrixXd a(v, v);
    Eigen::VectorXd b(v);
    for (int r = 0; r < v; ++r) {
      for (int c = 0; c < v; ++c) a(r, c) = normals[idx[r]][c];
      b(r) = rhs[idx[r]];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible()) return;
    const Eigen::VectorXd x = lu.solve(b);
    for (int j = 0; j < v; ++j) {
      if (x[j] < lp.lower[j] - tol || x[j] > lp.upper[j] + tol) return;
    }
    for (std::size_t i = 0; i < m; ++i) {
      const auto row = lp.row(i);
      double val = lp.row_offsets[i];
      for (int j = 0; j < v; ++j) val += row[j] * x[j];
      if (val > tol) return;
    }
    double obj = 0.0;
    for (int j = 0; j < v; ++j) obj += lp.objective[j] * x[j];
    feasible = true;
    best = std::min(best, obj);
  };
  // Enumerate all v-subsets of hyperplanes.
  std::vector<std::size_t> idx(v);
  const std::function<void(std::size_t, int)> rec = [&](std::size_t start, int depth) {
    if (depth == v) {
      consider(idx);
      return;
    }
    for (std::size_t i = start; i < h; ++i) {
      idx[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
  if (feasible_out) *feasible_out = feasible;
  return best;
}

/// Dense grid of candidate points over the variable box (steps per axis).
inline std::vector<std::vector<double>> lp_grid_candidates(const mdpabs::LinearProgram& lp,
                                                           int steps) {
  std::vector<std::vector<double>> out;
  const int v = lp.var_count;
  std::vector<int> ix(v, 0);
  for (;;) {
    std::vector<double> x(v);
    for (int j = 0; j < v; ++j) {
      x[j] = lp.lower[j] + (lp.upper[j] - lp.lower[j]) * ix[j] / steps;
    }
    out.push_back(std::move(x));
    int d = v - 1;
    for (; d >= 0; --d) {
      if (++ix[d] <= steps) break;
      ix[d] = 0;
    }
    if (d < 0) break;
  }
  return out;
}

/// Exact worst-case expectation over an interval ambiguity set by extreme
/// point enumeration: a subset at the upper bound, one fractional
/// coordinate, the rest at the lower bound.
inline double worst_expectation_enumerated(const std::vector<double>& lo,
                                           const std::vector<double>& hi,
                                           const std::vector<double>& v) {
  const std::size_t m = v.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    for (std::size_t frac = 0; frac <= m; ++frac) {  // m: no fractional coordinate
      double total = 0.0;
      double value = 0.0;
      bool ok = true;
      for (std::size_t j = 0; j < m && ok; ++j) {
        if (frac < m && j == frac) continue;
        const double p = (mask >> j) & 1u ? hi[j] : lo[j];
        total += p;
        value += p * v[j];
      }
      if (!ok) continue;
      if (frac == m) {
        if (std::abs(total - 1.0) > 1e-12) continue;
      } else {
        const double p = 1.0 - total;
        if (p < lo[frac] - 1e-12 || p > hi[frac] + 1e-12) continue;
        value += p * v[frac];
      }
      best = std::min(best, value);
    }
  }
  return best;
}

/// Worst-case expectation over the dyadic simplex grid with step 1/steps;
/// exact when the bounds are multiples of the step.
inline double worst_expectation_simplex_grid(const std::vector<double>& lo,
                                             const std::vector<double>& hi,
                                             const std::vector<double>& v, int steps) {
  const std::size_t m = v.size();
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> units(m, 0);
  const std::function<void(std::size_t, int, double)> rec = [&](std::size_t j, int left,
                                                                double value) {
    if (j == m - 1) {
      const double p = static_cast<double>(left) / steps;
      if (p >= lo[j] - 1e-12 && p <= hi[j] + 1e-12) {
        best = std::min(best, value + p * v[j]);
      }
      return;
    }
    const int min_units = static_cast<int>(std::ceil(lo[j] * steps - 1e-9));
    const int max_units = std::min(left, static_cast<int>(std::floor(hi[j] * steps + 1e-9)));
    for (int u = std::max(0, min_units); u <= max_units; ++u) {
      rec(j + 1, left - u, value + (static_cast<double>(u) / steps) * v[j]);
    }
  };
  rec(0, steps, 0.0);
  return best;
}

/// Optimal finite-horizon safety values by enumeration of all time-varying
/// policies (one state-feedback map per step), each evaluated by backward
/// induction. Exponential; keep the instances tiny.
inline std::vector<double> safety_values_policy_enumeration(
    const mdpabs::FiniteMdp& mdp, const std::vector<std::uint8_t>& safe, int horizon) {
  const std::size_t states = mdp.state_count();
  const int inputs = mdp.inputs.size();
  const std::size_t maps = static_cast<std::size_t>(std::pow(inputs, states));
  std::vector<double> terminal(states);
  for (std::size_t i = 0; i < states; ++i) terminal[i] = safe[i] ? 1.0 : 0.0;

  std::vector<std::size_t> powers(states);
  for (std::size_t i = 0; i < states; ++i) {
    powers[i] = static_cast<std::size_t>(std::pow(inputs, static_cast<double>(i)) + 0.5);
  }
  std::vector<std::size_t> seq(static_cast<std::size_t>(horizon), 0);
  std::vector<double> best(states, 0.0);
  const std::function<void(int)> rec = [&](int depth) {
    if (depth == horizon) {
      std::vector<double> value = terminal;
      for (int k = horizon - 1; k >= 0; --k) {
        std::vector<double> next(states, 0.0);
        for (std::size_t i = 0; i < states; ++i) {
          if (!safe[i]) continue;
          const int u = static_cast<int>(seq[static_cast<std::size_t>(k)] / powers[i]) % inputs;
          const auto row = mdp.row(i, u);
          double s = 0.0;
          for (std::size_t j = 0; j < states; ++j) s += row[j] * value[j];
          next[i] = s;
        }
        value = std::move(next);
      }
      for (std::size_t i = 0; i < states; ++i) best[i] = std::max(best[i], value[i]);
      return;
    }
    for (std::size_t m = 0; m < maps; ++m) {
      seq[static_cast<std::size_t>(depth)] = m;
      rec(depth + 1);
    }
  };
  rec(0);
  return best;
}

inline double safety_value_policy_enumeration(const mdpabs::FiniteMdp& mdp,
                                              const std::vector<std::uint8_t>& safe, int horizon,
                                              std::size_t start) {
  return safety_values_policy_enumeration(mdp, safe, horizon)[start];
}

/// Kolmogorov-Smirnov distance of samples against the uniform CDF on [0,1].
inline double ks_uniform(std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double cdf = samples[i];
    d = std::max(d, std::abs(cdf - static_cast<double>(i) / n));
    d = std::max(d, std::abs(cdf - static_cast<double>(i + 1) / n));
  }
  return d;
}

/// Direct long-double evaluation of the binomial tail for small N.
inline long double binomial_tail_direct(std::uint64_t n, long double eps, int c) {
  long double sum = 0.0L;
  for (int i = 0; i < c && static_cast<std::uint64_t>(i) <= n; ++i) {
    long double term = 1.0L;
    for (int k = 0; k < i; ++k) {
      term *= static_cast<long double>(n - static_cast<std::uint64_t>(k)) / (k + 1);
    }
    term *= std::pow(eps, static_cast<long double>(i)) *
            std::pow(1.0L - eps, static_cast<long double>(n - static_cast<std::uint64_t>(i)));
    sum += term;
  }
  return sum;
}

}  // namespace oracles
