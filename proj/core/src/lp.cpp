#include "mdpabs/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "mdpabs/errors.hpp"
#include "mdpabs/parallel.hpp"

namespace mdpabs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double kahan_dot(std::span<const double> a, std::span<const double> b, double init) {
  double sum = init;
  double comp = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double y = a[i] * b[i] - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

// Magnitude of the row computation at x; violations are measured relative
// to this, which is the "relative tolerance" the solver advertises.
double row_scale(std::span<const double> coeffs, std::span<const double> x, double offset) {
  double s = 1.0 + std::abs(offset);
  for (std::size_t i = 0; i < coeffs.size(); ++i) s += std::abs(coeffs[i] * x[i]);
  return s;
}

enum class VarStatus : std::uint8_t { basic, at_lower, at_upper, free_zero };

/// Bounded-variable two-phase primal simplex on the working-set subproblem
///   minimize c.x  s.t.  A x + s = rhs,  lo <= x <= hi,  s >= 0.
/// Entering and leaving variables follow Bland's smallest-index rule, so the
/// result is deterministic and cycling-free.
class Simplex {
public:
  Simplex(const Eigen::MatrixXd& a, const Eigen::VectorXd& rhs, std::span<const double> lo,
          std::span<const double> hi, std::span<const double> objective)
      : a_(a), rhs_(rhs), v_(static_cast<int>(lo.size())), w_(static_cast<int>(rhs.size())) {
    nt_ = v_ + w_;  // artificials appended below
    lo_.assign(lo.begin(), lo.end());
    hi_.assign(hi.begin(), hi.end());
    lo_.resize(static_cast<std::size_t>(nt_), 0.0);
    hi_.resize(static_cast<std::size_t>(nt_), kInf);
    obj_.assign(objective.begin(), objective.end());
    obj_.resize(static_cast<std::size_t>(nt_), 0.0);

    value_.assign(static_cast<std::size_t>(nt_), 0.0);
    status_.assign(static_cast<std::size_t>(nt_), VarStatus::at_lower);
    for (int j = 0; j < v_; ++j) {
      const double l = lo_[static_cast<std::size_t>(j)];
      const double h = hi_[static_cast<std::size_t>(j)];
      if (std::isfinite(l) && std::isfinite(h)) {
        if (std::abs(h) < std::abs(l)) {
          status_[static_cast<std::size_t>(j)] = VarStatus::at_upper;
          value_[static_cast<std::size_t>(j)] = h;
        } else {
          status_[static_cast<std::size_t>(j)] = VarStatus::at_lower;
          value_[static_cast<std::size_t>(j)] = l;
        }
      } else if (std::isfinite(l)) {
        status_[static_cast<std::size_t>(j)] = VarStatus::at_lower;
        value_[static_cast<std::size_t>(j)] = l;
      } else if (std::isfinite(h)) {
        status_[static_cast<std::size_t>(j)] = VarStatus::at_upper;
        value_[static_cast<std::size_t>(j)] = h;
      } else {
        status_[static_cast<std::size_t>(j)] = VarStatus::free_zero;
        value_[static_cast<std::size_t>(j)] = 0.0;
      }
    }

    basis_.resize(static_cast<std::size_t>(w_));
    Eigen::VectorXd slack = rhs_;
    for (int i = 0; i < w_; ++i) {
      for (int j = 0; j < v_; ++j) slack[i] -= a_(i, j) * value_[static_cast<std::size_t>(j)];
    }
    for (int i = 0; i < w_; ++i) {
      const int slack_var = v_ + i;
      if (slack[i] >= 0.0) {
        basis_[static_cast<std::size_t>(i)] = slack_var;
        status_[static_cast<std::size_t>(slack_var)] = VarStatus::basic;
        value_[static_cast<std::size_t>(slack_var)] = slack[i];
      } else {
        // Slack would start negative: give the row an artificial with column
        // -e_i so the starting basis is feasible.
        const int art = nt_;
        art_row_.push_back(i);
        lo_.push_back(0.0);
        hi_.push_back(kInf);
        obj_.push_back(0.0);
        value_.push_back(-slack[i]);
        status_.push_back(VarStatus::basic);
        basis_[static_cast<std::size_t>(i)] = art;
        ++nt_;
        status_[static_cast<std::size_t>(slack_var)] = VarStatus::at_lower;
        value_[static_cast<std::size_t>(slack_var)] = 0.0;
      }
    }
    first_art_ = nt_ - static_cast<int>(art_row_.size());
  }

  LpStatus run(int* pivots_out) {
    int pivots = 0;
    if (!art_row_.empty()) {
      std::vector<double> phase1(static_cast<std::size_t>(nt_), 0.0);
      for (int j = first_art_; j < nt_; ++j) phase1[static_cast<std::size_t>(j)] = 1.0;
      const LpStatus st = iterate(phase1, &pivots);
      if (st == LpStatus::unbounded) {
        // The phase-1 objective is bounded below by zero, so this can only
        // be numerical breakdown.
        throw_error(ErrorCode::solver_failure, "phase-1 objective diverged");
      }
      if (st != LpStatus::optimal) {
        *pivots_out = pivots;
        return LpStatus::infeasible;
      }
      double infeas = 0.0;
      for (int j = first_art_; j < nt_; ++j)
        infeas += std::max(0.0, value_[static_cast<std::size_t>(j)]);
      const double feastol = 1e-8 * (1.0 + rhs_.cwiseAbs().maxCoeff());
      if (infeas > feastol) {
        *pivots_out = pivots;
        return LpStatus::infeasible;
      }
      for (int j = first_art_; j < nt_; ++j) hi_[static_cast<std::size_t>(j)] = 0.0;
    }
    const LpStatus st = iterate(obj_, &pivots);
    *pivots_out = pivots;
    return st;
  }

  double value(int j) const { return value_[static_cast<std::size_t>(j)]; }
  const std::vector<double>& ray() const { return ray_; }

private:
  void column(int j, Eigen::VectorXd& out) const {
    out.setZero(w_);
    if (j < v_) {
      for (int i = 0; i < w_; ++i) out[i] = a_(i, j);
    } else if (j < first_art_) {
      out[j - v_] = 1.0;
    } else {
      out[art_row_[static_cast<std::size_t>(j - first_art_)]] = -1.0;
    }
  }

  void recompute_basics(const Eigen::PartialPivLU<Eigen::MatrixXd>& lu) {
    Eigen::VectorXd r = rhs_;
    Eigen::VectorXd col(w_);
    for (int j = 0; j < nt_; ++j) {
      if (status_[static_cast<std::size_t>(j)] == VarStatus::basic) continue;
      const double vj = value_[static_cast<std::size_t>(j)];
      if (vj == 0.0) continue;
      column(j, col);
      r -= col * vj;
    }
    const Eigen::VectorXd xb = lu.solve(r);
    for (int i = 0; i < w_; ++i) value_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])] = xb[i];
  }

  LpStatus iterate(const std::vector<double>& cost, int* pivots) {
    double cmax = 0.0;
    for (double c : cost) cmax = std::max(cmax, std::abs(c));
    const double tol_rc = 1e-10 * (1.0 + cmax);
    const double tol_piv = 1e-11;
    const int max_pivots = 20000 + 200 * nt_;

    Eigen::MatrixXd b(w_, w_);
    Eigen::VectorXd col(w_);
    for (;; ++*pivots) {
      if (*pivots > max_pivots) {
        throw_error(ErrorCode::solver_failure, "simplex pivot limit exceeded");
      }
      Eigen::PartialPivLU<Eigen::MatrixXd> lu;
      Eigen::VectorXd y(w_);
      if (w_ > 0) {
        for (int i = 0; i < w_; ++i) {
          column(basis_[static_cast<std::size_t>(i)], col);
          b.col(i) = col;
        }
        lu.compute(b);
        recompute_basics(lu);
        Eigen::VectorXd cb(w_);
        for (int i = 0; i < w_; ++i)
          cb[i] = cost[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])];
        y = lu.transpose().solve(cb);
      }

      // Entering variable: Bland's rule, smallest index first.
      int enter = -1;
      double dir = 0.0;
      for (int j = 0; j < nt_ && enter < 0; ++j) {
        const VarStatus st = status_[static_cast<std::size_t>(j)];
        if (st == VarStatus::basic) continue;
        if (hi_[static_cast<std::size_t>(j)] - lo_[static_cast<std::size_t>(j)] <= 0.0) continue;
        double rc = cost[static_cast<std::size_t>(j)];
        if (w_ > 0) {
          column(j, col);
          rc -= y.dot(col);
        }
        if (st == VarStatus::at_lower && rc < -tol_rc) {
          enter = j;
          dir = 1.0;
        } else if (st == VarStatus::at_upper && rc > tol_rc) {
          enter = j;
          dir = -1.0;
        } else if (st == VarStatus::free_zero && std::abs(rc) > tol_rc) {
          enter = j;
          dir = rc > 0.0 ? -1.0 : 1.0;
        }
      }
      if (enter < 0) return LpStatus::optimal;

      Eigen::VectorXd wvec(w_);
      if (w_ > 0) {
        column(enter, col);
        wvec = lu.solve(col);
      }

      // Ratio test: the entering variable moves by dir * t. Basic variable
      // at position i changes at rate -dir * wvec[i].
      double tmin = kInf;
      const double range = hi_[static_cast<std::size_t>(enter)] - lo_[static_cast<std::size_t>(enter)];
      if (std::isfinite(range)) tmin = range;
      int leave_var = enter;  // bound flip by default
      for (int i = 0; i < w_; ++i) {
        const double rate = -dir * wvec[i];
        if (std::abs(rate) <= tol_piv) continue;
        const int bv = basis_[static_cast<std::size_t>(i)];
        const double bval = value_[static_cast<std::size_t>(bv)];
        double limit;
        if (rate > 0.0) {
          limit = hi_[static_cast<std::size_t>(bv)];
          if (!std::isfinite(limit)) continue;
          limit = (limit - bval) / rate;
        } else {
          limit = lo_[static_cast<std::size_t>(bv)];
          if (!std::isfinite(limit)) continue;
          limit = (limit - bval) / rate;
        }
        limit = std::max(limit, 0.0);
        if (limit < tmin || (limit == tmin && bv < leave_var)) {
          tmin = limit;
          leave_var = bv;
        }
      }
      if (!std::isfinite(tmin)) {
        // Unbounded ray in the structural coordinates.
        ray_.assign(static_cast<std::size_t>(v_), 0.0);
        if (enter < v_) ray_[static_cast<std::size_t>(enter)] = dir;
        for (int i = 0; i < w_; ++i) {
          const int bv = basis_[static_cast<std::size_t>(i)];
          if (bv < v_) ray_[static_cast<std::size_t>(bv)] = -dir * wvec[i];
        }
        return LpStatus::unbounded;
      }

      // Apply the step.
      const VarStatus enter_from = status_[static_cast<std::size_t>(enter)];
      const double start = value_[static_cast<std::size_t>(enter)];
      value_[static_cast<std::size_t>(enter)] = start + dir * tmin;
      for (int i = 0; i < w_; ++i) {
        const int bv = basis_[static_cast<std::size_t>(i)];
        value_[static_cast<std::size_t>(bv)] -= dir * tmin * wvec[i];
      }
      if (leave_var == enter) {
        // Hit the opposite bound: status flip, basis unchanged.
        if (enter_from == VarStatus::at_lower) {
          status_[static_cast<std::size_t>(enter)] = VarStatus::at_upper;
          value_[static_cast<std::size_t>(enter)] = hi_[static_cast<std::size_t>(enter)];
        } else {
          status_[static_cast<std::size_t>(enter)] = VarStatus::at_lower;
          value_[static_cast<std::size_t>(enter)] = lo_[static_cast<std::size_t>(enter)];
        }
        continue;
      }
      int leave_pos = -1;
      for (int i = 0; i < w_; ++i) {
        if (basis_[static_cast<std::size_t>(i)] == leave_var) {
          leave_pos = i;
          break;
        }
      }
      const double rate = -dir * wvec[leave_pos];
      if (rate > 0.0) {
        status_[static_cast<std::size_t>(leave_var)] = VarStatus::at_upper;
        value_[static_cast<std::size_t>(leave_var)] = hi_[static_cast<std::size_t>(leave_var)];
      } else {
        status_[static_cast<std::size_t>(leave_var)] = VarStatus::at_lower;
        value_[static_cast<std::size_t>(leave_var)] = lo_[static_cast<std::size_t>(leave_var)];
      }
      basis_[static_cast<std::size_t>(leave_pos)] = enter;
      status_[static_cast<std::size_t>(enter)] = VarStatus::basic;
    }
  }

  Eigen::MatrixXd a_;
  Eigen::VectorXd rhs_;
  int v_;
  int w_;
  int nt_;
  int first_art_ = 0;
  std::vector<int> art_row_;
  std::vector<double> lo_, hi_, obj_;
  std::vector<double> value_;
  std::vector<VarStatus> status_;
  std::vector<int> basis_;
  std::vector<double> ray_;
};

struct ScanResult {
  double best_rel = 0.0;
  std::size_t best_row = 0;
  bool found = false;
  double max_raw = 0.0;
};

ScanResult scan_rows(const LinearProgram& lp, std::span<const double> x, double tol,
                     int workers) {
  const std::size_t m = lp.rows();
  const std::size_t nchunks = std::min<std::size_t>(std::max(workers, 1), std::max<std::size_t>(m, 1));
  std::vector<ScanResult> partial(nchunks);
  const std::size_t chunk = nchunks == 0 ? 0 : (m + nchunks - 1) / nchunks;
  parallel_for(0, nchunks, static_cast<int>(nchunks), [&](std::size_t c) {
    const std::size_t lo = c * chunk;
    const std::size_t hi = std::min(m, lo + chunk);
    ScanResult r;
    for (std::size_t i = lo; i < hi; ++i) {
      const auto row = lp.row(i);
      const double raw = row_value(row, x, lp.row_offsets[i]);
      if (raw <= 0.0) continue;
      r.max_raw = std::max(r.max_raw, raw);
      const double rel = raw / row_scale(row, x, lp.row_offsets[i]);
      if (rel > tol && (!r.found || rel > r.best_rel)) {
        r.found = true;
        r.best_rel = rel;
        r.best_row = i;
      }
    }
    partial[c] = r;
  });
  ScanResult out;
  for (const auto& r : partial) {
    out.max_raw = std::max(out.max_raw, r.max_raw);
    if (r.found && (!out.found || r.best_rel > out.best_rel)) {
      out.found = true;
      out.best_rel = r.best_rel;
      out.best_row = r.best_row;
    }
  }
  return out;
}

}  // namespace

void LinearProgram::add_row(std::span<const double> coeffs, double offset) {
  require(static_cast<int>(coeffs.size()) == var_count, ErrorCode::invalid_parameter,
          "row length must match the variable count");
  row_coeffs.insert(row_coeffs.end(), coeffs.begin(), coeffs.end());
  row_offsets.push_back(offset);
}

void LinearProgram::validate() const {
  require(var_count >= 1 && var_count <= 64, ErrorCode::invalid_parameter,
          "variable count must be in [1, 64]");
  require(static_cast<int>(objective.size()) == var_count, ErrorCode::invalid_parameter,
          "objective length must match the variable count");
  require(static_cast<int>(lower.size()) == var_count &&
              static_cast<int>(upper.size()) == var_count,
          ErrorCode::invalid_parameter, "bound vectors must match the variable count");
  require(row_coeffs.size() == rows() * static_cast<std::size_t>(var_count),
          ErrorCode::invalid_parameter, "ragged row matrix");
  require(row_offsets.size() == rows(), ErrorCode::invalid_parameter,
          "row offset count mismatch");
  for (double c : row_coeffs) {
    require(std::isfinite(c), ErrorCode::invalid_parameter, "row coefficients must be finite");
  }
  for (double c : row_offsets) {
    require(std::isfinite(c), ErrorCode::invalid_parameter, "row offsets must be finite");
  }
  for (int j = 0; j < var_count; ++j) {
    require(!(lower[static_cast<std::size_t>(j)] > upper[static_cast<std::size_t>(j)]),
            ErrorCode::invalid_parameter, "variable bounds must satisfy lo <= hi");
    require(!std::isnan(lower[static_cast<std::size_t>(j)]) &&
                !std::isnan(upper[static_cast<std::size_t>(j)]),
            ErrorCode::invalid_parameter, "variable bounds must not be NaN");
  }
}

double row_value(std::span<const double> coeffs, std::span<const double> x, double offset) {
  return kahan_dot(coeffs, x, offset);
}

LpSolution solve(const LinearProgram& lp, double tol, int workers) {
  lp.validate();
  require(tol > 0.0, ErrorCode::invalid_parameter, "tolerance must be positive");
  const int v = lp.var_count;
  const std::size_t m = lp.rows();

  std::vector<std::size_t> working;
  LpSolution sol;
  const std::size_t max_outer = m + 16;
  for (std::size_t outer = 0;; ++outer) {
    if (outer > max_outer) {
      throw_error(ErrorCode::solver_failure, "active-set loop failed to terminate");
    }
    const int w = static_cast<int>(working.size());
    Eigen::MatrixXd a(w, v);
    Eigen::VectorXd rhs(w);
    for (int i = 0; i < w; ++i) {
      const auto row = lp.row(working[static_cast<std::size_t>(i)]);
      for (int j = 0; j < v; ++j) a(i, j) = row[static_cast<std::size_t>(j)];
      rhs[i] = -lp.row_offsets[working[static_cast<std::size_t>(i)]];
    }
    Simplex simplex(a, rhs, lp.lower, lp.upper, lp.objective);
    int pivots = 0;
    const LpStatus st = simplex.run(&pivots);
    sol.simplex_pivots += pivots;
    sol.outer_iterations = static_cast<int>(outer) + 1;

    if (st == LpStatus::infeasible) {
      sol.status = LpStatus::infeasible;
      return sol;
    }
    if (st == LpStatus::unbounded) {
      // Look for a not-yet-active row that blocks the ray.
      const auto& ray = simplex.ray();
      double best = 0.0;
      std::size_t best_row = m;
      for (std::size_t i = 0; i < m; ++i) {
        if (std::find(working.begin(), working.end(), i) != working.end()) continue;
        const auto row = lp.row(i);
        double along = 0.0;
        double scale = 1.0;
        for (int j = 0; j < v; ++j) {
          along += row[static_cast<std::size_t>(j)] * ray[static_cast<std::size_t>(j)];
          scale += std::abs(row[static_cast<std::size_t>(j)] * ray[static_cast<std::size_t>(j)]);
        }
        if (along / scale > best) {
          best = along / scale;
          best_row = i;
        }
      }
      if (best_row == m || best <= 1e-12) {
        sol.status = LpStatus::unbounded;
        return sol;
      }
      working.push_back(best_row);
      continue;
    }

    std::vector<double> x(static_cast<std::size_t>(v));
    for (int j = 0; j < v; ++j) x[static_cast<std::size_t>(j)] = simplex.value(j);
    const ScanResult scan = scan_rows(lp, x, tol, workers);
    if (scan.found) {
      if (std::find(working.begin(), working.end(), scan.best_row) != working.end()) {
        throw_error(ErrorCode::solver_failure,
                    "working-set row re-flagged as violated (numerical breakdown)");
      }
      working.push_back(scan.best_row);
      continue;
    }

    sol.status = LpStatus::optimal;
    sol.point = std::move(x);
    sol.value = kahan_dot(lp.objective, sol.point, 0.0);
    sol.max_violation = scan.max_raw;
    for (std::size_t i : working) {
      const auto row = lp.row(i);
      const double val = row_value(row, sol.point, lp.row_offsets[i]);
      if (std::abs(val) <= 16.0 * tol * row_scale(row, sol.point, lp.row_offsets[i])) {
        sol.active_rows.push_back(i);
      }
    }
    std::sort(sol.active_rows.begin(), sol.active_rows.end());
    return sol;
  }
}

CrossCheckReport cross_check(const LinearProgram& lp, const LpSolution& solution,
                             const std::vector<std::vector<double>>& candidates, double tol) {
  lp.validate();
  CrossCheckReport report;
  if (solution.status == LpStatus::optimal) {
    const ScanResult scan = scan_rows(lp, solution.point, tol, 1);
    report.point_violation = scan.max_raw;
    report.violation_flagged = scan.found;
  }
  const std::size_t m = lp.rows();
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const auto& cand = candidates[k];
    if (static_cast<int>(cand.size()) != lp.var_count) continue;
    bool feasible = true;
    for (int j = 0; j < lp.var_count && feasible; ++j) {
      const double slack = tol * (1.0 + std::abs(cand[static_cast<std::size_t>(j)]));
      feasible = cand[static_cast<std::size_t>(j)] >= lp.lower[static_cast<std::size_t>(j)] - slack &&
                 cand[static_cast<std::size_t>(j)] <= lp.upper[static_cast<std::size_t>(j)] + slack;
    }
    for (std::size_t i = 0; i < m && feasible; ++i) {
      const auto row = lp.row(i);
      const double raw = row_value(row, cand, lp.row_offsets[i]);
      feasible = raw <= tol * row_scale(row, cand, lp.row_offsets[i]);
    }
    if (!feasible) continue;
    const double value = kahan_dot(lp.objective, cand, 0.0);
    if (solution.status != LpStatus::optimal ||
        value < solution.value - tol * (1.0 + std::abs(solution.value))) {
      if (!report.improved || value < report.best_candidate_value) {
        report.improved = true;
        report.best_candidate_value = value;
        report.best_candidate = k;
      }
    }
  }
  return report;
}

void write_program(std::ostream& os, const LinearProgram& lp,
                   const std::vector<std::string>& row_tags) {
  lp.validate();
  require(row_tags.empty() || row_tags.size() == lp.rows(), ErrorCode::invalid_parameter,
          "row tag count must match the row count");
  char buf[32];
  const auto emit = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    os << buf;
  };
  os << "lp-matrix 1\n";
  os << "vars " << lp.var_count << "\n";
  os << "bounds\n";
  for (int j = 0; j < lp.var_count; ++j) {
    emit(lp.lower[static_cast<std::size_t>(j)]);
    os << ' ';
    emit(lp.upper[static_cast<std::size_t>(j)]);
    os << '\n';
  }
  os << "objective\n";
  for (int j = 0; j < lp.var_count; ++j) {
    if (j) os << ' ';
    emit(lp.objective[static_cast<std::size_t>(j)]);
  }
  os << '\n';
  os << "rows " << lp.rows() << "\n";
  for (std::size_t i = 0; i < lp.rows(); ++i) {
    const auto row = lp.row(i);
    for (int j = 0; j < lp.var_count; ++j) {
      if (j) os << ' ';
      emit(row[static_cast<std::size_t>(j)]);
    }
    os << ' ';
    emit(lp.row_offsets[i]);
    if (!row_tags.empty()) os << ' ' << row_tags[i];
    os << '\n';
  }
}

LinearProgram read_program(std::istream& is, std::vector<std::string>* row_tags) {
  std::string word;
  int version = 0;
  is >> word >> version;
  require(is.good() && word == "lp-matrix" && version == 1, ErrorCode::incompatible_file,
          "not a version-1 lp-matrix document");
  LinearProgram lp;
  is >> word >> lp.var_count;
  require(is.good() && word == "vars", ErrorCode::incompatible_file, "expected 'vars'");
  is >> word;
  require(word == "bounds", ErrorCode::incompatible_file, "expected 'bounds'");
  lp.lower.resize(static_cast<std::size_t>(lp.var_count));
  lp.upper.resize(static_cast<std::size_t>(lp.var_count));
  for (int j = 0; j < lp.var_count; ++j) {
    is >> lp.lower[static_cast<std::size_t>(j)] >> lp.upper[static_cast<std::size_t>(j)];
  }
  is >> word;
  require(word == "objective", ErrorCode::incompatible_file, "expected 'objective'");
  lp.objective.resize(static_cast<std::size_t>(lp.var_count));
  for (int j = 0; j < lp.var_count; ++j) is >> lp.objective[static_cast<std::size_t>(j)];
  std::size_t m = 0;
  is >> word >> m;
  require(is.good() && word == "rows", ErrorCode::incompatible_file, "expected 'rows'");
  is.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
  lp.row_coeffs.reserve(m * static_cast<std::size_t>(lp.var_count));
  lp.row_offsets.reserve(m);
  if (row_tags) row_tags->reserve(m);
  std::string line;
  for (std::size_t i = 0; i < m; ++i) {
    require(static_cast<bool>(std::getline(is, line)), ErrorCode::incompatible_file,
            "truncated row block");
    std::istringstream ls(line);
    for (int j = 0; j < lp.var_count; ++j) {
      double c = 0.0;
      ls >> c;
      lp.row_coeffs.push_back(c);
    }
    double offset = 0.0;
    ls >> offset;
    require(!ls.fail(), ErrorCode::incompatible_file, "malformed constraint row");
    lp.row_offsets.push_back(offset);
    if (row_tags) {
      std::string tag;
      std::getline(ls, tag);
      if (!tag.empty() && tag.front() == ' ') tag.erase(tag.begin());
      row_tags->push_back(tag);
    }
  }
  lp.validate();
  return lp;
}

}  // namespace mdpabs
