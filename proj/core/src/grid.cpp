#include "mdpabs/grid.hpp"

#include <cmath>
#include <utility>

#include "mdpabs/errors.hpp"

namespace mdpabs {

Grid::Grid(StateBox box, std::vector<int> counts)
    : box_(std::move(box)), counts_(std::move(counts)) {
  const int n = box_.dim();
  require(static_cast<int>(counts_.size()) == n, ErrorCode::invalid_parameter,
          "cell counts must match the state dimension");
  cell_count_ = 1;
  widths_.resize(static_cast<std::size_t>(n));
  boundaries_.resize(static_cast<std::size_t>(n));
  double diam_sq = 0.0;
  for (int d = 0; d < n; ++d) {
    const int k = counts_[static_cast<std::size_t>(d)];
    require(k >= 1, ErrorCode::invalid_parameter, "cell count must be at least 1 per dimension");
    const double span = box_.hi(d) - box_.lo(d);
    const double w = span / k;
    widths_[static_cast<std::size_t>(d)] = w;
    diam_sq += w * w;
    auto& b = boundaries_[static_cast<std::size_t>(d)];
    b.resize(static_cast<std::size_t>(k) + 1);
    b[0] = box_.lo(d);
    for (int j = 1; j < k; ++j) b[static_cast<std::size_t>(j)] = box_.lo(d) + span * j / k;
    b[static_cast<std::size_t>(k)] = box_.hi(d);
    cell_count_ *= static_cast<std::size_t>(k);
  }
  cell_diameter_ = std::sqrt(diam_sq);

  strides_.resize(static_cast<std::size_t>(n));
  std::size_t stride = 1;
  for (int d = n - 1; d >= 0; --d) {
    strides_[static_cast<std::size_t>(d)] = stride;
    stride *= static_cast<std::size_t>(counts_[static_cast<std::size_t>(d)]);
  }

  centers_.resize(cell_count_ * static_cast<std::size_t>(n));
  std::vector<int> multi(static_cast<std::size_t>(n), 0);
  for (std::size_t cell = 0; cell < cell_count_; ++cell) {
    for (int d = 0; d < n; ++d) {
      const auto& b = boundaries_[static_cast<std::size_t>(d)];
      const int j = multi[static_cast<std::size_t>(d)];
      centers_[cell * static_cast<std::size_t>(n) + static_cast<std::size_t>(d)] =
          0.5 * (b[static_cast<std::size_t>(j)] + b[static_cast<std::size_t>(j) + 1]);
    }
    for (int d = n - 1; d >= 0; --d) {
      int& j = multi[static_cast<std::size_t>(d)];
      if (++j < counts_[static_cast<std::size_t>(d)]) break;
      j = 0;
    }
  }
}

std::size_t Grid::flat_index(std::span<const int> multi) const {
  std::size_t flat = 0;
  for (int d = 0; d < dim(); ++d) {
    flat += static_cast<std::size_t>(multi[static_cast<std::size_t>(d)]) *
            strides_[static_cast<std::size_t>(d)];
  }
  return flat;
}

void Grid::multi_index(std::size_t flat, std::span<int> out) const {
  for (int d = 0; d < dim(); ++d) {
    const std::size_t s = strides_[static_cast<std::size_t>(d)];
    out[static_cast<std::size_t>(d)] = static_cast<int>(flat / s);
    flat %= s;
  }
}

namespace {

// Locates the half-open interval [b_j, b_{j+1}) containing v along dimension
// d, last interval closed. A division gives the initial estimate; the fix-up
// against exact boundary values makes containment a property of the boundary
// array rather than of the rounding of the division.
inline int locate(const Grid& grid, int d, double v) {
  const int k = grid.counts()[static_cast<std::size_t>(d)];
  int j = static_cast<int>(
      std::floor((v - grid.box().lo(d)) / grid.widths()[static_cast<std::size_t>(d)]));
  if (j < 0) j = 0;
  if (j > k - 1) j = k - 1;
  while (j > 0 && v < grid.boundary(d, j)) --j;
  while (j < k - 1 && v >= grid.boundary(d, j + 1)) ++j;
  return j;
}

}  // namespace

Projection project(const Grid& grid, std::span<const double> x) {
  const int n = grid.dim();
  require(static_cast<int>(x.size()) == n, ErrorCode::invalid_state,
          "point dimension does not match the grid");
  const StateBox& box = grid.box();
  std::size_t flat = 0;
  std::size_t stride = 1;
  for (int d = n - 1; d >= 0; --d) {
    const double v = x[static_cast<std::size_t>(d)];
    if (!(v >= box.lo(d) && v <= box.hi(d))) return {true, 0};
    flat += static_cast<std::size_t>(locate(grid, d, v)) * stride;
    stride *= static_cast<std::size_t>(grid.counts()[static_cast<std::size_t>(d)]);
  }
  return {false, flat};
}

std::size_t nearest_cell(const Grid& grid, std::span<const double> x) {
  const int n = grid.dim();
  require(static_cast<int>(x.size()) == n, ErrorCode::invalid_state,
          "point dimension does not match the grid");
  const StateBox& box = grid.box();
  std::size_t flat = 0;
  std::size_t stride = 1;
  for (int d = n - 1; d >= 0; --d) {
    double v = x[static_cast<std::size_t>(d)];
    if (v < box.lo(d)) v = box.lo(d);
    if (v > box.hi(d)) v = box.hi(d);
    flat += static_cast<std::size_t>(locate(grid, d, v)) * stride;
    stride *= static_cast<std::size_t>(grid.counts()[static_cast<std::size_t>(d)]);
  }
  return flat;
}

DeflatedBox deflate(const StateBox& region, double radius, const StateBox& domain) {
  require(radius >= 0.0, ErrorCode::invalid_parameter, "deflation radius must be nonnegative");
  require(region.dim() == domain.dim(), ErrorCode::invalid_parameter,
          "region and domain dimensions differ");
  const int n = region.dim();
  std::vector<double> lo(static_cast<std::size_t>(n));
  std::vector<double> hi(static_cast<std::size_t>(n));
  bool empty = false;
  for (int d = 0; d < n; ++d) {
    double l = region.lo(d);
    double h = region.hi(d);
    if (l > domain.lo(d)) l += radius;
    if (h < domain.hi(d)) h -= radius;
    if (l > h) empty = true;
    lo[static_cast<std::size_t>(d)] = l;
    hi[static_cast<std::size_t>(d)] = h;
  }
  if (empty) {
    // No representable interval left; return the collapsed midpoint stub so
    // callers still have a box-shaped object to report.
    for (int d = 0; d < n; ++d) {
      const double mid = 0.5 * (region.lo(d) + region.hi(d));
      const double eps = 1e-12 * (1.0 + std::abs(mid));
      lo[static_cast<std::size_t>(d)] = mid - eps;
      hi[static_cast<std::size_t>(d)] = mid + eps;
    }
    return {StateBox(std::move(lo), std::move(hi)), true};
  }
  // Degenerate (zero-width) survivors are widened minimally so StateBox
  // invariants hold; the empty flag stays false since the set is nonempty.
  for (int d = 0; d < n; ++d) {
    if (lo[static_cast<std::size_t>(d)] == hi[static_cast<std::size_t>(d)]) {
      const double eps = 1e-12 * (1.0 + std::abs(lo[static_cast<std::size_t>(d)]));
      lo[static_cast<std::size_t>(d)] -= eps;
      hi[static_cast<std::size_t>(d)] += eps;
    }
  }
  return {StateBox(std::move(lo), std::move(hi)), false};
}

}  // namespace mdpabs
