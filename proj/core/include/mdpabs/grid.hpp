#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mdpabs/blackbox.hpp"

namespace mdpabs {

/// Uniform hyper-rectangular partition of a state box. Cells are half-open
/// [b_j, b_{j+1}) in every dimension, the last cell is closed, so each in-box
/// point belongs to exactly one cell. Representative points are cell centers.
/// Flat cell indices are row-major with dimension 0 most significant.
class Grid {
public:
  Grid(StateBox box, std::vector<int> counts);

  const StateBox& box() const noexcept { return box_; }
  int dim() const noexcept { return box_.dim(); }
  const std::vector<int>& counts() const noexcept { return counts_; }
  const std::vector<double>& widths() const noexcept { return widths_; }

  /// Upper bound on the diameter of any cell: Euclidean norm of the width
  /// vector. Every in-box point lies within this distance of its
  /// representative.
  double cell_diameter() const noexcept { return cell_diameter_; }

  std::size_t cell_count() const noexcept { return cell_count_; }

  /// Cell boundary b_j in dimension d, j in [0, counts[d]].
  double boundary(int d, int j) const {
    return boundaries_[static_cast<std::size_t>(d)][static_cast<std::size_t>(j)];
  }

  std::span<const double> center(std::size_t cell) const {
    return {centers_.data() + cell * static_cast<std::size_t>(dim()),
            static_cast<std::size_t>(dim())};
  }

  std::size_t flat_index(std::span<const int> multi) const;
  void multi_index(std::size_t flat, std::span<int> out) const;

private:
  StateBox box_;
  std::vector<int> counts_;
  std::vector<double> widths_;
  std::vector<std::vector<double>> boundaries_;
  std::vector<double> centers_;
  std::vector<std::size_t> strides_;
  double cell_diameter_;
  std::size_t cell_count_;
};

struct Projection {
  bool absorbing;    // point lies outside the box
  std::size_t cell;  // valid only when !absorbing
};

/// Cell lookup for an arbitrary point: the unique containing cell, or the
/// absorbing marker for out-of-box points.
Projection project(const Grid& grid, std::span<const double> x);

/// Total cell lookup: out-of-box points are clamped onto the box first, which
/// yields the nearest representative point overall.
std::size_t nearest_cell(const Grid& grid, std::span<const double> x);

struct DeflatedBox {
  StateBox box;
  bool empty;  // radius ate a whole interval; `box` is a zero-margin stub
};

/// Shrinks an axis-aligned region by `radius` on every side that is interior
/// to `domain`; sides flush with the domain boundary are left alone. The
/// result is exactly the set of region points at distance >= radius from the
/// in-domain complement.
DeflatedBox deflate(const StateBox& region, double radius, const StateBox& domain);

}  // namespace mdpabs
