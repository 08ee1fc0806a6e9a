#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "mdpabs/noise.hpp"

namespace mdpabs {

/// Axis-aligned compact state set, one closed interval per dimension.
class StateBox {
public:
  StateBox(std::vector<double> lo, std::vector<double> hi);

  int dim() const noexcept { return static_cast<int>(lo_.size()); }
  double lo(int d) const { return lo_[static_cast<std::size_t>(d)]; }
  double hi(int d) const { return hi_[static_cast<std::size_t>(d)]; }
  const std::vector<double>& lower() const noexcept { return lo_; }
  const std::vector<double>& upper() const noexcept { return hi_; }

  bool contains(std::span<const double> x) const;
  /// Largest Euclidean norm over the box (attained at a corner).
  double max_norm() const;

private:
  std::vector<double> lo_, hi_;
};

/// Ordered finite input set; the ordering is part of the identity and all
/// abstractions index inputs by position in this list.
class InputSet {
public:
  explicit InputSet(std::vector<std::vector<double>> inputs);

  /// Convenience for one-dimensional inputs.
  static InputSet scalar(std::vector<double> values);

  int size() const noexcept { return static_cast<int>(inputs_.size()); }
  int dim() const noexcept { return dim_; }
  std::span<const double> at(int k) const { return inputs_[static_cast<std::size_t>(k)]; }
  std::optional<int> find(std::span<const double> u) const;
  /// Largest Euclidean norm over the set.
  double max_norm() const;

private:
  std::vector<std::vector<double>> inputs_;
  int dim_;
};

enum class NoiseMode {
  /// One-step calls replay deterministically from a NoiseStream, so two
  /// systems (or two initializations) can be driven by identical
  /// realizations. This is the mode the coupled-expectation constraints
  /// require.
  paired,
  /// Realizations are still seed-deterministic but consumers must not
  /// assume two calls can share them; program assembly falls back to
  /// decoupled draws and says so.
  independent,
};

/// One-step transition procedure: writes f(x, u, noise) into `out`
/// (same dimension as x), consuming draws from the stream.
using Sampler = std::function<void(std::span<const double> x, std::span<const double> u,
                                   NoiseStream& noise, std::span<double> out)>;

/// System known only through one-step sampling: a state box, a finite input
/// set, and an opaque transition procedure. Returned next states may leave
/// the box; mapping them to an absorbing state is the caller's business.
class BlackBoxSystem {
public:
  BlackBoxSystem(StateBox box, InputSet inputs, Sampler sampler,
                 NoiseMode mode = NoiseMode::paired);

  int dim() const noexcept { return state_box_.dim(); }
  const StateBox& state_box() const noexcept { return state_box_; }
  const InputSet& inputs() const noexcept { return inputs_; }
  NoiseMode noise_mode() const noexcept { return noise_mode_; }

  /// One step with the input given by value; validates membership.
  std::vector<double> step(std::span<const double> x, std::span<const double> u,
                           NoiseStream& noise) const;

  /// One step with the input given by position; no lookup, no allocation.
  void step_into(std::span<const double> x, int input_index, NoiseStream& noise,
                 std::span<double> out) const;

private:
  StateBox state_box_;
  InputSet inputs_;
  Sampler sampler_;
  NoiseMode noise_mode_;
};

/// Two-state jet engine compressor model on [-0.5, 0.5]^2 with the 21-value
/// scalar input grid {-0.5, -0.45, ..., 0.5} and additive per-coordinate
/// Gaussian noise scaled by noise_scale.
BlackBoxSystem jet_engine_system(double tau, double noise_scale);

/// Same dynamics with a caller-chosen scalar input list (reduced-scale runs).
BlackBoxSystem jet_engine_system(double tau, double noise_scale,
                                 std::vector<double> input_values);

/// x' = A x + B u + c + noise_scale * normal(0, I).
BlackBoxSystem affine_system(std::vector<std::vector<double>> a,
                             std::vector<std::vector<double>> b, std::vector<double> c,
                             double noise_scale, StateBox box, InputSet inputs);

/// N i.i.d. uniform draws over the box. For a fixed stream the first k
/// samples do not depend on the requested count, so sample sets at growing
/// counts are nested.
std::vector<std::vector<double>> sample_states(const StateBox& box, std::size_t count,
                                               NoiseStream stream);

}  // namespace mdpabs
