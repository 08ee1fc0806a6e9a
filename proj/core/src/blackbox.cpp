#include "mdpabs/blackbox.hpp"

#include <cmath>
#include <utility>

#include "mdpabs/errors.hpp"

namespace mdpabs {

StateBox::StateBox(std::vector<double> lo, std::vector<double> hi)
    : lo_(std::move(lo)), hi_(std::move(hi)) {
  require(!lo_.empty(), ErrorCode::invalid_parameter, "state box needs at least one dimension");
  require(lo_.size() == hi_.size(), ErrorCode::invalid_parameter,
          "state box bounds differ in dimension");
  for (std::size_t d = 0; d < lo_.size(); ++d) {
    require(std::isfinite(lo_[d]) && std::isfinite(hi_[d]), ErrorCode::invalid_parameter,
            "state box bounds must be finite");
    require(lo_[d] < hi_[d], ErrorCode::invalid_parameter,
            "state box interval must have positive width in every dimension");
  }
}

bool StateBox::contains(std::span<const double> x) const {
  if (x.size() != lo_.size()) return false;
  for (std::size_t d = 0; d < lo_.size(); ++d) {
    if (!(x[d] >= lo_[d] && x[d] <= hi_[d])) return false;
  }
  return true;
}

double StateBox::max_norm() const {
  double s = 0.0;
  for (std::size_t d = 0; d < lo_.size(); ++d) {
    const double m = std::max(std::abs(lo_[d]), std::abs(hi_[d]));
    s += m * m;
  }
  return std::sqrt(s);
}

InputSet::InputSet(std::vector<std::vector<double>> inputs) : inputs_(std::move(inputs)) {
  require(!inputs_.empty(), ErrorCode::invalid_parameter, "input set must be non-empty");
  dim_ = static_cast<int>(inputs_.front().size());
  require(dim_ >= 1, ErrorCode::invalid_parameter, "input vectors need at least one dimension");
  for (std::size_t k = 0; k < inputs_.size(); ++k) {
    require(static_cast<int>(inputs_[k].size()) == dim_, ErrorCode::invalid_parameter,
            "input vectors differ in dimension");
    for (double v : inputs_[k]) {
      require(std::isfinite(v), ErrorCode::invalid_parameter, "input vectors must be finite");
    }
    for (std::size_t j = 0; j < k; ++j) {
      require(inputs_[j] != inputs_[k], ErrorCode::invalid_parameter,
              "input set contains a duplicate vector");
    }
  }
}

InputSet InputSet::scalar(std::vector<double> values) {
  std::vector<std::vector<double>> vecs;
  vecs.reserve(values.size());
  for (double v : values) vecs.push_back({v});
  return InputSet(std::move(vecs));
}

std::optional<int> InputSet::find(std::span<const double> u) const {
  if (static_cast<int>(u.size()) != dim_) return std::nullopt;
  for (std::size_t k = 0; k < inputs_.size(); ++k) {
    bool same = true;
    for (int d = 0; d < dim_; ++d) {
      if (inputs_[k][static_cast<std::size_t>(d)] != u[static_cast<std::size_t>(d)]) {
        same = false;
        break;
      }
    }
    if (same) return static_cast<int>(k);
  }
  return std::nullopt;
}

double InputSet::max_norm() const {
  double best = 0.0;
  for (const auto& u : inputs_) {
    double s = 0.0;
    for (double v : u) s += v * v;
    best = std::max(best, s);
  }
  return std::sqrt(best);
}

BlackBoxSystem::BlackBoxSystem(StateBox box, InputSet inputs, Sampler sampler, NoiseMode mode)
    : state_box_(std::move(box)),
      inputs_(std::move(inputs)),
      sampler_(std::move(sampler)),
      noise_mode_(mode) {
  require(static_cast<bool>(sampler_), ErrorCode::invalid_parameter, "sampler must be callable");
}

std::vector<double> BlackBoxSystem::step(std::span<const double> x, std::span<const double> u,
                                         NoiseStream& noise) const {
  require(static_cast<int>(x.size()) == dim(), ErrorCode::invalid_state,
          "state dimension mismatch");
  for (double v : x) {
    require(std::isfinite(v), ErrorCode::invalid_state, "state vector must be finite");
  }
  const auto idx = inputs_.find(u);
  require(idx.has_value(), ErrorCode::input_not_in_set,
          "input vector is not a member of the system's input set");
  std::vector<double> out(static_cast<std::size_t>(dim()));
  step_into(x, *idx, noise, out);
  return out;
}

void BlackBoxSystem::step_into(std::span<const double> x, int input_index, NoiseStream& noise,
                               std::span<double> out) const {
  sampler_(x, inputs_.at(input_index), noise, out);
}

BlackBoxSystem jet_engine_system(double tau, double noise_scale) {
  std::vector<double> values;
  for (int k = 0; k <= 20; ++k) values.push_back(-0.5 + 0.05 * k);
  return jet_engine_system(tau, noise_scale, std::move(values));
}

BlackBoxSystem jet_engine_system(double tau, double noise_scale,
                                 std::vector<double> input_values) {
  require(tau > 0.0, ErrorCode::invalid_parameter, "sampling time tau must be positive");
  require(noise_scale >= 0.0, ErrorCode::invalid_parameter, "noise scale must be nonnegative");
  Sampler sampler = [tau, noise_scale](std::span<const double> x, std::span<const double> u,
                                       NoiseStream& noise, std::span<double> out) {
    const double x1 = x[0];
    const double x2 = x[1];
    out[0] = x1 + tau * (-x2 - 1.5 * x1 * x1 - 0.5 * x1 * x1 * x1) + noise_scale * noise.normal();
    out[1] = x2 + tau * (x1 - u[0]) + noise_scale * noise.normal();
  };
  return BlackBoxSystem(StateBox({-0.5, -0.5}, {0.5, 0.5}),
                        InputSet::scalar(std::move(input_values)), std::move(sampler));
}

BlackBoxSystem affine_system(std::vector<std::vector<double>> a,
                             std::vector<std::vector<double>> b, std::vector<double> c,
                             double noise_scale, StateBox box, InputSet inputs) {
  const std::size_t n = static_cast<std::size_t>(box.dim());
  const std::size_t m = static_cast<std::size_t>(inputs.dim());
  require(a.size() == n, ErrorCode::invalid_parameter, "A must have one row per state dimension");
  require(b.size() == n, ErrorCode::invalid_parameter, "B must have one row per state dimension");
  require(c.size() == n, ErrorCode::invalid_parameter, "offset must match the state dimension");
  for (const auto& row : a) {
    require(row.size() == n, ErrorCode::invalid_parameter, "A must be square");
  }
  for (const auto& row : b) {
    require(row.size() == m, ErrorCode::invalid_parameter,
            "B must have one column per input dimension");
  }
  require(noise_scale >= 0.0, ErrorCode::invalid_parameter, "noise scale must be nonnegative");
  Sampler sampler = [a = std::move(a), b = std::move(b), c = std::move(c), noise_scale](
                        std::span<const double> x, std::span<const double> u, NoiseStream& noise,
                        std::span<double> out) {
    const std::size_t n = out.size();
    for (std::size_t i = 0; i < n; ++i) {
      double v = c[i];
      for (std::size_t j = 0; j < n; ++j) v += a[i][j] * x[j];
      for (std::size_t j = 0; j < u.size(); ++j) v += b[i][j] * u[j];
      out[i] = v + noise_scale * noise.normal();
    }
  };
  return BlackBoxSystem(std::move(box), std::move(inputs), std::move(sampler));
}

std::vector<std::vector<double>> sample_states(const StateBox& box, std::size_t count,
                                               NoiseStream stream) {
  require(count >= 1, ErrorCode::invalid_parameter, "sample count must be at least 1");
  const int n = box.dim();
  std::vector<std::vector<double>> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i].resize(static_cast<std::size_t>(n));
    for (int d = 0; d < n; ++d) {
      out[i][static_cast<std::size_t>(d)] =
          box.lo(d) + stream.uniform() * (box.hi(d) - box.lo(d));
    }
  }
  return out;
}

}  // namespace mdpabs
