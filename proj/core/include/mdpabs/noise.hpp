#pragma once

#include <cstdint>
#include <span>

namespace mdpabs {

/// Counter-based random stream: the value of draw k is a pure function of
/// (seed, k). Copying a stream replays it, which is how paired-noise
/// evaluation of two systems under the same realizations is implemented.
/// Derived streams are statistically independent of their parent.
class NoiseStream {
public:
  NoiseStream() = default;
  explicit NoiseStream(std::uint64_t seed) : seed_(seed) {}

  /// Child stream keyed by up to three indices (worker/task keying).
  NoiseStream derive(std::uint64_t k0, std::uint64_t k1 = 0, std::uint64_t k2 = 0) const;

  /// Uniform draw on the open interval (0, 1).
  double uniform();

  /// Standard normal draw (inverse-CDF transform of one uniform).
  double normal();

  void fill_normal(std::span<double> out);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t index() const noexcept { return index_; }
  void seek(std::uint64_t index) noexcept { index_ = index; }

private:
  std::uint64_t seed_ = 0;
  std::uint64_t index_ = 0;
};

/// Quantile function of the standard normal (Wichura's AS241, double
/// precision). Domain (0, 1); out-of-domain arguments throw.
double standard_normal_quantile(double p);

/// CDF of the standard normal.
double standard_normal_cdf(double z);

}  // namespace mdpabs
