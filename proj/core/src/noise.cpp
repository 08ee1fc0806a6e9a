#include "mdpabs/noise.hpp"

#include <cmath>

#include "mdpabs/errors.hpp"

namespace mdpabs {
namespace {

// splitmix64 finalizer
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t word_at(std::uint64_t seed, std::uint64_t index) {
  return mix64(seed ^ mix64(index));
}

}  // namespace

NoiseStream NoiseStream::derive(std::uint64_t k0, std::uint64_t k1, std::uint64_t k2) const {
  std::uint64_t s = seed_;
  s = mix64(s ^ mix64(k0 ^ 0xA076'1D64'78BD'642FULL));
  s = mix64(s ^ mix64(k1 ^ 0xE703'7ED1'A0B4'28DBULL));
  s = mix64(s ^ mix64(k2 ^ 0x8EBC'6AF0'9C88'C6E3ULL));
  return NoiseStream(s);
}

double NoiseStream::uniform() {
  const std::uint64_t w = word_at(seed_, index_++);
  // 53-bit mantissa shifted into (0,1): never exactly 0 or 1.
  return (static_cast<double>(w >> 11) + 0.5) * 0x1.0p-53;
}

double NoiseStream::normal() { return standard_normal_quantile(uniform()); }

void NoiseStream::fill_normal(std::span<double> out) {
  for (double& v : out) v = normal();
}

double standard_normal_quantile(double p) {
  require(p > 0.0 && p < 1.0, ErrorCode::invalid_parameter,
          "normal quantile argument must lie in (0,1)");
  // AS241 PPND16 rational approximations, |error| < 1e-15 over the domain.
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
              6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
            1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
          1.3314166789178437745e+2) * r + 3.3871328727963666080e+0);
    const double den =
        (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
              3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
            5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
          4.2313330701600911252e+1) * r + 1.0);
    return q * num / den;
  }
  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
            3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
          4.63033784615654529590e+0) * r + 1.42343711074968357734e+0);
    const double den =
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
          2.05319162663775882187e+0) * r + 1.0);
    value = num / den;
  } else {
    r -= 5.0;
    const double num =
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
          5.46378491116411436990e+0) * r + 6.65790464350110377720e+0);
    const double den =
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
    value = num / den;
  }
  return (q < 0.0) ? -value : value;
}

double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z * M_SQRT1_2); }

}  // namespace mdpabs
