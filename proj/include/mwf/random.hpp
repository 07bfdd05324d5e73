#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "mwf/hermitian.hpp"

namespace mwf {

/// Counter-indexed Gaussian stream.
///
/// The stream for (seed, index) is std::mt19937_64 seeded with two rounds of
/// SplitMix64 over seed and index. Uniforms take the top 53 bits of each
/// 64-bit draw; normals use Box-Muller. All three steps are fully specified,
/// so streams are identical across platforms and standard libraries (unlike
/// std::normal_distribution).
class GaussianStream {
 public:
  GaussianStream(std::uint64_t seed, std::uint64_t index)
      : engine_(splitmix64(splitmix64(seed) ^ splitmix64(index ^ kIndexSalt))) {}

  static constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  /// Uniform on (0, 1].
  double uniform() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double radius = std::sqrt(-2.0 * std::log(uniform()));
    const double angle = 2.0 * std::numbers::pi * uniform();
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Circularly-symmetric complex Gaussian with unit variance.
  std::complex<double> complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
  }

 private:
  static constexpr std::uint64_t kIndexSalt = 0x6A09E667F3BCC909ULL;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// M x N channel with i.i.d. CN(0, 1) entries, filled row by row.
inline ComplexMatrixXd generate_channel(Eigen::Index m, Eigen::Index n,
                                        std::uint64_t seed,
                                        std::uint64_t trial_index) {
  if (m < 1 || n < 1) {
    throw Error(ErrorCode::DimensionMismatch, "channel dims must be >= 1");
  }
  GaussianStream rng(seed, trial_index);
  ComplexMatrixXd h(m, n);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) h(i, j) = rng.complex_normal();
  }
  return h;
}

}  // namespace mwf
