#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <vector>

namespace housegan {

/// Deterministic random source. A stream is fully identified by a seed plus
/// a list of integer keys, so any (sample, node, step) coordinate can be
/// addressed directly without replaying earlier draws. Output is identical
/// across platforms (no std distributions are involved).
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys = {})
      : state_(mix(seed ^ 0x6a09e667f3bcc909ULL)) {
    for (std::uint64_t k : keys) state_ = mix(state_ ^ mix(k + 0x9e3779b97f4a7c15ULL));
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi] (inclusive).
  int uniform_int(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(next_u64() % span);
  }

  /// Standard normal via Box-Muller; draws are cached in pairs.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  std::vector<double> normal_vector(int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (double& x : v) x = normal();
    return v;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Per-room noise vector drawn from N(0, 1).
using NoiseVector = std::vector<double>;

/// Stream-domain tags so different consumers never share draws.
enum class StreamDomain : std::uint64_t {
  kRequestNoise = 1,
  kTrainNoise = 2,
  kBatch = 3,
  kInterpolation = 4,
  kInit = 5,
  kCorpus = 6,
  kEvaluation = 7,
  kProjection = 8,
};

/// Noise for one room of one sample under a request seed.
inline NoiseVector room_noise(std::uint64_t seed, std::uint64_t sample, std::uint64_t node,
                              int dim) {
  RandomStream rs(seed, {static_cast<std::uint64_t>(StreamDomain::kRequestNoise), sample, node});
  return rs.normal_vector(dim);
}

}  // namespace housegan
