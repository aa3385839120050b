#pragma once

#include <cmath>
#include <cstdint>

namespace mollify {

/// Counter-free splitmix64 stream. Small, fast to construct, and fully
/// portable, so per-sample substreams can be spun up cheaply and results do
/// not depend on the standard library's distribution internals.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1]; used where log() must stay finite.
  double uniform_pos() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; the spare half of each pair is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
    const double a = 6.283185307179586476925286766559 * uniform();
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  /// Uniform integer in [0, bound) by 128-bit multiply-shift.
  std::uint64_t uniform_below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Hash-combine used to derive named substreams from a master seed.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stream tags. Noise draws and Monte-Carlo draws use disjoint streams so
/// changing the sample count never perturbs the noise sequence.
enum class StreamTag : std::uint64_t {
  kNoise = 0x6e6f697365ULL,  // "noise"
  kMonteCarlo = 0x6d63ULL,   // "mc"
  kData = 0x64617461ULL,     // "data"
};

/// Substream for (master seed, tag, iteration).
inline RngStream substream(std::uint64_t master, StreamTag tag, std::uint64_t n) {
  return RngStream(mix_seed(mix_seed(master, static_cast<std::uint64_t>(tag)), n));
}

/// Per-sample substream; identical results regardless of parallelism degree.
inline RngStream sample_stream(std::uint64_t master, StreamTag tag, std::uint64_t n,
                               std::uint64_t sample_index) {
  return RngStream(mix_seed(
      mix_seed(mix_seed(master, static_cast<std::uint64_t>(tag)), n), sample_index));
}

}  // namespace mollify
