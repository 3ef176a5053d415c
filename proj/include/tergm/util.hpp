#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace tergm {

// ---------------------------------------------------------------------------
// Deterministic RNG streams.
//
// All randomness in the project flows through substreams derived from one
// master seed.  mix64 is the splitmix64 finalizer; seeding an engine with
// mix(seed, tag, index) gives independent streams whose draws do not depend
// on scheduling or evaluation order.
// ---------------------------------------------------------------------------

uint64_t mix64(uint64_t x);

inline uint64_t substream_seed(uint64_t seed, uint64_t tag, uint64_t index = 0) {
  return mix64(mix64(seed ^ (0x9e3779b97f4a7c15ULL * (tag + 1))) + index);
}

inline std::mt19937_64 make_rng(uint64_t seed, uint64_t tag, uint64_t index = 0) {
  return std::mt19937_64(substream_seed(seed, tag, index));
}

// Stream tags, one per purpose.
namespace rng_tag {
inline constexpr uint64_t kSynthAttrs = 1;
inline constexpr uint64_t kSynthYear = 2;
inline constexpr uint64_t kBootstrap = 3;
inline constexpr uint64_t kGofYear = 4;
inline constexpr uint64_t kSampler = 5;
}  // namespace rng_tag

// ---------------------------------------------------------------------------
// Small numerics helpers.
// ---------------------------------------------------------------------------

// Linear-interpolation quantile (R type 7) on an unsorted copy of v.
double quantile(std::vector<double> v, double p);

// Shortest decimal representation that round-trips, via std::to_chars.
std::string format_double(double v);

// FNV-1a over a byte string, hex-encoded.  Used for config hashes in
// manifests; stability matters, cryptographic strength does not.
std::string fnv1a_hex(const std::string& bytes);

inline double logistic(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

// log(1 + e^x) without overflow.
inline double softplus(double x) {
  if (x > 30) return x;
  if (x < -30) return std::exp(x);
  return std::log1p(std::exp(x));
}

// ---------------------------------------------------------------------------
// Atomic artifact publishing: write to a sibling temp file, then rename.
// ---------------------------------------------------------------------------
void atomic_write_file(const std::filesystem::path& path, const std::string& content);

// ---------------------------------------------------------------------------
// Index-keyed parallel loop.  Results must be written into per-index slots so
// the outcome is identical for any thread count.
// ---------------------------------------------------------------------------
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace tergm
