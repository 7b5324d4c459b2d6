#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ufls {

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

// Seed for an independent stream keyed by (scenario seed, name). Adding or
// removing other names never changes this stream.
std::uint64_t stream_seed(std::uint64_t seed, std::string_view name);

// Per-row seed for parameter sweeps.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

// Deterministic random stream. Distribution code is written out here because
// the standard distributions are not bit-identical across library vendors.
class RandomStream {
 public:
  RandomStream() : RandomStream(0) {}
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}
  RandomStream(std::uint64_t seed, std::string_view name) : engine_(stream_seed(seed, name)) {}

  // Uniform on [0, 1).
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  // Uniform on [lo, hi); returns lo when hi <= lo.
  double uniform(double lo, double hi) { return hi > lo ? lo + (hi - lo) * uniform01() : lo; }
  // Standard normal via Box-Muller.
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ufls
