#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "grid/profile.hpp"

namespace ufls {

// CSV with a header row: first column time in seconds, then one column per
// profile id, values in kVA. Blank lines and lines starting with '#' are
// skipped. Values hold until the next row (zero-order hold).
// Throws ValidationError naming the offending row (1-based, header = row 1).
LoadProfileSet load_profiles(const std::string& csv_text);

// Ramp, plateau and decline with multiplicative uniform noise.
struct SynthProfileSpec {
  std::string id;
  double base_kva = 0.0;
  double growth_kva_per_s = 0.0;
  double growth_start = 0.0;
  double growth_end = std::numeric_limits<double>::infinity();
  double plateau_end = std::numeric_limits<double>::infinity();
  double decline_kva_per_s = 0.0;
  double floor_kva = 0.0;
  double noise = 0.0;  // relative amplitude, value * (1 + noise * U(-1, 1))

  // Noise-free value.
  double shape_at(double t) const;

  friend bool operator==(const SynthProfileSpec&, const SynthProfileSpec&) = default;
};

struct SynthSpec {
  std::uint64_t seed = 0;
  double interval = 1.0;
  double horizon = 3600.0;
  std::vector<SynthProfileSpec> profiles;

  friend bool operator==(const SynthSpec&, const SynthSpec&) = default;
};

// Growth rate that takes a profile from base_kva at growth_start to level_kva
// at time t_cross.
double growth_for_crossing(double base_kva, double level_kva, double growth_start, double t_cross);

LoadProfileSet synth_profiles(const SynthSpec& spec);

}  // namespace ufls
