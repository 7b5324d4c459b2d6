#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "engine/result.hpp"
#include "io/scenario.hpp"

namespace ufls {

// One swept dotted key and the literal values it takes.
struct SweepAxis {
  std::string key;
  std::vector<std::string> values;
};

// "key=v1,v2,v3" or "key=start:stop:step" (inclusive stop). A list may be
// empty ("key="), which makes the whole sweep empty.
SweepAxis parse_sweep_axis(const std::string& spec);

enum class SweepStatus { Ok, Invalid, Failed };
std::string_view to_string(SweepStatus status);

struct SweepRow {
  std::size_t index = 0;
  std::vector<std::pair<std::string, std::string>> assignment;
  std::uint64_t seed = 0;
  SweepStatus status = SweepStatus::Ok;
  std::string message;
  RunMetrics metrics;
};

// Cartesian product of the axes (last axis varies fastest), one run per row
// with seed derive_seed(base seed, row index). Rows are spread over `jobs`
// worker threads; the output does not depend on `jobs`.
std::vector<SweepRow> run_sweep(const ScenarioSource& base, const std::vector<SweepAxis>& axes, unsigned jobs);

std::string sweep_csv(const std::vector<SweepAxis>& axes, const std::vector<SweepRow>& rows);

}  // namespace ufls
