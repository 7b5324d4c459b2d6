#pragma once

#include <optional>
#include <string>
#include <vector>

#include "engine/result.hpp"

namespace ufls {

struct ComparisonRow {
  std::string metric;
  double a = 0.0;
  double b = 0.0;
  double delta = 0.0;  // b - a
};

struct ComparisonTable {
  std::string name_a;
  std::string name_b;
  std::vector<ComparisonRow> rows;

  const ComparisonRow* find(const std::string& metric) const;
};

// Side-by-side metrics plus per-group energy. With a no-UFLS baseline the
// table also carries each run's PUF/VUF change against that baseline.
// Throws LookupError when the topology fingerprints differ.
ComparisonTable compare_runs(const SimulationResult& a, const SimulationResult& b,
                             const SimulationResult* baseline = nullptr);

std::string comparison_csv(const ComparisonTable& table);

}  // namespace ufls
