#include "io/profiles.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace ufls {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::optional<double> to_number(const std::string& s) {
  double v = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

LoadProfileSet load_profiles(const std::string& csv_text) {
  std::istringstream in(csv_text);
  std::string line;
  int row = 0;
  std::vector<std::string> header;
  std::vector<double> times;
  std::vector<std::vector<double>> columns;
  std::vector<std::string> issues;
  while (std::getline(in, line)) {
    ++row;
    const auto stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    auto cells = split_csv(stripped);
    if (header.empty()) {
      if (cells.size() < 2) {
        throw ValidationError({"profiles row " + std::to_string(row) + ": header needs a time column and at least one profile"});
      }
      header = std::move(cells);
      columns.resize(header.size() - 1);
      for (std::size_t c = 1; c < header.size(); ++c) {
        if (header[c].empty()) issues.push_back("profiles row " + std::to_string(row) + ": empty profile id in column " + std::to_string(c + 1));
        for (std::size_t d = 1; d < c; ++d) {
          if (header[d] == header[c]) issues.push_back("profiles row " + std::to_string(row) + ": duplicate profile id '" + header[c] + "'");
        }
      }
      continue;
    }
    const std::string where = "profiles row " + std::to_string(row);
    if (cells.size() != header.size()) {
      issues.push_back(where + ": expected " + std::to_string(header.size()) + " fields, found " + std::to_string(cells.size()));
      continue;
    }
    const auto t = to_number(cells[0]);
    if (!t) {
      issues.push_back(where + ": time '" + cells[0] + "' is not a number");
      continue;
    }
    if (!times.empty() && !(*t > times.back())) {
      issues.push_back(where + ": time " + cells[0] + " is not after the previous row");
      continue;
    }
    bool ok = true;
    std::vector<double> values(header.size() - 1);
    for (std::size_t c = 1; c < cells.size(); ++c) {
      const auto v = to_number(cells[c]);
      if (!v) {
        issues.push_back(where + ": value '" + cells[c] + "' for '" + header[c] + "' is not a number");
        ok = false;
      } else if (*v < 0.0) {
        issues.push_back(where + ": negative power " + cells[c] + " for '" + header[c] + "'");
        ok = false;
      } else {
        values[c - 1] = *v;
      }
    }
    if (!ok) continue;
    times.push_back(*t);
    for (std::size_t c = 0; c < values.size(); ++c) columns[c].push_back(values[c]);
  }
  if (header.empty()) issues.insert(issues.begin(), "profiles: missing header row");
  else if (times.empty() && issues.empty()) issues.push_back("profiles: no data rows");
  if (!issues.empty()) throw ValidationError(std::move(issues));

  LoadProfileSet set;
  for (std::size_t c = 0; c < columns.size(); ++c) set.emplace(header[c + 1], LoadProfile(times, columns[c]));
  return set;
}

double SynthProfileSpec::shape_at(double t) const {
  double v = base_kva;
  if (t > growth_start) v += growth_kva_per_s * (std::min(t, growth_end) - growth_start);
  if (t > plateau_end) v -= decline_kva_per_s * (t - plateau_end);
  return std::max(v, floor_kva);
}

double growth_for_crossing(double base_kva, double level_kva, double growth_start, double t_cross) {
  if (!(t_cross > growth_start)) throw std::invalid_argument("crossing time must follow growth start");
  return (level_kva - base_kva) / (t_cross - growth_start);
}

LoadProfileSet synth_profiles(const SynthSpec& spec) {
  if (!(spec.interval > 0.0)) throw std::invalid_argument("synth interval must be positive");
  const auto n = static_cast<std::size_t>(std::floor(spec.horizon / spec.interval + 1e-9)) + 1;
  LoadProfileSet set;
  for (const auto& p : spec.profiles) {
    RandomStream rng(spec.seed, "synth/" + p.id);
    std::vector<double> times(n);
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) {
      // Integer multiples keep sample times on every simulation grid.
      times[i] = static_cast<double>(i) * spec.interval;
      const double jitter = p.noise > 0.0 ? p.noise * rng.uniform(-1.0, 1.0) : 0.0;
      values[i] = std::max(0.0, p.shape_at(times[i]) * (1.0 + jitter));
    }
    set.emplace(p.id, LoadProfile(std::move(times), std::move(values)));
  }
  return set;
}

}  // namespace ufls
