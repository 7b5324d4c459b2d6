#include "engine/compare.hpp"

#include <cmath>
#include <cstdio>

#include "core/errors.hpp"

namespace ufls {

const ComparisonRow* ComparisonTable::find(const std::string& metric) const {
  for (const auto& r : rows) {
    if (r.metric == metric) return &r;
  }
  return nullptr;
}

ComparisonTable compare_runs(const SimulationResult& a, const SimulationResult& b, const SimulationResult* baseline) {
  if (a.topology_fingerprint != b.topology_fingerprint) {
    throw LookupError("topology mismatch: '" + a.name + "' (" + a.topology_fingerprint + ") vs '" + b.name + "' (" +
                      b.topology_fingerprint + ")");
  }
  if (baseline && baseline->topology_fingerprint != a.topology_fingerprint) {
    throw LookupError("topology mismatch with baseline '" + baseline->name + "'");
  }
  ComparisonTable t;
  t.name_a = a.name;
  t.name_b = b.name;
  auto row = [&](std::string metric, double va, double vb) {
    t.rows.push_back({std::move(metric), va, vb, vb - va});
  };
  const auto& ma = a.metrics;
  const auto& mb = b.metrics;
  if (baseline) {
    const auto& m0 = baseline->metrics;
    row("puf_mean_change", ma.puf_mean - m0.puf_mean, mb.puf_mean - m0.puf_mean);
    row("puf_max_change", ma.puf_max - m0.puf_max, mb.puf_max - m0.puf_max);
    row("vuf_mean_change", ma.vuf_mean - m0.vuf_mean, mb.vuf_mean - m0.vuf_mean);
    row("vuf_max_change", ma.vuf_max - m0.vuf_max, mb.vuf_max - m0.vuf_max);
  }
  row("puf_mean", ma.puf_mean, mb.puf_mean);
  row("puf_max", ma.puf_max, mb.puf_max);
  row("vuf_mean", ma.vuf_mean, mb.vuf_mean);
  row("vuf_max", ma.vuf_max, mb.vuf_max);
  row("max_freq_deviation_hz", ma.max_freq_deviation_hz, mb.max_freq_deviation_hz);
  row("max_pcc_voltage_deviation_pu", ma.max_pcc_voltage_deviation_pu, mb.max_pcc_voltage_deviation_pu);
  row("energy_served_mwh", ma.energy_served_mwh, mb.energy_served_mwh);
  row("ufls_event_count", static_cast<double>(ma.ufls_event_count), static_cast<double>(mb.ufls_event_count));
  row("device_count_participating", static_cast<double>(ma.device_count_participating),
      static_cast<double>(mb.device_count_participating));
  row("device_trip_count", static_cast<double>(ma.device_trip_count), static_cast<double>(mb.device_trip_count));
  for (const auto& [g, ea] : ma.group_energy_mwh) {
    const auto it = mb.group_energy_mwh.find(g);
    row("group_energy_mwh." + g, ea, it == mb.group_energy_mwh.end() ? 0.0 : it->second);
  }
  return t;
}

std::string comparison_csv(const ComparisonTable& table) {
  std::string out = "metric," + table.name_a + "," + table.name_b + ",delta\n";
  char buf[160];
  for (const auto& r : table.rows) {
    std::snprintf(buf, sizeof buf, ",%.6f,%.6f,%.6f\n", r.a, r.b, r.delta);
    out += r.metric;
    out += buf;
  }
  return out;
}

}  // namespace ufls
