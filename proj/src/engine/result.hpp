#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "core/events.hpp"
#include "core/phase.hpp"

namespace ufls {

// Columns of timeseries.csv, one entry per recorded step.
struct TimeSeries {
  std::vector<double> t;
  std::vector<PowerTriplet> s;        // p.u. per phase
  std::vector<double> f_star;         // Hz
  std::vector<PowerTriplet> v_pcc;    // |V| p.u.
  std::vector<double> puf;            // NaN while unloaded
  std::vector<double> vuf;            // percent, load bus

  std::size_t size() const { return t.size(); }
  void reserve(std::size_t n);
};

struct RunMetrics {
  double energy_served_mwh = 0.0;
  double max_freq_deviation_hz = 0.0;
  double max_pcc_voltage_deviation_pu = 0.0;
  double puf_mean = 0.0;
  double puf_max = 0.0;
  double vuf_mean = 0.0;
  double vuf_max = 0.0;
  std::int64_t ufls_event_count = 0;       // trigger episodes
  std::int64_t device_trip_count = 0;
  std::int64_t device_reconnect_count = 0;
  std::int64_t devices_tripped = 0;        // distinct devices that shed at least once
  std::int64_t device_count_participating = 0;  // UFLS-enabled devices in the fleet
  std::map<std::string, double> group_energy_mwh;

  friend bool operator==(const RunMetrics&, const RunMetrics&) = default;
};

// Served on/off change of one device (native AND command AND energized).
struct DeviceTransition {
  double t = 0.0;
  std::uint32_t device = 0;
  bool on = false;

  friend bool operator==(const DeviceTransition&, const DeviceTransition&) = default;
};

struct SimulationResult {
  std::string name;
  std::uint64_t seed = 0;
  double dt = 0.0;
  std::string fingerprint;
  std::string topology_fingerprint;
  TimeSeries series;
  std::vector<EventRecord> events;
  RunMetrics metrics;
  std::vector<std::string> device_ids;
  std::vector<std::string> group_ids;
  std::vector<DeviceTransition> transitions;
};

}  // namespace ufls
