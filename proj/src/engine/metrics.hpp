#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "core/events.hpp"
#include "engine/result.hpp"

namespace ufls {

// Online accumulation of the run metrics, fed once per step.
class MetricsAccumulator {
 public:
  MetricsAccumulator(double dt, double phase_base_kva, std::vector<std::string> group_ids = {});

  // group_kva may be empty when no per-group breakdown is wanted.
  void add(const PowerTriplet& s, double f_star, const PowerTriplet& v_pcc, double puf, double vuf,
           std::span<const double> group_kva = {});
  void add_events(std::span<const EventRecord> events);
  void set_participating(std::int64_t n) { metrics_.device_count_participating = n; }

  RunMetrics finish() const;

 private:
  double dt_;
  double phase_base_kva_;
  std::vector<std::string> group_ids_;
  std::vector<double> group_kvas_;  // kVA*s per group
  double kva_seconds_ = 0.0;
  double puf_sum_ = 0.0;
  std::int64_t puf_n_ = 0;
  double vuf_sum_ = 0.0;
  std::int64_t vuf_n_ = 0;
  std::vector<std::string> tripped_;
  RunMetrics metrics_;
};

// Metrics over a complete full-rate series (zero-order hold energy integral).
RunMetrics accumulate_metrics(const TimeSeries& series, double dt, double phase_base_kva,
                              std::span<const EventRecord> events = {});

}  // namespace ufls
