#include "engine/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace ufls {

void TimeSeries::reserve(std::size_t n) {
  t.reserve(n);
  s.reserve(n);
  f_star.reserve(n);
  v_pcc.reserve(n);
  puf.reserve(n);
  vuf.reserve(n);
}

MetricsAccumulator::MetricsAccumulator(double dt, double phase_base_kva, std::vector<std::string> group_ids)
    : dt_(dt), phase_base_kva_(phase_base_kva), group_ids_(std::move(group_ids)) {
  group_kvas_.assign(group_ids_.size(), 0.0);
}

void MetricsAccumulator::add(const PowerTriplet& s, double f_star, const PowerTriplet& v_pcc, double puf_value,
                             double vuf_value, std::span<const double> group_kva) {
  kva_seconds_ += sum_of(s) * phase_base_kva_ * dt_;
  for (std::size_t g = 0; g < group_kva.size() && g < group_kvas_.size(); ++g) {
    group_kvas_[g] += group_kva[g] * dt_;
  }
  metrics_.max_freq_deviation_hz = std::max(metrics_.max_freq_deviation_hz, std::abs(kNominalHz - f_star));
  for (Phase p : kPhases) {
    metrics_.max_pcc_voltage_deviation_pu =
        std::max(metrics_.max_pcc_voltage_deviation_pu, std::abs(1.0 - v_pcc[p]));
  }
  if (std::isfinite(puf_value)) {
    puf_sum_ += puf_value;
    ++puf_n_;
    metrics_.puf_max = std::max(metrics_.puf_max, puf_value);
  }
  if (std::isfinite(vuf_value)) {
    vuf_sum_ += vuf_value;
    ++vuf_n_;
    metrics_.vuf_max = std::max(metrics_.vuf_max, vuf_value);
  }
}

void MetricsAccumulator::add_events(std::span<const EventRecord> events) {
  for (const auto& e : events) {
    switch (e.kind) {
      case EventKind::TriggerSet:
        ++metrics_.ufls_event_count;
        break;
      case EventKind::DeviceTrip:
        ++metrics_.device_trip_count;
        tripped_.push_back(e.subject);
        break;
      case EventKind::DeviceReconnect:
        ++metrics_.device_reconnect_count;
        break;
      default:
        break;
    }
  }
}

RunMetrics MetricsAccumulator::finish() const {
  RunMetrics m = metrics_;
  // kVA*s -> MWh
  constexpr double kToMwh = 1.0 / 3600.0 / 1000.0;
  m.energy_served_mwh = kva_seconds_ * kToMwh;
  m.puf_mean = puf_n_ ? puf_sum_ / static_cast<double>(puf_n_) : 0.0;
  m.vuf_mean = vuf_n_ ? vuf_sum_ / static_cast<double>(vuf_n_) : 0.0;
  auto ids = tripped_;
  std::sort(ids.begin(), ids.end());
  m.devices_tripped = static_cast<std::int64_t>(std::unique(ids.begin(), ids.end()) - ids.begin());
  for (std::size_t g = 0; g < group_ids_.size(); ++g) m.group_energy_mwh[group_ids_[g]] = group_kvas_[g] * kToMwh;
  return m;
}

RunMetrics accumulate_metrics(const TimeSeries& series, double dt, double phase_base_kva,
                              std::span<const EventRecord> events) {
  MetricsAccumulator acc(dt, phase_base_kva);
  for (std::size_t i = 0; i < series.size(); ++i) {
    acc.add(series.s[i], series.f_star[i], series.v_pcc[i], series.puf[i], series.vuf[i]);
  }
  acc.add_events(events);
  return acc.finish();
}

}  // namespace ufls
