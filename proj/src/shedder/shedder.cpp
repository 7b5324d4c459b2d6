#include "shedder/shedder.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ufls {

namespace {

// Absorbs the representation error of tick-count * dt against a delay.
constexpr double kTimerEps = 1e-9;

void rearm(UflsDeviceState& s, const UflsParams& params, RandomStream& rng) {
  const auto d = draw_delays(params, rng);
  s.mode = ShedMode::Armed;
  s.u = true;
  s.t1 = s.t2 = 0.0;
  s.t1_ticks = s.t2_ticks = 0;
  s.tau1_drawn = d.tau1;
  s.tau_rand_drawn = d.tau_rand;
}

void trip_if_due(UflsDeviceState& s) {
  if (s.t1 + kTimerEps >= s.tau1_drawn) {
    s.mode = ShedMode::Shed;
    s.u = false;
    s.t2 = 0.0;
    s.t2_ticks = 0;
  }
}

}  // namespace

std::string_view to_string(ShedMode mode) {
  switch (mode) {
    case ShedMode::Armed: return "armed";
    case ShedMode::TimingTrip: return "timing_trip";
    case ShedMode::Shed: return "shed";
    case ShedMode::Recovering: return "recovering";
  }
  return "?";
}

DrawnDelays draw_delays(const UflsParams& params, RandomStream& rng) {
  DrawnDelays d;
  // Both draws are always taken so the stream position does not depend on mode.
  const double tau1 = rng.uniform(0.0, params.tau1_max);
  d.tau1 = params.fixed_tau1 ? *params.fixed_tau1 : tau1;
  d.tau_rand = rng.uniform(0.0, params.tau_rand_max);
  return d;
}

double max_tripping_delay_bound(double f_min_hz) {
  if (!(f_min_hz >= 57.0 && f_min_hz <= 60.0)) {
    throw std::out_of_range("ride-through bound defined for 57..60 Hz, got " + std::to_string(f_min_hz));
  }
  return std::pow(10.0, 1.7373 * f_min_hz - 100.116);
}

bool band_match(double f_hz, const UflsParams& params) {
  for (double sp : params.setpoints) {
    // Small slack so a frequency sitting exactly on a band edge counts as in band.
    if (std::abs(f_hz - sp) <= params.deadband + 1e-9) return true;
  }
  return false;
}

UflsDeviceState initial_device_state(const UflsParams& params, RandomStream& rng) {
  UflsDeviceState s;
  rearm(s, params, rng);
  return s;
}

UflsDeviceState step_device(UflsDeviceState s, const UflsParams& params, double f_hz, double dt,
                            RandomStream& rng) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_device requires dt > 0");
  switch (s.mode) {
    case ShedMode::Armed:
      if (band_match(f_hz, params)) {
        s.mode = ShedMode::TimingTrip;
        s.t1_ticks = 0;
        s.t1 = 0.0;
        trip_if_due(s);
      }
      break;
    case ShedMode::TimingTrip:
      if (!band_match(f_hz, params)) {
        s.mode = ShedMode::Armed;
        s.t1_ticks = 0;
        s.t1 = 0.0;
      } else {
        ++s.t1_ticks;
        s.t1 = static_cast<double>(s.t1_ticks) * dt;
        trip_if_due(s);
      }
      break;
    case ShedMode::Shed:
    case ShedMode::Recovering: {
      ++s.t2_ticks;
      s.t2 = static_cast<double>(s.t2_ticks) * dt;
      if (s.t2 + kTimerEps >= params.tau2 + s.tau_rand_drawn) {
        rearm(s, params, rng);
      } else if (s.t2 + kTimerEps >= params.tau2) {
        s.mode = ShedMode::Recovering;
      }
      break;
    }
  }
  return s;
}

}  // namespace ufls
