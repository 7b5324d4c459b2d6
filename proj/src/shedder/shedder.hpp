#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "core/phase.hpp"
#include "core/rng.hpp"

namespace ufls {

struct UflsParams {
  // Trigger setpoints in Hz. Single-phase devices and sectionalizers carry one;
  // three-phase appliances carry every per-phase setpoint and trip on any band.
  std::vector<double> setpoints;
  double deadband = 0.05;
  double tau1_max = 10.0;
  std::optional<double> fixed_tau1;  // sectionalizers: used verbatim, tau1_max ignored
  double tau2 = 900.0;
  double tau_rand_max = 180.0;
  Attachment phase = Attachment::ThreePhase;

  friend bool operator==(const UflsParams&, const UflsParams&) = default;
};

enum class ShedMode { Armed, TimingTrip, Shed, Recovering };

std::string_view to_string(ShedMode mode);

struct UflsDeviceState {
  ShedMode mode = ShedMode::Armed;
  double t1 = 0.0;  // in-band time since band entry
  double t2 = 0.0;  // time since shedding
  double tau1_drawn = 0.0;
  double tau_rand_drawn = 0.0;
  bool u = true;  // UFLS command; false exactly while shed or recovering
  // Timers are tick counts so long waits do not accumulate round-off.
  std::int64_t t1_ticks = 0;
  std::int64_t t2_ticks = 0;

  friend bool operator==(const UflsDeviceState&, const UflsDeviceState&) = default;
};

struct DrawnDelays {
  double tau1 = 0.0;
  double tau_rand = 0.0;
};

// tau1 ~ U(0, tau1_max) unless fixed_tau1 is set; tau_rand ~ U(0, tau_rand_max).
DrawnDelays draw_delays(const UflsParams& params, RandomStream& rng);

// Longest tripping delay that keeps DERs inside their low-frequency
// ride-through envelope: 10^(1.7373 f_min - 100.116) seconds.
// Throws std::out_of_range unless 57 <= f_min <= 60.
double max_tripping_delay_bound(double f_min_hz);

bool band_match(double f_hz, const UflsParams& params);

// Armed device with freshly drawn delays.
UflsDeviceState initial_device_state(const UflsParams& params, RandomStream& rng);

// One device tick at sensed frequency f. Leaving the band before the trip
// resets t1 to zero. Delays are redrawn whenever the device re-arms.
UflsDeviceState step_device(UflsDeviceState state, const UflsParams& params, double f_hz, double dt,
                            RandomStream& rng);

// The appliance draws power only when its own controller and UFLS agree.
constexpr bool effective_on(bool native_on, bool command_on) { return native_on && command_on; }

}  // namespace ufls
