#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "core/phase.hpp"
#include "core/unbalance.hpp"
#include "grid/profile.hpp"
#include "grid/topology.hpp"

namespace ufls {

enum class LoadKind { NonControllable, Appliance, SmartMeter };

std::string_view to_string(LoadKind kind);
std::optional<LoadKind> parse_load_kind(std::string_view text);

// Embedded on/off controller of an appliance (thermostat-style duty cycle).
struct DutyCycle {
  double period_s = 0.0;
  double on_fraction = 1.0;
  double offset_s = 0.0;

  bool is_on(double t) const;
  friend bool operator==(const DutyCycle&, const DutyCycle&) = default;
};

struct LoadDevice {
  std::string id;
  Attachment attachment = Attachment::A;
  LoadKind kind = LoadKind::NonControllable;
  double rated_kva = 0.0;
  // Profile samples replace rated_kva as the demand, times profile_scale.
  std::optional<std::string> profile;
  double profile_scale = 1.0;
  std::optional<DutyCycle> native;

  double demand_kva(const LoadProfileSet& profiles, double t) const;
  bool native_on(double t) const { return !native || native->is_on(t); }

  friend bool operator==(const LoadDevice&, const LoadDevice&) = default;
};

struct MotorLoad {
  std::string id = "M1";
  std::string group;
  double rated_kva = 400.0;
  double surge_multiplier = 6.0;
  double surge_duration = 6.0;
  double running_fraction = 1.0;
  double start_time = 50.0;

  friend bool operator==(const MotorLoad&, const MotorLoad&) = default;
};

// Per-phase demand of a three-phase motor in p.u. of the per-phase base.
PowerTriplet motor_demand(const MotorLoad& motor, double t, double phase_base_kva);

struct FeederElectrical {
  double bess_rating_kva = 3000.0;
  PhaseTriplet<Complex> impedance_pu{Complex(0.01, 0.05), Complex(0.01, 0.05), Complex(0.01, 0.05)};
  double voltage_sag_gain = 0.03;      // p.u. voltage per p.u. step of phase power
  double voltage_time_constant = 0.2;  // s

  // Per-phase powers are expressed on one third of the three-phase rating.
  double phase_base_kva() const { return bess_rating_kva / 3.0; }

  friend bool operator==(const FeederElectrical&, const FeederElectrical&) = default;
};

// Aggregated per-phase view of the islanded feeder.
class Feeder {
 public:
  Feeder() = default;
  // Throws ValidationError when a device is missing from every group, a group
  // lists an unknown device, or the motor's host group is unknown.
  Feeder(Topology topology, std::vector<LoadDevice> devices, std::optional<MotorLoad> motor,
         FeederElectrical electrical);

  const Topology& topology() const { return topology_; }
  const std::vector<LoadDevice>& devices() const { return devices_; }
  const std::optional<MotorLoad>& motor() const { return motor_; }
  const FeederElectrical& electrical() const { return electrical_; }
  std::size_t device_group(std::size_t device) const { return device_group_[device]; }
  std::optional<std::size_t> device_index(const std::string& id) const;

  struct Load {
    PowerTriplet s_pu;                 // per-phase apparent power at the BESS
    std::vector<double> group_kva;     // served kVA per load group
  };

  // device_on holds the effective (native AND command) state per device.
  Load aggregate(const std::vector<bool>& group_energized, const std::vector<std::uint8_t>& device_on,
                 const LoadProfileSet& profiles, double t) const;

 private:
  Topology topology_;
  std::vector<LoadDevice> devices_;
  std::optional<MotorLoad> motor_;
  FeederElectrical electrical_;
  std::vector<std::size_t> device_group_;
  std::optional<std::size_t> motor_group_;
};

// Per-phase p.u. power drawn by devices that are connected and on, plus the
// motor when its group is energized. Devices absent from device_on count as on.
PowerTriplet aggregate_phase_power(const Feeder& feeder, const SwitchStates& switch_states,
                                   const std::map<std::string, bool>& device_on,
                                   const LoadProfileSet& profiles, double t);

struct VoltageState {
  PowerTriplet pcc_magnitude{1.0, 1.0, 1.0};
  PowerTriplet prev_s{};
};

struct BusVoltages {
  PhaseTriplet<Phasor> pcc;
  PhaseTriplet<Phasor> load_bus;
};

// Parametric stand-in for the network solution: the PCC magnitude relaxes
// toward 1 p.u. with a dip proportional to the per-step power change, and the
// load bus sits one feeder impedance downstream at unity power factor.
// Returns the voltages and the advanced state.
std::pair<BusVoltages, VoltageState> bus_voltages(const PowerTriplet& s, const FeederElectrical& electrical,
                                                  const VoltageState& prev, double dt);

}  // namespace ufls
