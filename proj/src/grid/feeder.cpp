#include "grid/feeder.hpp"

#include <cmath>
#include <stdexcept>

#include "core/errors.hpp"

namespace ufls {

std::string_view to_string(LoadKind kind) {
  switch (kind) {
    case LoadKind::NonControllable: return "non_controllable";
    case LoadKind::Appliance: return "appliance";
    case LoadKind::SmartMeter: return "smart_meter";
  }
  return "?";
}

std::optional<LoadKind> parse_load_kind(std::string_view text) {
  if (text == "non_controllable") return LoadKind::NonControllable;
  if (text == "appliance") return LoadKind::Appliance;
  if (text == "smart_meter") return LoadKind::SmartMeter;
  return std::nullopt;
}

bool DutyCycle::is_on(double t) const {
  if (period_s <= 0.0) return true;
  double phase = std::fmod(t + offset_s, period_s);
  if (phase < 0.0) phase += period_s;
  return phase < on_fraction * period_s;
}

double LoadDevice::demand_kva(const LoadProfileSet& profiles, double t) const {
  if (!profile) return rated_kva;
  const auto it = profiles.find(*profile);
  if (it == profiles.end()) throw LookupError("device '" + id + "' references missing profile '" + *profile + "'");
  return it->second.value_at(t) * profile_scale;
}

PowerTriplet motor_demand(const MotorLoad& motor, double t, double phase_base_kva) {
  if (t < motor.start_time) return {};
  const double factor =
      t < motor.start_time + motor.surge_duration ? motor.surge_multiplier : motor.running_fraction;
  const double per_phase = motor.rated_kva * factor / 3.0 / phase_base_kva;
  return {per_phase, per_phase, per_phase};
}

Feeder::Feeder(Topology topology, std::vector<LoadDevice> devices, std::optional<MotorLoad> motor,
               FeederElectrical electrical)
    : topology_(std::move(topology)),
      devices_(std::move(devices)),
      motor_(std::move(motor)),
      electrical_(electrical) {
  std::vector<std::string> issues;
  std::map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < devices_.size(); ++i) {
    if (!by_id.emplace(devices_[i].id, i).second) {
      issues.push_back("duplicate device id '" + devices_[i].id + "'");
    }
  }
  constexpr std::size_t kUnassigned = static_cast<std::size_t>(-1);
  device_group_.assign(devices_.size(), kUnassigned);
  for (std::size_t g = 0; g < topology_.groups().size(); ++g) {
    for (const auto& member : topology_.groups()[g].members) {
      auto it = by_id.find(member);
      if (it == by_id.end()) {
        issues.push_back("group '" + topology_.groups()[g].id + "' lists unknown device '" + member + "'");
      } else {
        device_group_[it->second] = g;
      }
    }
  }
  for (std::size_t i = 0; i < devices_.size(); ++i) {
    if (device_group_[i] == kUnassigned) {
      issues.push_back("device '" + devices_[i].id + "' is not in any load group");
    }
  }
  if (motor_) {
    motor_group_ = topology_.group_index(motor_->group);
    if (!motor_group_) issues.push_back("motor '" + motor_->id + "' has unknown group '" + motor_->group + "'");
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

std::optional<std::size_t> Feeder::device_index(const std::string& id) const {
  for (std::size_t i = 0; i < devices_.size(); ++i) {
    if (devices_[i].id == id) return i;
  }
  return std::nullopt;
}

Feeder::Load Feeder::aggregate(const std::vector<bool>& group_energized,
                               const std::vector<std::uint8_t>& device_on, const LoadProfileSet& profiles,
                               double t) const {
  Load out;
  out.group_kva.assign(topology_.groups().size(), 0.0);
  PowerTriplet kva{};
  for (std::size_t i = 0; i < devices_.size(); ++i) {
    const std::size_t g = device_group_[i];
    if (!group_energized[g] || !device_on[i]) continue;
    const auto& dev = devices_[i];
    const double demand = dev.demand_kva(profiles, t);
    if (is_three_phase(dev.attachment)) {
      const double share = demand / 3.0;
      kva.a += share;
      kva.b += share;
      kva.c += share;
    } else {
      kva[phase_of(dev.attachment)] += demand;
    }
    out.group_kva[g] += demand;
  }
  const double base = electrical_.phase_base_kva();
  out.s_pu = {kva.a / base, kva.b / base, kva.c / base};
  if (motor_ && group_energized[*motor_group_]) {
    const auto m = motor_demand(*motor_, t, base);
    out.s_pu.a += m.a;
    out.s_pu.b += m.b;
    out.s_pu.c += m.c;
    out.group_kva[*motor_group_] += sum_of(m) * base;
  }
  return out;
}

PowerTriplet aggregate_phase_power(const Feeder& feeder, const SwitchStates& switch_states,
                                   const std::map<std::string, bool>& device_on,
                                   const LoadProfileSet& profiles, double t) {
  const auto& topo = feeder.topology();
  std::vector<bool> closed(topo.groups().size(), false);
  std::vector<bool> seen(topo.groups().size(), false);
  for (const auto& [id, is_closed] : switch_states) {
    if (topo.tie_switch() && id == *topo.tie_switch()) continue;
    const auto idx = topo.sectionalizer_index(id);
    if (!idx) throw LookupError("unknown switch id '" + id + "'");
    closed[*idx] = is_closed;
    seen[*idx] = true;
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) throw LookupError("switch state missing for '" + topo.groups()[i].sectionalizer + "'");
  }
  std::vector<std::uint8_t> on(feeder.devices().size(), 1);
  for (const auto& [id, flag] : device_on) {
    const auto idx = feeder.device_index(id);
    if (!idx) throw LookupError("unknown device id '" + id + "'");
    on[*idx] = flag ? 1 : 0;
  }
  return feeder.aggregate(topo.energized(closed), on, profiles, t).s_pu;
}

std::pair<BusVoltages, VoltageState> bus_voltages(const PowerTriplet& s, const FeederElectrical& electrical,
                                                  const VoltageState& prev, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("bus_voltages requires dt > 0");
  const double decay = std::exp(-dt / electrical.voltage_time_constant);
  VoltageState next = prev;
  BusVoltages v;
  const auto nominal = nominal_voltages();
  for (Phase p : kPhases) {
    const double step = std::abs(s[p] - prev.prev_s[p]);
    double m = 1.0 + (prev.pcc_magnitude[p] - 1.0) * decay - electrical.voltage_sag_gain * step;
    if (m < 0.0) m = 0.0;
    next.pcc_magnitude[p] = m;
    v.pcc[p] = Phasor(m, nominal[p].angle());
    const Complex vp = v.pcc[p].to_complex();
    const Complex current = m > 0.0 ? std::conj(Complex(s[p], 0.0) / vp) : Complex{};
    v.load_bus[p] = Phasor::from_complex(vp - electrical.impedance_pu[p] * current);
  }
  next.prev_s = s;
  return {v, next};
}

}  // namespace ufls
