#include "engine/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "core/errors.hpp"
#include "core/rng.hpp"
#include "core/unbalance.hpp"
#include "engine/metrics.hpp"
#include "grid/feeder.hpp"
#include "reserve/reserve.hpp"
#include "shedder/shedder.hpp"

namespace ufls {

namespace {

// Schedule times are compared against k * dt, which carries round-off.
constexpr double kTimeEps = 1e-9;

// One autonomous UFLS controller: a sectionalizer or a controllable load.
struct Machine {
  std::string id;
  UflsParams params;
  UflsDeviceState state;
  RandomStream delays;
  RandomStream noise;
  std::optional<std::size_t> device;  // controllable load index
  std::optional<std::size_t> group;   // sectionalizer group index
};

std::vector<Machine> build_machines(const ScenarioConfig& sc, std::uint64_t seed) {
  std::vector<Machine> machines;
  const auto& u = sc.ufls;
  if (u.mode == ReserveMode::Sectionalizer) {
    for (std::size_t g = 0; g < sc.groups.size(); ++g) {
      if (!sc.group_setpoints[g]) continue;
      Machine m;
      m.id = sc.groups[g].sectionalizer;
      m.params.setpoints = {*sc.group_setpoints[g]};
      m.params.deadband = u.deadband;
      m.params.tau1_max = u.tau1_max;
      m.params.fixed_tau1 = u.sectionalizer_tau1;
      m.params.tau2 = u.tau2;
      m.params.tau_rand_max = u.sectionalizer_tau_rand_max;
      m.params.phase = Attachment::ThreePhase;
      m.group = g;
      machines.push_back(std::move(m));
    }
  } else if (u.mode == ReserveMode::PerPhase) {
    for (std::size_t i = 0; i < sc.devices.size(); ++i) {
      const auto& d = sc.devices[i];
      if (d.kind == LoadKind::NonControllable) continue;
      Machine m;
      m.id = d.id;
      if (is_three_phase(d.attachment)) {
        m.params.setpoints = {u.phase_setpoints.a, u.phase_setpoints.b, u.phase_setpoints.c};
      } else {
        m.params.setpoints = {u.phase_setpoints[phase_of(d.attachment)]};
      }
      m.params.deadband = u.deadband;
      m.params.tau1_max = u.tau1_max;
      m.params.tau2 = u.tau2;
      m.params.tau_rand_max = u.tau_rand_max;
      m.params.phase = d.attachment;
      m.device = i;
      machines.push_back(std::move(m));
    }
  }
  // Fixed id order keeps event sequence numbers independent of file order.
  std::sort(machines.begin(), machines.end(), [](const Machine& x, const Machine& y) { return x.id < y.id; });
  for (auto& m : machines) {
    m.delays = RandomStream(seed, "ufls/" + m.id);
    m.noise = RandomStream(seed, "noise/" + m.id);
    m.state = initial_device_state(m.params, m.delays);
  }
  return machines;
}

void check_finite(double v, const char* what, double t) {
  if (!std::isfinite(v)) {
    throw SimulationError(std::string("non-finite ") + what + " at t = " + std::to_string(t) + " s");
  }
}

}  // namespace

SimulationResult run(const ScenarioConfig& sc, std::uint64_t seed) {
  if (!(sc.dt > 0.0)) throw SimulationError("dt must be positive");
  // Native controllers: random phase offsets come from the run seed.
  ScenarioConfig resolved = sc;
  for (std::size_t i = 0; i < resolved.devices.size(); ++i) {
    auto& d = resolved.devices[i];
    if (d.native && i < sc.random_duty_offset.size() && sc.random_duty_offset[i]) {
      RandomStream rs(seed, "native/" + d.id);
      d.native->offset_s = rs.uniform(0.0, d.native->period_s);
    }
  }
  const Feeder feeder = build_feeder(resolved);
  const auto& topo = feeder.topology();
  const auto& devices = feeder.devices();
  const std::size_t n_groups = topo.groups().size();
  const std::size_t n_devices = devices.size();
  const double dt = sc.dt;
  const auto n_steps = static_cast<std::int64_t>(std::llround(sc.horizon / dt));

  std::vector<Machine> machines = build_machines(sc, seed);
  std::vector<int> device_machine(n_devices, -1);
  std::vector<int> group_machine(n_groups, -1);
  for (std::size_t k = 0; k < machines.size(); ++k) {
    if (machines[k].device) device_machine[*machines[k].device] = static_cast<int>(k);
    if (machines[k].group) group_machine[*machines[k].group] = static_cast<int>(k);
  }

  std::vector<std::pair<double, std::size_t>> schedule;  // (time, group)
  for (const auto& ev : sc.schedule) {
    const auto g = topo.sectionalizer_index(ev.switch_id);
    if (g) schedule.emplace_back(ev.close_time, *g);
  }
  std::stable_sort(schedule.begin(), schedule.end(),
                   [](const auto& x, const auto& y) { return x.first < y.first; });
  std::size_t next_switch = 0;
  bool motor_started = false;

  SimulationResult result;
  result.name = sc.name;
  result.seed = seed;
  result.dt = dt;
  result.fingerprint = config_fingerprint(sc);
  result.topology_fingerprint = topology_fingerprint(sc);
  for (const auto& d : devices) result.device_ids.push_back(d.id);
  for (const auto& g : topo.groups()) result.group_ids.push_back(g.id);
  const int record_every = std::max(1, sc.record_every);
  result.series.reserve(static_cast<std::size_t>(n_steps / record_every + 1));

  MetricsAccumulator metrics(dt, sc.electrical.phase_base_kva(), result.group_ids);
  metrics.set_participating(static_cast<std::int64_t>(machines.size()));

  std::vector<bool> scheduled_closed(n_groups, false);
  std::vector<bool> closed(n_groups, false);
  std::vector<std::uint8_t> device_on(n_devices, 0);
  std::vector<std::uint8_t> served(n_devices, 0);
  BessControllerState ctrl;
  VoltageState vstate;
  ControllerEvents ctrl_events;
  std::uint64_t seq = 0;
  auto emit = [&](double t, EventKind kind, std::string subject, double detail) {
    result.events.push_back({t, kind, std::move(subject), detail, seq++});
  };

  for (std::int64_t k = 0; k < n_steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    const std::size_t first_event = result.events.size();

    // Schedule.
    while (next_switch < schedule.size() && schedule[next_switch].first <= t + kTimeEps) {
      const auto [when, g] = schedule[next_switch++];
      scheduled_closed[g] = true;
      emit(t, EventKind::SwitchClose, topo.groups()[g].sectionalizer, when);
    }
    if (feeder.motor() && !motor_started && feeder.motor()->start_time <= t + kTimeEps) {
      motor_started = true;
      emit(t, EventKind::MotorStart, feeder.motor()->id, feeder.motor()->rated_kva);
    }

    // Loads.
    for (std::size_t g = 0; g < n_groups; ++g) {
      const int m = group_machine[g];
      closed[g] = scheduled_closed[g] && (m < 0 || machines[static_cast<std::size_t>(m)].state.u);
    }
    const auto energized = topo.energized(closed);
    for (std::size_t i = 0; i < n_devices; ++i) {
      const int m = device_machine[i];
      const bool command = m < 0 || machines[static_cast<std::size_t>(m)].state.u;
      device_on[i] = effective_on(devices[i].native_on(t), command) ? 1 : 0;
      const std::uint8_t now_served = (device_on[i] && energized[feeder.device_group(i)]) ? 1 : 0;
      if (now_served != served[i]) {
        served[i] = now_served;
        result.transitions.push_back({t, static_cast<std::uint32_t>(i), now_served != 0});
      }
    }
    const auto load = feeder.aggregate(energized, device_on, sc.profiles, t);
    for (Phase p : kPhases) check_finite(load.s_pu[p], "phase power", t);

    // Voltages.
    auto [volts, vnext] = bus_voltages(load.s_pu, sc.electrical, vstate, dt);
    vstate = vnext;
    PowerTriplet vmag{volts.pcc.a.magnitude(), volts.pcc.b.magnitude(), volts.pcc.c.magnitude()};
    double puf_value = std::numeric_limits<double>::quiet_NaN();
    if (avg_of(load.s_pu) > 0.0) puf_value = puf(load.s_pu);
    double vuf_value = std::numeric_limits<double>::quiet_NaN();
    try {
      vuf_value = vuf(volts.load_bus);
    } catch (const UndefinedMetricError&) {
    }

    // Supervisory controller.
    ctrl_events.clear();
    const double f_star = step_bess(ctrl, load.s_pu, sc.reserve, dt, &ctrl_events);
    check_finite(f_star, "frequency reference", t);
    for (auto& ce : ctrl_events) emit(t, ce.kind, std::move(ce.subject), ce.detail);

    // Devices.
    for (auto& m : machines) {
      double sensed = f_star;
      if (sc.ufls.frequency_noise_std > 0.0) sensed += sc.ufls.frequency_noise_std * m.noise.normal();
      const bool was_on = m.state.u;
      m.state = step_device(m.state, m.params, sensed, dt, m.delays);
      if (was_on && !m.state.u) emit(t, EventKind::DeviceTrip, m.id, sensed);
      if (!was_on && m.state.u) emit(t, EventKind::DeviceReconnect, m.id, sensed);
    }

    metrics.add(load.s_pu, f_star, vmag, puf_value, vuf_value, load.group_kva);
    metrics.add_events(std::span<const EventRecord>(result.events).subspan(first_event));
    if (k % record_every == 0) {
      auto& ts = result.series;
      ts.t.push_back(t);
      ts.s.push_back(load.s_pu);
      ts.f_star.push_back(f_star);
      ts.v_pcc.push_back(vmag);
      ts.puf.push_back(puf_value);
      ts.vuf.push_back(vuf_value);
    }
  }
  result.metrics = metrics.finish();
  return result;
}

}  // namespace ufls
