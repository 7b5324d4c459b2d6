#include "reserve/reserve.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ufls {

namespace {

constexpr double kTimerEps = 1e-9;

void advance_timer(std::int64_t& ticks, double& t, double dt) {
  ++ticks;
  t = static_cast<double>(ticks) * dt;
}

void start_timer(std::int64_t& ticks, double& t) {
  ticks = 0;
  t = 0.0;
}

// The load sampled on this tick already reflects device commands from the
// previous one, so a load-driven condition has held for one step when first seen.
void start_load_timer(std::int64_t& ticks, double& t, double dt) {
  ticks = 1;
  t = dt;
}

void reinitialize(BessControllerState& st) {
  st.tr = false;
  st.rec_running = false;
  start_timer(st.trigger_ticks, st.t_trigger);
  start_timer(st.rec_ticks, st.t_rec);
  start_timer(st.f_ticks, st.t_f);
  start_timer(st.stage_ticks, st.t_stage);
  st.stage_timing = false;
  st.active_phase.reset();
  st.pending_phase.reset();
  st.sectionalizer_stage = 0;
  st.unrecoverable = false;
}

std::string setpoint_subject(const BessControllerState& st, const ReserveParams& params) {
  if (!st.tr) return "nominal";
  if (params.mode == ReserveMode::PerPhase && st.active_phase) {
    return std::string(1, phase_letter(*st.active_phase));
  }
  return "stage" + std::to_string(st.sectionalizer_stage);
}

}  // namespace

std::string_view to_string(ReserveMode mode) {
  switch (mode) {
    case ReserveMode::PerPhase: return "per_phase";
    case ReserveMode::Sectionalizer: return "sectionalizer";
    case ReserveMode::Disabled: return "none";
  }
  return "?";
}

std::optional<ReserveMode> parse_reserve_mode(std::string_view text) {
  if (text == "per_phase") return ReserveMode::PerPhase;
  if (text == "sectionalizer") return ReserveMode::Sectionalizer;
  if (text == "none") return ReserveMode::Disabled;
  return std::nullopt;
}

double upper_threshold(double s_pr) {
  if (!(s_pr >= 0.0 && s_pr < 1.0)) {
    throw std::out_of_range("power reserve requirement must be in [0, 1), got " + std::to_string(s_pr));
  }
  return 1.0 - s_pr;
}

double ReserveParams::s_th_up() const { return upper_threshold(s_pr); }

double classify_step(double delta_s, const ReserveParams& params) {
  return delta_s < params.ds_th ? params.tau_trigger_normal : params.tau_trigger_motor;
}

void step_trigger(BessControllerState& st, const PowerTriplet& s, const ReserveParams& params, double dt,
                  ControllerEvents* events) {
  if (!(dt > 0.0)) throw std::invalid_argument("controller step requires dt > 0");
  const std::size_t window = static_cast<std::size_t>(params.ds_window < 1 ? 1 : params.ds_window);
  st.history.push_back(s);
  while (st.history.size() > window + 1) st.history.erase(st.history.begin());
  const PowerTriplet& past = st.history.front();
  st.delta_s = 0.0;
  for (Phase p : kPhases) st.delta_s = std::max(st.delta_s, std::abs(s[p] - past[p]));

  const double up = params.s_th_up();
  const bool was_lpr = st.lpr;
  st.lpr = max_of(s) > up;
  if (st.lpr) {
    if (!was_lpr) {
      start_load_timer(st.trigger_ticks, st.t_trigger, dt);
      st.surge_latched = false;
    } else {
      advance_timer(st.trigger_ticks, st.t_trigger, dt);
    }
    if (st.delta_s >= params.ds_th) st.surge_latched = true;
    const double delay = st.surge_latched ? params.tau_trigger_motor : params.tau_trigger_normal;
    if (!st.tr && st.t_trigger + kTimerEps >= delay) {
      reinitialize(st);
      st.tr = true;
      if (events) events->push_back({EventKind::TriggerSet, "BESS", delay});
    }
  } else {
    start_timer(st.trigger_ticks, st.t_trigger);
    st.surge_latched = false;
  }

  const bool all_low = max_of(s) < params.s_th_low;
  const bool newly_low = all_low && !st.was_low;
  st.was_low = all_low;
  if (st.tr) {
    // A descent in progress is finished before recovery is judged.
    const bool settled = st.f_star == st.f_set;
    if (!all_low || !settled) {
      st.rec_running = false;
      start_timer(st.rec_ticks, st.t_rec);
    } else {
      if (!st.rec_running) {
        st.rec_running = true;
        // Only a load change carries the one-step lag; settling happens on this tick.
        if (newly_low) {
          start_load_timer(st.rec_ticks, st.t_rec, dt);
        } else {
          start_timer(st.rec_ticks, st.t_rec);
        }
      } else {
        advance_timer(st.rec_ticks, st.t_rec, dt);
      }
      if (st.t_rec + kTimerEps >= params.tau_th_rec) {
        reinitialize(st);
        if (events) events->push_back({EventKind::TriggerClear, "BESS", max_of(s)});
      }
    }
  }
}

void select_target_phase(BessControllerState& st, const PowerTriplet& s, const ReserveParams& params,
                         double dt) {
  if (!st.tr) return;
  const double up = params.s_th_up();
  std::optional<Phase> candidate;
  for (Phase p : kPhases) {
    if (s[p] > up && (!candidate || s[p] > s[*candidate])) candidate = p;
  }
  if (!candidate) {
    // Keep shedding the heaviest phase until everything is under the low threshold.
    if (max_of(s) >= params.s_th_low || !st.active_phase) {
      candidate = argmax_of(s);
    } else {
      candidate = st.active_phase;
    }
  }
  if (!st.active_phase) {
    st.active_phase = candidate;
    st.pending_phase.reset();
    start_timer(st.f_ticks, st.t_f);
    return;
  }
  if (*candidate == *st.active_phase) {
    st.pending_phase.reset();
    start_timer(st.f_ticks, st.t_f);
    return;
  }
  if (st.pending_phase != candidate) {
    st.pending_phase = candidate;
    start_timer(st.f_ticks, st.t_f);
  } else {
    advance_timer(st.f_ticks, st.t_f, dt);
  }
  if (st.t_f + kTimerEps >= params.tau_th_f) {
    st.active_phase = st.pending_phase;
    st.pending_phase.reset();
    start_timer(st.f_ticks, st.t_f);
  }
}

void advance_stage(BessControllerState& st, const PowerTriplet& s, const ReserveParams& params, double dt,
                   ControllerEvents* events) {
  if (!st.tr || params.stage_setpoints.empty()) return;
  const bool settled = st.f_star == st.f_set;
  if (!settled || max_of(s) < params.s_th_low) {
    st.stage_timing = false;
    start_timer(st.stage_ticks, st.t_stage);
    return;
  }
  if (!st.stage_timing) {
    st.stage_timing = true;
    start_timer(st.stage_ticks, st.t_stage);
  } else {
    advance_timer(st.stage_ticks, st.t_stage, dt);
  }
  if (st.t_stage + kTimerEps < params.stage_dwell) return;
  st.stage_timing = false;
  start_timer(st.stage_ticks, st.t_stage);
  if (st.sectionalizer_stage + 1 < params.stage_setpoints.size()) {
    ++st.sectionalizer_stage;
    if (events) {
      events->push_back({EventKind::StageAdvance, "stage" + std::to_string(st.sectionalizer_stage),
                         static_cast<double>(st.sectionalizer_stage)});
    }
  } else if (!st.unrecoverable) {
    st.unrecoverable = true;
    if (events) events->push_back({EventKind::ReserveUnrecoverable, "BESS", max_of(s)});
  }
}

double select_setpoint(const BessControllerState& st, const ReserveParams& params) {
  if (!st.tr) return kNominalHz;
  switch (params.mode) {
    case ReserveMode::PerPhase:
      return st.active_phase ? params.phase_setpoints[*st.active_phase] : kNominalHz;
    case ReserveMode::Sectionalizer:
      if (params.stage_setpoints.empty()) return kNominalHz;
      return params.stage_setpoints[std::min(st.sectionalizer_stage, params.stage_setpoints.size() - 1)];
    case ReserveMode::Disabled:
      break;
  }
  return kNominalHz;
}

constexpr double kRampLandingEps = 1e-9;

double ramp_reference(double f_star, double f_set, const ReserveParams& params, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("ramp_reference requires dt > 0");
  const double max_step = params.f_ramp * dt;
  const double gap = f_set - f_star;
  // Rounding left over from many small steps must not cost an extra tick.
  if (std::abs(gap) <= max_step + kRampLandingEps) return f_set;
  return gap > 0.0 ? f_star + max_step : f_star - max_step;
}

double step_bess(BessControllerState& st, const PowerTriplet& s, const ReserveParams& params, double dt,
                 ControllerEvents* events) {
  if (params.mode == ReserveMode::Disabled) {
    st.f_set = kNominalHz;
    st.f_star = kNominalHz;
    return st.f_star;
  }
  // The reference moves toward the target chosen on earlier ticks, so a new
  // setpoint starts ramping on the next tick.
  st.f_star = ramp_reference(st.f_star, st.f_set, params, dt);
  step_trigger(st, s, params, dt, events);
  if (params.mode == ReserveMode::PerPhase) {
    select_target_phase(st, s, params, dt);
  } else {
    advance_stage(st, s, params, dt, events);
  }
  const double target = select_setpoint(st, params);
  if (target != st.f_set) {
    st.f_set = target;
    if (events) events->push_back({EventKind::SetpointChange, setpoint_subject(st, params), target});
  }
  return st.f_star;
}

}  // namespace ufls
