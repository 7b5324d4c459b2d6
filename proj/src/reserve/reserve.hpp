#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "core/events.hpp"
#include "core/phase.hpp"

namespace ufls {

enum class ReserveMode {
  PerPhase,       // appliances / smart meters, one setpoint per phase
  Sectionalizer,  // descending per-group setpoints, staged
  Disabled,       // no reserve management; f* held at nominal
};

std::string_view to_string(ReserveMode mode);
std::optional<ReserveMode> parse_reserve_mode(std::string_view text);

struct ReserveParams {
  double s_pr = 0.1;                 // power reserve requirement, p.u.
  double s_th_low = 0.87;            // recovery threshold, p.u.
  double ds_th = 0.5;                // step-change (ROCOLP) threshold, p.u.
  int ds_window = 1;                 // supervisory steps spanned by the step-change test
  double tau_trigger_normal = 0.02;  // s
  double tau_trigger_motor = 10.0;   // s
  double tau_th_rec = 0.02;          // s
  double tau_th_f = 1.0;             // phase-change dwell, s
  double f_ramp = 0.5;               // Hz/s
  ReserveMode mode = ReserveMode::PerPhase;
  PowerTriplet phase_setpoints{59.85, 59.55, 59.25};
  std::vector<double> stage_setpoints;  // strictly decreasing
  double stage_dwell = 1.0;             // s

  double s_th_up() const;

  friend bool operator==(const ReserveParams&, const ReserveParams&) = default;
};

// 1 - s_pr. Throws std::out_of_range unless 0 <= s_pr < 1.
double upper_threshold(double s_pr);

// Trigger delay for a load step: the motor delay when delta_s >= ds_th.
double classify_step(double delta_s, const ReserveParams& params);

struct BessControllerState {
  double f_star = kNominalHz;  // reference sent to the grid-forming inner loop
  double f_set = kNominalHz;   // target f_star is slewing toward
  bool lpr = false;            // low power reserve
  bool tr = false;             // UFLS triggered
  double t_trigger = 0.0;
  double t_rec = 0.0;
  double t_f = 0.0;
  double t_stage = 0.0;
  bool surge_latched = false;  // a step >= ds_th was seen during this lpr episode
  bool rec_running = false;
  bool was_low = false;        // every phase was under s_th_low on the previous tick
  std::optional<Phase> active_phase;
  std::optional<Phase> pending_phase;
  std::size_t sectionalizer_stage = 0;
  bool stage_timing = false;
  bool unrecoverable = false;
  double delta_s = 0.0;
  // Last ds_window + 1 power samples, oldest first; starts from an unloaded feeder.
  std::vector<PowerTriplet> history{PowerTriplet{}};
  std::int64_t trigger_ticks = 0;
  std::int64_t rec_ticks = 0;
  std::int64_t f_ticks = 0;
  std::int64_t stage_ticks = 0;

  friend bool operator==(const BessControllerState&, const BessControllerState&) = default;
};

// Controller transitions, stamped with time by the caller.
struct ControllerEvent {
  EventKind kind;
  std::string subject;
  double detail = 0.0;
};

using ControllerEvents = std::vector<ControllerEvent>;

// Low-reserve detection, surge rejection and recovery. Recovery is only
// timed while f_star sits on f_set. Both timers count the first sample of
// their condition as one step, since that sample shows the load as it was
// switched on the previous tick.
void step_trigger(BessControllerState& state, const PowerTriplet& s, const ReserveParams& params, double dt,
                  ControllerEvents* events = nullptr);

// Per-phase mode: choose the phase to shed, committing a change only after
// the candidate has been stable for tau_th_f.
void select_target_phase(BessControllerState& state, const PowerTriplet& s, const ReserveParams& params,
                         double dt);

// Sectionalizer mode: move to the next stage when reserve stays violated for
// stage_dwell after the current stage setpoint has been reached.
void advance_stage(BessControllerState& state, const PowerTriplet& s, const ReserveParams& params, double dt,
                   ControllerEvents* events = nullptr);

double select_setpoint(const BessControllerState& state, const ReserveParams& params);

// Moves f_star toward f_set by at most f_ramp * dt, landing exactly on f_set.
double ramp_reference(double f_star, double f_set, const ReserveParams& params, double dt);

// One supervisory tick. f_star first moves toward the previous target, then
// the target is updated. Returns the new f_star.
double step_bess(BessControllerState& state, const PowerTriplet& s, const ReserveParams& params, double dt,
                 ControllerEvents* events = nullptr);

}  // namespace ufls
