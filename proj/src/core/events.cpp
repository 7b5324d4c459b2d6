#include "core/events.hpp"

#include <array>
#include <utility>

namespace ufls {

namespace {

constexpr std::array<std::pair<EventKind, std::string_view>, 9> kNames{{
    {EventKind::DeviceTrip, "device_trip"},
    {EventKind::DeviceReconnect, "device_reconnect"},
    {EventKind::TriggerSet, "trigger_set"},
    {EventKind::TriggerClear, "trigger_clear"},
    {EventKind::SetpointChange, "setpoint_change"},
    {EventKind::StageAdvance, "stage_advance"},
    {EventKind::ReserveUnrecoverable, "reserve_unrecoverable"},
    {EventKind::SwitchClose, "switch_close"},
    {EventKind::MotorStart, "motor_start"},
}};

}  // namespace

std::string_view to_string(EventKind kind) {
  for (const auto& [k, name] : kNames) {
    if (k == kind) return name;
  }
  return "?";
}

std::optional<EventKind> parse_event_kind(std::string_view text) {
  for (const auto& [k, name] : kNames) {
    if (name == text) return k;
  }
  return std::nullopt;
}

}  // namespace ufls
