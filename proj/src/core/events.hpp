#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace ufls {

enum class EventKind {
  DeviceTrip,
  DeviceReconnect,
  TriggerSet,
  TriggerClear,
  SetpointChange,
  StageAdvance,
  ReserveUnrecoverable,
  SwitchClose,
  MotorStart,
};

std::string_view to_string(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view text);

// Ordered by (t, seq); seq is assigned by the engine in a fixed order.
struct EventRecord {
  double t = 0.0;
  EventKind kind = EventKind::TriggerSet;
  std::string subject;
  double detail = 0.0;
  std::uint64_t seq = 0;

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

}  // namespace ufls
