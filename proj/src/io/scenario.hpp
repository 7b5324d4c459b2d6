#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "grid/feeder.hpp"
#include "grid/profile.hpp"
#include "io/profiles.hpp"
#include "reserve/reserve.hpp"
#include "shedder/shedder.hpp"

namespace ufls {

// The `ufls:` section: fleet-wide device parameters.
struct UflsSettings {
  ReserveMode mode = ReserveMode::PerPhase;
  PowerTriplet phase_setpoints{59.85, 59.55, 59.25};
  double deadband = 0.05;
  double tau1_max = 10.0;
  double tau2 = 900.0;
  double tau_rand_max = 180.0;
  double sectionalizer_tau1 = 0.02;
  double sectionalizer_tau_rand_max = 0.0;
  double frequency_noise_std = 0.0;  // Hz, zero-mean sensor noise

  friend bool operator==(const UflsSettings&, const UflsSettings&) = default;
};

struct SwitchEvent {
  std::string switch_id;
  double close_time = 0.0;

  friend bool operator==(const SwitchEvent&, const SwitchEvent&) = default;
};

struct ProfileSource {
  std::optional<std::string> csv_path;  // resolved against the scenario directory
  std::optional<SynthSpec> synth;

  friend bool operator==(const ProfileSource&, const ProfileSource&) = default;
};

struct ScenarioConfig {
  std::string name = "scenario";
  double horizon = 10.0;
  double dt = 0.01;
  std::uint64_t seed = 0;
  int record_every = 1;

  FeederElectrical electrical;
  std::vector<LoadGroup> groups;                 // members filled from device entries
  std::vector<std::optional<double>> group_setpoints;  // sectionalizer trigger per group
  std::optional<std::string> tie_switch;
  std::vector<LoadDevice> devices;
  std::vector<std::string> device_groups;        // parallel to devices
  std::vector<bool> random_duty_offset;          // parallel to devices
  std::optional<MotorLoad> motor;
  std::vector<SwitchEvent> schedule;
  UflsSettings ufls;
  ReserveParams reserve;
  ProfileSource profile_source;
  LoadProfileSet profiles;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

// Unresolved scenario: the text plus everything layered on top of it.
struct ScenarioSource {
  std::string text;
  std::string base_dir = ".";
  std::vector<std::pair<std::string, std::string>> overrides;  // dotted key = YAML scalar
  std::optional<std::uint64_t> seed;

  static ScenarioSource from_file(const std::string& path);
};

// Parses, merges `extends`, applies overrides, resolves profiles and
// validates. Throws SyntaxError (with line/column) or ValidationError holding
// every issue found.
ScenarioConfig parse_scenario(const std::string& text, const std::string& base_dir = ".");
ScenarioConfig resolve_scenario(const ScenarioSource& source);

// Canonical YAML of a resolved config; parse(serialize(c)) == c.
std::string serialize_scenario(const ScenarioConfig& config);

// Content hashes (hex) of the whole resolved config and of the electrical
// topology only (groups, devices, motor, rating) respectively.
std::string config_fingerprint(const ScenarioConfig& config);
std::string topology_fingerprint(const ScenarioConfig& config);

// Feeder view with group memberships filled in.
Feeder build_feeder(const ScenarioConfig& config);

// Lowest trigger setpoint configured anywhere in the scenario.
double min_configured_setpoint(const ScenarioConfig& config);

}  // namespace ufls
