#include "io/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace ufls {

namespace fs = std::filesystem;

namespace {

constexpr int kMaxExtendsDepth = 8;

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "': file not found or unreadable");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? ".inf" : "-.inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

YAML::Node load_yaml(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw SyntaxError(e.msg, e.mark.line + 1, e.mark.column + 1);
  }
  if (!root || root.IsNull()) throw SyntaxError("scenario is empty", 1, 1);
  if (!root.IsMap()) throw SyntaxError("scenario root must be a mapping", root.Mark().line + 1, root.Mark().column + 1);
  return root;
}

// Maps merge key by key; everything else in the overlay replaces the base.
YAML::Node merge(const YAML::Node& base, const YAML::Node& overlay) {
  if (!base.IsMap() || !overlay.IsMap()) return YAML::Clone(overlay);
  YAML::Node out = YAML::Clone(base);
  for (const auto& kv : overlay) {
    const auto key = kv.first.as<std::string>();
    const YAML::Node existing = out[key];
    if (existing && existing.IsMap() && kv.second.IsMap()) {
      out[key] = merge(existing, kv.second);
    } else {
      out[key] = YAML::Clone(kv.second);
    }
  }
  return out;
}

YAML::Node load_with_extends(const std::string& text, const fs::path& base_dir, int depth) {
  YAML::Node root = load_yaml(text);
  const YAML::Node parent = root["extends"];
  if (!parent) return root;
  if (depth >= kMaxExtendsDepth) throw ValidationError({"extends: chain deeper than " + std::to_string(kMaxExtendsDepth)});
  const fs::path parent_path = base_dir / parent.as<std::string>();
  YAML::Node base = load_with_extends(read_text(parent_path), parent_path.parent_path(), depth + 1);
  root.remove("extends");
  return merge(base, root);
}

void apply_override(YAML::Node root, const std::string& key, const std::string& value) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    parts.push_back(key.substr(start, dot - start));
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  for (const auto& p : parts) {
    if (p.empty()) throw ValidationError({"override '" + key + "': empty path component"});
  }
  YAML::Node node;
  node.reset(root);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const bool last = i + 1 == parts.size();
    YAML::Node next;
    if (node.IsSequence()) {
      std::size_t idx = 0;
      const auto& p = parts[i];
      const auto [ptr, ec] = std::from_chars(p.data(), p.data() + p.size(), idx);
      if (ec != std::errc() || ptr != p.data() + p.size() || idx >= node.size()) {
        throw ValidationError({"override '" + key + "': '" + p + "' is not a valid index"});
      }
      if (last) {
        node[idx] = YAML::Load(value);
        return;
      }
      next.reset(node[idx]);
    } else if (node.IsMap() || node.IsNull()) {
      if (last) {
        node[parts[i]] = YAML::Load(value);
        return;
      }
      // Missing sections are created so overrides work on sparse files.
      if (!node[parts[i]] || node[parts[i]].IsNull()) node[parts[i]] = YAML::Node(YAML::NodeType::Map);
      next.reset(node[parts[i]]);
    } else {
      throw ValidationError({"override '" + key + "': '" + parts[i - 1] + "' is a scalar"});
    }
    node.reset(next);
  }
}

// Collects conversion and range problems with their source positions.
class Reader {
 public:
  std::vector<std::string> issues;

  static std::string where(const YAML::Node& n) {
    if (!n || n.Mark().is_null()) return "";
    return " (line " + std::to_string(n.Mark().line + 1) + ")";
  }

  void issue(const std::string& path, const std::string& what, const YAML::Node& at = YAML::Node()) {
    issues.push_back(path + ": " + what + where(at));
  }

  void check_keys(const YAML::Node& map, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!map || !map.IsMap()) return;
    for (const auto& kv : map) {
      const auto k = kv.first.as<std::string>();
      const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; });
      if (!known) issue(path.empty() ? k : path + "." + k, "unknown key", kv.first);
    }
  }

  YAML::Node map(const YAML::Node& parent, const char* key, const std::string& path) {
    const YAML::Node n = parent[key];
    if (n && !n.IsMap() && !n.IsNull()) {
      issue(join(path, key), "expected a mapping", n);
      return YAML::Node();
    }
    return n;
  }

  double number(const YAML::Node& parent, const char* key, double fallback, const std::string& path) {
    const YAML::Node n = parent ? parent[key] : YAML::Node();
    if (!n || n.IsNull()) return fallback;
    try {
      const double v = n.as<double>();
      if (std::isnan(v)) {
        issue(join(path, key), "must not be NaN", n);
        return fallback;
      }
      return v;
    } catch (const YAML::Exception&) {
      issue(join(path, key), "expected a number", n);
      return fallback;
    }
  }

  std::optional<double> opt_number(const YAML::Node& parent, const char* key, const std::string& path) {
    const YAML::Node n = parent ? parent[key] : YAML::Node();
    if (!n || n.IsNull()) return std::nullopt;
    return number(parent, key, 0.0, path);
  }

  std::int64_t integer(const YAML::Node& parent, const char* key, std::int64_t fallback, const std::string& path) {
    const YAML::Node n = parent ? parent[key] : YAML::Node();
    if (!n || n.IsNull()) return fallback;
    try {
      return n.as<std::int64_t>();
    } catch (const YAML::Exception&) {
      issue(join(path, key), "expected an integer", n);
      return fallback;
    }
  }

  std::uint64_t unsigned_integer(const YAML::Node& parent, const char* key, std::uint64_t fallback,
                                 const std::string& path) {
    const YAML::Node n = parent ? parent[key] : YAML::Node();
    if (!n || n.IsNull()) return fallback;
    try {
      return n.as<std::uint64_t>();
    } catch (const YAML::Exception&) {
      issue(join(path, key), "expected a non-negative integer", n);
      return fallback;
    }
  }

  std::optional<std::string> text(const YAML::Node& parent, const char* key, const std::string& path) {
    const YAML::Node n = parent ? parent[key] : YAML::Node();
    if (!n || n.IsNull()) return std::nullopt;
    if (!n.IsScalar()) {
      issue(join(path, key), "expected a string", n);
      return std::nullopt;
    }
    return n.Scalar();
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }
};

template <class F>
void for_each_item(Reader& r, const YAML::Node& parent, const char* key, const std::string& path, F&& f) {
  const YAML::Node seq = parent[key];
  if (!seq || seq.IsNull()) return;
  if (!seq.IsSequence()) {
    r.issue(Reader::join(path, key), "expected a list", seq);
    return;
  }
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const YAML::Node item = seq[i];
    const std::string item_path = Reader::join(path, key) + "[" + std::to_string(i) + "]";
    if (!item.IsMap()) {
      r.issue(item_path, "expected a mapping", item);
      continue;
    }
    f(item, item_path);
  }
}

Complex read_impedance(Reader& r, const YAML::Node& n, const std::string& path, Complex fallback) {
  if (!n || n.IsNull()) return fallback;
  r.check_keys(n, path, {"r", "x"});
  return {r.number(n, "r", fallback.real(), path), r.number(n, "x", fallback.imag(), path)};
}

SynthSpec read_synth(Reader& r, const YAML::Node& n, const std::string& path, std::uint64_t default_seed) {
  SynthSpec spec;
  r.check_keys(n, path, {"seed", "interval", "horizon", "profiles"});
  spec.seed = r.unsigned_integer(n, "seed", default_seed, path);
  spec.interval = r.number(n, "interval", spec.interval, path);
  spec.horizon = r.number(n, "horizon", spec.horizon, path);
  if (!(spec.interval > 0.0)) r.issue(path + ".interval", "must be > 0");
  if (!(spec.horizon >= 0.0)) r.issue(path + ".horizon", "must be >= 0");
  for_each_item(r, n, "profiles", path, [&](const YAML::Node& item, const std::string& ip) {
    r.check_keys(item, ip,
                 {"id", "base", "growth", "growth_start", "growth_end", "plateau_end", "decline", "floor", "noise",
                  "cross"});
    SynthProfileSpec p;
    p.id = r.text(item, "id", ip).value_or("");
    if (p.id.empty()) r.issue(ip + ".id", "required", item);
    p.base_kva = r.number(item, "base", 0.0, ip);
    p.growth_kva_per_s = r.number(item, "growth", 0.0, ip);
    p.growth_start = r.number(item, "growth_start", 0.0, ip);
    p.growth_end = r.number(item, "growth_end", p.growth_end, ip);
    p.plateau_end = r.number(item, "plateau_end", std::max(p.growth_end, p.growth_start), ip);
    if (item["plateau_end"] && !item["plateau_end"].IsNull()) {
      p.plateau_end = r.number(item, "plateau_end", p.plateau_end, ip);
    } else {
      p.plateau_end = p.growth_end;
    }
    p.decline_kva_per_s = r.number(item, "decline", 0.0, ip);
    p.floor_kva = r.number(item, "floor", 0.0, ip);
    p.noise = r.number(item, "noise", 0.0, ip);
    if (const YAML::Node cross = item["cross"]; cross && !cross.IsNull()) {
      r.check_keys(cross, ip + ".cross", {"time", "level"});
      const double t = r.number(cross, "time", 0.0, ip + ".cross");
      const double level = r.number(cross, "level", p.base_kva, ip + ".cross");
      if (!(t > p.growth_start)) {
        r.issue(ip + ".cross.time", "must be after growth_start", cross);
      } else {
        p.growth_kva_per_s = growth_for_crossing(p.base_kva, level, p.growth_start, t);
      }
    }
    if (p.base_kva < 0.0) r.issue(ip + ".base", "must be >= 0", item);
    if (p.noise < 0.0 || p.noise >= 1.0) r.issue(ip + ".noise", "must be in [0, 1)", item);
    if (p.plateau_end < p.growth_end) r.issue(ip + ".plateau_end", "must not precede growth_end", item);
    spec.profiles.push_back(std::move(p));
  });
  return spec;
}

ScenarioConfig read_config(const YAML::Node& root, const fs::path& base_dir, std::vector<std::string>& issues) {
  Reader r;
  ScenarioConfig c;
  r.check_keys(root, "",
               {"name", "seed", "horizon", "dt", "record_every", "electrical", "topology", "schedule", "motor", "ufls",
                "reserve", "profiles", "devices"});
  c.name = r.text(root, "name", "").value_or(c.name);
  c.seed = r.unsigned_integer(root, "seed", c.seed, "");
  c.horizon = r.number(root, "horizon", c.horizon, "");
  c.dt = r.number(root, "dt", c.dt, "");
  c.record_every = static_cast<int>(r.integer(root, "record_every", c.record_every, ""));
  if (!(c.dt > 0.0)) r.issue("dt", "must be > 0", root["dt"]);
  if (!(c.horizon >= c.dt)) r.issue("horizon", "must be >= dt", root["horizon"]);
  if (c.record_every < 1) r.issue("record_every", "must be >= 1", root["record_every"]);

  // electrical
  {
    const std::string p = "electrical";
    const YAML::Node e = r.map(root, "electrical", "");
    r.check_keys(e, p, {"bess_rating_kva", "impedance_pu", "voltage_sag_gain", "voltage_time_constant"});
    auto& el = c.electrical;
    el.bess_rating_kva = r.number(e, "bess_rating_kva", el.bess_rating_kva, p);
    const YAML::Node z = e ? e["impedance_pu"] : YAML::Node();
    if (z && z.IsMap() && (z["a"] || z["b"] || z["c"])) {
      r.check_keys(z, p + ".impedance_pu", {"a", "b", "c"});
      el.impedance_pu.a = read_impedance(r, z["a"], p + ".impedance_pu.a", el.impedance_pu.a);
      el.impedance_pu.b = read_impedance(r, z["b"], p + ".impedance_pu.b", el.impedance_pu.b);
      el.impedance_pu.c = read_impedance(r, z["c"], p + ".impedance_pu.c", el.impedance_pu.c);
    } else if (z && !z.IsNull()) {
      const Complex zz = read_impedance(r, z, p + ".impedance_pu", el.impedance_pu.a);
      el.impedance_pu = {zz, zz, zz};
    }
    el.voltage_sag_gain = r.number(e, "voltage_sag_gain", el.voltage_sag_gain, p);
    el.voltage_time_constant = r.number(e, "voltage_time_constant", el.voltage_time_constant, p);
    if (!(el.bess_rating_kva > 0.0)) r.issue(p + ".bess_rating_kva", "must be > 0");
    if (!(el.voltage_time_constant > 0.0)) r.issue(p + ".voltage_time_constant", "must be > 0");
    if (el.voltage_sag_gain < 0.0) r.issue(p + ".voltage_sag_gain", "must be >= 0");
  }

  // topology
  {
    const std::string p = "topology";
    const YAML::Node t = r.map(root, "topology", "");
    r.check_keys(t, p, {"groups", "tie_switch"});
    if (t) c.tie_switch = r.text(t, "tie_switch", p);
    if (t) {
      for_each_item(r, t, "groups", p, [&](const YAML::Node& g, const std::string& gp) {
        r.check_keys(g, gp, {"id", "sectionalizer", "upstream", "ufls_setpoint"});
        LoadGroup lg;
        lg.id = r.text(g, "id", gp).value_or("");
        lg.sectionalizer = r.text(g, "sectionalizer", gp).value_or("");
        lg.upstream = r.text(g, "upstream", gp);
        if (lg.id.empty()) r.issue(gp + ".id", "required", g);
        if (lg.sectionalizer.empty()) r.issue(gp + ".sectionalizer", "required", g);
        c.groups.push_back(std::move(lg));
        c.group_setpoints.push_back(r.opt_number(g, "ufls_setpoint", gp));
      });
    }
    if (c.groups.empty()) r.issue(p + ".groups", "at least one load group is required");
  }

  // schedule
  for_each_item(r, root, "schedule", "", [&](const YAML::Node& s, const std::string& sp) {
    r.check_keys(s, sp, {"switch", "close"});
    SwitchEvent ev;
    ev.switch_id = r.text(s, "switch", sp).value_or("");
    ev.close_time = r.number(s, "close", 0.0, sp);
    if (ev.close_time < 0.0) r.issue(sp + ".close", "must be >= 0", s);
    c.schedule.push_back(std::move(ev));
  });

  // motor
  if (const YAML::Node m = r.map(root, "motor", ""); m && !m.IsNull()) {
    const std::string p = "motor";
    r.check_keys(m, p, {"id", "group", "rated_kva", "surge_multiplier", "surge_duration", "running_fraction", "start"});
    MotorLoad motor;
    motor.id = r.text(m, "id", p).value_or(motor.id);
    motor.group = r.text(m, "group", p).value_or("");
    motor.rated_kva = r.number(m, "rated_kva", motor.rated_kva, p);
    motor.surge_multiplier = r.number(m, "surge_multiplier", motor.surge_multiplier, p);
    motor.surge_duration = r.number(m, "surge_duration", motor.surge_duration, p);
    motor.running_fraction = r.number(m, "running_fraction", motor.running_fraction, p);
    motor.start_time = r.number(m, "start", motor.start_time, p);
    if (!(motor.rated_kva > 0.0)) r.issue(p + ".rated_kva", "must be > 0", m);
    if (!(motor.surge_multiplier >= 1.0)) r.issue(p + ".surge_multiplier", "must be >= 1", m);
    if (!(motor.surge_duration > 0.0)) r.issue(p + ".surge_duration", "must be > 0", m);
    if (motor.running_fraction < 0.0) r.issue(p + ".running_fraction", "must be >= 0", m);
    c.motor = std::move(motor);
  }

  // ufls
  {
    const std::string p = "ufls";
    const YAML::Node u = r.map(root, "ufls", "");
    r.check_keys(u, p,
                 {"mode", "phase_setpoints", "deadband", "tau1_max", "tau2", "tau_rand_max", "sectionalizer_tau1",
                  "sectionalizer_tau_rand_max", "frequency_noise_std"});
    auto& us = c.ufls;
    if (const auto mode = r.text(u, "mode", p)) {
      if (const auto parsed = parse_reserve_mode(*mode)) {
        us.mode = *parsed;
      } else {
        r.issue(p + ".mode", "expected per_phase, sectionalizer or none", u["mode"]);
      }
    }
    if (const YAML::Node sp = u ? u["phase_setpoints"] : YAML::Node(); sp && !sp.IsNull()) {
      if (!sp.IsSequence() || sp.size() != 3) {
        r.issue(p + ".phase_setpoints", "expected [f_A, f_B, f_C]", sp);
      } else {
        for (std::size_t i = 0; i < 3; ++i) {
          try {
            us.phase_setpoints[kPhases[i]] = sp[i].as<double>();
          } catch (const YAML::Exception&) {
            r.issue(p + ".phase_setpoints[" + std::to_string(i) + "]", "expected a number", sp[i]);
          }
        }
      }
    }
    us.deadband = r.number(u, "deadband", us.deadband, p);
    us.tau1_max = r.number(u, "tau1_max", us.tau1_max, p);
    us.tau2 = r.number(u, "tau2", us.tau2, p);
    us.tau_rand_max = r.number(u, "tau_rand_max", us.tau_rand_max, p);
    us.sectionalizer_tau1 = r.number(u, "sectionalizer_tau1", us.sectionalizer_tau1, p);
    us.sectionalizer_tau_rand_max = r.number(u, "sectionalizer_tau_rand_max", us.sectionalizer_tau_rand_max, p);
    us.frequency_noise_std = r.number(u, "frequency_noise_std", us.frequency_noise_std, p);
  }

  // reserve
  {
    const std::string p = "reserve";
    const YAML::Node rs = r.map(root, "reserve", "");
    r.check_keys(rs, p,
                 {"s_pr", "s_th_low", "ds_th", "ds_window", "tau_trigger_normal", "tau_trigger_motor", "tau_th_rec",
                  "tau_th_f", "f_ramp", "stage_dwell"});
    auto& rp = c.reserve;
    rp.s_pr = r.number(rs, "s_pr", rp.s_pr, p);
    rp.s_th_low = r.number(rs, "s_th_low", rp.s_th_low, p);
    rp.ds_th = r.number(rs, "ds_th", rp.ds_th, p);
    rp.ds_window = static_cast<int>(r.integer(rs, "ds_window", rp.ds_window, p));
    rp.tau_trigger_normal = r.number(rs, "tau_trigger_normal", rp.tau_trigger_normal, p);
    rp.tau_trigger_motor = r.number(rs, "tau_trigger_motor", rp.tau_trigger_motor, p);
    rp.tau_th_rec = r.number(rs, "tau_th_rec", rp.tau_th_rec, p);
    rp.tau_th_f = r.number(rs, "tau_th_f", rp.tau_th_f, p);
    rp.f_ramp = r.number(rs, "f_ramp", rp.f_ramp, p);
    rp.stage_dwell = r.number(rs, "stage_dwell", rp.stage_dwell, p);
  }

  // profiles
  if (const YAML::Node pr = r.map(root, "profiles", ""); pr && !pr.IsNull()) {
    r.check_keys(pr, "profiles", {"csv", "synth"});
    if (const auto csv = r.text(pr, "csv", "profiles")) {
      c.profile_source.csv_path = (base_dir / *csv).lexically_normal().string();
    }
    if (const YAML::Node s = pr["synth"]; s && !s.IsNull()) {
      if (!s.IsMap()) {
        r.issue("profiles.synth", "expected a mapping", s);
      } else {
        c.profile_source.synth = read_synth(r, s, "profiles.synth", c.seed);
      }
    }
    if (c.profile_source.csv_path && c.profile_source.synth) {
      r.issue("profiles", "give either csv or synth, not both", pr);
    }
  }

  // devices
  for_each_item(r, root, "devices", "", [&](const YAML::Node& d, const std::string& dp) {
    r.check_keys(d, dp, {"id", "group", "phase", "kind", "rated_kva", "profile", "profile_scale", "duty", "count"});
    LoadDevice dev;
    dev.id = r.text(d, "id", dp).value_or("");
    if (dev.id.empty()) r.issue(dp + ".id", "required", d);
    const std::string group = r.text(d, "group", dp).value_or("");
    if (const auto ph = r.text(d, "phase", dp)) {
      if (const auto at = parse_attachment(*ph)) {
        dev.attachment = *at;
      } else {
        r.issue(dp + ".phase", "expected A, B, C or ABC", d["phase"]);
      }
    } else {
      r.issue(dp + ".phase", "required", d);
    }
    if (const auto kind = r.text(d, "kind", dp)) {
      if (const auto k = parse_load_kind(*kind)) {
        dev.kind = *k;
      } else {
        r.issue(dp + ".kind", "expected non_controllable, appliance or smart_meter", d["kind"]);
      }
    }
    dev.rated_kva = r.number(d, "rated_kva", 0.0, dp);
    if (!(dev.rated_kva > 0.0)) r.issue(dp + ".rated_kva", "must be > 0", d);
    dev.profile = r.text(d, "profile", dp);
    dev.profile_scale = r.number(d, "profile_scale", 1.0, dp);
    if (dev.profile_scale < 0.0) r.issue(dp + ".profile_scale", "must be >= 0", d);
    bool random_offset = false;
    if (const YAML::Node duty = d["duty"]; duty && !duty.IsNull()) {
      r.check_keys(duty, dp + ".duty", {"period", "on_fraction", "offset"});
      DutyCycle dc;
      dc.period_s = r.number(duty, "period", 0.0, dp + ".duty");
      dc.on_fraction = r.number(duty, "on_fraction", 1.0, dp + ".duty");
      if (const YAML::Node off = duty["offset"]; off && off.IsScalar() && off.Scalar() == "random") {
        random_offset = true;
      } else {
        dc.offset_s = r.number(duty, "offset", 0.0, dp + ".duty");
      }
      if (!(dc.period_s > 0.0)) r.issue(dp + ".duty.period", "must be > 0", duty);
      if (dc.on_fraction < 0.0 || dc.on_fraction > 1.0) r.issue(dp + ".duty.on_fraction", "must be in [0, 1]", duty);
      dev.native = dc;
    }
    const auto count = r.integer(d, "count", 1, dp);
    if (count < 1) r.issue(dp + ".count", "must be >= 1", d);
    for (std::int64_t k = 0; k < std::max<std::int64_t>(count, 1); ++k) {
      LoadDevice copy = dev;
      if (count > 1) {
        char suffix[24];
        std::snprintf(suffix, sizeof suffix, "_%03lld", static_cast<long long>(k));
        copy.id += suffix;
      }
      c.devices.push_back(std::move(copy));
      c.device_groups.push_back(group);
      c.random_duty_offset.push_back(random_offset);
    }
  });

  issues = std::move(r.issues);
  return c;
}

void resolve_profiles(ScenarioConfig& c, std::vector<std::string>& issues) {
  if (c.profile_source.csv_path) {
    try {
      c.profiles = load_profiles(read_text(*c.profile_source.csv_path));
    } catch (const ValidationError& e) {
      for (const auto& i : e.issues()) issues.push_back(*c.profile_source.csv_path + ": " + i);
    } catch (const std::exception& e) {
      issues.push_back(std::string("profiles.csv: ") + e.what());
    }
  } else if (c.profile_source.synth) {
    try {
      c.profiles = synth_profiles(*c.profile_source.synth);
    } catch (const std::exception& e) {
      issues.push_back(std::string("profiles.synth: ") + e.what());
    }
  }
}

// Read-stage issues come first so one pass reports everything.
void validate(ScenarioConfig& c, std::vector<std::string> issues) {
  resolve_profiles(c, issues);

  // Topology and membership.
  std::set<std::string> group_ids;
  std::set<std::string> switch_ids;
  for (const auto& g : c.groups) {
    if (!group_ids.insert(g.id).second) issues.push_back("topology.groups: duplicate id '" + g.id + "'");
    if (!switch_ids.insert(g.sectionalizer).second) {
      issues.push_back("topology.groups: sectionalizer '" + g.sectionalizer + "' used twice");
    }
  }
  for (const auto& g : c.groups) {
    if (g.upstream && !group_ids.count(*g.upstream)) {
      issues.push_back("topology.groups: '" + g.id + "' has unknown upstream '" + *g.upstream + "'");
    }
  }
  for (auto& g : c.groups) g.members.clear();
  std::set<std::string> device_ids;
  for (std::size_t i = 0; i < c.devices.size(); ++i) {
    const auto& d = c.devices[i];
    if (!device_ids.insert(d.id).second) issues.push_back("devices: duplicate id '" + d.id + "'");
    const auto it = std::find_if(c.groups.begin(), c.groups.end(), [&](const LoadGroup& g) { return g.id == c.device_groups[i]; });
    if (it == c.groups.end()) {
      issues.push_back("devices: '" + d.id + "' has unknown group '" + c.device_groups[i] + "'");
    } else {
      it->members.push_back(d.id);
    }
    if (d.profile && !c.profiles.count(*d.profile)) {
      issues.push_back("devices: '" + d.id + "' references unknown profile '" + *d.profile + "'");
    }
  }
  if (c.motor && !group_ids.count(c.motor->group)) {
    issues.push_back("motor.group: unknown group '" + c.motor->group + "'");
  }
  for (const auto& ev : c.schedule) {
    if (c.tie_switch && ev.switch_id == *c.tie_switch) {
      issues.push_back("schedule: tie switch '" + ev.switch_id + "' must stay open");
    } else if (!switch_ids.count(ev.switch_id)) {
      issues.push_back("schedule: unknown switch id '" + ev.switch_id + "'");
    }
  }
  if (c.tie_switch && switch_ids.count(*c.tie_switch)) {
    issues.push_back("topology.tie_switch: '" + *c.tie_switch + "' is also a sectionalizer");
  }
  if (std::none_of(issues.begin(), issues.end(), [](const std::string& i) { return i.rfind("topology", 0) == 0; })) {
    try {
      Topology check(c.groups, c.tie_switch);
    } catch (const ValidationError& e) {
      for (const auto& i : e.issues()) issues.push_back("topology: " + i);
    }
  }

  // UFLS device parameters.
  const auto& u = c.ufls;
  if (!(u.deadband > 0.0)) issues.push_back("ufls.deadband: must be > 0");
  if (u.tau1_max < 0.0) issues.push_back("ufls.tau1_max: must be >= 0");
  if (u.tau2 < 0.0) issues.push_back("ufls.tau2: must be >= 0");
  if (u.tau_rand_max < 0.0) issues.push_back("ufls.tau_rand_max: must be >= 0");
  if (u.sectionalizer_tau1 < 0.0) issues.push_back("ufls.sectionalizer_tau1: must be >= 0");
  if (u.sectionalizer_tau_rand_max < 0.0) issues.push_back("ufls.sectionalizer_tau_rand_max: must be >= 0");
  if (u.frequency_noise_std < 0.0) issues.push_back("ufls.frequency_noise_std: must be >= 0");
  std::vector<double> stages;
  for (const auto& sp : c.group_setpoints) {
    if (sp) stages.push_back(*sp);
  }
  std::sort(stages.begin(), stages.end(), std::greater<>());
  if (std::adjacent_find(stages.begin(), stages.end()) != stages.end()) {
    issues.push_back("topology.groups: sectionalizer setpoints must be distinct");
  }
  if (u.mode == ReserveMode::Sectionalizer && stages.empty()) {
    issues.push_back("ufls.mode: sectionalizer mode needs ufls_setpoint on at least one group");
  }
  const double f_min = min_configured_setpoint(c);
  for (double f : {u.phase_setpoints.a, u.phase_setpoints.b, u.phase_setpoints.c}) {
    if (!(f > 0.0 && f < kNominalHz)) issues.push_back("ufls.phase_setpoints: " + format_number(f) + " Hz must be below 60 Hz");
  }
  try {
    const double bound = max_tripping_delay_bound(f_min);
    auto check = [&](const char* key, double tau) {
      if (!(tau < bound)) {
        issues.push_back(std::string("ufls.") + key + ": " + format_number(tau) +
                         " s violates the DER ride-through limit 10^(1.7373*f_min - 100.116) = " +
                         format_number(std::round(bound * 1000.0) / 1000.0) + " s at the lowest setpoint f_min = " +
                         format_number(f_min) + " Hz");
      }
    };
    check("tau1_max", u.tau1_max);
    check("sectionalizer_tau1", u.sectionalizer_tau1);
  } catch (const std::out_of_range&) {
    issues.push_back("ufls: lowest trigger setpoint " + format_number(f_min) +
                     " Hz is outside the 57-60 Hz range the ride-through limit covers");
  }

  // Reserve controller.
  auto& rp = c.reserve;
  if (!(rp.s_pr >= 0.0 && rp.s_pr < 1.0)) {
    issues.push_back("reserve.s_pr: must be in [0, 1)");
  } else if (!(rp.s_th_low < rp.s_th_up())) {
    issues.push_back("reserve.s_th_low: must be below the upper threshold " + format_number(rp.s_th_up()));
  }
  if (!(rp.ds_th > 0.0)) issues.push_back("reserve.ds_th: must be > 0");
  if (rp.ds_window < 1) issues.push_back("reserve.ds_window: must be >= 1");
  if (!(rp.f_ramp > 0.0)) issues.push_back("reserve.f_ramp: must be > 0");
  for (auto [key, v] : {std::pair{"tau_trigger_normal", rp.tau_trigger_normal}, {"tau_trigger_motor", rp.tau_trigger_motor},
                        {"tau_th_rec", rp.tau_th_rec}, {"tau_th_f", rp.tau_th_f}, {"stage_dwell", rp.stage_dwell}}) {
    if (v < 0.0) issues.push_back(std::string("reserve.") + key + ": must be >= 0");
  }
  rp.mode = u.mode;
  rp.phase_setpoints = u.phase_setpoints;
  rp.stage_setpoints = stages;

  if (!issues.empty()) throw ValidationError(std::move(issues));
}

void emit_number(YAML::Emitter& out, const char* key, double v) {
  out << YAML::Key << key << YAML::Value << format_number(v);
}

}  // namespace

double min_configured_setpoint(const ScenarioConfig& c) {
  double f = std::min({c.ufls.phase_setpoints.a, c.ufls.phase_setpoints.b, c.ufls.phase_setpoints.c});
  for (const auto& sp : c.group_setpoints) {
    if (sp) f = std::min(f, *sp);
  }
  return f;
}

ScenarioSource ScenarioSource::from_file(const std::string& path) {
  ScenarioSource s;
  s.text = read_text(path);
  s.base_dir = fs::path(path).parent_path().string();
  if (s.base_dir.empty()) s.base_dir = ".";
  return s;
}

ScenarioConfig resolve_scenario(const ScenarioSource& source) {
  YAML::Node root = load_with_extends(source.text, source.base_dir, 0);
  for (const auto& [key, value] : source.overrides) {
    try {
      apply_override(root, key, value);
    } catch (const YAML::Exception& e) {
      throw ValidationError({"override '" + key + "': " + e.msg});
    }
  }
  if (source.seed) root["seed"] = std::to_string(*source.seed);
  std::vector<std::string> issues;
  ScenarioConfig c = read_config(root, source.base_dir, issues);
  validate(c, std::move(issues));
  return c;
}

ScenarioConfig parse_scenario(const std::string& text, const std::string& base_dir) {
  ScenarioSource s;
  s.text = text;
  s.base_dir = base_dir;
  return resolve_scenario(s);
}

std::string serialize_scenario(const ScenarioConfig& c) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << YAML::DoubleQuoted << c.name;
  out << YAML::Key << "seed" << YAML::Value << std::to_string(c.seed);
  emit_number(out, "horizon", c.horizon);
  emit_number(out, "dt", c.dt);
  out << YAML::Key << "record_every" << YAML::Value << std::to_string(c.record_every);

  out << YAML::Key << "electrical" << YAML::Value << YAML::BeginMap;
  emit_number(out, "bess_rating_kva", c.electrical.bess_rating_kva);
  out << YAML::Key << "impedance_pu" << YAML::Value << YAML::BeginMap;
  for (Phase p : kPhases) {
    const char key[2] = {static_cast<char>('a' + static_cast<int>(p)), 0};
    out << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginMap;
    emit_number(out, "r", c.electrical.impedance_pu[p].real());
    emit_number(out, "x", c.electrical.impedance_pu[p].imag());
    out << YAML::EndMap;
  }
  out << YAML::EndMap;
  emit_number(out, "voltage_sag_gain", c.electrical.voltage_sag_gain);
  emit_number(out, "voltage_time_constant", c.electrical.voltage_time_constant);
  out << YAML::EndMap;

  out << YAML::Key << "topology" << YAML::Value << YAML::BeginMap;
  if (c.tie_switch) out << YAML::Key << "tie_switch" << YAML::Value << YAML::DoubleQuoted << *c.tie_switch;
  out << YAML::Key << "groups" << YAML::Value << YAML::BeginSeq;
  for (std::size_t g = 0; g < c.groups.size(); ++g) {
    out << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "id" << YAML::Value << YAML::DoubleQuoted << c.groups[g].id;
    out << YAML::Key << "sectionalizer" << YAML::Value << YAML::DoubleQuoted << c.groups[g].sectionalizer;
    if (c.groups[g].upstream) out << YAML::Key << "upstream" << YAML::Value << YAML::DoubleQuoted << *c.groups[g].upstream;
    if (c.group_setpoints[g]) emit_number(out, "ufls_setpoint", *c.group_setpoints[g]);
    out << YAML::EndMap;
  }
  out << YAML::EndSeq << YAML::EndMap;

  out << YAML::Key << "schedule" << YAML::Value << YAML::BeginSeq;
  for (const auto& ev : c.schedule) {
    out << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "switch" << YAML::Value << YAML::DoubleQuoted << ev.switch_id;
    emit_number(out, "close", ev.close_time);
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  if (c.motor) {
    const auto& m = *c.motor;
    out << YAML::Key << "motor" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "id" << YAML::Value << YAML::DoubleQuoted << m.id;
    out << YAML::Key << "group" << YAML::Value << YAML::DoubleQuoted << m.group;
    emit_number(out, "rated_kva", m.rated_kva);
    emit_number(out, "surge_multiplier", m.surge_multiplier);
    emit_number(out, "surge_duration", m.surge_duration);
    emit_number(out, "running_fraction", m.running_fraction);
    emit_number(out, "start", m.start_time);
    out << YAML::EndMap;
  }

  const auto& u = c.ufls;
  out << YAML::Key << "ufls" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "mode" << YAML::Value << std::string(to_string(u.mode));
  out << YAML::Key << "phase_setpoints" << YAML::Value << YAML::Flow << YAML::BeginSeq
      << format_number(u.phase_setpoints.a) << format_number(u.phase_setpoints.b) << format_number(u.phase_setpoints.c)
      << YAML::EndSeq;
  emit_number(out, "deadband", u.deadband);
  emit_number(out, "tau1_max", u.tau1_max);
  emit_number(out, "tau2", u.tau2);
  emit_number(out, "tau_rand_max", u.tau_rand_max);
  emit_number(out, "sectionalizer_tau1", u.sectionalizer_tau1);
  emit_number(out, "sectionalizer_tau_rand_max", u.sectionalizer_tau_rand_max);
  emit_number(out, "frequency_noise_std", u.frequency_noise_std);
  out << YAML::EndMap;

  const auto& rp = c.reserve;
  out << YAML::Key << "reserve" << YAML::Value << YAML::BeginMap;
  emit_number(out, "s_pr", rp.s_pr);
  emit_number(out, "s_th_low", rp.s_th_low);
  emit_number(out, "ds_th", rp.ds_th);
  out << YAML::Key << "ds_window" << YAML::Value << std::to_string(rp.ds_window);
  emit_number(out, "tau_trigger_normal", rp.tau_trigger_normal);
  emit_number(out, "tau_trigger_motor", rp.tau_trigger_motor);
  emit_number(out, "tau_th_rec", rp.tau_th_rec);
  emit_number(out, "tau_th_f", rp.tau_th_f);
  emit_number(out, "f_ramp", rp.f_ramp);
  emit_number(out, "stage_dwell", rp.stage_dwell);
  out << YAML::EndMap;

  if (c.profile_source.csv_path || c.profile_source.synth) {
    out << YAML::Key << "profiles" << YAML::Value << YAML::BeginMap;
    if (c.profile_source.csv_path) {
      out << YAML::Key << "csv" << YAML::Value << YAML::DoubleQuoted << *c.profile_source.csv_path;
    } else {
      const auto& s = *c.profile_source.synth;
      out << YAML::Key << "synth" << YAML::Value << YAML::BeginMap;
      out << YAML::Key << "seed" << YAML::Value << std::to_string(s.seed);
      emit_number(out, "interval", s.interval);
      emit_number(out, "horizon", s.horizon);
      out << YAML::Key << "profiles" << YAML::Value << YAML::BeginSeq;
      for (const auto& p : s.profiles) {
        out << YAML::Flow << YAML::BeginMap;
        out << YAML::Key << "id" << YAML::Value << YAML::DoubleQuoted << p.id;
        emit_number(out, "base", p.base_kva);
        emit_number(out, "growth", p.growth_kva_per_s);
        emit_number(out, "growth_start", p.growth_start);
        if (std::isfinite(p.growth_end)) emit_number(out, "growth_end", p.growth_end);
        if (std::isfinite(p.plateau_end)) emit_number(out, "plateau_end", p.plateau_end);
        emit_number(out, "decline", p.decline_kva_per_s);
        emit_number(out, "floor", p.floor_kva);
        emit_number(out, "noise", p.noise);
        out << YAML::EndMap;
      }
      out << YAML::EndSeq << YAML::EndMap;
    }
    out << YAML::EndMap;
  }

  out << YAML::Key << "devices" << YAML::Value << YAML::BeginSeq;
  for (std::size_t i = 0; i < c.devices.size(); ++i) {
    const auto& d = c.devices[i];
    out << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "id" << YAML::Value << YAML::DoubleQuoted << d.id;
    out << YAML::Key << "group" << YAML::Value << YAML::DoubleQuoted << c.device_groups[i];
    out << YAML::Key << "phase" << YAML::Value << std::string(to_string(d.attachment));
    out << YAML::Key << "kind" << YAML::Value << std::string(to_string(d.kind));
    emit_number(out, "rated_kva", d.rated_kva);
    if (d.profile) {
      out << YAML::Key << "profile" << YAML::Value << YAML::DoubleQuoted << *d.profile;
      emit_number(out, "profile_scale", d.profile_scale);
    }
    if (d.native) {
      out << YAML::Key << "duty" << YAML::Value << YAML::BeginMap;
      emit_number(out, "period", d.native->period_s);
      emit_number(out, "on_fraction", d.native->on_fraction);
      if (c.random_duty_offset[i]) {
        out << YAML::Key << "offset" << YAML::Value << "random";
      } else {
        emit_number(out, "offset", d.native->offset_s);
      }
      out << YAML::EndMap;
    }
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

namespace {

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::uint64_t hash_profiles(const LoadProfileSet& profiles, std::uint64_t h) {
  for (const auto& [id, p] : profiles) {
    h = fnv1a64(id, h);
    for (std::size_t i = 0; i < p.times().size(); ++i) {
      h = fnv1a64(format_number(p.times()[i]), h);
      h = fnv1a64(format_number(p.values()[i]), h);
    }
  }
  return h;
}

}  // namespace

std::string config_fingerprint(const ScenarioConfig& c) {
  ScenarioConfig copy = c;
  // The CSV location does not matter, only its content.
  if (copy.profile_source.csv_path) copy.profile_source.csv_path = "<csv>";
  return hex64(hash_profiles(c.profiles, fnv1a64(serialize_scenario(copy))));
}

std::string topology_fingerprint(const ScenarioConfig& c) {
  std::ostringstream s;
  s << "rating=" << format_number(c.electrical.bess_rating_kva) << ';';
  if (c.tie_switch) s << "tie=" << *c.tie_switch << ';';
  for (const auto& g : c.groups) {
    s << "group=" << g.id << ',' << g.sectionalizer << ',' << g.upstream.value_or("") << ';';
  }
  for (std::size_t i = 0; i < c.devices.size(); ++i) {
    const auto& d = c.devices[i];
    s << "device=" << d.id << ',' << c.device_groups[i] << ',' << to_string(d.attachment) << ',' << to_string(d.kind)
      << ',' << format_number(d.rated_kva) << ',' << d.profile.value_or("") << ',' << format_number(d.profile_scale)
      << ';';
  }
  if (c.motor) {
    s << "motor=" << c.motor->id << ',' << c.motor->group << ',' << format_number(c.motor->rated_kva) << ';';
  }
  return hex64(hash_profiles(c.profiles, fnv1a64(s.str())));
}

Feeder build_feeder(const ScenarioConfig& c) {
  auto groups = c.groups;
  for (auto& g : groups) g.members.clear();
  for (std::size_t i = 0; i < c.devices.size(); ++i) {
    for (auto& g : groups) {
      if (g.id == c.device_groups[i]) g.members.push_back(c.devices[i].id);
    }
  }
  return Feeder(Topology(std::move(groups), c.tie_switch), c.devices, c.motor, c.electrical);
}

}  // namespace ufls
