#include "io/writers.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "core/errors.hpp"

namespace ufls {

namespace {

void put_fixed(std::string& out, double v, int decimals) {
  if (std::isnan(v)) {
    out += "nan";
    return;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  // "-0.000000" and "0.000000" must not depend on the sign of a tiny value.
  if (buf[0] == '-') {
    bool all_zero = true;
    for (const char* p = buf + 1; *p; ++p) {
      if (*p != '0' && *p != '.') all_zero = false;
    }
    if (all_zero) {
      out += buf + 1;
      return;
    }
  }
  out += buf;
}

// Escapes the few characters ids could realistically contain.
std::string json_string(const std::string& s) {
  return nlohmann::json(s).dump();
}

double number_or_nan(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
}

}  // namespace

std::string timeseries_csv(const TimeSeries& ts) {
  std::string out = "t,S_a,S_b,S_c,f_star,V_a,V_b,V_c,PUF,VUF\n";
  out.reserve(ts.size() * 96 + out.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    put_fixed(out, ts.t[i], 3);
    for (Phase p : kPhases) {
      out += ',';
      put_fixed(out, ts.s[i][p], 6);
    }
    out += ',';
    put_fixed(out, ts.f_star[i], 6);
    for (Phase p : kPhases) {
      out += ',';
      put_fixed(out, ts.v_pcc[i][p], 6);
    }
    out += ',';
    put_fixed(out, ts.puf[i], 6);
    out += ',';
    put_fixed(out, ts.vuf[i], 6);
    out += '\n';
  }
  return out;
}

std::string events_json(const SimulationResult& result) {
  std::string out = "{\n  \"schema_version\": " + std::to_string(kEventsSchemaVersion) + ",\n  \"events\": [";
  bool first = true;
  for (const auto& e : result.events) {
    out += first ? "\n" : ",\n";
    first = false;
    out += "    {\"t\": ";
    put_fixed(out, e.t, 3);
    out += ", \"kind\": \"";
    out += to_string(e.kind);
    out += "\", \"subject\": ";
    out += json_string(e.subject);
    out += ", \"detail\": ";
    if (std::isfinite(e.detail)) {
      put_fixed(out, e.detail, 6);
    } else {
      out += "null";
    }
    out += '}';
  }
  out += first ? "]\n}\n" : "\n  ]\n}\n";
  return out;
}

std::string summary_json(const SimulationResult& r) {
  const auto& m = r.metrics;
  nlohmann::ordered_json j;
  j["schema_version"] = kSummarySchemaVersion;
  j["name"] = r.name;
  j["seed"] = r.seed;
  j["dt"] = r.dt;
  j["fingerprint"] = r.fingerprint;
  j["topology_fingerprint"] = r.topology_fingerprint;
  auto& jm = j["metrics"];
  jm["energy_served_mwh"] = m.energy_served_mwh;
  jm["max_freq_deviation_hz"] = m.max_freq_deviation_hz;
  jm["max_pcc_voltage_deviation_pu"] = m.max_pcc_voltage_deviation_pu;
  jm["puf_mean"] = m.puf_mean;
  jm["puf_max"] = m.puf_max;
  jm["vuf_mean"] = m.vuf_mean;
  jm["vuf_max"] = m.vuf_max;
  jm["ufls_event_count"] = m.ufls_event_count;
  jm["device_trip_count"] = m.device_trip_count;
  jm["device_reconnect_count"] = m.device_reconnect_count;
  jm["devices_tripped"] = m.devices_tripped;
  jm["device_count_participating"] = m.device_count_participating;
  jm["group_energy_mwh"] = nlohmann::ordered_json::object();
  for (const auto& [g, e] : m.group_energy_mwh) jm["group_energy_mwh"][g] = e;
  return j.dump(2) + "\n";
}

RunMetrics read_summary(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SyntaxError(e.what(), 1, static_cast<int>(e.byte));
  }
  RunMetrics m;
  try {
    const auto& jm = j.at("metrics");
    m.energy_served_mwh = number_or_nan(jm, "energy_served_mwh");
    m.max_freq_deviation_hz = number_or_nan(jm, "max_freq_deviation_hz");
    m.max_pcc_voltage_deviation_pu = number_or_nan(jm, "max_pcc_voltage_deviation_pu");
    m.puf_mean = number_or_nan(jm, "puf_mean");
    m.puf_max = number_or_nan(jm, "puf_max");
    m.vuf_mean = number_or_nan(jm, "vuf_mean");
    m.vuf_max = number_or_nan(jm, "vuf_max");
    m.ufls_event_count = jm.at("ufls_event_count").get<std::int64_t>();
    m.device_trip_count = jm.at("device_trip_count").get<std::int64_t>();
    m.device_reconnect_count = jm.at("device_reconnect_count").get<std::int64_t>();
    m.devices_tripped = jm.at("devices_tripped").get<std::int64_t>();
    m.device_count_participating = jm.at("device_count_participating").get<std::int64_t>();
    for (const auto& [g, e] : jm.at("group_energy_mwh").items()) m.group_energy_mwh[g] = e.get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError({std::string("summary.json: ") + e.what()});
  }
  return m;
}

std::string summary_line(const SimulationResult& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "%s seed=%llu ufls_events=%lld device_trips=%lld energy_served_mwh=%.4f max_df_hz=%.4f",
                r.name.c_str(), static_cast<unsigned long long>(r.seed),
                static_cast<long long>(r.metrics.ufls_event_count), static_cast<long long>(r.metrics.device_trip_count),
                r.metrics.energy_served_mwh, r.metrics.max_freq_deviation_hz);
  return buf;
}

void write_text_file(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  std::error_code ec;
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  out.flush();
  if (!out) throw IoError("write failed for '" + path + "'");
}

void write_outputs(const SimulationResult& result, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec && !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
  const fs::path d(dir);
  write_text_file((d / "timeseries.csv").string(), timeseries_csv(result.series));
  write_text_file((d / "events.json").string(), events_json(result));
  write_text_file((d / "summary.json").string(), summary_json(result));
}

}  // namespace ufls
