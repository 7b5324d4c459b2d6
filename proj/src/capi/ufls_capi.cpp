#include "ufls/ufls.h"

#include <cmath>
#include <exception>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "core/errors.hpp"
#include "core/rng.hpp"
#include "engine/compare.hpp"
#include "engine/engine.hpp"
#include "engine/sweep.hpp"
#include "io/scenario.hpp"
#include "io/writers.hpp"
#include "shedder/shedder.hpp"

struct ufls_scenario {
  ufls::ScenarioSource source;
  std::optional<ufls::ScenarioConfig> resolved;
  std::string fingerprint;
  std::string serialized;
};

struct ufls_result {
  ufls::SimulationResult result;
  std::string summary;
  std::string events_json;
  std::vector<std::string> kinds;
  std::vector<std::string> groups;
};

namespace {

thread_local std::vector<std::string> g_errors;

ufls_status fail(ufls_status status, std::string message) {
  g_errors.assign(1, std::move(message));
  return status;
}

// Translates the core's exceptions into status codes.
template <class F>
ufls_status guarded(F&& f) {
  g_errors.clear();
  try {
    f();
    return UFLS_OK;
  } catch (const ufls::ValidationError& e) {
    g_errors = e.issues();
    if (g_errors.empty()) g_errors.emplace_back(e.what());
    return UFLS_ERR_VALIDATION;
  } catch (const ufls::SyntaxError& e) {
    return fail(UFLS_ERR_SYNTAX, e.what());
  } catch (const ufls::IoError& e) {
    return fail(UFLS_ERR_IO, e.what());
  } catch (const ufls::LookupError& e) {
    return fail(UFLS_ERR_LOOKUP, e.what());
  } catch (const ufls::SimulationError& e) {
    return fail(UFLS_ERR_SIMULATION, e.what());
  } catch (const std::exception& e) {
    return fail(UFLS_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(UFLS_ERR_INTERNAL, "unknown error");
  }
}

const ufls::ScenarioConfig& resolve(ufls_scenario* s) {
  if (!s->resolved) {
    s->resolved = ufls::resolve_scenario(s->source);
    s->fingerprint = ufls::config_fingerprint(*s->resolved);
    s->serialized = ufls::serialize_scenario(*s->resolved);
  }
  return *s->resolved;
}

}  // namespace

extern "C" {

const char* ufls_version(void) { return "0.1.0"; }

const char* ufls_status_name(ufls_status status) {
  switch (status) {
    case UFLS_OK:
      return "ok";
    case UFLS_ERR_ARGUMENT:
      return "argument";
    case UFLS_ERR_SYNTAX:
      return "syntax";
    case UFLS_ERR_VALIDATION:
      return "validation";
    case UFLS_ERR_IO:
      return "io";
    case UFLS_ERR_LOOKUP:
      return "lookup";
    case UFLS_ERR_SIMULATION:
      return "simulation";
    case UFLS_ERR_INTERNAL:
      return "internal";
  }
  return "unknown";
}

size_t ufls_last_error_count(void) { return g_errors.size(); }

const char* ufls_last_error(size_t index) { return index < g_errors.size() ? g_errors[index].c_str() : nullptr; }

ufls_status ufls_scenario_load(const char* path, ufls_scenario** out) {
  if (!path || !out) return fail(UFLS_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto s = std::make_unique<ufls_scenario>();
    s->source = ufls::ScenarioSource::from_file(path);
    *out = s.release();
  });
}

ufls_status ufls_scenario_from_text(const char* text, const char* base_dir, ufls_scenario** out) {
  if (!text || !out) return fail(UFLS_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto s = std::make_unique<ufls_scenario>();
    s->source.text = text;
    s->source.base_dir = base_dir ? base_dir : ".";
    *out = s.release();
  });
}

void ufls_scenario_free(ufls_scenario* scenario) { delete scenario; }

ufls_status ufls_scenario_set(ufls_scenario* s, const char* key, const char* value) {
  if (!s || !key || !value) return fail(UFLS_ERR_ARGUMENT, "null argument");
  if (!*key) return fail(UFLS_ERR_ARGUMENT, "empty override key");
  g_errors.clear();
  s->source.overrides.emplace_back(key, value);
  s->resolved.reset();
  return UFLS_OK;
}

ufls_status ufls_scenario_set_seed(ufls_scenario* s, uint64_t seed) {
  if (!s) return fail(UFLS_ERR_ARGUMENT, "null argument");
  g_errors.clear();
  s->source.seed = seed;
  s->resolved.reset();
  return UFLS_OK;
}

ufls_status ufls_scenario_validate(ufls_scenario* s) {
  if (!s) return fail(UFLS_ERR_ARGUMENT, "null argument");
  return guarded([&] { resolve(s); });
}

ufls_status ufls_scenario_name(ufls_scenario* s, const char** out) {
  if (!s || !out) return fail(UFLS_ERR_ARGUMENT, "null argument");
  return guarded([&] { *out = resolve(s).name.c_str(); });
}

ufls_status ufls_scenario_fingerprint(ufls_scenario* s, const char** out) {
  if (!s || !out) return fail(UFLS_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    resolve(s);
    *out = s->fingerprint.c_str();
  });
}

ufls_status ufls_scenario_serialize(ufls_scenario* s, const char** out) {
  if (!s || !out) return fail(UFLS_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    resolve(s);
    *out = s->serialized.c_str();
  });
}

ufls_status ufls_run(ufls_scenario* s, ufls_result** out) {
  if (!s || !out) return fail(UFLS_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    const auto& cfg = resolve(s);
    auto r = std::make_unique<ufls_result>();
    r->result = ufls::run(cfg, cfg.seed);
    r->summary = ufls::summary_line(r->result);
    r->events_json = ufls::events_json(r->result);
    r->kinds.reserve(r->result.events.size());
    for (const auto& e : r->result.events) r->kinds.emplace_back(ufls::to_string(e.kind));
    for (const auto& [g, _] : r->result.metrics.group_energy_mwh) r->groups.push_back(g);
    *out = r.release();
  });
}

void ufls_result_free(ufls_result* result) { delete result; }

ufls_status ufls_result_write(const ufls_result* r, const char* dir) {
  if (!r || !dir) return fail(UFLS_ERR_ARGUMENT, "null argument");
  return guarded([&] { ufls::write_outputs(r->result, dir); });
}

ufls_status ufls_result_metrics(const ufls_result* r, ufls_metrics* out) {
  if (!r || !out) return fail(UFLS_ERR_ARGUMENT, "null argument");
  const auto& m = r->result.metrics;
  *out = {m.energy_served_mwh, m.max_freq_deviation_hz, m.max_pcc_voltage_deviation_pu, m.puf_mean, m.puf_max,
          m.vuf_mean,          m.vuf_max,               m.ufls_event_count,               m.device_trip_count,
          m.device_reconnect_count, m.devices_tripped,  m.device_count_participating};
  g_errors.clear();
  return UFLS_OK;
}

const char* ufls_result_summary_line(const ufls_result* r) { return r ? r->summary.c_str() : ""; }

const char* ufls_result_events_json(const ufls_result* r) { return r ? r->events_json.c_str() : ""; }

size_t ufls_result_event_count(const ufls_result* r) { return r ? r->result.events.size() : 0; }

ufls_status ufls_result_event(const ufls_result* r, size_t index, ufls_event* out) {
  if (!r || !out) return fail(UFLS_ERR_ARGUMENT, "null argument");
  if (index >= r->result.events.size()) return fail(UFLS_ERR_ARGUMENT, "event index out of range");
  const auto& e = r->result.events[index];
  *out = {e.t, r->kinds[index].c_str(), e.subject.c_str(), e.detail, e.seq};
  g_errors.clear();
  return UFLS_OK;
}

size_t ufls_result_sample_count(const ufls_result* r) { return r ? r->result.series.size() : 0; }

ufls_status ufls_result_sample(const ufls_result* r, size_t index, ufls_sample* out) {
  if (!r || !out) return fail(UFLS_ERR_ARGUMENT, "null argument");
  const auto& ts = r->result.series;
  if (index >= ts.size()) return fail(UFLS_ERR_ARGUMENT, "sample index out of range");
  *out = {ts.t[index],
          {ts.s[index].a, ts.s[index].b, ts.s[index].c},
          ts.f_star[index],
          {ts.v_pcc[index].a, ts.v_pcc[index].b, ts.v_pcc[index].c},
          ts.puf[index],
          ts.vuf[index]};
  g_errors.clear();
  return UFLS_OK;
}

size_t ufls_result_group_count(const ufls_result* r) { return r ? r->groups.size() : 0; }

ufls_status ufls_result_group_energy(const ufls_result* r, size_t index, const char** group, double* mwh) {
  if (!r || !group || !mwh) return fail(UFLS_ERR_ARGUMENT, "null argument");
  if (index >= r->groups.size()) return fail(UFLS_ERR_ARGUMENT, "group index out of range");
  *group = r->groups[index].c_str();
  *mwh = r->result.metrics.group_energy_mwh.at(r->groups[index]);
  g_errors.clear();
  return UFLS_OK;
}

ufls_status ufls_compare(const ufls_result* a, const ufls_result* b, const ufls_result* baseline,
                         const char* csv_path) {
  if (!a || !b || !csv_path) return fail(UFLS_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    const auto table = ufls::compare_runs(a->result, b->result, baseline ? &baseline->result : nullptr);
    ufls::write_text_file(csv_path, ufls::comparison_csv(table));
  });
}

ufls_status ufls_sweep(ufls_scenario* base, const char* const* ranges, size_t n_ranges, unsigned jobs,
                       const char* csv_path, size_t* rows, size_t* failed_rows) {
  if (!base || !csv_path || (n_ranges && !ranges)) return fail(UFLS_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    std::vector<ufls::SweepAxis> axes;
    for (size_t i = 0; i < n_ranges; ++i) axes.push_back(ufls::parse_sweep_axis(ranges[i]));
    const auto result = ufls::run_sweep(base->source, axes, jobs);
    ufls::write_text_file(csv_path, ufls::sweep_csv(axes, result));
    size_t failed = 0;
    for (const auto& row : result) {
      if (row.status != ufls::SweepStatus::Ok) ++failed;
    }
    if (rows) *rows = result.size();
    if (failed_rows) *failed_rows = failed;
  });
}

uint64_t ufls_derive_seed(uint64_t base, uint64_t index) { return ufls::derive_seed(base, index); }

double ufls_max_tripping_delay_bound(double f_min_hz) {
  try {
    return ufls::max_tripping_delay_bound(f_min_hz);
  } catch (const std::exception&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // extern "C"
