/* ufls.h - C interface to the islanded-microgrid UFLS simulator.
 *
 * All handles are opaque. Functions returning ufls_status leave a
 * thread-local error list behind on failure; read it with
 * ufls_last_error_count() / ufls_last_error(). Strings returned as
 * const char* stay valid until the owning handle is freed.
 */
#ifndef UFLS_UFLS_H
#define UFLS_UFLS_H

#include <stddef.h>
#include <stdint.h>

#if defined(UFLS_BUILDING)
#define UFLS_API __attribute__((visibility("default")))
#else
#define UFLS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ufls_status {
  UFLS_OK = 0,
  UFLS_ERR_ARGUMENT = 1,   /* null handle, bad index, malformed key */
  UFLS_ERR_SYNTAX = 2,     /* scenario text is not parseable */
  UFLS_ERR_VALIDATION = 3, /* parsed but violates a parameter rule */
  UFLS_ERR_IO = 4,         /* file missing, unreadable or unwritable */
  UFLS_ERR_LOOKUP = 5,     /* unknown id or topology mismatch */
  UFLS_ERR_SIMULATION = 6, /* run aborted (non-finite state) */
  UFLS_ERR_INTERNAL = 7
} ufls_status;

typedef struct ufls_scenario ufls_scenario;
typedef struct ufls_result ufls_result;

typedef struct ufls_metrics {
  double energy_served_mwh;
  double max_freq_deviation_hz;
  double max_pcc_voltage_deviation_pu;
  double puf_mean;
  double puf_max;
  double vuf_mean;
  double vuf_max;
  int64_t ufls_event_count;
  int64_t device_trip_count;
  int64_t device_reconnect_count;
  int64_t devices_tripped;
  int64_t device_count_participating;
} ufls_metrics;

typedef struct ufls_event {
  double t;
  const char* kind; /* device_trip, trigger_set, ... */
  const char* subject;
  double detail;
  uint64_t seq;
} ufls_event;

typedef struct ufls_sample {
  double t;
  double s[3]; /* per-phase p.u. */
  double f_star;
  double v_pcc[3];
  double puf; /* NaN while unloaded */
  double vuf;
} ufls_sample;

UFLS_API const char* ufls_version(void);
UFLS_API const char* ufls_status_name(ufls_status status);

/* Errors from the last failing call on this thread (all validation issues
 * are reported, in a deterministic order). NULL past the end. */
UFLS_API size_t ufls_last_error_count(void);
UFLS_API const char* ufls_last_error(size_t index);

/* Scenario handles. load() reads the file immediately; parsing happens on
 * validate()/run() so overrides can be layered first. */
UFLS_API ufls_status ufls_scenario_load(const char* path, ufls_scenario** out);
UFLS_API ufls_status ufls_scenario_from_text(const char* text, const char* base_dir, ufls_scenario** out);
UFLS_API void ufls_scenario_free(ufls_scenario* scenario);
UFLS_API ufls_status ufls_scenario_set(ufls_scenario* scenario, const char* dotted_key, const char* value);
UFLS_API ufls_status ufls_scenario_set_seed(ufls_scenario* scenario, uint64_t seed);
UFLS_API ufls_status ufls_scenario_validate(ufls_scenario* scenario);
UFLS_API ufls_status ufls_scenario_name(ufls_scenario* scenario, const char** out);
UFLS_API ufls_status ufls_scenario_fingerprint(ufls_scenario* scenario, const char** out);
/* Canonical YAML of the resolved scenario. */
UFLS_API ufls_status ufls_scenario_serialize(ufls_scenario* scenario, const char** out);

/* Runs the scenario with its (possibly overridden) seed. */
UFLS_API ufls_status ufls_run(ufls_scenario* scenario, ufls_result** out);
UFLS_API void ufls_result_free(ufls_result* result);

/* timeseries.csv, events.json and summary.json into dir. */
UFLS_API ufls_status ufls_result_write(const ufls_result* result, const char* dir);
UFLS_API ufls_status ufls_result_metrics(const ufls_result* result, ufls_metrics* out);
UFLS_API const char* ufls_result_summary_line(const ufls_result* result);
UFLS_API const char* ufls_result_events_json(const ufls_result* result);
UFLS_API size_t ufls_result_event_count(const ufls_result* result);
UFLS_API ufls_status ufls_result_event(const ufls_result* result, size_t index, ufls_event* out);
UFLS_API size_t ufls_result_sample_count(const ufls_result* result);
UFLS_API ufls_status ufls_result_sample(const ufls_result* result, size_t index, ufls_sample* out);
UFLS_API size_t ufls_result_group_count(const ufls_result* result);
UFLS_API ufls_status ufls_result_group_energy(const ufls_result* result, size_t index, const char** group,
                                              double* mwh);

/* Writes the comparison table of a against b as CSV. baseline may be NULL;
 * when given it must be a no-UFLS run on the same topology. */
UFLS_API ufls_status ufls_compare(const ufls_result* a, const ufls_result* b, const ufls_result* baseline,
                                  const char* csv_path);

/* Each range is "key=v1,v2" or "key=start:stop:step". Writes sweep.csv
 * content to csv_path. failed_rows counts rows that did not complete. */
UFLS_API ufls_status ufls_sweep(ufls_scenario* base, const char* const* ranges, size_t n_ranges, unsigned jobs,
                                const char* csv_path, size_t* rows, size_t* failed_rows);

UFLS_API uint64_t ufls_derive_seed(uint64_t base, uint64_t index);
/* Longest allowed tripping delay in seconds for a lowest setpoint in
 * [57, 60] Hz; NaN outside that range. */
UFLS_API double ufls_max_tripping_delay_bound(double f_min_hz);

#ifdef __cplusplus
}
#endif

#endif /* UFLS_UFLS_H */
