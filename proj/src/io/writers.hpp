#pragma once

#include <string>

#include "engine/result.hpp"

namespace ufls {

inline constexpr int kEventsSchemaVersion = 1;
inline constexpr int kSummarySchemaVersion = 1;

// timeseries.csv: t,S_a,S_b,S_c,f_star,V_a,V_b,V_c,PUF,VUF with fixed
// decimals; undefined PUF/VUF are written as "nan".
std::string timeseries_csv(const TimeSeries& series);

// events.json: {"schema_version": 1, "events": [{t, kind, subject, detail}]}.
std::string events_json(const SimulationResult& result);

// summary.json: run identity plus RunMetrics. Floats are written in
// shortest round-trip form so read_summary() gives back equal metrics.
std::string summary_json(const SimulationResult& result);
RunMetrics read_summary(const std::string& json_text);

// One line for the terminal; format is frozen (see README).
std::string summary_line(const SimulationResult& result);

// Writes the three files into dir (created if missing). Throws IoError.
void write_outputs(const SimulationResult& result, const std::string& dir);

// Writes text to path, creating parent directories. Throws IoError.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace ufls
