#include "engine/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <thread>

#include "core/errors.hpp"
#include "core/rng.hpp"
#include "engine/engine.hpp"

namespace ufls {

namespace {

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double parse_double(const std::string& s, const std::string& spec) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || !std::isfinite(v)) throw ValidationError({"sweep range '" + spec + "': bad number '" + s + "'"});
  return v;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

}  // namespace

SweepAxis parse_sweep_axis(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) throw ValidationError({"sweep range '" + spec + "': expected key=values"});
  SweepAxis axis;
  axis.key = spec.substr(0, eq);
  const std::string rhs = spec.substr(eq + 1);
  if (rhs.empty()) return axis;
  if (rhs.find(':') != std::string::npos && rhs.find(',') == std::string::npos) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
      const auto c = rhs.find(':', start);
      parts.push_back(rhs.substr(start, c - start));
      if (c == std::string::npos) break;
      start = c + 1;
    }
    if (parts.size() != 3) throw ValidationError({"sweep range '" + spec + "': expected start:stop:step"});
    const double lo = parse_double(parts[0], spec);
    const double hi = parse_double(parts[1], spec);
    const double step = parse_double(parts[2], spec);
    if (!(step > 0.0)) throw ValidationError({"sweep range '" + spec + "': step must be > 0"});
    // Count first so accumulated round-off cannot add or drop the endpoint.
    const auto n = static_cast<long long>(std::floor((hi - lo) / step + 1e-9)) + 1;
    if (n > 100000) throw ValidationError({"sweep range '" + spec + "': more than 100000 values"});
    for (long long i = 0; i < n; ++i) axis.values.push_back(format_value(lo + static_cast<double>(i) * step));
    return axis;
  }
  std::size_t start = 0;
  while (true) {
    const auto c = rhs.find(',', start);
    const std::string v = rhs.substr(start, c - start);
    if (v.empty()) throw ValidationError({"sweep range '" + spec + "': empty value"});
    axis.values.push_back(v);
    if (c == std::string::npos) break;
    start = c + 1;
  }
  return axis;
}

std::string_view to_string(SweepStatus status) {
  switch (status) {
    case SweepStatus::Ok:
      return "ok";
    case SweepStatus::Invalid:
      return "invalid";
    case SweepStatus::Failed:
      return "failed";
  }
  return "failed";
}

std::vector<SweepRow> run_sweep(const ScenarioSource& base, const std::vector<SweepAxis>& axes, unsigned jobs) {
  std::size_t total = 1;
  for (const auto& a : axes) total *= a.values.size();
  std::vector<SweepRow> rows(total);
  for (std::size_t i = 0; i < total; ++i) {
    rows[i].index = i;
    std::size_t rem = i;
    rows[i].assignment.resize(axes.size());
    for (std::size_t k = axes.size(); k-- > 0;) {
      const auto n = axes[k].values.size();
      rows[i].assignment[k] = {axes[k].key, axes[k].values[rem % n]};
      rem /= n;
    }
  }

  // Seed for rows that never resolve; resolvable rows use their own config.
  std::uint64_t fallback_seed = base.seed.value_or(0);
  if (!base.seed && total > 0) {
    try {
      ScenarioSource plain = base;
      fallback_seed = resolve_scenario(plain).seed;
    } catch (const std::exception&) {
    }
  }

  auto work = [&](SweepRow& row) {
    row.seed = derive_seed(fallback_seed, row.index);
    ScenarioSource src = base;
    src.seed.reset();
    for (const auto& kv : row.assignment) src.overrides.push_back(kv);
    try {
      ScenarioConfig cfg = resolve_scenario(src);
      const std::uint64_t base_seed = base.seed.value_or(cfg.seed);
      row.seed = derive_seed(base_seed, row.index);
      row.metrics = run(cfg, row.seed).metrics;
    } catch (const ValidationError& e) {
      row.status = SweepStatus::Invalid;
      row.message = e.issues().empty() ? e.what() : e.issues().front();
    } catch (const SyntaxError& e) {
      row.status = SweepStatus::Invalid;
      row.message = e.what();
    } catch (const std::exception& e) {
      row.status = SweepStatus::Failed;
      row.message = e.what();
    }
  };

  const unsigned n_workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, jobs), std::max<std::size_t>(1, total)));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) work(rows[i]);
  };
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepAxis>& axes, const std::vector<SweepRow>& rows) {
  std::string out = "index";
  for (const auto& a : axes) out += "," + csv_field(a.key);
  out +=
      ",seed,status,energy_served_mwh,max_freq_deviation_hz,max_pcc_voltage_deviation_pu,puf_mean,puf_max,vuf_mean,"
      "vuf_max,ufls_event_count,device_trip_count,device_reconnect_count,message\n";
  char buf[512];
  for (const auto& r : rows) {
    out += std::to_string(r.index);
    for (const auto& kv : r.assignment) out += "," + csv_field(kv.second);
    const auto& m = r.metrics;
    std::snprintf(buf, sizeof buf, ",%llu,%s,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%lld,%lld,%lld,",
                  static_cast<unsigned long long>(r.seed), std::string(to_string(r.status)).c_str(),
                  m.energy_served_mwh, m.max_freq_deviation_hz, m.max_pcc_voltage_deviation_pu, m.puf_mean, m.puf_max,
                  m.vuf_mean, m.vuf_max, static_cast<long long>(m.ufls_event_count),
                  static_cast<long long>(m.device_trip_count), static_cast<long long>(m.device_reconnect_count));
    out += buf;
    out += csv_field(r.message);
    out += '\n';
  }
  return out;
}

}  // namespace ufls
