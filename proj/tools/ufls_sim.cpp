// ufls-sim: command-line front end over the C API.
#include <CLI11.hpp>

#include <cstdio>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ufls/ufls.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitRuntime = 2;

const char* kOutEnv = "UFLS_OUT_DIR";

int exit_code_for(ufls_status s) {
  switch (s) {
    case UFLS_OK:
      return kExitOk;
    case UFLS_ERR_ARGUMENT:
    case UFLS_ERR_SYNTAX:
    case UFLS_ERR_VALIDATION:
    case UFLS_ERR_IO:
    case UFLS_ERR_LOOKUP:
      return kExitInvalid;
    default:
      return kExitRuntime;
  }
}

int report(ufls_status s, const std::string& context) {
  for (size_t i = 0; i < ufls_last_error_count(); ++i) {
    std::fprintf(stderr, "ufls-sim: %s: %s error: %s\n", context.c_str(), ufls_status_name(s), ufls_last_error(i));
  }
  if (ufls_last_error_count() == 0) std::fprintf(stderr, "ufls-sim: %s: %s error\n", context.c_str(), ufls_status_name(s));
  return exit_code_for(s);
}

struct Common {
  std::string out;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
};

std::string out_dir(const Common& c, const std::string& fallback) {
  if (!c.out.empty()) return c.out;
  if (const char* env = std::getenv(kOutEnv); env && *env) return env;
  return fallback;
}

// Loads a scenario and layers --seed and --set on top. Returns exit code.
int open_scenario(const std::string& path, const Common& c, ufls_scenario** out) {
  ufls_status s = ufls_scenario_load(path.c_str(), out);
  if (s != UFLS_OK) return report(s, path);
  for (const auto& kv : c.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      std::fprintf(stderr, "ufls-sim: --set '%s': expected key=value\n", kv.c_str());
      return kExitInvalid;
    }
    ufls_scenario_set(*out, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str());
  }
  if (c.seed) ufls_scenario_set_seed(*out, *c.seed);
  s = ufls_scenario_validate(*out);
  if (s != UFLS_OK) return report(s, path);
  return kExitOk;
}

int cmd_run(const std::string& path, const Common& c) {
  ufls_scenario* sc = nullptr;
  if (int rc = open_scenario(path, c, &sc); rc != kExitOk) {
    ufls_scenario_free(sc);
    return rc;
  }
  ufls_result* r = nullptr;
  ufls_status s = ufls_run(sc, &r);
  if (s != UFLS_OK) {
    ufls_scenario_free(sc);
    return report(s, path);
  }
  const char* name = "run";
  ufls_scenario_name(sc, &name);
  const std::string dir = out_dir(c, (std::filesystem::path("ufls-out") / name).string());
  s = ufls_result_write(r, dir.c_str());
  int rc = kExitOk;
  if (s != UFLS_OK) {
    report(s, dir);
    rc = kExitRuntime;
  } else {
    std::printf("%s\n", ufls_result_summary_line(r));
  }
  ufls_result_free(r);
  ufls_scenario_free(sc);
  return rc;
}

int cmd_validate(const std::string& path, const Common& c) {
  ufls_scenario* sc = nullptr;
  const int rc = open_scenario(path, c, &sc);
  if (rc == kExitOk) {
    const char* name = "";
    const char* fp = "";
    ufls_scenario_name(sc, &name);
    ufls_scenario_fingerprint(sc, &fp);
    std::printf("%s valid fingerprint=%s\n", name, fp);
  }
  ufls_scenario_free(sc);
  return rc;
}

int cmd_compare(const std::vector<std::string>& paths, const std::string& baseline, const Common& c) {
  std::vector<std::string> all = paths;
  if (!baseline.empty()) all.push_back(baseline);
  std::vector<ufls_scenario*> scenarios(all.size(), nullptr);
  std::vector<ufls_result*> results(all.size(), nullptr);
  int rc = kExitOk;
  for (size_t i = 0; i < all.size() && rc == kExitOk; ++i) {
    rc = open_scenario(all[i], c, &scenarios[i]);
    if (rc != kExitOk) break;
    const ufls_status s = ufls_run(scenarios[i], &results[i]);
    if (s != UFLS_OK) rc = report(s, all[i]);
  }
  if (rc == kExitOk) {
    const std::string dir = out_dir(c, "ufls-out");
    const std::string csv = (std::filesystem::path(dir) / "comparison.csv").string();
    const ufls_status s = ufls_compare(results[0], results[1], baseline.empty() ? nullptr : results[2], csv.c_str());
    if (s != UFLS_OK) {
      rc = report(s, "compare");
    } else {
      for (size_t i = 0; i < paths.size(); ++i) std::printf("%s\n", ufls_result_summary_line(results[i]));
      std::printf("comparison written to %s\n", csv.c_str());
    }
  }
  for (auto* r : results) ufls_result_free(r);
  for (auto* s : scenarios) ufls_scenario_free(s);
  return rc;
}

int cmd_sweep(const std::string& path, const std::vector<std::string>& ranges, unsigned jobs, const Common& c) {
  ufls_scenario* sc = nullptr;
  ufls_status s = ufls_scenario_load(path.c_str(), &sc);
  if (s != UFLS_OK) return report(s, path);
  for (const auto& kv : c.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      std::fprintf(stderr, "ufls-sim: --set '%s': expected key=value\n", kv.c_str());
      ufls_scenario_free(sc);
      return kExitInvalid;
    }
    ufls_scenario_set(sc, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str());
  }
  if (c.seed) ufls_scenario_set_seed(sc, *c.seed);
  std::vector<const char*> argv;
  for (const auto& r : ranges) argv.push_back(r.c_str());
  const std::string dir = out_dir(c, "ufls-out");
  const std::string csv = (std::filesystem::path(dir) / "sweep.csv").string();
  size_t rows = 0;
  size_t failed = 0;
  s = ufls_sweep(sc, argv.data(), argv.size(), jobs, csv.c_str(), &rows, &failed);
  ufls_scenario_free(sc);
  if (s != UFLS_OK) return report(s, "sweep");
  std::printf("sweep rows=%zu not_ok=%zu written to %s\n", rows, failed, csv.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Islanded-microgrid UFLS simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ufls_version());

  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", common.out, std::string("Output directory (default: $") + kOutEnv + " or ./ufls-out)");
    sub->add_option("--set", common.sets, "Override a scenario value, dotted.key=value (repeatable)");
    sub->add_option("--seed", common.seed, "Override the scenario seed");
  };

  std::string scenario;
  auto* run = app.add_subcommand("run", "Run one scenario and write its outputs");
  run->add_option("--scenario,scenario", scenario, "Scenario file")->required();
  add_common(run);

  auto* validate = app.add_subcommand("validate", "Check a scenario and print its fingerprint");
  validate->add_option("--scenario,scenario", scenario, "Scenario file")->required();
  add_common(validate);

  std::vector<std::string> pair;
  std::string baseline;
  auto* compare = app.add_subcommand("compare", "Run two scenarios and tabulate their metrics");
  compare->add_option("--scenario,scenarios", pair, "Two scenario files")->required()->expected(2);
  compare->add_option("--baseline", baseline, "Optional no-UFLS scenario for unbalance deltas");
  add_common(compare);

  std::vector<std::string> ranges;
  unsigned jobs = 1;
  auto* sweep = app.add_subcommand("sweep", "Run the Cartesian product of parameter ranges");
  sweep->add_option("--scenario,scenario", scenario, "Scenario file")->required();
  sweep->add_option("--range", ranges, "key=v1,v2,... or key=start:stop:step (repeatable)");
  sweep->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  add_common(sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInvalid;
  }

  if (run->parsed()) return cmd_run(scenario, common);
  if (validate->parsed()) return cmd_validate(scenario, common);
  if (compare->parsed()) return cmd_compare(pair, baseline, common);
  if (sweep->parsed()) return cmd_sweep(scenario, ranges, jobs, common);
  return kExitInvalid;
}
