// End-to-end checks of the command-line tool: exit codes, output files,
// golden CSV headers, and byte-level determinism, all through the real
// binary (path injected by the build as CRYOCHAIN_CLI_PATH).

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

int failures = 0;
const std::string cli = CRYOCHAIN_CLI_PATH;
fs::path base;
int dir_counter = 0;

void report(const char* name, bool pass, const std::string& detail) {
  std::printf("%s  %-34s %s\n", pass ? "PASS" : "FAIL", name, detail.c_str());
  if (!pass) ++failures;
}

fs::path fresh_dir() {
  fs::path d = base / ("case_" + std::to_string(dir_counter++));
  fs::create_directories(d);
  return d;
}

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run(const std::string& args) {
  const fs::path d = fresh_dir();
  const fs::path out = d / "stdout.txt";
  const fs::path err = d / "stderr.txt";
  const std::string cmd =
      "\"" + cli + "\" " + args + " > \"" + out.string() + "\" 2> \"" + err.string() + "\"";
  const int raw = std::system(cmd.c_str());
  const int code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return {code, slurp(out), slurp(err)};
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

bool starts_with(const std::string& s, const std::string& prefix) {
  return s.rfind(prefix, 0) == 0;
}

void check_help() {
  const RunResult res = run("--help");
  const bool subs = res.out.find("device") != std::string::npos &&
                    res.out.find("pll") != std::string::npos &&
                    res.out.find("ser") != std::string::npos &&
                    res.out.find("chain") != std::string::npos &&
                    res.out.find("power") != std::string::npos;
  report("help", res.code == 0 && subs,
         "exit=" + std::to_string(res.code) + " lists all five subcommands: " +
             (subs ? "yes" : "no"));
}

void check_unknown_subcommand() {
  const RunResult res = run("warp");
  report("unknown_subcommand", res.code == 2, "exit=" + std::to_string(res.code) + " (want 2)");
}

void check_chain_outputs() {
  const fs::path out = fresh_dir();
  const RunResult res = run("chain --out \"" + out.string() + "\"");
  const bool files = fs::exists(out / "chain_report.json") &&
                     fs::exists(out / "chain_report.csv") &&
                     fs::exists(out / "run_manifest.json");
  bool manifest_ok = false;
  bool report_ok = false;
  if (files) {
    const auto manifest = nlohmann::json::parse(slurp(out / "run_manifest.json"));
    manifest_ok = manifest["subcommand"] == "chain" && manifest["seed"] == 12648430 &&
                  manifest.contains("tool_version") && manifest.contains("start_time_utc") &&
                  manifest.contains("config_path") && manifest.contains("out_dir");
    const auto rep = nlohmann::json::parse(slurp(out / "chain_report.json"));
    report_ok = rep["symbols"] == 4096 && rep["symbol_errors"] == 0 &&
                rep["irr_db"] == 200.0 && rep["fidelity"] == 1.0 &&
                starts_with(slurp(out / "chain_report.csv"), "metric,value\n");
  }
  report("chain_outputs", res.code == 0 && files && manifest_ok && report_ok,
         "exit=" + std::to_string(res.code) + " files=" + (files ? "all" : "missing") +
             " manifest=" + (manifest_ok ? "ok" : "bad") +
             " report=" + (report_ok ? "ok" : "bad"));
}

void check_chain_determinism() {
  const fs::path a = fresh_dir();
  const fs::path b = fresh_dir();
  const fs::path c = fresh_dir();
  run("chain --seed 5 --out \"" + a.string() + "\"");
  run("chain --seed 5 --out \"" + b.string() + "\"");
  run("chain --seed 6 --out \"" + c.string() + "\"");
  const std::string ra = slurp(a / "chain_report.json");
  const std::string rb = slurp(b / "chain_report.json");
  const std::string rc = slurp(c / "chain_report.json");
  report("chain_determinism", !ra.empty() && ra == rb && ra != rc,
         std::string("same seed twice identical: ") + (ra == rb ? "yes" : "no") +
             "  different seed differs: " + (ra != rc ? "yes" : "no"));
}

void check_chain_trials_flag() {
  const fs::path out = fresh_dir();
  const RunResult res = run("chain --trials 512 --out \"" + out.string() + "\"");
  bool ok = false;
  if (res.code == 0 && fs::exists(out / "chain_report.json")) {
    const auto rep = nlohmann::json::parse(slurp(out / "chain_report.json"));
    ok = rep["symbols"] == 512;
  }
  report("chain_trials_flag", ok, "exit=" + std::to_string(res.code) + " symbols==512");
}

void check_ser_sweep() {
  const fs::path a = fresh_dir();
  const fs::path b = fresh_dir();
  const std::string args = "ser --trials 2000 --out \"";
  const RunResult res = run(args + a.string() + "\"");
  run(args + b.string() + "\"");
  const std::string csv = slurp(a / "ser_sweep.csv");
  const bool header = starts_with(csv, "es_n0_db,ser_analytic,ser_mc,ci_lo,ci_hi\n");
  std::size_t lines = 0;
  for (char ch : csv)
    if (ch == '\n') ++lines;
  const bool stable = csv == slurp(b / "ser_sweep.csv") && !csv.empty();
  report("ser_sweep", res.code == 0 && header && lines == 22 && stable,
         "exit=" + std::to_string(res.code) + " header=" + (header ? "ok" : "bad") +
             " lines=" + std::to_string(lines) + " (want 22) runs identical: " +
             (stable ? "yes" : "no"));
}

void check_ser_bad_ranges() {
  const RunResult empty = run("ser --db-min 5 --db-max 0 --out \"" + fresh_dir().string() + "\"");
  const RunResult step = run("ser --db-step 0 --out \"" + fresh_dir().string() + "\"");
  report("ser_bad_ranges", empty.code == 2 && step.code == 2,
         "empty range exit=" + std::to_string(empty.code) + " zero step exit=" +
             std::to_string(step.code) + " (want 2,2)");
}

void check_ser_too_few_trials() {
  const RunResult res = run("ser --trials 500 --db-min 10 --db-max 10 --out \"" +
                            fresh_dir().string() + "\"");
  report("ser_too_few_trials", res.code == 3,
         "exit=" + std::to_string(res.code) + " (want 3: numerical precondition)");
}

void check_config_unknown_key() {
  const fs::path cfg = base / "unknown_key.json";
  write_text(cfg, R"({"pll": {"bogus": 1.0}})");
  const RunResult res =
      run("chain --config \"" + cfg.string() + "\" --out \"" + fresh_dir().string() + "\"");
  const bool names_path = res.err.find("pll.bogus") != std::string::npos;
  report("config_unknown_key", res.code == 2 && names_path,
         "exit=" + std::to_string(res.code) + " stderr names pll.bogus: " +
             (names_path ? "yes" : "no"));
}

void check_config_bad_step() {
  const fs::path cfg = base / "bad_dt.json";
  write_text(cfg, R"({"pll_sim": {"dt_scale": 0.2}})");
  const RunResult res =
      run("pll --config \"" + cfg.string() + "\" --out \"" + fresh_dir().string() + "\"");
  report("config_bad_step", res.code == 2, "exit=" + std::to_string(res.code) + " (want 2)");
}

void check_config_missing_file() {
  const RunResult res = run("chain --config /nonexistent/nope.json --out \"" +
                            fresh_dir().string() + "\"");
  report("config_missing_file", res.code == 2, "exit=" + std::to_string(res.code) + " (want 2)");
}

void check_device_table() {
  const fs::path out = fresh_dir();
  const RunResult res = run("device --temps 300,4 --out \"" + out.string() + "\"");
  const std::string csv = slurp(out / "device_table.csv");
  const bool header = starts_with(csv,
                                  "temperature_k,mobility_factor,threshold_voltage_v,"
                                  "subthreshold_swing_v_per_dec,thermal_noise_v_per_sqrt_hz,"
                                  "noise_power_reduction\n");
  const bool room = csv.find("\n300,1,") != std::string::npos;
  const bool cold = csv.find("\n4,") != std::string::npos;
  const bool human = res.out.find("Carrier Mobility") != std::string::npos;
  report("device_table", res.code == 0 && header && room && cold && human,
         "exit=" + std::to_string(res.code) + " header=" + (header ? "ok" : "bad") +
             " rows at 300K and 4K: " + (room && cold ? "yes" : "no"));
}

void check_pll_outputs() {
  const fs::path out = fresh_dir();
  const RunResult res = run("pll --out \"" + out.string() + "\"");
  const std::string csv = slurp(out / "pll_trajectory.csv");
  const bool header = starts_with(csv, "time_s,v_error,v_ctrl,phase_error_rad\n");
  bool summary_ok = false;
  if (fs::exists(out / "pll_summary.json")) {
    const auto j = nlohmann::json::parse(slurp(out / "pll_summary.json"));
    summary_ok = j["omega_n_rad_per_s"].get<double>() > 7000.0 &&
                 j["omega_n_rad_per_s"].get<double>() < 7150.0 &&
                 !j["lock_time_s"].is_null() && j["lock_time_s"].get<double>() < 2e-3;
  }
  report("pll_outputs", res.code == 0 && header && summary_ok,
         "exit=" + std::to_string(res.code) + " trajectory header=" + (header ? "ok" : "bad") +
             " summary locked fast: " + (summary_ok ? "yes" : "no"));
}

void check_power_table() {
  const fs::path out = fresh_dir();
  const RunResult res = run("power 100 2 1 1 --out \"" + out.string() + "\"");
  const std::string csv = slurp(out / "power_table.csv");
  const bool header = starts_with(csv, "node_nm,vdd_v,power_w,budget_fraction\n");
  const bool quarter = csv.find("0.025") != std::string::npos;
  report("power_table", res.code == 0 && header && quarter,
         "exit=" + std::to_string(res.code) + " header=" + (header ? "ok" : "bad") +
             " halving vdd quarters power: " + (quarter ? "yes" : "no"));
}

void check_format_selection() {
  const fs::path json_only = fresh_dir();
  const fs::path csv_only = fresh_dir();
  run("chain --format json --out \"" + json_only.string() + "\"");
  run("chain --format csv --out \"" + csv_only.string() + "\"");
  const bool json_side = fs::exists(json_only / "chain_report.json") &&
                         !fs::exists(json_only / "chain_report.csv") &&
                         fs::exists(json_only / "run_manifest.json");
  const bool csv_side = !fs::exists(csv_only / "chain_report.json") &&
                        fs::exists(csv_only / "chain_report.csv") &&
                        fs::exists(csv_only / "run_manifest.json");
  const RunResult bad = run("chain --format yaml --out \"" + fresh_dir().string() + "\"");
  report("format_selection", json_side && csv_side && bad.code == 2,
         std::string("json-only: ") + (json_side ? "ok" : "bad") +
             "  csv-only: " + (csv_side ? "ok" : "bad") +
             "  bad format exit=" + std::to_string(bad.code));
}

}  // namespace

int main() {
  base = fs::temp_directory_path() / "cryochain_cli_tests";
  fs::remove_all(base);
  fs::create_directories(base);

  check_help();
  check_unknown_subcommand();
  check_chain_outputs();
  check_chain_determinism();
  check_chain_trials_flag();
  check_ser_sweep();
  check_ser_bad_ranges();
  check_ser_too_few_trials();
  check_config_unknown_key();
  check_config_bad_step();
  check_config_missing_file();
  check_device_table();
  check_pll_outputs();
  check_power_table();
  check_format_selection();

  std::printf("%s\n", failures == 0 ? "all cli checks passed" : "cli checks FAILED");
  fs::remove_all(base);
  return failures;
}
