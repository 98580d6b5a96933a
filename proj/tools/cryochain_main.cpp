// Command-line front end: every experiment in the library as a subcommand,
// emitting plot-ready CSV and JSON reports plus a run manifest.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <cryochain/chain.hpp>
#include <cryochain/config_io.hpp>
#include <cryochain/report_io.hpp>

namespace fs = std::filesystem;

namespace {

struct GlobalOptions {
  std::string config_path;
  std::string out_dir = "cryochain_out";
  std::uint64_t seed = cryochain::kDefaultSeed;
  bool seed_given = false;
  std::uint64_t trials = 0;  // 0 = per-subcommand default
  std::string format = "both";

  bool want_json() const { return format != "csv"; }
  bool want_csv() const { return format != "json"; }
};

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw std::runtime_error("short write to " + path.string());
}

fs::path prepare_out_dir(const GlobalOptions& opts) {
  fs::path dir(opts.out_dir);
  fs::create_directories(dir);
  return dir;
}

void write_manifest(const GlobalOptions& opts, const fs::path& dir,
                    const std::string& subcommand) {
  auto manifest = cryochain::make_run_manifest(subcommand, opts.config_path, opts.seed,
                                               opts.out_dir);
  write_file(dir / "run_manifest.json", manifest.dump(2) + "\n");
}

cryochain::ChainConfig load_config(GlobalOptions& opts) {
  cryochain::ChainConfig cfg;
  if (!opts.config_path.empty()) cfg = cryochain::load_chain_config_file(opts.config_path);
  if (opts.seed_given)
    cfg.seed = opts.seed;
  else
    opts.seed = cfg.seed;
  return cfg;
}

std::string fixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, value);
  return buf;
}

// ---------------------------------------------------------------- device --

int cmd_device(GlobalOptions& opts, const std::vector<double>& temps) {
  const cryochain::ChainConfig cfg = load_config(opts);
  const auto rows = cryochain::device_table(cfg.device, temps);

  std::printf("%-28s", "Parameter");
  for (const auto& r : rows) std::printf("%16s", (fixed(r.temperature_k, 0) + " K").c_str());
  std::printf("\n");
  std::printf("%-28s", "Carrier Mobility");
  for (const auto& r : rows) std::printf("%16s", (fixed(r.mobility_factor, 3) + "x").c_str());
  std::printf("\n");
  std::printf("%-28s", "Threshold Voltage");
  for (const auto& r : rows)
    std::printf("%16s", (fixed(r.threshold_voltage_v, 3) + " V").c_str());
  std::printf("\n");
  std::printf("%-28s", "Subthreshold Swing");
  for (const auto& r : rows)
    std::printf("%16s", (fixed(r.subthreshold_swing_v_per_dec * 1e3, 3) + " mV").c_str());
  std::printf("\n");
  std::printf("%-28s", "Thermal Noise");
  for (const auto& r : rows)
    std::printf("%16s", (fixed(r.noise_power_reduction, 1) + "x less").c_str());
  std::printf("\n");

  const fs::path dir = prepare_out_dir(opts);
  if (opts.want_csv()) write_file(dir / "device_table.csv", cryochain::device_table_csv(rows));
  if (opts.want_json()) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : rows)
      arr.push_back({{"temperature_k", r.temperature_k},
                     {"mobility_factor", r.mobility_factor},
                     {"threshold_voltage_v", r.threshold_voltage_v},
                     {"subthreshold_swing_v_per_dec", r.subthreshold_swing_v_per_dec},
                     {"thermal_noise_v_per_sqrt_hz", r.thermal_noise_v_per_sqrt_hz},
                     {"noise_power_reduction", r.noise_power_reduction}});
    write_file(dir / "device_table.json", arr.dump(2) + "\n");
  }
  write_manifest(opts, dir, "device");
  return 0;
}

// ------------------------------------------------------------------- pll --

int cmd_pll(GlobalOptions& opts) {
  const cryochain::ChainConfig cfg = load_config(opts);
  const auto loop = cryochain::natural_frequency_and_damping(cfg.pll);
  const double dt = cfg.pll_sim.dt_scale / loop.omega_n;
  const auto traj = cryochain::simulate_lock(
      cfg.pll, cfg.pll.f_ref - cfg.pll_sim.f0_offset_hz, dt, cfg.pll_sim.t_max,
      cryochain::deg_to_rad(cfg.pll_sim.lock_tol_deg), cfg.pll_sim.initial_phase_error_rad);
  const double jitter = cryochain::post_lock_jitter_deg(traj);

  std::printf("omega_n   %s rad/s\n", fixed(loop.omega_n, 1).c_str());
  std::printf("zeta      %s\n", fixed(loop.zeta, 4).c_str());
  if (traj.lock_time) {
    std::printf("lock time %s ms\n", fixed(*traj.lock_time * 1e3, 4).c_str());
  } else {
    std::printf("lock time (not locked)\n");
    std::fprintf(stderr, "warning: loop did not lock within %s ms\n",
                 fixed(cfg.pll_sim.t_max * 1e3, 3).c_str());
  }
  std::printf("jitter    %s deg RMS\n", fixed(jitter, 4).c_str());

  const fs::path dir = prepare_out_dir(opts);
  if (opts.want_csv())
    write_file(dir / "pll_trajectory.csv", cryochain::pll_trajectory_csv(traj));
  if (opts.want_json()) {
    nlohmann::ordered_json summary = {
        {"omega_n_rad_per_s", loop.omega_n},
        {"zeta", loop.zeta},
        {"dt_s", dt},
        {"t_max_s", cfg.pll_sim.t_max},
        {"lock_time_s", nullptr},
        {"post_lock_jitter_rms_deg", jitter},
        {"samples", traj.times.size()},
    };
    if (traj.lock_time) summary["lock_time_s"] = *traj.lock_time;
    write_file(dir / "pll_summary.json", summary.dump(2) + "\n");
  }
  write_manifest(opts, dir, "pll");
  return 0;
}

// ------------------------------------------------------------------- ser --

int cmd_ser(GlobalOptions& opts, double db_min, double db_max, double db_step) {
  load_config(opts);  // resolves the effective seed; config may carry one
  if (!(db_step > 0.0)) throw std::invalid_argument("ser: --db-step must be positive");
  std::vector<double> points;
  for (double db = db_min; db <= db_max + 1e-9; db += db_step) points.push_back(db);
  if (points.empty())
    throw std::invalid_argument("ser: empty sweep range (--db-min exceeds --db-max)");

  const std::uint64_t trials = opts.trials ? opts.trials : 50000;
  std::vector<cryochain::SerSweepRow> rows;
  rows.reserve(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) {
    const double db = points[k];
    const auto est = cryochain::ser_monte_carlo(db, trials, cryochain::mix_seed(opts.seed, k));
    rows.push_back({db, cryochain::ser_analytic(db), est.ser, est.ci_lo, est.ci_hi});
  }

  std::printf("%10s %14s %14s\n", "Es/N0 dB", "analytic", "monte carlo");
  for (const auto& r : rows)
    std::printf("%10s %14.6e %14.6e\n", fixed(r.es_n0_db, 2).c_str(), r.ser_analytic,
                r.ser_mc);

  const fs::path dir = prepare_out_dir(opts);
  if (opts.want_csv()) write_file(dir / "ser_sweep.csv", cryochain::ser_sweep_csv(rows));
  if (opts.want_json()) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : rows)
      arr.push_back({{"es_n0_db", r.es_n0_db},
                     {"ser_analytic", r.ser_analytic},
                     {"ser_mc", r.ser_mc},
                     {"ci_lo", r.ci_lo},
                     {"ci_hi", r.ci_hi}});
    write_file(dir / "ser_sweep.json", arr.dump(2) + "\n");
  }
  write_manifest(opts, dir, "ser");
  return 0;
}

// ----------------------------------------------------------------- chain --

int cmd_chain(GlobalOptions& opts) {
  cryochain::ChainConfig cfg = load_config(opts);
  const std::uint64_t count = opts.trials ? opts.trials : 4096;
  const auto symbols = cryochain::random_symbols(count, cfg.seed);
  const auto rep = cryochain::run_loopback(cfg, symbols);

  std::printf("%-22s %s K\n", "Temperature", fixed(cfg.device.temperature, 0).c_str());
  std::printf("%-22s %d/%d\n", "DAC/ADC Bits", cfg.dac.n_bits, cfg.adc.n_bits);
  std::printf("%-22s %s deg\n", "I/Q Phase Error", fixed(rep.iq_phase_error_deg, 4).c_str());
  std::printf("%-22s %s dB\n", "LNA Gain", fixed(rep.lna_gain_db, 2).c_str());
  std::printf("%-22s %s dB\n", "Image Rejection", fixed(rep.irr_db, 2).c_str());
  if (rep.pll_lock_time_s)
    std::printf("%-22s %s ms\n", "PLL Lock Time",
                fixed(*rep.pll_lock_time_s * 1e3, 4).c_str());
  else
    std::printf("%-22s (not locked)\n", "PLL Lock Time");
  std::printf("%-22s %s deg RMS\n", "PLL Jitter", fixed(rep.pll_jitter_rms_deg, 4).c_str());
  std::printf("%-22s %.3e analytic, %.3e measured (%llu/%llu)\n", "Symbol Error Rate",
              rep.ser_analytic, rep.ser_mc,
              static_cast<unsigned long long>(rep.symbol_errors),
              static_cast<unsigned long long>(rep.symbols));
  std::printf("%-22s %s dB\n", "Readout SNR", fixed(rep.snr_db, 2).c_str());
  std::printf("%-22s %s\n", "Gate Fidelity", fixed(rep.fidelity, 6).c_str());
  std::printf("%-22s %s bits\n", "ENOB", fixed(rep.enob_bits, 3).c_str());
  std::printf("%-22s %s mW (%s%% of budget)\n", "Power",
              fixed(rep.power.steady_state_power_w * 1e3, 1).c_str(),
              fixed(rep.power.budget_fraction * 100.0, 1).c_str());
  std::printf("%-22s %s mW (%s%% of budget)\n", "Power (scaled)",
              fixed(rep.power_scaled.steady_state_power_w * 1e3, 1).c_str(),
              fixed(rep.power_scaled.budget_fraction * 100.0, 1).c_str());

  const fs::path dir = prepare_out_dir(opts);
  if (opts.want_json())
    write_file(dir / "chain_report.json", cryochain::chain_report_to_json(rep).dump(2) + "\n");
  if (opts.want_csv()) write_file(dir / "chain_report.csv", cryochain::chain_report_csv(rep));
  write_manifest(opts, dir, "chain");
  return 0;
}

// ----------------------------------------------------------------- power --

int cmd_power(GlobalOptions& opts, double p_mw, double vdd_from, double vdd_to,
              double budget_w) {
  const cryochain::ChainConfig cfg = load_config(opts);
  const double p_ref_w = p_mw * 1e-3;
  const double p_scaled_w = cryochain::power_scaling(p_ref_w, vdd_from, vdd_to);
  const std::vector<cryochain::PowerBudget> rows = {
      cryochain::make_power_budget(cfg.power.node_ref_nm, vdd_from, p_ref_w, budget_w),
      cryochain::make_power_budget(cfg.power.node_scaled_nm, vdd_to, p_scaled_w, budget_w),
  };

  std::printf("%10s %8s %12s %10s\n", "node (nm)", "VDD (V)", "power (mW)", "budget");
  for (const auto& r : rows)
    std::printf("%10s %8s %12s %9s%%%s\n", fixed(r.node_nm, 0).c_str(),
                fixed(r.vdd_v, 2).c_str(), fixed(r.steady_state_power_w * 1e3, 2).c_str(),
                fixed(r.budget_fraction * 100.0, 1).c_str(),
                r.over_budget ? " (over budget)" : "");

  const fs::path dir = prepare_out_dir(opts);
  if (opts.want_csv()) write_file(dir / "power_table.csv", cryochain::power_table_csv(rows));
  if (opts.want_json()) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) arr.push_back(cryochain::power_budget_to_json(r));
    write_file(dir / "power_table.json", arr.dump(2) + "\n");
  }
  write_manifest(opts, dir, "power");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  GlobalOptions opts;
  CLI::App app{"Behavioral simulator for a 4 K cryogenic qubit control and readout chain"};
  app.fallthrough(true);
  app.require_subcommand(1);

  app.add_option("--config", opts.config_path, "JSON config file (defaults when omitted)");
  app.add_option("--out", opts.out_dir, "output directory for reports and the run manifest")
      ->capture_default_str();
  auto* seed_opt =
      app.add_option("--seed", opts.seed, "RNG seed (default 0xC0FFEE, never time-based)");
  app.add_option("--trials", opts.trials,
                 "trial/symbol count (0 = subcommand default: ser 50000, chain 4096)");
  app.add_option("--format", opts.format, "report files to write")
      ->check(CLI::IsMember({"json", "csv", "both"}))
      ->capture_default_str();

  auto* device = app.add_subcommand("device", "device parameters across temperatures");
  std::vector<double> temps = {300.0, 4.0};
  device->add_option("--temps", temps, "comma-separated temperature list in kelvin")
      ->delimiter(',')
      ->capture_default_str();

  auto* pll = app.add_subcommand("pll", "lock transient of the synthesizer loop");
  auto* ser = app.add_subcommand("ser", "symbol error rate sweep, analytic vs Monte Carlo");
  double db_min = 0.0, db_max = 20.0, db_step = 1.0;
  ser->add_option("--db-min", db_min, "sweep start, Es/N0 in dB")->capture_default_str();
  ser->add_option("--db-max", db_max, "sweep end, inclusive")->capture_default_str();
  ser->add_option("--db-step", db_step, "sweep step, dB")->capture_default_str();

  auto* chain = app.add_subcommand("chain", "full loopback run with a chain report");

  auto* power = app.add_subcommand("power", "supply scaling against the stage budget");
  double p_mw = 199.7, vdd_from = 1.8, vdd_to = 1.2, budget_w = 1.0;
  power->add_option("p_mw", p_mw, "reference power in mW")->capture_default_str();
  power->add_option("vdd_from", vdd_from, "reference supply in V")->capture_default_str();
  power->add_option("vdd_to", vdd_to, "scaled supply in V")->capture_default_str();
  power->add_option("budget_w", budget_w, "stage budget in W")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  opts.seed_given = seed_opt->count() > 0;

  try {
    if (device->parsed()) return cmd_device(opts, temps);
    if (pll->parsed()) return cmd_pll(opts);
    if (ser->parsed()) return cmd_ser(opts, db_min, db_max, db_step);
    if (chain->parsed()) return cmd_chain(opts);
    if (power->parsed()) return cmd_power(opts, p_mw, vdd_from, vdd_to, budget_w);
  } catch (const cryochain::precondition_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
