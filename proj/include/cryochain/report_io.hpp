#pragma once

#include <charconv>
#include <cstdint>
#include <ctime>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "cryochain/chain.hpp"
#include "cryochain/cryo_device.hpp"
#include "cryochain/synthesis.hpp"
#include "cryochain/version.hpp"

namespace cryochain {

/// Shortest round-trip decimal form of a double, for CSV cells. The same
/// input always prints the same bytes, which is what the determinism
/// contract on output files rests on.
inline std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  if (res.ec != std::errc())
    throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, res.ptr);
}

inline nlohmann::ordered_json power_budget_to_json(const PowerBudget& p) {
  return {{"node_nm", p.node_nm},
          {"vdd_v", p.vdd_v},
          {"power_w", p.steady_state_power_w},
          {"budget_fraction", p.budget_fraction},
          {"over_budget", p.over_budget}};
}

inline nlohmann::ordered_json chain_report_to_json(const ChainReport& r) {
  nlohmann::ordered_json j;
  j["iq_phase_error_deg"] = r.iq_phase_error_deg;
  j["amp_imbalance_db"] = r.amp_imbalance_db;
  j["irr_db"] = r.irr_db;
  j["pll_lock_time_s"] = r.pll_lock_time_s ? nlohmann::ordered_json(*r.pll_lock_time_s)
                                           : nlohmann::ordered_json(nullptr);
  j["pll_jitter_rms_deg"] = r.pll_jitter_rms_deg;
  j["lna_gain_db"] = r.lna_gain_db;
  j["lna_noise_figure_db"] = r.lna_noise_figure_db;
  j["ser_analytic"] = r.ser_analytic;
  j["ser_mc"] = r.ser_mc;
  j["symbols"] = r.symbols;
  j["symbol_errors"] = r.symbol_errors;
  j["snr_db"] = r.snr_db;
  j["sigma_phi_deg"] = r.sigma_phi_deg;
  j["sigma_amp_frac"] = r.sigma_amp_frac;
  j["fidelity"] = r.fidelity;
  j["enob_bits"] = r.enob_bits;
  j["power"] = power_budget_to_json(r.power);
  j["power_scaled"] = power_budget_to_json(r.power_scaled);
  return j;
}

/// Flat metric,value rows mirroring the JSON report. The skipped lock time
/// prints as an empty cell.
inline std::string chain_report_csv(const ChainReport& r) {
  std::string out = "metric,value\n";
  auto row = [&out](const char* name, const std::string& value) {
    out += name;
    out += ',';
    out += value;
    out += '\n';
  };
  row("iq_phase_error_deg", format_double(r.iq_phase_error_deg));
  row("amp_imbalance_db", format_double(r.amp_imbalance_db));
  row("irr_db", format_double(r.irr_db));
  row("pll_lock_time_s", r.pll_lock_time_s ? format_double(*r.pll_lock_time_s) : "");
  row("pll_jitter_rms_deg", format_double(r.pll_jitter_rms_deg));
  row("lna_gain_db", format_double(r.lna_gain_db));
  row("lna_noise_figure_db", format_double(r.lna_noise_figure_db));
  row("ser_analytic", format_double(r.ser_analytic));
  row("ser_mc", format_double(r.ser_mc));
  row("symbols", std::to_string(r.symbols));
  row("symbol_errors", std::to_string(r.symbol_errors));
  row("snr_db", format_double(r.snr_db));
  row("sigma_phi_deg", format_double(r.sigma_phi_deg));
  row("sigma_amp_frac", format_double(r.sigma_amp_frac));
  row("fidelity", format_double(r.fidelity));
  row("enob_bits", format_double(r.enob_bits));
  row("power.node_nm", format_double(r.power.node_nm));
  row("power.vdd_v", format_double(r.power.vdd_v));
  row("power.power_w", format_double(r.power.steady_state_power_w));
  row("power.budget_fraction", format_double(r.power.budget_fraction));
  row("power.over_budget", r.power.over_budget ? "1" : "0");
  row("power_scaled.node_nm", format_double(r.power_scaled.node_nm));
  row("power_scaled.vdd_v", format_double(r.power_scaled.vdd_v));
  row("power_scaled.power_w", format_double(r.power_scaled.steady_state_power_w));
  row("power_scaled.budget_fraction", format_double(r.power_scaled.budget_fraction));
  row("power_scaled.over_budget", r.power_scaled.over_budget ? "1" : "0");
  return out;
}

inline std::string pll_trajectory_csv(const PllTrajectory& traj) {
  std::string out = "time_s,v_error,v_ctrl,phase_error_rad\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    out += format_double(traj.times[k]);
    out += ',';
    out += format_double(traj.v_error[k]);
    out += ',';
    out += format_double(traj.v_ctrl[k]);
    out += ',';
    out += format_double(traj.phase_error[k]);
    out += '\n';
  }
  return out;
}

struct SerSweepRow {
  double es_n0_db;
  double ser_analytic;
  double ser_mc;
  double ci_lo;
  double ci_hi;
};

inline std::string ser_sweep_csv(const std::vector<SerSweepRow>& rows) {
  std::string out = "es_n0_db,ser_analytic,ser_mc,ci_lo,ci_hi\n";
  for (const SerSweepRow& r : rows) {
    out += format_double(r.es_n0_db);
    out += ',';
    out += format_double(r.ser_analytic);
    out += ',';
    out += format_double(r.ser_mc);
    out += ',';
    out += format_double(r.ci_lo);
    out += ',';
    out += format_double(r.ci_hi);
    out += '\n';
  }
  return out;
}

struct DeviceTableRow {
  double temperature_k;
  double mobility_factor;
  double threshold_voltage_v;
  double subthreshold_swing_v_per_dec;
  double thermal_noise_v_per_sqrt_hz;
  double noise_power_reduction;
};

/// Evaluate the device models at each listed temperature. Thermal noise is
/// quoted for the given source resistance, and the noise power reduction is
/// referenced to t_ref.
inline std::vector<DeviceTableRow> device_table(const DeviceEnvironment& env,
                                                const std::vector<double>& temperatures,
                                                double resistance = 50.0,
                                                double t_ref = kRoomTemperature) {
  std::vector<DeviceTableRow> rows;
  rows.reserve(temperatures.size());
  for (double t : temperatures) {
    DeviceEnvironment at_t = env;
    at_t.temperature = t;
    rows.push_back({t, mobility_factor(at_t), threshold_voltage(at_t),
                    subthreshold_swing(t), thermal_noise_density(t, resistance),
                    noise_power_reduction(t_ref, t)});
  }
  return rows;
}

inline std::string device_table_csv(const std::vector<DeviceTableRow>& rows) {
  std::string out =
      "temperature_k,mobility_factor,threshold_voltage_v,subthreshold_swing_v_per_dec,"
      "thermal_noise_v_per_sqrt_hz,noise_power_reduction\n";
  for (const DeviceTableRow& r : rows) {
    out += format_double(r.temperature_k);
    out += ',';
    out += format_double(r.mobility_factor);
    out += ',';
    out += format_double(r.threshold_voltage_v);
    out += ',';
    out += format_double(r.subthreshold_swing_v_per_dec);
    out += ',';
    out += format_double(r.thermal_noise_v_per_sqrt_hz);
    out += ',';
    out += format_double(r.noise_power_reduction);
    out += '\n';
  }
  return out;
}

inline std::string power_table_csv(const std::vector<PowerBudget>& rows) {
  std::string out = "node_nm,vdd_v,power_w,budget_fraction\n";
  for (const PowerBudget& r : rows) {
    out += format_double(r.node_nm);
    out += ',';
    out += format_double(r.vdd_v);
    out += ',';
    out += format_double(r.steady_state_power_w);
    out += ',';
    out += format_double(r.budget_fraction);
    out += '\n';
  }
  return out;
}

/// Provenance record written next to every output set. The timestamp is the
/// only non-deterministic field; report and CSV payloads stay byte-stable.
inline nlohmann::ordered_json make_run_manifest(const std::string& subcommand,
                                                const std::string& config_path,
                                                std::uint64_t seed,
                                                const std::string& out_dir) {
  std::time_t now = std::time(nullptr);
  std::tm utc{};
  gmtime_r(&now, &utc);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &utc);
  return {{"subcommand", subcommand}, {"config_path", config_path},
          {"seed", seed},             {"out_dir", out_dir},
          {"tool_version", kVersion}, {"start_time_utc", stamp}};
}

}  // namespace cryochain
