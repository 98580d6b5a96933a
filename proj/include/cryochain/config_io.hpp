#pragma once

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cryochain/chain.hpp"
#include "cryochain/modulation.hpp"

namespace cryochain {

namespace detail {

inline std::string join_path(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

inline void require_object(const nlohmann::json& j, const std::string& path) {
  if (!j.is_object())
    throw std::invalid_argument("config: expected an object at \"" +
                                (path.empty() ? std::string("<root>") : path) + "\"");
}

inline double as_number(const nlohmann::json& j, const std::string& path) {
  if (!j.is_number())
    throw std::invalid_argument("config: expected a number at \"" + path + "\"");
  return j.get<double>();
}

inline int as_int(const nlohmann::json& j, const std::string& path) {
  if (!j.is_number_integer())
    throw std::invalid_argument("config: expected an integer at \"" + path + "\"");
  return j.get<int>();
}

inline std::uint64_t as_seed(const nlohmann::json& j, const std::string& path) {
  if (!j.is_number_unsigned() &&
      !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
    throw std::invalid_argument("config: expected a non-negative integer at \"" + path +
                                "\"");
  return j.get<std::uint64_t>();
}

inline std::string as_string(const nlohmann::json& j, const std::string& path) {
  if (!j.is_string())
    throw std::invalid_argument("config: expected a string at \"" + path + "\"");
  return j.get<std::string>();
}

/// Load a flat all-number section: every present key overwrites its slot,
/// anything unrecognized is rejected by its full dotted path.
inline void load_numbers(const nlohmann::json& j, const std::string& path,
                         std::initializer_list<std::pair<const char*, double*>> fields) {
  require_object(j, path);
  for (const auto& [key, value] : j.items()) {
    const std::string p = join_path(path, key);
    double* slot = nullptr;
    for (const auto& f : fields) {
      if (key == f.first) {
        slot = f.second;
        break;
      }
    }
    if (!slot) throw std::invalid_argument("config: unknown key \"" + p + "\"");
    *slot = as_number(value, p);
  }
}

}  // namespace detail

/// Overlay a JSON document onto the default ChainConfig. Only mentioned
/// keys change; every key must be known (misspellings are rejected with the
/// offending dotted path) and the merged config must validate.
inline ChainConfig load_chain_config(const nlohmann::json& j) {
  using detail::as_int;
  using detail::as_number;
  using detail::as_seed;
  using detail::as_string;
  using detail::join_path;
  using detail::require_object;

  ChainConfig cfg;
  require_object(j, "");

  for (const auto& [key, value] : j.items()) {
    const std::string p = key;
    if (key == "device") {
      detail::load_numbers(value, p,
                           {{"temperature", &cfg.device.temperature},
                            {"mu_300k", &cfg.device.mu_300k},
                            {"alpha", &cfg.device.alpha},
                            {"vth_300k", &cfg.device.vth_300k},
                            {"gamma", &cfg.device.gamma},
                            {"phi_f", &cfg.device.phi_f},
                            {"mobility_cap", &cfg.device.mobility_cap}});
    } else if (key == "pll") {
      detail::load_numbers(value, p,
                           {{"kv", &cfg.pll.kv},
                            {"kd", &cfg.pll.kd},
                            {"tau", &cfg.pll.tau},
                            {"f_ref", &cfg.pll.f_ref}});
    } else if (key == "vco") {
      detail::load_numbers(value, p,
                           {{"r", &cfg.vco.r}, {"c", &cfg.vco.c}, {"v_hyst", &cfg.vco.v_hyst}});
    } else if (key == "dac") {
      require_object(value, p);
      for (const auto& [k2, v2] : value.items()) {
        const std::string p2 = join_path(p, k2);
        if (k2 == "n_bits") {
          cfg.dac.n_bits = as_int(v2, p2);
        } else if (k2 == "v_ref") {
          cfg.dac.v_ref = as_number(v2, p2);
        } else {
          throw std::invalid_argument("config: unknown key \"" + p2 + "\"");
        }
      }
    } else if (key == "pulse") {
      require_object(value, p);
      for (const auto& [k2, v2] : value.items()) {
        const std::string p2 = join_path(p, k2);
        if (k2 == "shape") {
          cfg.pulse.shape = pulse_shape_from_name(as_string(v2, p2));
        } else if (k2 == "duration") {
          cfg.pulse.duration = as_number(v2, p2);
        } else if (k2 == "sigma") {
          cfg.pulse.sigma = as_number(v2, p2);
        } else if (k2 == "drag_coefficient") {
          cfg.pulse.drag_coefficient = as_number(v2, p2);
        } else if (k2 == "peak_amplitude") {
          cfg.pulse.peak_amplitude = as_number(v2, p2);
        } else {
          throw std::invalid_argument("config: unknown key \"" + p2 + "\"");
        }
      }
    } else if (key == "qubit") {
      detail::load_numbers(value, p,
                           {{"ej_over_h", &cfg.qubit.ej_over_h},
                            {"ec_over_h", &cfg.qubit.ec_over_h},
                            {"g_over_2pi", &cfg.qubit.g_over_2pi},
                            {"delta_over_2pi", &cfg.qubit.delta_over_2pi},
                            {"t1", &cfg.qubit.t1},
                            {"t2", &cfg.qubit.t2}});
    } else if (key == "readout_spec") {
      require_object(value, p);
      for (const auto& [k2, v2] : value.items()) {
        const std::string p2 = join_path(p, k2);
        if (k2 == "chi") {
          cfg.readout_spec.chi = as_number(v2, p2);
        } else if (k2 == "n_bar") {
          cfg.readout_spec.n_bar = as_number(v2, p2);
        } else if (k2 == "t_meas") {
          cfg.readout_spec.t_meas = as_number(v2, p2);
        } else if (k2 == "t_sys") {
          if (v2.is_null()) {
            cfg.readout_spec.t_sys.reset();
          } else {
            cfg.readout_spec.t_sys = as_number(v2, p2);
          }
        } else if (k2 == "bandwidth") {
          if (v2.is_null()) {
            cfg.readout_spec.bandwidth.reset();
          } else {
            cfg.readout_spec.bandwidth = as_number(v2, p2);
          }
        } else {
          throw std::invalid_argument("config: unknown key \"" + p2 + "\"");
        }
      }
    } else if (key == "lna") {
      detail::load_numbers(value, p,
                           {{"r_f", &cfg.lna.r_f},
                            {"r_2", &cfg.lna.r_2},
                            {"e_n", &cfg.lna.e_n},
                            {"i_n", &cfg.lna.i_n},
                            {"r_s", &cfg.lna.r_s},
                            {"temperature", &cfg.lna.temperature}});
    } else if (key == "adc") {
      require_object(value, p);
      bool saw_offsets = false;
      for (const auto& [k2, v2] : value.items()) {
        const std::string p2 = join_path(p, k2);
        if (k2 == "n_bits") {
          cfg.adc.n_bits = as_int(v2, p2);
        } else if (k2 == "v_fs") {
          cfg.adc.v_fs = as_number(v2, p2);
        } else if (k2 == "seed") {
          cfg.adc.seed = as_seed(v2, p2);
        } else if (k2 == "comparator_offsets") {
          if (!v2.is_array())
            throw std::invalid_argument("config: expected an array at \"" + p2 + "\"");
          saw_offsets = true;
          cfg.adc.comparator_offsets.clear();
          for (std::size_t k = 0; k < v2.size(); ++k)
            cfg.adc.comparator_offsets.push_back(
                as_number(v2[k], p2 + "[" + std::to_string(k) + "]"));
        } else {
          throw std::invalid_argument("config: unknown key \"" + p2 + "\"");
        }
      }
      // Changing n_bits without giving offsets means "ideal comparators".
      if (!saw_offsets)
        cfg.adc.comparator_offsets.assign((std::size_t{1} << cfg.adc.n_bits) - 1, 0.0);
    } else if (key == "lo") {
      detail::load_numbers(value, p,
                           {{"phase_error_deg", &cfg.lo.phase_error_deg},
                            {"amp_imbalance_db", &cfg.lo.amp_imbalance_db}});
    } else if (key == "pa") {
      detail::load_numbers(value, p,
                           {{"gain_db", &cfg.pa.gain_db}, {"v_clip", &cfg.pa.v_clip}});
    } else if (key == "pll_sim") {
      detail::load_numbers(value, p,
                           {{"f0_offset_hz", &cfg.pll_sim.f0_offset_hz},
                            {"initial_phase_error_rad", &cfg.pll_sim.initial_phase_error_rad},
                            {"dt_scale", &cfg.pll_sim.dt_scale},
                            {"t_max", &cfg.pll_sim.t_max},
                            {"lock_tol_deg", &cfg.pll_sim.lock_tol_deg}});
    } else if (key == "power") {
      detail::load_numbers(value, p,
                           {{"p_ref_w", &cfg.power.p_ref_w},
                            {"vdd_ref", &cfg.power.vdd_ref},
                            {"vdd_scaled", &cfg.power.vdd_scaled},
                            {"stage_budget_w", &cfg.power.stage_budget_w},
                            {"node_ref_nm", &cfg.power.node_ref_nm},
                            {"node_scaled_nm", &cfg.power.node_scaled_nm}});
    } else if (key == "carrier_hz") {
      cfg.carrier_hz = as_number(value, p);
    } else if (key == "sample_rate") {
      cfg.sample_rate = as_number(value, p);
    } else if (key == "seed") {
      cfg.seed = as_seed(value, p);
    } else if (key == "es_n0_db") {
      if (value.is_null()) {
        cfg.es_n0_db.reset();
      } else {
        cfg.es_n0_db = as_number(value, p);
      }
    } else {
      throw std::invalid_argument("config: unknown key \"" + p + "\"");
    }
  }

  cfg.validate();
  return cfg;
}

inline ChainConfig load_chain_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open \"" + path + "\"");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("config: " + std::string(e.what()));
  }
  return load_chain_config(j);
}

/// Serialize a full ChainConfig, every field explicit, in a stable key
/// order. load(dump(cfg)) reproduces cfg exactly.
inline nlohmann::ordered_json dump_chain_config(const ChainConfig& cfg) {
  nlohmann::ordered_json j;
  j["device"] = {{"temperature", cfg.device.temperature},
                 {"mu_300k", cfg.device.mu_300k},
                 {"alpha", cfg.device.alpha},
                 {"vth_300k", cfg.device.vth_300k},
                 {"gamma", cfg.device.gamma},
                 {"phi_f", cfg.device.phi_f},
                 {"mobility_cap", cfg.device.mobility_cap}};
  j["pll"] = {{"kv", cfg.pll.kv},
              {"kd", cfg.pll.kd},
              {"tau", cfg.pll.tau},
              {"f_ref", cfg.pll.f_ref}};
  j["vco"] = {{"r", cfg.vco.r}, {"c", cfg.vco.c}, {"v_hyst", cfg.vco.v_hyst}};
  j["dac"] = {{"n_bits", cfg.dac.n_bits}, {"v_ref", cfg.dac.v_ref}};
  j["pulse"] = {{"shape", pulse_shape_name(cfg.pulse.shape)},
                {"duration", cfg.pulse.duration},
                {"sigma", cfg.pulse.sigma},
                {"drag_coefficient", cfg.pulse.drag_coefficient},
                {"peak_amplitude", cfg.pulse.peak_amplitude}};
  j["qubit"] = {{"ej_over_h", cfg.qubit.ej_over_h},
                {"ec_over_h", cfg.qubit.ec_over_h},
                {"g_over_2pi", cfg.qubit.g_over_2pi},
                {"delta_over_2pi", cfg.qubit.delta_over_2pi},
                {"t1", cfg.qubit.t1},
                {"t2", cfg.qubit.t2}};
  j["readout_spec"] = {{"chi", cfg.readout_spec.chi},
                       {"n_bar", cfg.readout_spec.n_bar},
                       {"t_meas", cfg.readout_spec.t_meas},
                       {"t_sys", cfg.readout_spec.t_sys
                                     ? nlohmann::ordered_json(*cfg.readout_spec.t_sys)
                                     : nlohmann::ordered_json(nullptr)},
                       {"bandwidth", cfg.readout_spec.bandwidth
                                         ? nlohmann::ordered_json(*cfg.readout_spec.bandwidth)
                                         : nlohmann::ordered_json(nullptr)}};
  j["lna"] = {{"r_f", cfg.lna.r_f},
              {"r_2", cfg.lna.r_2},
              {"e_n", cfg.lna.e_n},
              {"i_n", cfg.lna.i_n},
              {"r_s", cfg.lna.r_s},
              {"temperature", cfg.lna.temperature}};
  j["adc"] = {{"n_bits", cfg.adc.n_bits},
              {"v_fs", cfg.adc.v_fs},
              {"comparator_offsets", cfg.adc.comparator_offsets},
              {"seed", cfg.adc.seed}};
  j["lo"] = {{"phase_error_deg", cfg.lo.phase_error_deg},
             {"amp_imbalance_db", cfg.lo.amp_imbalance_db}};
  j["pa"] = {{"gain_db", cfg.pa.gain_db}, {"v_clip", cfg.pa.v_clip}};
  j["pll_sim"] = {{"f0_offset_hz", cfg.pll_sim.f0_offset_hz},
                  {"initial_phase_error_rad", cfg.pll_sim.initial_phase_error_rad},
                  {"dt_scale", cfg.pll_sim.dt_scale},
                  {"t_max", cfg.pll_sim.t_max},
                  {"lock_tol_deg", cfg.pll_sim.lock_tol_deg}};
  j["power"] = {{"p_ref_w", cfg.power.p_ref_w},
                {"vdd_ref", cfg.power.vdd_ref},
                {"vdd_scaled", cfg.power.vdd_scaled},
                {"stage_budget_w", cfg.power.stage_budget_w},
                {"node_ref_nm", cfg.power.node_ref_nm},
                {"node_scaled_nm", cfg.power.node_scaled_nm}};
  j["carrier_hz"] = cfg.carrier_hz;
  j["sample_rate"] = cfg.sample_rate;
  j["seed"] = cfg.seed;
  j["es_n0_db"] =
      cfg.es_n0_db ? nlohmann::ordered_json(*cfg.es_n0_db) : nlohmann::ordered_json(nullptr);
  return j;
}

}  // namespace cryochain
