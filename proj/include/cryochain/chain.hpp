#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "cryochain/cryo_device.hpp"
#include "cryochain/errors.hpp"
#include "cryochain/modulation.hpp"
#include "cryochain/qubit.hpp"
#include "cryochain/readout.hpp"
#include "cryochain/signal.hpp"
#include "cryochain/synthesis.hpp"
#include "cryochain/util.hpp"

namespace cryochain {

/// Quadrature modulator imperfections injected into loopback runs.
struct LoImpairments {
  double phase_error_deg = 0.0;
  double amp_imbalance_db = 0.0;

  void validate() const {
    if (!std::isfinite(phase_error_deg) || !std::isfinite(amp_imbalance_db))
      throw std::domain_error("LoImpairments: values must be finite");
  }
};

/// Output stage between the modulator and the fridge line.
struct PaConfig {
  double gain_db = 0.0;
  double v_clip = 10.0;

  void validate() const {
    if (!std::isfinite(gain_db)) throw std::domain_error("PaConfig: gain_db must be finite");
    if (!(v_clip > 0.0)) throw std::domain_error("PaConfig: v_clip must be positive");
  }
};

/// How the loopback run drives simulate_lock. dt is expressed as a fraction
/// of 1/omega_n so the step stays valid when the loop constants change.
struct PllSimConfig {
  double f0_offset_hz = 12.0;          // VCO free-running offset below f_ref
  double initial_phase_error_rad = 1.0;
  double dt_scale = 0.02;              // dt = dt_scale / omega_n
  double t_max = 5.0e-3;               // s
  double lock_tol_deg = 2.0;

  void validate() const {
    if (!std::isfinite(f0_offset_hz) || !std::isfinite(initial_phase_error_rad))
      throw std::domain_error("PllSimConfig: offsets must be finite");
    if (!(dt_scale > 0.0) || !(dt_scale < 0.1))
      throw std::domain_error("PllSimConfig: dt_scale must lie in (0, 0.1)");
    if (!(t_max > 0.0)) throw std::domain_error("PllSimConfig: t_max must be positive");
    if (!(lock_tol_deg > 0.0))
      throw std::domain_error("PllSimConfig: lock_tol_deg must be positive");
  }
};

/// Dissipation reference point and the voltage scaling study attached to it.
struct PowerConfig {
  double p_ref_w = 0.1997;      // measured steady-state draw at the reference node
  double vdd_ref = 1.8;         // V
  double vdd_scaled = 1.2;      // V, scaling target
  double stage_budget_w = 1.0;  // cooling power available at the 4 K stage
  double node_ref_nm = 180.0;
  double node_scaled_nm = 65.0;

  void validate() const {
    if (!(p_ref_w > 0.0) || !(vdd_ref > 0.0) || !(vdd_scaled > 0.0) ||
        !(stage_budget_w > 0.0) || !(node_ref_nm > 0.0) || !(node_scaled_nm > 0.0))
      throw std::domain_error("PowerConfig: all values must be positive");
  }
};

/// P(vdd_new) = p_ref * (vdd_new / vdd_ref)^2, the square-law scaling of
/// dynamic dissipation with supply voltage.
inline double power_scaling(double p_ref, double vdd_ref, double vdd_new) {
  if (!(p_ref > 0.0) || !(vdd_ref > 0.0) || !(vdd_new > 0.0))
    throw std::domain_error("power_scaling: all arguments must be positive");
  const double ratio = vdd_new / vdd_ref;
  return p_ref * (ratio * ratio);
}

/// Fraction of the stage's cooling budget a load consumes. May exceed 1;
/// callers decide whether that is fatal.
inline double thermal_budget_fraction(double power_w, double stage_budget_w) {
  if (!(power_w > 0.0) || !(stage_budget_w > 0.0))
    throw std::domain_error("thermal_budget_fraction: both arguments must be positive");
  return power_w / stage_budget_w;
}

/// One row of the power study: a process node, its supply, the steady-state
/// draw, and how much of the stage budget that takes. budget_fraction is
/// clamped to 1 with over_budget flagging the excess.
struct PowerBudget {
  double node_nm;
  double vdd_v;
  double steady_state_power_w;
  double budget_fraction;
  bool over_budget;
};

inline PowerBudget make_power_budget(double node_nm, double vdd_v, double power_w,
                                     double stage_budget_w) {
  const double raw = thermal_budget_fraction(power_w, stage_budget_w);
  return {node_nm, vdd_v, power_w, std::min(raw, 1.0), raw > 1.0};
}

/// Default seed for every run that does not name one: fixed, never
/// time-based, so bare invocations reproduce byte-for-byte.
inline constexpr std::uint64_t kDefaultSeed = 0xC0FFEE;  // 12648430

/// Everything a chain run needs, in one place. Defaults describe the ideal
/// chain: no modulator imbalance, no channel noise, unity output stage.
struct ChainConfig {
  DeviceEnvironment device;
  PllConfig pll;
  VcoConfig vco;
  DacConfig dac;
  PulseSpec pulse;
  TransmonParams qubit;
  ReadoutSpec readout_spec;
  LnaConfig lna;
  AdcConfig adc;
  LoImpairments lo;
  PaConfig pa;
  PllSimConfig pll_sim;
  PowerConfig power;
  double carrier_hz = 5.0e9;
  double sample_rate = 1.6e11;
  std::uint64_t seed = kDefaultSeed;
  std::optional<double> es_n0_db;  // channel quality; unset = noiseless loopback

  void validate() const {
    device.validate();
    pll.validate();
    vco.validate();
    dac.validate();
    pulse.validate();
    qubit.validate();
    readout_spec.validate();
    lna.validate();
    adc.validate();
    lo.validate();
    pa.validate();
    pll_sim.validate();
    power.validate();
    if (!(carrier_hz > 0.0))
      throw std::domain_error("ChainConfig: carrier_hz must be positive");
    if (!(sample_rate > 10.0 * carrier_hz))
      throw std::domain_error("ChainConfig: sample_rate must exceed 10x carrier_hz");
    if (es_n0_db && std::isnan(*es_n0_db))
      throw std::domain_error("ChainConfig: es_n0_db must not be NaN");
  }
};

/// What run_control_path hands back: the waveform headed for the qubit and
/// the demodulation-derived error metrics feeding the fidelity model.
struct ControlPathResult {
  SampledSignal pulse_at_qubit;
  double sigma_phi_rad;   // RMS phase error vs the ideal envelope
  double sigma_amp_frac;  // RMS fractional amplitude error
  double fidelity;
  double clipped_fraction;
};

/// Digital word to shaped microwave pulse, then a loopback measurement of
/// how faithful the pulse is.
///
/// The DAC sets the pulse peak; the envelope rides the (possibly
/// imbalanced) quadrature LO; the output stage applies gain and clipping.
/// The transmitted waveform is demodulated with the same LO (loopback
/// sharing one synthesizer, which is what exposes the Q-arm phase error)
/// over a one-carrier-period boxcar. The reference is the identical
/// demodulation of the impairment-free chain, so window artifacts are
/// common-mode and the reported sigmas isolate the injected errors; the
/// comparison runs wherever the envelope holds more than 5% of its peak.
inline ControlPathResult run_control_path(const ChainConfig& cfg, unsigned code) {
  cfg.validate();
  PulseSpec pulse = cfg.pulse;
  pulse.peak_amplitude = dac_output(code, cfg.dac);

  const IQEnvelope env = make_envelope(pulse, cfg.sample_rate);
  const std::size_t n = env.i.size();
  const QuadratureLo lo = detail::quadrature_lo_samples(
      cfg.carrier_hz, 1.0, cfg.sample_rate, n, deg_to_rad(cfg.lo.phase_error_deg),
      cfg.lo.amp_imbalance_db);
  const QuadratureLo lo_ref =
      detail::quadrature_lo_samples(cfg.carrier_hz, 1.0, cfg.sample_rate, n, 0.0, 0.0);

  std::vector<double> tx(n);
  std::vector<double> tx_ref(n);
  for (std::size_t k = 0; k < n; ++k) {
    tx[k] = env.i[k] * lo.i[k] - env.q[k] * lo.q[k];
    tx_ref[k] = env.i[k] * lo_ref.i[k] - env.q[k] * lo_ref.q[k];
  }

  PowerStageResult stage =
      power_stage(SampledSignal(std::move(tx), cfg.sample_rate), cfg.pa.gain_db,
                  cfg.pa.v_clip);
  const double stage_gain = db_to_amplitude_ratio(cfg.pa.gain_db);

  // Boxcar quadrature demodulation across exactly one carrier period,
  // normalized by the stage gain; the reference path repeats it with the
  // clean LO on the unclipped unity-gain waveform.
  const auto period = static_cast<std::size_t>(std::llround(cfg.sample_rate / cfg.carrier_hz));
  const std::size_t half = period / 2;
  const double peak = pulse.peak_amplitude;
  const double select = 0.05 * peak;

  double acc_phi = 0.0, acc_amp = 0.0;
  std::size_t kept = 0;
  for (std::size_t k = half; k + half <= n; ++k) {
    const double a_ideal = std::hypot(env.i[k], env.q[k]);
    if (!(a_ideal > select)) continue;
    double si = 0.0, sq = 0.0, ri = 0.0, rq = 0.0;
    for (std::size_t j = k - half; j < k + half; ++j) {
      si += stage.output[j] * lo.i[j];
      sq += stage.output[j] * lo.q[j];
      ri += tx_ref[j] * lo_ref.i[j];
      rq += tx_ref[j] * lo_ref.q[j];
    }
    const double norm = 2.0 / static_cast<double>(period);
    const double i_rec = si * norm / stage_gain;
    const double q_rec = -sq * norm / stage_gain;
    const double i_ref = ri * norm;
    const double q_ref = -rq * norm;
    const double a_ref = std::hypot(i_ref, q_ref);
    if (!(a_ref > 0.0)) continue;
    const double phi_err =
        wrap_pi(std::atan2(q_rec, i_rec) - std::atan2(q_ref, i_ref));
    const double amp_err = (std::hypot(i_rec, q_rec) - a_ref) / a_ref;
    acc_phi += phi_err * phi_err;
    acc_amp += amp_err * amp_err;
    ++kept;
  }

  const double sigma_phi = kept ? std::sqrt(acc_phi / static_cast<double>(kept)) : 0.0;
  const double sigma_amp = kept ? std::sqrt(acc_amp / static_cast<double>(kept)) : 0.0;
  return {std::move(stage.output), sigma_phi, sigma_amp,
          gate_fidelity(sigma_phi, sigma_amp), stage.clipped_fraction};
}

struct ReadoutPathResult {
  double snr_db;            // dispersive SNR before the amplifier
  double es_n0_db_effective;  // after charging the LNA noise figure
  std::uint64_t trials;
  std::uint64_t correct;
  double accuracy;
};

/// Dispersive readout in the loopback chain: the qubit state rotates the
/// probe tone to one of two phases pi/2 -/+ chi*t_meas (the circled 8-PSK
/// points for the default quarter-turn separation), channel noise at the
/// effective Es/N0 (dispersive SNR minus the LNA noise figure) lands on the
/// I/Q point, the LNA amplifies, both components pass through the flash
/// ADC, and the 8-PSK decision picks the hypothesis phase nearer to the
/// recovered symbol. The two symbols on the mirror axis between the
/// hypotheses are always exact angular ties; those fall back to which
/// hypothesis point the digitized I/Q sample itself is closer to, which
/// restores the two-point maximum-likelihood boundary. Only an exact tie
/// there too (chi = 0 makes every trial one) goes to a seeded coin flip.
inline ReadoutPathResult run_readout_path(const ChainConfig& cfg, int qubit_state,
                                          std::uint64_t trials) {
  cfg.validate();
  if (qubit_state != 0 && qubit_state != 1)
    throw std::invalid_argument("run_readout_path: qubit_state must be 0 or 1");
  if (trials == 0) throw std::invalid_argument("run_readout_path: trials must be positive");

  const SnrResult snr = readout_snr(cfg.readout_spec);
  const double nf_db = lna_noise_figure(cfg.lna);
  const double es_n0_db = snr.db - nf_db;
  const double gamma = std::isfinite(es_n0_db) ? db_to_power_ratio(es_n0_db) : 0.0;

  const double ct = cfg.readout_spec.chi * cfg.readout_spec.t_meas;
  const double phase0 = kPi / 2.0 - ct;
  const double phase1 = kPi / 2.0 + ct;
  const double target = qubit_state == 0 ? phase0 : phase1;

  const double lna_linear = lna_gain(cfg.lna).linear;
  const auto thresholds = adc_thresholds(cfg.adc);
  const double v_lsb = cfg.adc.v_lsb();
  const double range = lna_linear * 1.25;  // maps +/- range onto [0, v_fs]

  const PskConstellation constellation;
  std::mt19937_64 rng(mix_seed(cfg.seed, 11));
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_int_distribution<int> coin(0, 1);

  auto digitize = [&](double x) {
    const double v = (x / range + 1.0) * (cfg.adc.v_fs / 2.0);
    const unsigned code_bits = adc_convert(v, thresholds);
    const double recon = (static_cast<double>(code_bits) + 0.5) * v_lsb;
    return (recon / cfg.adc.v_fs * 2.0 - 1.0) * range;
  };

  std::uint64_t correct = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    double i, q;
    if (gamma < 1.0e-12) {
      i = noise(rng);  // noise drowns the signal entirely
      q = noise(rng);
    } else {
      const double sigma = std::sqrt(1.0 / (2.0 * gamma));
      i = std::cos(target) + sigma * noise(rng);
      q = std::sin(target) + sigma * noise(rng);
    }
    const double qi = digitize(lna_linear * i);
    const double qq = digitize(lna_linear * q);
    if (qi == 0.0 && qq == 0.0) continue;  // dead-center reconstruction: no decision
    const unsigned symbol = psk_demodulate(qi, qq, constellation);
    const double angle = constellation.symbol_angle(symbol);
    const double d0 = std::abs(wrap_pi(angle - phase0));
    const double d1 = std::abs(wrap_pi(angle - phase1));
    int decided;
    if (d0 < d1) {
      decided = 0;
    } else if (d1 < d0) {
      decided = 1;
    } else {
      const double e0 = (qi - std::cos(phase0)) * (qi - std::cos(phase0)) +
                        (qq - std::sin(phase0)) * (qq - std::sin(phase0));
      const double e1 = (qi - std::cos(phase1)) * (qi - std::cos(phase1)) +
                        (qq - std::sin(phase1)) * (qq - std::sin(phase1));
      if (e0 < e1) {
        decided = 0;
      } else if (e1 < e0) {
        decided = 1;
      } else {
        decided = coin(rng);
      }
    }
    if (decided == qubit_state) ++correct;
  }
  return {snr.db, es_n0_db, trials, correct,
          static_cast<double>(correct) / static_cast<double>(trials)};
}

/// Full loopback report. Optional entries are skipped (left unset) when the
/// run cannot produce them, e.g. lock time when the loop never settles.
struct ChainReport {
  double iq_phase_error_deg;
  double amp_imbalance_db;
  double irr_db;
  std::optional<double> pll_lock_time_s;
  double pll_jitter_rms_deg;
  double lna_gain_db;
  double lna_noise_figure_db;
  double ser_analytic;
  double ser_mc;
  std::uint64_t symbols;
  std::uint64_t symbol_errors;
  double snr_db;
  double sigma_phi_deg;
  double sigma_amp_frac;
  double fidelity;
  double enob_bits;
  PowerBudget power;
  PowerBudget power_scaled;
};

/// Run every chain experiment once against one configuration:
/// measure the LO impairments back from generated waveforms and convert
/// them to an image-rejection ratio, acquire the PLL, characterize the
/// control path at full DAC code, push the symbol stream through the
/// (optionally noisy) channel, and close with ADC resolution and the power
/// budget. Fully deterministic for a fixed config and seed.
inline ChainReport run_loopback(const ChainConfig& cfg,
                                const std::vector<unsigned>& symbols) {
  cfg.validate();
  if (symbols.empty()) throw std::invalid_argument("run_loopback: symbols must be non-empty");

  ChainReport report{};

  // LO quality, measured from the waveforms rather than echoed from config.
  const double lo_duration = 64.0 / cfg.carrier_hz;
  const QuadratureLo lo = generate_quadrature_lo(
      cfg.carrier_hz, 1.0, cfg.sample_rate, lo_duration, deg_to_rad(cfg.lo.phase_error_deg),
      cfg.lo.amp_imbalance_db);
  const double phase_err_rad = measure_iq_phase_error(lo.i, lo.q);
  report.iq_phase_error_deg = rad_to_deg(phase_err_rad);
  report.amp_imbalance_db = measure_amplitude_imbalance_db(lo.i, lo.q);
  report.irr_db = image_rejection_ratio(db_to_amplitude_ratio(report.amp_imbalance_db),
                                        phase_err_rad);

  // PLL acquisition.
  const double omega_n = natural_frequency_and_damping(cfg.pll).omega_n;
  const PllTrajectory traj = simulate_lock(
      cfg.pll, cfg.pll.f_ref - cfg.pll_sim.f0_offset_hz, cfg.pll_sim.dt_scale / omega_n,
      cfg.pll_sim.t_max, deg_to_rad(cfg.pll_sim.lock_tol_deg),
      cfg.pll_sim.initial_phase_error_rad);
  report.pll_lock_time_s = traj.lock_time;
  report.pll_jitter_rms_deg = post_lock_jitter_deg(traj);

  // Amplifier numbers.
  report.lna_gain_db = lna_gain(cfg.lna).db;
  report.lna_noise_figure_db = lna_noise_figure(cfg.lna);

  // Control path at full scale.
  const ControlPathResult control =
      run_control_path(cfg, cfg.dac.level_count() - 1);
  report.sigma_phi_deg = rad_to_deg(control.sigma_phi_rad);
  report.sigma_amp_frac = control.sigma_amp_frac;
  report.fidelity = control.fidelity;

  // Symbol stream through the channel.
  const PskConstellation constellation;
  std::mt19937_64 rng(mix_seed(cfg.seed, 7));
  std::normal_distribution<double> noise(0.0, 1.0);
  double sigma = 0.0;
  if (cfg.es_n0_db) sigma = std::sqrt(1.0 / (2.0 * db_to_power_ratio(*cfg.es_n0_db)));
  std::uint64_t errors = 0;
  for (unsigned symbol : symbols) {
    IqPoint pt = psk_modulate(symbol, constellation);
    if (cfg.es_n0_db) {
      pt.i += sigma * noise(rng);
      pt.q += sigma * noise(rng);
    }
    if (psk_demodulate(pt.i, pt.q, constellation) != symbol) ++errors;
  }
  report.symbols = symbols.size();
  report.symbol_errors = errors;
  report.ser_mc = static_cast<double>(errors) / static_cast<double>(symbols.size());
  report.ser_analytic = cfg.es_n0_db ? ser_analytic(*cfg.es_n0_db) : 0.0;

  // Readout SNR with the amplifier's noise charged against it.
  report.snr_db = readout_snr(cfg.readout_spec).db - report.lna_noise_figure_db;

  // Converter resolution at full scale.
  report.enob_bits =
      adc_enob(cfg.adc, cfg.adc.v_fs / 2.0, 4096, mix_seed(cfg.seed, 9));

  // Power budget at the reference node and after supply scaling.
  const double p_scaled =
      power_scaling(cfg.power.p_ref_w, cfg.power.vdd_ref, cfg.power.vdd_scaled);
  report.power = make_power_budget(cfg.power.node_ref_nm, cfg.power.vdd_ref,
                                   cfg.power.p_ref_w, cfg.power.stage_budget_w);
  report.power_scaled = make_power_budget(cfg.power.node_scaled_nm, cfg.power.vdd_scaled,
                                          p_scaled, cfg.power.stage_budget_w);
  return report;
}

/// Deterministic symbol stream for loopback runs, derived from the seed.
inline std::vector<unsigned> random_symbols(std::uint64_t count, std::uint64_t seed) {
  if (count == 0) throw std::invalid_argument("random_symbols: count must be positive");
  std::mt19937_64 rng(mix_seed(seed, 3));
  std::uniform_int_distribution<unsigned> pick(0, 7);
  std::vector<unsigned> symbols(count);
  for (auto& s : symbols) s = pick(rng);
  return symbols;
}

}  // namespace cryochain
