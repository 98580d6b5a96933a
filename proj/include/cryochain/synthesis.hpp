#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "cryochain/errors.hpp"
#include "cryochain/signal.hpp"
#include "cryochain/util.hpp"

namespace cryochain {

/// Second-order type-I loop: XOR-style phase detector with gain kd (V/rad),
/// single-pole RC loop filter with time constant tau (s), and a VCO with
/// tuning gain kv (rad/s/V) locked against reference f_ref (Hz).
///
/// The defaults are behavioral calibration values: kv matches the relaxation
/// VCO defaults below, and kd is sized so kd*kv = 5e3 1/s, which with
/// tau = 1e-4 s puts the loop at omega_n ~ 7071 rad/s with damping ~ 0.707.
struct PllConfig {
  double kv = 6.283185307179586e6;  // rad/s/V, = vco_gain(VcoConfig{})
  double kd = 5.0e3 / kv;           // V/rad
  double tau = 1.0e-4;              // s
  double f_ref = 1.0e6;             // Hz

  void validate() const {
    if (!(kd > 0.0)) throw std::domain_error("PllConfig: kd must be positive");
    if (!(kv > 0.0)) throw std::domain_error("PllConfig: kv must be positive");
    if (!(tau > 0.0)) throw std::domain_error("PllConfig: tau must be positive");
    if (!(f_ref > 0.0)) throw std::domain_error("PllConfig: f_ref must be positive");
  }
};

struct LoopDynamics {
  double omega_n;  // rad/s
  double zeta;     // unitless
};

/// omega_n = sqrt(kd*kv/tau), zeta = 1/(2*omega_n*tau).
inline LoopDynamics natural_frequency_and_damping(const PllConfig& cfg) {
  cfg.validate();
  const double omega_n = std::sqrt(cfg.kd * cfg.kv / cfg.tau);
  return {omega_n, 1.0 / (2.0 * omega_n * cfg.tau)};
}

/// Detector output kd * wrap(phi_ref - phi_fb), with the difference wrapped
/// to (-pi, pi] so the loop always steers along the short way around.
inline double phase_detector_output(double phi_ref, double phi_fb, double kd) {
  if (!(kd > 0.0)) throw std::domain_error("phase_detector_output: kd must be positive");
  return kd * wrap_pi(phi_ref - phi_fb);
}

/// Closed-loop transfer function H(s) = (K/tau) / (s^2 + s/tau + K/tau)
/// with K = kd*kv, evaluated at offset frequency f_m from the carrier.
inline std::complex<double> closed_loop_response(const PllConfig& cfg, double f_m) {
  cfg.validate();
  if (f_m < 0.0)
    throw std::domain_error("closed_loop_response: offset frequency must be non-negative");
  const double k_over_tau = cfg.kd * cfg.kv / cfg.tau;
  const std::complex<double> s(0.0, kTwoPi * f_m);
  return k_over_tau / (s * s + s / cfg.tau + k_over_tau);
}

/// |H(j*2*pi*f_m)|. Exactly 1 at f_m = 0.
inline double closed_loop_magnitude(const PllConfig& cfg, double f_m) {
  return std::abs(closed_loop_response(cfg, f_m));
}

struct PllTrajectory {
  std::vector<double> times;        // s
  std::vector<double> v_error;      // detector output, V
  std::vector<double> v_ctrl;       // loop filter output, V
  std::vector<double> phase_error;  // wrapped, rad
  std::optional<double> lock_time;  // s; empty when the loop never settles
};

/// Fixed-step explicit integration of the two-state loop (wrapped phase
/// error and filter voltage). lock_time is the first instant after which
/// |phase_error| stays below lock_tol until t_max; a loop that starts inside
/// the window and never leaves reports lock at t = 0.
///
/// The explicit step needs dt well below 1/omega_n; anything at or above
/// 0.1/omega_n is rejected rather than silently producing garbage.
inline PllTrajectory simulate_lock(const PllConfig& cfg, double f0_vco, double dt,
                                   double t_max, double lock_tol = deg_to_rad(2.0),
                                   double initial_phase_error = 0.0) {
  cfg.validate();
  if (!(f0_vco >= 0.0))
    throw std::domain_error("simulate_lock: f0_vco must be non-negative");
  if (!(lock_tol > 0.0))
    throw std::domain_error("simulate_lock: lock_tol must be positive");
  if (!(t_max > 0.0))
    throw precondition_error("simulate_lock: t_max must be positive");
  const double omega_n = natural_frequency_and_damping(cfg).omega_n;
  if (!(dt > 0.0) || !(dt < 0.1 / omega_n))
    throw precondition_error(
        "simulate_lock: dt must satisfy 0 < dt < 0.1/omega_n for a stable explicit step");

  const auto steps = static_cast<std::size_t>(std::ceil(t_max / dt));
  const double delta_omega = kTwoPi * (cfg.f_ref - f0_vco);

  PllTrajectory traj;
  traj.times.reserve(steps + 1);
  traj.v_error.reserve(steps + 1);
  traj.v_ctrl.reserve(steps + 1);
  traj.phase_error.reserve(steps + 1);

  double theta_e = initial_phase_error;
  double vc = 0.0;
  for (std::size_t k = 0; k <= steps; ++k) {
    const double pe = wrap_pi(theta_e);
    const double ve = cfg.kd * pe;
    traj.times.push_back(static_cast<double>(k) * dt);
    traj.v_error.push_back(ve);
    traj.v_ctrl.push_back(vc);
    traj.phase_error.push_back(pe);

    const double dtheta = delta_omega - cfg.kv * vc;
    const double dvc = (ve - vc) / cfg.tau;
    theta_e += dt * dtheta;
    vc += dt * dvc;
  }

  // Scan from the end for the last excursion outside the lock window.
  std::size_t last_bad = traj.phase_error.size();  // sentinel: none found
  for (std::size_t k = traj.phase_error.size(); k-- > 0;) {
    if (std::abs(traj.phase_error[k]) >= lock_tol) {
      last_bad = k;
      break;
    }
  }
  if (last_bad == traj.phase_error.size()) {
    traj.lock_time = traj.times.front();
  } else if (last_bad + 1 < traj.times.size()) {
    traj.lock_time = traj.times[last_bad + 1];
  }  // else: still outside the window at t_max -> no lock
  return traj;
}

/// RMS deviation of the phase error about its settled mean, in degrees.
/// Measured over the final quarter of the record so the entry transient
/// into the lock window (the slow creep toward the loop's static phase
/// offset) does not masquerade as jitter; when lock arrived later than
/// that, the span starts at the lock instant instead. Reported for
/// diagnostics even when the loop never locked.
inline double post_lock_jitter_deg(const PllTrajectory& traj) {
  if (traj.times.empty())
    throw std::invalid_argument("post_lock_jitter_deg: empty trajectory");
  std::size_t first = traj.times.size() - traj.times.size() / 4;
  if (traj.lock_time) {
    std::size_t locked = 0;
    while (locked < traj.times.size() && traj.times[locked] < *traj.lock_time) ++locked;
    first = std::max(first, locked);
  }
  if (first >= traj.times.size()) first = traj.times.size() - 1;
  const std::size_t n = traj.times.size() - first;
  double mean = 0.0;
  for (std::size_t k = first; k < traj.times.size(); ++k) mean += traj.phase_error[k];
  mean /= static_cast<double>(n);
  double acc = 0.0;
  for (std::size_t k = first; k < traj.times.size(); ++k) {
    const double d = traj.phase_error[k] - mean;
    acc += d * d;
  }
  return rad_to_deg(std::sqrt(acc / static_cast<double>(n)));
}

/// Single-sideband phase noise levels (dBc/Hz) on a grid of offset
/// frequencies from the carrier.
struct PhaseNoiseProfile {
  std::vector<double> offsets_hz;
  std::vector<double> levels_dbc_hz;

  void validate() const {
    if (offsets_hz.size() != levels_dbc_hz.size())
      throw std::invalid_argument("PhaseNoiseProfile: offsets and levels differ in length");
    if (offsets_hz.empty())
      throw std::invalid_argument("PhaseNoiseProfile: empty grid");
    for (std::size_t k = 0; k < offsets_hz.size(); ++k) {
      if (!(offsets_hz[k] > 0.0))
        throw std::invalid_argument("PhaseNoiseProfile: offsets must be positive");
      if (k > 0 && !(offsets_hz[k] > offsets_hz[k - 1]))
        throw std::invalid_argument("PhaseNoiseProfile: offsets must be strictly increasing");
      if (!std::isfinite(levels_dbc_hz[k]))
        throw std::invalid_argument("PhaseNoiseProfile: levels must be finite");
    }
  }
};

/// Default offset grid: 1 kHz to 100 MHz, 10 points per decade, log-spaced.
inline std::vector<double> default_phase_noise_grid() {
  std::vector<double> grid;
  grid.reserve(51);
  for (int k = 0; k <= 50; ++k)
    grid.push_back(std::pow(10.0, 3.0 + static_cast<double>(k) / 10.0));
  return grid;
}

/// Power-domain combination of two noise levels with the given weights.
inline double combine_noise_levels_db(double level_a_db, double weight_a,
                                      double level_b_db, double weight_b) {
  if (weight_a < 0.0 || weight_b < 0.0)
    throw std::domain_error("combine_noise_levels_db: weights must be non-negative");
  const double lin = db_to_power_ratio(level_a_db) * weight_a +
                     db_to_power_ratio(level_b_db) * weight_b;
  return power_ratio_to_db(lin);
}

/// Output phase noise of the locked loop: the reference shaped by |H|^2 and
/// the free-running VCO shaped by |1-H|^2, summed in the power domain.
/// Inside the loop bandwidth the reference dominates; far outside, the VCO.
inline PhaseNoiseProfile combine_phase_noise(const PhaseNoiseProfile& ref,
                                             const PhaseNoiseProfile& vco,
                                             const PllConfig& cfg) {
  ref.validate();
  vco.validate();
  cfg.validate();
  if (ref.offsets_hz != vco.offsets_hz)
    throw std::invalid_argument("combine_phase_noise: offset grids differ");

  PhaseNoiseProfile out;
  out.offsets_hz = ref.offsets_hz;
  out.levels_dbc_hz.reserve(ref.offsets_hz.size());
  for (std::size_t k = 0; k < ref.offsets_hz.size(); ++k) {
    const std::complex<double> h = closed_loop_response(cfg, ref.offsets_hz[k]);
    const double w_ref = std::norm(h);
    const double w_vco = std::norm(1.0 - h);
    out.levels_dbc_hz.push_back(
        combine_noise_levels_db(ref.levels_dbc_hz[k], w_ref, vco.levels_dbc_hz[k], w_vco));
  }
  return out;
}

/// Relaxation oscillator defined by its timing network: period 4*R*C*Vth/Vctrl.
struct VcoConfig {
  double r = 50.0e3;     // ohm
  double c = 10.0e-12;   // F
  double v_hyst = 0.5;   // comparator hysteresis, V

  void validate() const {
    if (!(r > 0.0)) throw std::domain_error("VcoConfig: r must be positive");
    if (!(c > 0.0)) throw std::domain_error("VcoConfig: c must be positive");
    if (!(v_hyst > 0.0)) throw std::domain_error("VcoConfig: v_hyst must be positive");
  }
};

/// f = Vctrl / (4*R*C*Vth). Linear in the control voltage, which is what
/// makes the tuning gain a constant.
inline double vco_frequency(const VcoConfig& cfg, double v_ctrl) {
  cfg.validate();
  if (v_ctrl < 0.0)
    throw std::domain_error("vco_frequency: v_ctrl must be non-negative");
  return v_ctrl / (4.0 * cfg.r * cfg.c * cfg.v_hyst);
}

/// Tuning gain Kv = 2*pi/(4*R*C*Vth), rad/s per volt.
inline double vco_gain(const VcoConfig& cfg) {
  cfg.validate();
  return kTwoPi / (4.0 * cfg.r * cfg.c * cfg.v_hyst);
}

struct FilterResponse {
  double magnitude;
  double phase_rad;
};

/// Three identical cascaded RC poles: |H| = (1+(wRC)^2)^(-3/2),
/// arg H = -3*atan(wRC). 270 degrees of total phase shift available, which
/// is what lets an inverting loop around it oscillate.
inline FilterResponse lpf3_response(double f, double r, double c) {
  if (f < 0.0) throw std::domain_error("lpf3_response: f must be non-negative");
  if (!(r > 0.0) || !(c > 0.0))
    throw std::domain_error("lpf3_response: r and c must be positive");
  const double w = kTwoPi * f * r * c;
  return {std::pow(1.0 + w * w, -1.5), -3.0 * std::atan(w)};
}

/// First-order all-pass: unit magnitude at every frequency, phase
/// -2*atan(wRC) sweeping 0 to -pi.
inline FilterResponse allpass_response(double f, double r, double c) {
  if (f < 0.0) throw std::domain_error("allpass_response: f must be non-negative");
  if (!(r > 0.0) || !(c > 0.0))
    throw std::domain_error("allpass_response: r and c must be positive");
  const double w = kTwoPi * f * r * c;
  return {1.0, -2.0 * std::atan(w)};
}

struct QuadratureLo {
  SampledSignal i;
  SampledSignal q;
};

namespace detail {

/// Core quadrature sample generator shared by the public LO op and the chain
/// loopback, which needs the LO on exactly the envelope's grid.
inline QuadratureLo quadrature_lo_samples(double f_lo, double amplitude, double sample_rate,
                                          std::size_t n, double phase_error_rad,
                                          double amp_imbalance_db) {
  const double eps = db_to_amplitude_ratio(amp_imbalance_db);
  std::vector<double> i(n), q(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / sample_rate;
    i[k] = amplitude * std::cos(kTwoPi * f_lo * t);
    q[k] = amplitude * eps * std::sin(kTwoPi * f_lo * t + phase_error_rad);
  }
  return {SampledSignal(std::move(i), sample_rate), SampledSignal(std::move(q), sample_rate)};
}

}  // namespace detail

/// In-phase/quadrature carrier pair with injectable impairments: a static
/// phase error on the Q branch and an amplitude imbalance in dB. Ideal
/// settings give cos / sin exactly.
inline QuadratureLo generate_quadrature_lo(double f_lo, double amplitude, double sample_rate,
                                           double duration, double phase_error_rad = 0.0,
                                           double amp_imbalance_db = 0.0) {
  if (!(f_lo > 0.0)) throw std::domain_error("generate_quadrature_lo: f_lo must be positive");
  if (!(amplitude > 0.0))
    throw std::domain_error("generate_quadrature_lo: amplitude must be positive");
  if (!(duration > 0.0))
    throw std::domain_error("generate_quadrature_lo: duration must be positive");
  if (!std::isfinite(phase_error_rad) || !std::isfinite(amp_imbalance_db))
    throw std::invalid_argument("generate_quadrature_lo: impairments must be finite");
  if (!(sample_rate > 10.0 * f_lo))
    throw precondition_error(
        "generate_quadrature_lo: sample_rate must exceed 10x f_lo to resolve the carrier");
  const auto n = static_cast<std::size_t>(std::llround(duration * sample_rate));
  if (n < 2)
    throw precondition_error("generate_quadrature_lo: duration too short for the sample rate");
  return detail::quadrature_lo_samples(f_lo, amplitude, sample_rate, n, phase_error_rad,
                                       amp_imbalance_db);
}

/// Recover the static quadrature phase error from an I/Q pair via the
/// normalized lag-0 cross-correlation: <i*q>/(rms_i*rms_q) = sin(phi_err)
/// for i = cos and q = sin(.+phi_err), independent of amplitude imbalance.
/// Averages cleanly only over an integer number of carrier periods.
inline double measure_iq_phase_error(const SampledSignal& i, const SampledSignal& q) {
  if (i.size() != q.size() || i.empty())
    throw std::invalid_argument("measure_iq_phase_error: signals must match and be non-empty");
  double mii = 0.0, mqq = 0.0, miq = 0.0;
  for (std::size_t k = 0; k < i.size(); ++k) {
    mii += i[k] * i[k];
    mqq += q[k] * q[k];
    miq += i[k] * q[k];
  }
  if (!(mii > 0.0) || !(mqq > 0.0))
    throw std::domain_error("measure_iq_phase_error: zero-power input");
  return std::asin(std::clamp(miq / std::sqrt(mii * mqq), -1.0, 1.0));
}

/// Q-to-I amplitude imbalance in dB, from the RMS ratio.
inline double measure_amplitude_imbalance_db(const SampledSignal& i, const SampledSignal& q) {
  if (i.size() != q.size() || i.empty())
    throw std::invalid_argument(
        "measure_amplitude_imbalance_db: signals must match and be non-empty");
  double mii = 0.0, mqq = 0.0;
  for (std::size_t k = 0; k < i.size(); ++k) {
    mii += i[k] * i[k];
    mqq += q[k] * q[k];
  }
  if (!(mii > 0.0) || !(mqq > 0.0))
    throw std::domain_error("measure_amplitude_imbalance_db: zero-power input");
  return 10.0 * std::log10(mqq / mii);
}

}  // namespace cryochain
