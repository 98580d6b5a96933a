#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "cryochain/constants.hpp"
#include "cryochain/modulation.hpp"
#include "cryochain/util.hpp"

namespace cryochain {

/// Transmon circuit parameters (energies given as frequencies, E/h) plus
/// the resonator coupling and coherence times.
///
/// Defaults sit at the usual operating point: f01 = 5 GHz, anharmonicity
/// -200 MHz, chi = g^2/Delta = 10 MHz, T1 = 50 us, T2 = 30 us.
struct TransmonParams {
  double ej_over_h = 16.9e9;     // Hz
  double ec_over_h = 0.2e9;      // Hz
  double g_over_2pi = 100.0e6;   // Hz
  double delta_over_2pi = 1.0e9; // Hz, qubit-resonator detuning
  double t1 = 50.0e-6;           // s
  double t2 = 30.0e-6;           // s

  void validate() const {
    if (!(ec_over_h > 0.0) || !(ej_over_h > ec_over_h))
      throw std::domain_error("TransmonParams: transmon regime requires ej > ec > 0");
    if (!(t1 > 0.0) || !(t2 > 0.0))
      throw std::domain_error("TransmonParams: t1 and t2 must be positive");
    if (t2 > 2.0 * t1)
      throw std::domain_error("TransmonParams: t2 cannot exceed 2*t1");
    if (!std::isfinite(g_over_2pi) || !std::isfinite(delta_over_2pi))
      throw std::domain_error("TransmonParams: coupling and detuning must be finite");
  }
};

/// f01 = sqrt(8 Ej Ec)/h - Ec/h.
inline double transition_frequency(const TransmonParams& p) {
  p.validate();
  return std::sqrt(8.0 * p.ej_over_h * p.ec_over_h) - p.ec_over_h;
}

/// Leading-order transmon anharmonicity, -Ec/h.
inline double anharmonicity(const TransmonParams& p) {
  p.validate();
  return -p.ec_over_h;
}

/// chi = g^2 / Delta, in Hz, signed with the detuning. The dressed
/// resonator frequencies for |0> and |1> sit 2*chi apart.
inline double dispersive_shift(const TransmonParams& p) {
  p.validate();
  if (p.delta_over_2pi == 0.0)
    throw std::domain_error("dispersive_shift: detuning must be nonzero");
  return p.g_over_2pi * p.g_over_2pi / p.delta_over_2pi;
}

/// Dispersive readout settings. chi here is angular (rad/s) so that
/// chi * t_meas is dimensionless.
struct ReadoutSpec {
  double chi = kTwoPi * 1.0e6;  // rad/s
  double n_bar = 10.0;          // average resonator photons
  double t_meas = 1.25e-7;      // s
  std::optional<double> t_sys;     // K, for the system-noise SNR form
  std::optional<double> bandwidth; // Hz, for the system-noise SNR form

  void validate() const {
    if (!(chi >= 0.0) || !std::isfinite(chi))
      throw std::domain_error("ReadoutSpec: chi must be non-negative");
    if (!(n_bar >= 0.0) || !std::isfinite(n_bar))
      throw std::domain_error("ReadoutSpec: n_bar must be non-negative");
    if (!(t_meas > 0.0))
      throw std::domain_error("ReadoutSpec: t_meas must be positive");
    if (t_sys && !(*t_sys > 0.0))
      throw std::domain_error("ReadoutSpec: t_sys must be positive when set");
    if (bandwidth && !(*bandwidth > 0.0))
      throw std::domain_error("ReadoutSpec: bandwidth must be positive when set");
  }
};

struct SnrResult {
  double linear;
  double db;
  bool meets_criterion;  // clears the 10 dB bar
};

/// SNR = 4 chi^2 nbar T / (1 + (2 chi T)^2), evaluated with chi in rad/s.
/// The expression peaks at 2 chi T = 1 for fixed nbar * chi.
inline SnrResult readout_snr(const ReadoutSpec& spec) {
  spec.validate();
  const double ct = spec.chi * spec.t_meas;
  const double linear =
      4.0 * spec.chi * ct * spec.n_bar / (1.0 + (2.0 * ct) * (2.0 * ct));
  const double db = linear > 0.0 ? power_ratio_to_db(linear)
                                 : -std::numeric_limits<double>::infinity();
  return {linear, db, db > 10.0};
}

/// Amplifier-chain form: SNR = P_signal / (kB * T_sys * B). Requires the
/// optional t_sys and bandwidth fields.
inline SnrResult readout_snr_system(const ReadoutSpec& spec, double p_signal_w) {
  spec.validate();
  if (!spec.t_sys || !spec.bandwidth)
    throw std::invalid_argument("readout_snr_system: t_sys and bandwidth must be set");
  if (!(p_signal_w >= 0.0))
    throw std::domain_error("readout_snr_system: signal power must be non-negative");
  const double linear = p_signal_w / (kBoltzmann * *spec.t_sys * *spec.bandwidth);
  const double db = linear > 0.0 ? power_ratio_to_db(linear)
                                 : -std::numeric_limits<double>::infinity();
  return {linear, db, db > 10.0};
}

/// True when the qubit quantum sits safely above the thermal background:
/// h * f01 > margin * kB * T.
inline bool thermal_occupancy_ok(double f01, double temperature, double margin = 5.0) {
  if (!(f01 > 0.0) || !(temperature > 0.0) || !(margin > 0.0))
    throw std::domain_error("thermal_occupancy_ok: all arguments must be positive");
  return kPlanck * f01 > margin * kBoltzmann * temperature;
}

/// Pure qubit state as the point (theta, phi) on the Bloch sphere:
/// |psi> = cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>.
struct BlochState {
  double theta = 0.0;  // [0, pi]
  double phi = 0.0;    // [0, 2 pi)

  void validate() const {
    if (!(theta >= 0.0) || !(theta <= kPi))
      throw std::domain_error("BlochState: theta must lie in [0, pi]");
    if (!(phi >= 0.0) || !(phi < kTwoPi))
      throw std::domain_error("BlochState: phi must lie in [0, 2 pi)");
  }
};

/// Rotate the Bloch vector by `angle` about the equatorial axis at azimuth
/// `axis_phi` (XY control only; no flux line, so no Z axis).
///
/// Works on the 3-vector via the axis-angle (Rodrigues) form, then folds
/// back to canonical angles. Angles-as-state keeps the norm exactly 1, and
/// at the poles phi is gauge so it collapses to 0 there.
inline BlochState apply_rotation(const BlochState& state, double axis_phi, double angle) {
  state.validate();
  if (!std::isfinite(axis_phi) || !std::isfinite(angle))
    throw std::domain_error("apply_rotation: axis_phi and angle must be finite");

  const double st = std::sin(state.theta);
  const double vx = st * std::cos(state.phi);
  const double vy = st * std::sin(state.phi);
  const double vz = std::cos(state.theta);

  const double nx = std::cos(axis_phi);
  const double ny = std::sin(axis_phi);

  const double ca = std::cos(angle);
  const double sa = std::sin(angle);
  const double dot = nx * vx + ny * vy;  // nz = 0
  const double cx = ny * vz;             // n x v
  const double cy = -nx * vz;
  const double cz = nx * vy - ny * vx;

  const double rx = vx * ca + cx * sa + nx * dot * (1.0 - ca);
  const double ry = vy * ca + cy * sa + ny * dot * (1.0 - ca);
  const double rz = vz * ca + cz * sa;

  const double z = std::clamp(rz, -1.0, 1.0);
  BlochState out;
  if (z == 1.0) {
    out.theta = 0.0;
  } else if (z == -1.0) {
    out.theta = kPi;
  } else {
    out.theta = std::acos(z);
    double phi = std::atan2(ry, rx);
    if (phi < 0.0) phi += kTwoPi;
    if (phi >= kTwoPi) phi = 0.0;
    out.phi = phi;
  }
  return out;
}

struct RotationSpec {
  double axis_phi;  // rad
  double angle;     // rad
};

/// Read a constant-axis pulse off its I/Q envelope: the rotation angle is
/// the Rabi rate times the integrated amplitude (trapezoid rule), and the
/// axis azimuth is the envelope phase atan2(Q, I).
///
/// The phase must be constant wherever the amplitude exceeds 1% of peak;
/// anything else (a chirp, or DRAG with its quadrature component) is not a
/// single-axis rotation and is rejected.
inline RotationSpec pulse_to_rotation(const IQEnvelope& env, double rabi_rate_per_volt) {
  env.validate();
  if (!(rabi_rate_per_volt > 0.0))
    throw std::domain_error("pulse_to_rotation: rabi_rate_per_volt must be positive");
  if (env.i.empty()) return {0.0, 0.0};

  double peak = 0.0;
  std::size_t peak_idx = 0;
  std::vector<double> amp(env.i.size());
  for (std::size_t k = 0; k < env.i.size(); ++k) {
    amp[k] = std::hypot(env.i[k], env.q[k]);
    if (amp[k] > peak) {
      peak = amp[k];
      peak_idx = k;
    }
  }
  if (peak == 0.0) return {0.0, 0.0};

  const double phase_ref = std::atan2(env.q[peak_idx], env.i[peak_idx]);
  const double threshold = 0.01 * peak;
  for (std::size_t k = 0; k < amp.size(); ++k) {
    if (amp[k] <= threshold) continue;
    const double phase = std::atan2(env.q[k], env.i[k]);
    if (std::abs(wrap_pi(phase - phase_ref)) > 1.0e-6)
      throw std::invalid_argument(
          "pulse_to_rotation: unsupported pulse (envelope phase is not constant)");
  }

  const double dt = 1.0 / env.sample_rate();
  double integral = 0.0;
  for (std::size_t k = 1; k < amp.size(); ++k)
    integral += 0.5 * (amp[k - 1] + amp[k]) * dt;
  return {phase_ref, rabi_rate_per_volt * integral};
}

struct CoherenceEnvelope {
  double population;  // exp(-t/T1)
  double coherence;   // exp(-t/T2)
};

/// Factorized relaxation and dephasing envelopes at time t.
inline CoherenceEnvelope coherence_envelope(const TransmonParams& p, double t) {
  p.validate();
  if (!(t >= 0.0)) throw std::domain_error("coherence_envelope: t must be non-negative");
  return {std::exp(-t / p.t1), std::exp(-t / p.t2)};
}

/// Quadratic error model: F = 1 - sigma_phi^2/2 - sigma_a^2/2, for RMS
/// phase error (rad) and fractional RMS amplitude error. Only meaningful
/// for small errors; arguments above 0.5 are outside the expansion's
/// validity and rejected.
inline double gate_fidelity(double sigma_phi, double sigma_a) {
  if (!(sigma_phi >= 0.0) || !(sigma_a >= 0.0))
    throw std::domain_error("gate_fidelity: RMS errors must be non-negative");
  if (sigma_phi > 0.5 || sigma_a > 0.5)
    throw std::domain_error("gate_fidelity: errors above 0.5 are outside the quadratic model");
  return 1.0 - 0.5 * sigma_phi * sigma_phi - 0.5 * sigma_a * sigma_a;
}

}  // namespace cryochain
