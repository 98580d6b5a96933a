#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cryochain/errors.hpp"
#include "cryochain/signal.hpp"
#include "cryochain/util.hpp"

namespace cryochain {

/// Ideal binary-weighted DAC: full scale v_ref split into 2^n_bits levels.
struct DacConfig {
  int n_bits = 3;
  double v_ref = 1.0;

  void validate() const {
    if (n_bits < 1 || n_bits > 30)
      throw std::domain_error("DacConfig: n_bits must be in [1, 30]");
    if (!(v_ref > 0.0) || !std::isfinite(v_ref))
      throw std::domain_error("DacConfig: v_ref must be positive and finite");
  }

  std::uint32_t level_count() const { return 1u << n_bits; }
  double v_lsb() const { return v_ref / static_cast<double>(level_count()); }
};

/// code * v_ref / 2^n. The division by a power of two is exact, so the
/// transfer curve is a strict staircase with step v_lsb().
inline double dac_output(std::uint32_t code, const DacConfig& cfg) {
  cfg.validate();
  if (code >= cfg.level_count())
    throw std::invalid_argument("dac_output: code out of range for n_bits");
  return cfg.v_ref * (static_cast<double>(code) / static_cast<double>(cfg.level_count()));
}

struct DacLinearity {
  std::vector<double> dnl;  // per code; dnl[0] = 0 by convention
  std::vector<double> inl;  // running sum of dnl
};

/// Differential nonlinearity of each step against the ideal LSB, and its
/// running sum. A step of zero width shows up as DNL = -1 (missing code).
inline DacLinearity dac_linearity(const std::vector<double>& measured_levels,
                                  const DacConfig& cfg) {
  cfg.validate();
  if (measured_levels.size() != cfg.level_count())
    throw std::invalid_argument("dac_linearity: expected one measured level per code");
  const double v_lsb = cfg.v_lsb();
  DacLinearity lin;
  lin.dnl.resize(measured_levels.size(), 0.0);
  lin.inl.resize(measured_levels.size(), 0.0);
  double running = 0.0;
  for (std::size_t k = 1; k < measured_levels.size(); ++k) {
    lin.dnl[k] = (measured_levels[k] - measured_levels[k - 1] - v_lsb) / v_lsb;
    running += lin.dnl[k];
    lin.inl[k] = running;
  }
  return lin;
}

enum class PulseShape { gaussian, drag, cosine };

inline PulseShape pulse_shape_from_name(const std::string& name) {
  if (name == "gaussian") return PulseShape::gaussian;
  if (name == "drag") return PulseShape::drag;
  if (name == "cosine") return PulseShape::cosine;
  throw std::invalid_argument("unknown pulse shape \"" + name +
                              "\" (expected gaussian, drag, or cosine)");
}

inline const char* pulse_shape_name(PulseShape shape) {
  switch (shape) {
    case PulseShape::gaussian: return "gaussian";
    case PulseShape::drag: return "drag";
    case PulseShape::cosine: return "cosine";
  }
  throw std::invalid_argument("pulse_shape_name: unrecognized shape value");
}

struct PulseSpec {
  PulseShape shape = PulseShape::gaussian;
  double duration = 20.0e-9;         // s
  double sigma = 4.0e-9;             // s; gaussian and drag only
  double drag_coefficient = 0.0;     // unitless; drag only
  double peak_amplitude = 1.0;       // V

  void validate() const {
    if (!(duration > 0.0)) throw std::domain_error("PulseSpec: duration must be positive");
    if (shape != PulseShape::cosine && !(sigma > 0.0))
      throw std::domain_error("PulseSpec: sigma must be positive for this shape");
    if (!std::isfinite(drag_coefficient))
      throw std::domain_error("PulseSpec: drag_coefficient must be finite");
    if (!(peak_amplitude >= 0.0) || !std::isfinite(peak_amplitude))
      throw std::domain_error("PulseSpec: peak_amplitude must be non-negative and finite");
  }
};

/// Baseband I/Q envelope pair on a common sampling grid.
struct IQEnvelope {
  SampledSignal i;
  SampledSignal q;

  double sample_rate() const { return i.sample_rate(); }

  void validate() const {
    if (i.size() != q.size())
      throw std::invalid_argument("IQEnvelope: i and q must have equal length");
    if (i.sample_rate() != q.sample_rate())
      throw std::invalid_argument("IQEnvelope: i and q must share a sample rate");
  }
};

/// Sample the requested pulse shape over [0, duration], endpoints included.
///
/// gaussian: I = A exp(-(t-T/2)^2 / 2 sigma^2), Q = 0.
/// drag:     same I, Q = coeff * sigma * dI/dt, so |Q| peaks at
///           coeff * A / sqrt(e) one sigma either side of center.
/// cosine:   I = A (1 - cos(2 pi t / T)) / 2, Q = 0.
inline IQEnvelope make_envelope(const PulseSpec& spec, double sample_rate) {
  spec.validate();
  if (!(sample_rate > 0.0))
    throw std::domain_error("make_envelope: sample_rate must be positive");
  const auto intervals = std::llround(sample_rate * spec.duration);
  if (intervals < 16)
    throw precondition_error(
        "make_envelope: sample_rate * duration must cover at least 16 samples");
  const auto n = static_cast<std::size_t>(intervals) + 1;

  std::vector<double> i(n, 0.0), q(n, 0.0);
  const double a = spec.peak_amplitude;
  const double half = spec.duration / 2.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / sample_rate;
    switch (spec.shape) {
      case PulseShape::gaussian:
      case PulseShape::drag: {
        const double x = (t - half) / spec.sigma;
        const double g = a * std::exp(-0.5 * x * x);
        i[k] = g;
        if (spec.shape == PulseShape::drag)
          q[k] = -spec.drag_coefficient * x * g;  // coeff * sigma * dI/dt
        break;
      }
      case PulseShape::cosine:
        i[k] = a * (1.0 - std::cos(kTwoPi * t / spec.duration)) / 2.0;
        break;
    }
  }
  return {SampledSignal(std::move(i), sample_rate), SampledSignal(std::move(q), sample_rate)};
}

/// s(t) = I(t) cos(w t) - Q(t) sin(w t), i.e. the real part of
/// (I + jQ) e^{jwt}, so quadrature demodulation recovers amplitude
/// sqrt(I^2+Q^2) and phase atan2(Q, I) directly.
inline SampledSignal iq_upconvert(const IQEnvelope& env, double f_c) {
  env.validate();
  if (!(f_c > 0.0)) throw std::domain_error("iq_upconvert: f_c must be positive");
  if (!(env.sample_rate() > 4.0 * f_c))
    throw precondition_error("iq_upconvert: sample_rate must exceed 4x the carrier");
  std::vector<double> s(env.i.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double t = env.i.time_at(k);
    s[k] = env.i[k] * std::cos(kTwoPi * f_c * t) - env.q[k] * std::sin(kTwoPi * f_c * t);
  }
  return SampledSignal(std::move(s), env.sample_rate(), env.i.start_time());
}

/// Wanted-to-image power ratio of a quadrature modulator with gain ratio eps
/// and phase skew phi_err between branches:
///   IRR = (1 + 2 eps cos phi + eps^2) / (1 - 2 eps cos phi + eps^2), in dB.
/// Perfect balance drives the image power to zero; the result is capped at
/// +200 dB there (and at -200 dB for the degenerate inverted case).
inline double image_rejection_ratio(double eps, double phi_err) {
  if (!(eps > 0.0)) throw std::domain_error("image_rejection_ratio: eps must be positive");
  if (!std::isfinite(phi_err))
    throw std::domain_error("image_rejection_ratio: phi_err must be finite");
  const double cross = 2.0 * eps * std::cos(phi_err);
  const double base = 1.0 + eps * eps;
  const double num = base + cross;
  const double den = base - cross;
  if (den <= 1.0e-20) return 200.0;
  if (num <= 1.0e-20) return -200.0;
  return 10.0 * std::log10(num / den);
}

struct PowerStageResult {
  SampledSignal output;
  double clipped_fraction;
};

/// Linear gain followed by a symmetric hard clip at +/- v_clip. The clipped
/// fraction is how many samples landed on the rails.
inline PowerStageResult power_stage(const SampledSignal& signal, double gain_db,
                                    double v_clip) {
  if (!(v_clip > 0.0)) throw std::domain_error("power_stage: v_clip must be positive");
  const double gain = db_to_amplitude_ratio(gain_db);
  std::vector<double> out(signal.size());
  std::size_t clipped = 0;
  for (std::size_t k = 0; k < signal.size(); ++k) {
    double v = gain * signal[k];
    if (v > v_clip) {
      v = v_clip;
      ++clipped;
    } else if (v < -v_clip) {
      v = -v_clip;
      ++clipped;
    }
    out[k] = v;
  }
  const double fraction =
      signal.empty() ? 0.0 : static_cast<double>(clipped) / static_cast<double>(signal.size());
  return {SampledSignal(std::move(out), signal.sample_rate(), signal.start_time()), fraction};
}

}  // namespace cryochain
