#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "cryochain/constants.hpp"
#include "cryochain/errors.hpp"
#include "cryochain/util.hpp"

namespace cryochain {

/// Non-inverting LNA around a feedback pair (r_f, r_2), with input-referred
/// voltage and current noise densities and the source it looks into.
/// r_f = 0 degenerates to a unity follower, and zero e_n/i_n to a noiseless
/// amplifier, so those are allowed.
struct LnaConfig {
  double r_f = 4.0e3;          // ohm
  double r_2 = 1.0e3;          // ohm
  double e_n = 0.9e-9;         // V/sqrt(Hz)
  double i_n = 1.0e-12;        // A/sqrt(Hz)
  double r_s = 50.0;           // ohm
  double temperature = 290.0;  // K

  void validate() const {
    if (!(r_f >= 0.0)) throw std::domain_error("LnaConfig: r_f must be non-negative");
    if (!(r_2 > 0.0)) throw std::domain_error("LnaConfig: r_2 must be positive");
    if (!(e_n >= 0.0) || !(i_n >= 0.0))
      throw std::domain_error("LnaConfig: noise densities must be non-negative");
    if (!(r_s > 0.0)) throw std::domain_error("LnaConfig: r_s must be positive");
    if (!(temperature > 0.0))
      throw std::domain_error("LnaConfig: temperature must be positive");
  }
};

struct GainResult {
  double linear;
  double db;
};

/// G = 1 + r_f/r_2.
inline GainResult lna_gain(const LnaConfig& cfg) {
  cfg.validate();
  const double linear = 1.0 + cfg.r_f / cfg.r_2;
  return {linear, 20.0 * std::log10(linear)};
}

/// NF = 10 log10(1 + (e_n^2 + (i_n r_s)^2) / (4 kB T r_s)).
///
/// The denominator is the source's own thermal noise, so cooling the source
/// with the amplifier noise held fixed makes the noise figure worse: the
/// same amplifier is relatively noisier against a quieter source.
inline double lna_noise_figure(const LnaConfig& cfg) {
  cfg.validate();
  const double amp = cfg.e_n * cfg.e_n + (cfg.i_n * cfg.r_s) * (cfg.i_n * cfg.r_s);
  const double source = 4.0 * kBoltzmann * cfg.temperature * cfg.r_s;
  return 10.0 * std::log10(1.0 + amp / source);
}

/// Flash converter: 2^n - 1 comparators against a resistor-ladder
/// reference, each with its own offset. The seed is for drawing random
/// offset vectors reproducibly.
struct AdcConfig {
  int n_bits = 3;
  double v_fs = 2.5;  // V
  std::vector<double> comparator_offsets = std::vector<double>(7, 0.0);
  std::uint64_t seed = 0;

  void validate() const {
    if (n_bits < 1 || n_bits > 16)
      throw std::domain_error("AdcConfig: n_bits must be in [1, 16]");
    if (!(v_fs > 0.0) || !std::isfinite(v_fs))
      throw std::domain_error("AdcConfig: v_fs must be positive and finite");
    if (comparator_offsets.size() != comparator_count())
      throw std::domain_error("AdcConfig: need exactly 2^n_bits - 1 comparator offsets");
    for (double o : comparator_offsets)
      if (!std::isfinite(o))
        throw std::domain_error("AdcConfig: comparator offsets must be finite");
  }

  std::size_t comparator_count() const { return (std::size_t{1} << n_bits) - 1; }
  double v_lsb() const { return v_fs / static_cast<double>(std::size_t{1} << n_bits); }
};

/// Gaussian comparator offsets with the given sigma, drawn from cfg.seed.
inline std::vector<double> draw_comparator_offsets(const AdcConfig& cfg, double sigma) {
  if (!(sigma >= 0.0))
    throw std::domain_error("draw_comparator_offsets: sigma must be non-negative");
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, sigma);
  std::vector<double> offsets((std::size_t{1} << cfg.n_bits) - 1);
  for (double& o : offsets) o = sigma > 0.0 ? normal(rng) : 0.0;
  return offsets;
}

/// Ladder thresholds k * v_fs/2^n for k = 1..2^n-1, plus per-comparator
/// offsets. Offsets large enough to reorder neighbors make the converter
/// bubble-prone; that is a legitimate fault study, not an error here.
inline std::vector<double> adc_thresholds(const AdcConfig& cfg) {
  cfg.validate();
  std::vector<double> thresholds(cfg.comparator_count());
  for (std::size_t k = 0; k < thresholds.size(); ++k)
    thresholds[k] = static_cast<double>(k + 1) * cfg.v_lsb() + cfg.comparator_offsets[k];
  return thresholds;
}

/// Comparator bank output: D_k = 1 iff v_in > threshold_k.
inline std::vector<bool> thermometer_encode(double v_in,
                                            const std::vector<double>& thresholds) {
  if (!std::isfinite(v_in))
    throw std::invalid_argument("thermometer_encode: v_in must be finite");
  if (thresholds.empty())
    throw std::invalid_argument("thermometer_encode: need at least one threshold");
  std::vector<bool> d(thresholds.size());
  for (std::size_t k = 0; k < thresholds.size(); ++k) d[k] = v_in > thresholds[k];
  return d;
}

enum class EncoderMode {
  bubble_masked,  // mask to the topmost 1 of each run (D_k AND NOT D_{k+1}) first
  raw_or,         // OR the raw comparator outputs into the code bits
};

/// Thermometer-to-binary conversion. The OR network that forms each output
/// bit is only correct when a single line is active, so the default mode
/// applies the one-hot masking stage (keep D_k only where D_{k+1} is low)
/// first: a clean weight-w thermometer then encodes to exactly w, and a
/// bubbled input degrades to the OR of its run tops instead of saturating.
/// raw_or skips the masking and reproduces the plain OR network's
/// misbehavior on non-thermometer inputs, for fault studies.
inline unsigned priority_encode(const std::vector<bool>& d,
                                EncoderMode mode = EncoderMode::bubble_masked) {
  unsigned code = 0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (!d[k]) continue;
    const bool masked_out =
        mode == EncoderMode::bubble_masked && k + 1 < d.size() && d[k + 1];
    if (!masked_out) code |= static_cast<unsigned>(k + 1);
  }
  return code;
}

/// RMS quantization noise of an ideal n-bit quantizer: v_fs / (2^n sqrt(12)).
inline double quantization_noise_rms(const AdcConfig& cfg) {
  cfg.validate();
  return cfg.v_fs / (static_cast<double>(std::size_t{1} << cfg.n_bits) * std::sqrt(12.0));
}

/// One full conversion: comparator bank then encoder.
inline unsigned adc_convert(double v_in, const std::vector<double>& thresholds,
                            EncoderMode mode = EncoderMode::bubble_masked) {
  return priority_encode(thermometer_encode(v_in, thresholds), mode);
}

/// Effective number of bits from a coherently sampled sine test.
///
/// A tone at amplitude `test_tone_amplitude` around mid-scale is digitized
/// through the full threshold/encode chain and reconstructed at code
/// midpoints. A sine at the (known) test frequency is least-squares fitted
/// to the reconstruction, everything the fit cannot explain counts as
/// noise-plus-distortion, and ENOB = (SINAD_dB - 1.76) / 6.02. Fitting the
/// amplitude and phase instead of assuming them mirrors how converter
/// test sets work and keeps the quantizer's gain error out of the noise
/// term. The tone frequency is chosen coprime to the record length so every
/// sample lands on a distinct phase; the seed only randomizes the starting
/// phase. Full scale means amplitude v_fs/2; halving the amplitude costs
/// very nearly one bit.
inline double adc_enob(const AdcConfig& cfg, double test_tone_amplitude,
                       std::size_t samples, std::uint64_t seed) {
  cfg.validate();
  if (!(test_tone_amplitude > 0.0))
    throw std::domain_error("adc_enob: test_tone_amplitude must be positive");
  if (samples < 4096)
    throw precondition_error("adc_enob: need at least 4096 samples for a stable SINAD");

  std::size_t cycles = 127;
  if (std::gcd(cycles, samples) != 1) cycles = 131;

  std::mt19937_64 rng(seed);
  const double phase = std::uniform_real_distribution<double>(0.0, kTwoPi)(rng);
  const auto thresholds = adc_thresholds(cfg);
  const double v_lsb = cfg.v_lsb();
  const double mid = cfg.v_fs / 2.0;

  std::vector<double> theta(samples);
  std::vector<double> recon(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    theta[k] = kTwoPi * static_cast<double>(cycles) * static_cast<double>(k) /
                   static_cast<double>(samples) +
               phase;
    const double v = mid + test_tone_amplitude * std::sin(theta[k]);
    const unsigned code = adc_convert(v, thresholds);
    recon[k] = (static_cast<double>(code) + 0.5) * v_lsb;
  }

  // Coherent sampling makes {cos, sin, 1} orthogonal over the record, so
  // the least-squares fit collapses to three projections.
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    a += recon[k] * std::cos(theta[k]);
    b += recon[k] * std::sin(theta[k]);
    c += recon[k];
  }
  const double n = static_cast<double>(samples);
  a *= 2.0 / n;
  b *= 2.0 / n;
  c /= n;

  double err_power = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    const double e = recon[k] - (a * std::cos(theta[k]) + b * std::sin(theta[k]) + c);
    err_power += e * e;
  }
  err_power /= n;
  const double sig_power = (a * a + b * b) / 2.0;
  if (!(err_power > 0.0))
    throw precondition_error("adc_enob: residual vanished; tone does not exercise the converter");
  const double sinad_db = 10.0 * std::log10(sig_power / err_power);
  return (sinad_db - 1.76) / 6.02;
}

/// 8-PSK constellation: points at k * 45 degrees, natural binary labels
/// counterclockwise from angle 0, common amplitude sqrt(E_s).
struct PskConstellation {
  int order = 8;
  double amplitude = 1.0;

  void validate() const {
    if (order != 8)
      throw std::domain_error("PskConstellation: only order 8 is supported");
    if (!(amplitude > 0.0) || !std::isfinite(amplitude))
      throw std::domain_error("PskConstellation: amplitude must be positive and finite");
  }

  double symbol_angle(unsigned symbol) const { return static_cast<double>(symbol) * (kPi / 4.0); }
};

struct IqPoint {
  double i;
  double q;
};

/// Map a 3-bit symbol to its constellation point. The eight points use
/// exact values of cos/sin at multiples of 45 degrees, so modulate followed
/// by demodulate is the identity without any tolerance.
inline IqPoint psk_modulate(unsigned symbol, const PskConstellation& c) {
  c.validate();
  if (symbol >= 8)
    throw std::invalid_argument("psk_modulate: symbol must be below 8");
  static const double s = std::sqrt(0.5);
  static const double unit[8][2] = {{1.0, 0.0}, {s, s},   {0.0, 1.0}, {-s, s},
                                    {-1.0, 0.0}, {-s, -s}, {0.0, -1.0}, {s, -s}};
  return {c.amplitude * unit[symbol][0], c.amplitude * unit[symbol][1]};
}

/// Nearest-angle 8-PSK decision, ties broken toward the lower symbol index.
///
/// A rough sector guess from atan2 is refined by exact half-plane tests
/// against the two adjacent decision boundaries (odd multiples of 22.5
/// degrees): the sign of cos(b) q - sin(b) i says which side of boundary b
/// the point falls on, and a zero says it sits exactly on it. That keeps
/// the boundary decision consistent regardless of how atan2 rounds.
inline unsigned psk_demodulate(double i, double q, const PskConstellation& c) {
  c.validate();
  if (!std::isfinite(i) || !std::isfinite(q))
    throw std::invalid_argument("psk_demodulate: inputs must be finite");
  if (i == 0.0 && q == 0.0)
    throw std::domain_error("psk_demodulate: the origin carries no phase");

  double a = std::atan2(q, i);
  if (a < 0.0) a += kTwoPi;
  auto rough = static_cast<long>(std::floor(a / (kPi / 4.0) + 0.5));  // 0..8

  const double b_lo = static_cast<double>(2 * rough - 1) * (kPi / 8.0);
  const double b_hi = static_cast<double>(2 * rough + 1) * (kPi / 8.0);
  const double cross_lo = std::cos(b_lo) * q - std::sin(b_lo) * i;
  const double cross_hi = std::cos(b_hi) * q - std::sin(b_hi) * i;

  long k = rough;
  if (cross_lo < 0.0) {
    k = rough - 1;
  } else if (cross_lo == 0.0) {
    k = std::min(((rough - 1) % 8 + 8) % 8, (rough % 8 + 8) % 8);
  } else if (cross_hi > 0.0) {
    k = rough + 1;
  } else if (cross_hi == 0.0) {
    k = std::min((rough % 8 + 8) % 8, ((rough + 1) % 8 + 8) % 8);
  }
  return static_cast<unsigned>((k % 8 + 8) % 8);
}

/// Adjacent-symbol approximation to the 8-PSK symbol error rate:
/// P_s = 2 Q(sqrt(2 Es/N0) sin(pi/8)), capped at 1. Tight above ~6 dB,
/// an upper bound below.
inline double ser_analytic(double es_n0_db) {
  if (std::isnan(es_n0_db))
    throw std::invalid_argument("ser_analytic: es_n0_db must not be NaN");
  if (std::isinf(es_n0_db)) return es_n0_db > 0.0 ? 0.0 : 1.0;
  const double gamma = db_to_power_ratio(es_n0_db);
  const double arg = std::sqrt(2.0 * gamma) * std::sin(kPi / 8.0);
  return std::min(1.0, 2.0 * q_function(arg));
}

struct SerEstimate {
  double ser;
  double ci_lo;  // Wilson 95%
  double ci_hi;
  std::uint64_t trials;
  std::uint64_t errors;
};

/// Seeded Monte Carlo SER: uniform symbols, circular Gaussian noise with
/// per-component variance N0/2 at symbol energy Es = amplitude^2,
/// nearest-angle decisions. Trials can be split into partitions, each with
/// a seed derived from (seed, partition index); the result is identical for
/// the same seed and partition count, so a sweep can fan partitions out to
/// workers without losing reproducibility. A +infinity es_n0_db is the
/// noiseless sentinel.
inline SerEstimate ser_monte_carlo(double es_n0_db, std::uint64_t trials,
                                   std::uint64_t seed, std::uint64_t partitions = 1) {
  if (std::isnan(es_n0_db))
    throw std::invalid_argument("ser_monte_carlo: es_n0_db must not be NaN");
  if (trials < 1000)
    throw precondition_error("ser_monte_carlo: need at least 1000 trials");
  if (partitions < 1 || partitions > trials)
    throw std::invalid_argument("ser_monte_carlo: partitions must be in [1, trials]");

  const PskConstellation c;
  const bool noiseless = std::isinf(es_n0_db) && es_n0_db > 0.0;
  double sigma = 0.0;
  if (!noiseless) {
    const double gamma = db_to_power_ratio(es_n0_db);
    sigma = c.amplitude * std::sqrt(1.0 / (2.0 * gamma));
  }

  std::uint64_t errors = 0;
  const std::uint64_t base = trials / partitions;
  const std::uint64_t remainder = trials % partitions;
  for (std::uint64_t p = 0; p < partitions; ++p) {
    const std::uint64_t count = base + (p < remainder ? 1 : 0);
    std::mt19937_64 rng(mix_seed(seed, p));
    std::uniform_int_distribution<unsigned> pick(0, 7);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (std::uint64_t t = 0; t < count; ++t) {
      const unsigned sent = pick(rng);
      IqPoint pt = psk_modulate(sent, c);
      if (!noiseless) {
        pt.i += sigma * noise(rng);
        pt.q += sigma * noise(rng);
      }
      if (psk_demodulate(pt.i, pt.q, c) != sent) ++errors;
    }
  }

  const ProportionInterval ci = wilson_interval(errors, trials);
  return {static_cast<double>(errors) / static_cast<double>(trials), ci.lo, ci.hi, trials,
          errors};
}

}  // namespace cryochain
