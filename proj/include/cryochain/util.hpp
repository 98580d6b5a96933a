#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace cryochain {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wrap an angle to (-pi, pi]. The boundary maps to +pi, so an exact
/// half-turn difference is reported with a positive sign.
inline double wrap_pi(double x) {
  double r = std::fmod(x + kPi, kTwoPi);
  if (r <= 0.0) r += kTwoPi;
  return r - kPi;
}

inline double deg_to_rad(double deg) { return deg * (kPi / 180.0); }
inline double rad_to_deg(double rad) { return rad * (180.0 / kPi); }

inline double db_to_power_ratio(double db) { return std::pow(10.0, db / 10.0); }
inline double power_ratio_to_db(double ratio) { return 10.0 * std::log10(ratio); }
inline double db_to_amplitude_ratio(double db) { return std::pow(10.0, db / 20.0); }
inline double amplitude_ratio_to_db(double ratio) { return 20.0 * std::log10(ratio); }

/// Gaussian tail probability Q(x) = P(N(0,1) > x). Evaluated through erfc so
/// it stays accurate deep in the tail where 1 - Phi(x) would cancel.
inline double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

struct ProportionInterval {
  double lo;
  double hi;
};

/// Wilson score interval for a binomial proportion. Behaves sensibly at the
/// k=0 and k=n edges where the Wald interval collapses.
inline ProportionInterval wilson_interval(std::uint64_t successes, std::uint64_t trials,
                                          double z = 1.959963984540054) {
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = p + z2 / (2.0 * n);
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  double lo = (center - half) / denom;
  double hi = (center + half) / denom;
  if (lo < 0.0) lo = 0.0;
  if (hi > 1.0) hi = 1.0;
  return {lo, hi};
}

/// SplitMix64 finalizer over (seed, stream). Every randomized block derives
/// its generator seed through this, so one user-facing seed yields
/// reproducible yet decorrelated streams per purpose and per partition.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + (stream + 1) * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace cryochain
