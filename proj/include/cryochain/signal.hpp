#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cryochain {

namespace detail {

inline bool sample_is_finite(double x) { return std::isfinite(x); }
inline bool sample_is_finite(const std::complex<double>& x) {
  return std::isfinite(x.real()) && std::isfinite(x.imag());
}

}  // namespace detail

/// Uniformly sampled waveform. Construction rejects non-finite samples and
/// non-positive rates, so every block downstream can assume clean data.
template <typename T>
class BasicSignal {
public:
  BasicSignal() = default;

  BasicSignal(std::vector<T> samples, double sample_rate, double start_time = 0.0)
      : samples_(std::move(samples)), sample_rate_(sample_rate), start_time_(start_time) {
    if (!(sample_rate_ > 0.0) || !std::isfinite(sample_rate_))
      throw std::invalid_argument("BasicSignal: sample_rate must be positive and finite");
    if (!std::isfinite(start_time_))
      throw std::invalid_argument("BasicSignal: start_time must be finite");
    for (std::size_t k = 0; k < samples_.size(); ++k) {
      if (!detail::sample_is_finite(samples_[k]))
        throw std::invalid_argument("BasicSignal: non-finite sample at index " +
                                    std::to_string(k));
    }
  }

  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  double sample_rate() const { return sample_rate_; }
  double start_time() const { return start_time_; }
  double duration() const { return static_cast<double>(samples_.size()) / sample_rate_; }
  double time_at(std::size_t k) const {
    return start_time_ + static_cast<double>(k) / sample_rate_;
  }

  const T& operator[](std::size_t k) const { return samples_[k]; }
  const std::vector<T>& samples() const { return samples_; }

  auto begin() const { return samples_.begin(); }
  auto end() const { return samples_.end(); }

  double mean_power() const {
    if (samples_.empty()) return 0.0;
    double acc = 0.0;
    for (const T& s : samples_) {
      const double a = std::abs(s);
      acc += a * a;
    }
    return acc / static_cast<double>(samples_.size());
  }

  double rms() const { return std::sqrt(mean_power()); }

private:
  std::vector<T> samples_;
  double sample_rate_ = 1.0;
  double start_time_ = 0.0;
};

using SampledSignal = BasicSignal<double>;
using ComplexSignal = BasicSignal<std::complex<double>>;

}  // namespace cryochain
