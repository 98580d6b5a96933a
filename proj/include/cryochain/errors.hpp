#pragma once

#include <stdexcept>
#include <string>

namespace cryochain {

/// Thrown when a numerical precondition is violated: an integration step too
/// coarse for the explicit solver, an undersampled waveform, too few Monte
/// Carlo trials for a meaningful estimate. Distinct from std::domain_error
/// (unphysical input) and std::invalid_argument (malformed input) so callers
/// can map it to its own exit path.
class precondition_error : public std::runtime_error {
public:
  explicit precondition_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cryochain
