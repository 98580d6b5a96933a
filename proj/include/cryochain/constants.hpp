#pragma once

namespace cryochain {

// CODATA exact values (2019 SI redefinition).
inline constexpr double kBoltzmann = 1.380649e-23;          // J/K
inline constexpr double kElementaryCharge = 1.602176634e-19;  // C
inline constexpr double kPlanck = 6.62607015e-34;           // J*s

// Reference temperature for device parameters quoted "at room temperature".
inline constexpr double kRoomTemperature = 300.0;  // K

}  // namespace cryochain
