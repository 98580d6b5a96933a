#pragma once

namespace cryochain {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cryochain
