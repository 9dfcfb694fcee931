#pragma once

namespace pulseforge {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace pulseforge
