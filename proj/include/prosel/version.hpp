#pragma once

namespace prosel {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace prosel
