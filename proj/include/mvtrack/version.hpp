#pragma once

namespace mvtrack {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace mvtrack
