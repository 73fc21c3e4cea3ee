#pragma once

namespace stvaudit {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace stvaudit
