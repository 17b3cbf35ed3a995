#pragma once

namespace qbatt {

inline constexpr const char* kVersion = "0.1.0";

} // namespace qbatt
