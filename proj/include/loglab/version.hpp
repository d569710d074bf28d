#pragma once

namespace loglab {

inline constexpr const char* kToolName = "loglab";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace loglab
