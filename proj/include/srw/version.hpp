#pragma once

namespace srw {

inline constexpr const char* kToolName = "srw";
inline constexpr const char* kToolVersion = "1.0.0";

}  // namespace srw
