#pragma once

namespace dobgibbs {

inline constexpr const char* kToolName = "dobgibbs";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace dobgibbs
