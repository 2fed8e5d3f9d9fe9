#pragma once

namespace tracerank {

inline constexpr const char* kToolName = "tracerank";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace tracerank
