#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace tracerank {

inline constexpr int64_t kSecondsPerDay = 86400;

// Parses either an integer count of Unix seconds or an RFC 3339 timestamp
// ("2025-01-02T03:04:05Z", offsets and fractional seconds accepted; fractions
// are truncated to whole seconds). Returns nullopt on malformed input.
std::optional<int64_t> parse_timestamp(std::string_view text);

// "YYYY-MM-DDTHH:MM:SSZ" for the given Unix second.
std::string format_rfc3339(int64_t unix_seconds);

}  // namespace tracerank
