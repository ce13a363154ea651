#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace newsrag {

// Milliseconds since the Unix epoch, always UTC.
using UtcMillis = std::int64_t;

// Parses "YYYY-MM-DDTHH:MM:SSZ" or "YYYY-MM-DDTHH:MM:SS.mmmZ".
// Throws Error(InvalidTimestamp) on anything else.
UtcMillis parse_utc(std::string_view iso8601);

// Inverse of parse_utc; emits ".mmm" only when the millisecond part is non-zero.
std::string format_utc(UtcMillis ms);

}  // namespace newsrag
