#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace gevi {

using Instant = std::chrono::sys_seconds;
using Duration = std::chrono::seconds;

/// Parses an ISO-8601 UTC instant: `YYYY-MM-DD`, optionally followed by
/// `THH:MM:SS` (or a space separator), optional fractional seconds (dropped)
/// and an optional `Z` / `+00:00` suffix. Throws std::invalid_argument.
Instant parse_instant(std::string_view text);

/// `YYYY-MM-DDTHH:MM:SSZ`
std::string format_instant(Instant t);

/// `YYYY-MM-DD`, time of day dropped.
std::string format_date(Instant t);

constexpr Duration days(long long n) { return std::chrono::duration_cast<Duration>(std::chrono::days(n)); }

}  // namespace gevi
