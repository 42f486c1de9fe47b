#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace aismarkov {

/// Seconds since 1970-01-01T00:00:00Z.
using UnixSeconds = std::int64_t;

inline constexpr UnixSeconds seconds_per_day = 86400;

/// Parses `YYYY-MM-DDTHH:MM:SS[Z|+00:00]` (a space may replace the `T`).
/// Returns nullopt for anything that is not a valid UTC instant.
std::optional<UnixSeconds> parse_iso8601_utc(std::string_view text);

/// Parses `YYYY-MM-DD` to the instant of that day's midnight UTC.
std::optional<UnixSeconds> parse_date_utc(std::string_view text);

/// Formats as `YYYY-MM-DDTHH:MM:SSZ`.
std::string format_iso8601_utc(UnixSeconds t);

/// Formats as `YYYY-MM-DD`.
std::string format_date_utc(UnixSeconds t);

/// Floor division for possibly-negative instants.
constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) {
        --q;
    }
    return q;
}

constexpr std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
    return -floor_div(-a, b);
}

} // namespace aismarkov
