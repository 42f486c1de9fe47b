#include "aismarkov/timeutil.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>

namespace aismarkov {

namespace {

bool read_int(std::string_view text, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > text.size()) {
        return false;
    }
    for (std::size_t i = pos; i < pos + len; ++i) {
        if (text[i] < '0' || text[i] > '9') {
            return false;
        }
    }
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, out);
    return ec == std::errc{};
}

std::optional<std::chrono::sys_days> make_day(int y, int m, int d) {
    using namespace std::chrono;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) {
        return std::nullopt;
    }
    return sys_days{ymd};
}

} // namespace

std::optional<UnixSeconds> parse_date_utc(std::string_view text) {
    int y = 0, m = 0, d = 0;
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        return std::nullopt;
    }
    if (!read_int(text, 0, 4, y) || !read_int(text, 5, 2, m) || !read_int(text, 8, 2, d)) {
        return std::nullopt;
    }
    auto day = make_day(y, m, d);
    if (!day) {
        return std::nullopt;
    }
    return static_cast<UnixSeconds>(day->time_since_epoch().count()) * seconds_per_day;
}

std::optional<UnixSeconds> parse_iso8601_utc(std::string_view text) {
    if (text.size() < 19) {
        return std::nullopt;
    }
    auto date = parse_date_utc(text.substr(0, 10));
    if (!date || (text[10] != 'T' && text[10] != ' ') || text[13] != ':' || text[16] != ':') {
        return std::nullopt;
    }
    int hh = 0, mm = 0, ss = 0;
    if (!read_int(text, 11, 2, hh) || !read_int(text, 14, 2, mm) || !read_int(text, 17, 2, ss)) {
        return std::nullopt;
    }
    if (hh > 23 || mm > 59 || ss > 59) {
        return std::nullopt;
    }
    const std::string_view zone = text.substr(19);
    if (!(zone.empty() || zone == "Z" || zone == "+00:00" || zone == "+0000")) {
        return std::nullopt;
    }
    return *date + hh * 3600 + mm * 60 + ss;
}

std::string format_date_utc(UnixSeconds t) {
    using namespace std::chrono;
    const sys_days day{days{floor_div(t, seconds_per_day)}};
    const year_month_day ymd{day};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

std::string format_iso8601_utc(UnixSeconds t) {
    const std::int64_t secs = t - floor_div(t, seconds_per_day) * seconds_per_day;
    char buf[16];
    std::snprintf(buf, sizeof buf, "T%02d:%02d:%02dZ", static_cast<int>(secs / 3600),
                  static_cast<int>((secs / 60) % 60), static_cast<int>(secs % 60));
    return format_date_utc(t) + buf;
}

} // namespace aismarkov
