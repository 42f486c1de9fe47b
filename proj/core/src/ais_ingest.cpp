#include "aismarkov/ais_ingest.hpp"

#include "aismarkov/error.hpp"
#include "aismarkov/textio.hpp"
#include "ship_type_table_data.hpp"

#include <algorithm>
#include <array>
#include <iterator>
#include <numeric>
#include <sstream>

namespace aismarkov {

std::string_view to_string(VesselCategory c) {
    switch (c) {
    case VesselCategory::Commercial: return "Commercial";
    case VesselCategory::Fishing: return "Fishing";
    case VesselCategory::Passenger: return "Passenger";
    case VesselCategory::Other: return "Other";
    case VesselCategory::All: return "All";
    }
    return "Other";
}

std::optional<VesselCategory> parse_category(std::string_view name) {
    for (auto c : {VesselCategory::Commercial, VesselCategory::Fishing, VesselCategory::Passenger,
                   VesselCategory::Other, VesselCategory::All}) {
        if (to_string(c) == name) {
            return c;
        }
    }
    return std::nullopt;
}

namespace {

enum Column { kVesselId, kTimestamp, kLat, kLon, kSog, kCog, kNavStatus, kShipType, kColumnCount };

constexpr std::size_t npos = static_cast<std::size_t>(-1);

std::array<std::size_t, kColumnCount> resolve_columns(std::string_view header, const CsvSchema& schema) {
    const auto names = split_fields(header, schema.delimiter);
    const std::array<const std::string*, kColumnCount> wanted = {
        &schema.vessel_id, &schema.timestamp, &schema.lat,        &schema.lon,
        &schema.sog,       &schema.cog,       &schema.nav_status, &schema.ship_type};
    std::array<std::size_t, kColumnCount> index{};
    for (std::size_t c = 0; c < kColumnCount; ++c) {
        auto it = std::find(names.begin(), names.end(), std::string_view(*wanted[c]));
        index[c] = it == names.end() ? npos : static_cast<std::size_t>(std::distance(names.begin(), it));
        if (c <= kLon && index[c] == npos) {
            throw ConfigError("missing mandatory column '" + *wanted[c] + "'");
        }
    }
    return index;
}

// Returns an empty string on success, otherwise the rejection reason.
std::string parse_row(const std::vector<std::string_view>& f, const std::array<std::size_t, kColumnCount>& col,
                      AisRecord& rec) {
    auto field = [&](Column c) -> std::string_view { return col[c] == npos ? std::string_view{} : f[col[c]]; };

    long long id = 0;
    if (!parse_int64(field(kVesselId), id) || id <= 0) {
        return "invalid vessel_id";
    }
    rec.vessel_id = static_cast<VesselId>(id);

    auto ts = parse_iso8601_utc(field(kTimestamp));
    if (!ts) {
        return "invalid timestamp";
    }
    rec.timestamp = *ts;

    if (!parse_double(field(kLat), rec.lat)) {
        return "invalid latitude";
    }
    if (rec.lat < -90.0 || rec.lat > 90.0) {
        return "latitude out of range";
    }
    if (!parse_double(field(kLon), rec.lon)) {
        return "invalid longitude";
    }
    if (rec.lon < -180.0 || rec.lon > 180.0) {
        return "longitude out of range";
    }

    double v = 0.0;
    long long n = 0;
    if (auto s = field(kSog); !s.empty()) {
        if (!parse_double(s, v) || v < 0.0) {
            return "invalid speed over ground";
        }
        rec.sog = v;
    }
    if (auto s = field(kCog); !s.empty()) {
        if (!parse_double(s, v) || v < 0.0 || v >= 360.0) {
            return "course over ground out of range";
        }
        rec.cog = v;
    }
    if (auto s = field(kNavStatus); !s.empty()) {
        if (!parse_int64(s, n) || n < 0 || n > 15) {
            return "invalid nav_status";
        }
        rec.nav_status = static_cast<int>(n);
    }
    if (auto s = field(kShipType); !s.empty()) {
        if (!parse_int64(s, n) || n < 0 || n > 999) {
            return "invalid ship_type";
        }
        rec.ship_type = static_cast<int>(n);
    }
    return {};
}

} // namespace

std::size_t sort_and_dedup(std::vector<AisRecord>& records) {
    std::stable_sort(records.begin(), records.end(), [](const AisRecord& a, const AisRecord& b) {
        return a.vessel_id != b.vessel_id ? a.vessel_id < b.vessel_id : a.timestamp < b.timestamp;
    });
    auto last = std::unique(records.begin(), records.end(), [](const AisRecord& a, const AisRecord& b) {
        return a.vessel_id == b.vessel_id && a.timestamp == b.timestamp;
    });
    const auto dropped = static_cast<std::size_t>(std::distance(last, records.end()));
    records.erase(last, records.end());
    return dropped;
}

ParseResult parse_ais_csv(std::string_view text, const CsvSchema& schema) {
    ParseResult result;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    auto next_line = [&](std::string_view& line) {
        if (pos >= text.size()) {
            return false;
        }
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        return true;
    };

    std::string_view line;
    if (!next_line(line)) {
        throw ConfigError("input has no header row");
    }
    const auto col = resolve_columns(line, schema);
    const std::size_t min_fields = *std::max_element(col.begin(), col.end(), [](std::size_t a, std::size_t b) {
        return (a == npos ? 0 : a + 1) < (b == npos ? 0 : b + 1);
    }) + 1;

    std::vector<std::size_t> source_rows;
    while (next_line(line)) {
        if (line.empty() || line == "\r") {
            continue;
        }
        ++result.rows;
        const auto fields = split_fields(line, schema.delimiter);
        if (fields.size() < min_fields) {
            result.rejections.push_back({line_no, "expected at least " + std::to_string(min_fields) +
                                                      " fields, got " + std::to_string(fields.size())});
            continue;
        }
        AisRecord rec;
        if (auto reason = parse_row(fields, col, rec); !reason.empty()) {
            result.rejections.push_back({line_no, std::move(reason)});
            continue;
        }
        result.records.push_back(rec);
        source_rows.push_back(line_no);
    }

    // Sort a permutation so duplicates can be reported with their row numbers.
    std::vector<std::size_t> order(result.records.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto& recs = result.records;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return recs[a].vessel_id != recs[b].vessel_id ? recs[a].vessel_id < recs[b].vessel_id
                                                      : recs[a].timestamp < recs[b].timestamp;
    });
    std::vector<AisRecord> sorted;
    sorted.reserve(order.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
        const AisRecord& r = recs[order[k]];
        if (!sorted.empty() && sorted.back().vessel_id == r.vessel_id && sorted.back().timestamp == r.timestamp) {
            result.rejections.push_back({source_rows[order[k]], "duplicate (vessel_id, timestamp)"});
            continue;
        }
        sorted.push_back(r);
    }
    result.records = std::move(sorted);
    std::stable_sort(result.rejections.begin(), result.rejections.end(),
                     [](const Rejection& a, const Rejection& b) { return a.row < b.row; });
    return result;
}

ParseResult parse_ais_csv(std::istream& in, const CsvSchema& schema) {
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_ais_csv(std::string_view(ss.str()), schema);
}

std::string write_ais_csv(std::span<const AisRecord> records, char delimiter) {
    const CsvSchema s;
    std::string out;
    out.reserve(64 * (records.size() + 1));
    for (const std::string* name : {&s.vessel_id, &s.timestamp, &s.lat, &s.lon, &s.sog, &s.cog, &s.nav_status}) {
        out += *name;
        out += delimiter;
    }
    out += s.ship_type;
    out += '\n';
    for (const AisRecord& r : records) {
        out += std::to_string(r.vessel_id);
        out += delimiter;
        out += format_iso8601_utc(r.timestamp);
        out += delimiter;
        out += format_double(r.lat);
        out += delimiter;
        out += format_double(r.lon);
        out += delimiter;
        if (r.sog) out += format_double(*r.sog);
        out += delimiter;
        if (r.cog) out += format_double(*r.cog);
        out += delimiter;
        if (r.nav_status) out += std::to_string(*r.nav_status);
        out += delimiter;
        if (r.ship_type) out += std::to_string(*r.ship_type);
        out += '\n';
    }
    return out;
}

std::string format_rejection_log(std::span<const Rejection> rejections) {
    std::string out;
    for (const Rejection& r : rejections) {
        out += std::to_string(r.row);
        out += '\t';
        out += r.reason;
        out += '\n';
    }
    return out;
}

ShipTypeTable ShipTypeTable::parse(std::string_view text) {
    ShipTypeTable table;
    bool header_seen = false;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (line.empty()) {
            continue;
        }
        if (line.front() == '#') {
            constexpr std::string_view tag = "# version:";
            if (line.starts_with(tag)) {
                std::string_view v = line.substr(tag.size());
                while (!v.empty() && v.front() == ' ') v.remove_prefix(1);
                long long n = 0;
                if (!parse_int64(v, n)) {
                    throw ConfigError("ship type table: bad version line");
                }
                table.version_ = static_cast<int>(n);
            }
            continue;
        }
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        const auto f = split_fields(line, ',');
        long long lo = 0, hi = 0;
        auto cat = f.size() == 3 ? parse_category(f[2]) : std::nullopt;
        if (f.size() != 3 || !parse_int64(f[0], lo) || !parse_int64(f[1], hi) || lo > hi || !cat ||
            *cat == VesselCategory::All) {
            throw ConfigError("ship type table: bad line '" + std::string(line) + "'");
        }
        table.ranges_.push_back({static_cast<int>(lo), static_cast<int>(hi), *cat});
    }
    if (table.version_ <= 0) {
        throw ConfigError("ship type table: missing '# version:' line");
    }
    return table;
}

ShipTypeTable ShipTypeTable::load(const std::filesystem::path& path) {
    return parse(read_file(path));
}

const ShipTypeTable& ShipTypeTable::builtin() {
    static const ShipTypeTable table = parse(detail::builtin_ship_type_table);
    return table;
}

VesselCategory ShipTypeTable::categorize(std::optional<int> ship_type) const {
    if (ship_type) {
        for (const Range& r : ranges_) {
            if (*ship_type >= r.lo && *ship_type <= r.hi) {
                return r.category;
            }
        }
    }
    return VesselCategory::Other;
}

VesselCategory categorize_vessel(std::optional<int> ship_type, const ShipTypeTable& table) {
    return table.categorize(ship_type);
}

std::vector<TimeWindow> pandemic_window_preset() {
    auto day = [](const char* d) { return *parse_date_utc(d); };
    return {
        {"pre", day("2019-01-01"), day("2019-12-31")},
        {"pandemic_P1", day("2020-01-01"), day("2020-12-31")},
        {"pandemic_P2", day("2021-01-01"), day("2021-12-31")},
        {"post", day("2022-01-01"), day("2022-12-31")},
    };
}

void validate_windows(std::span<const TimeWindow> windows) {
    for (std::size_t a = 0; a < windows.size(); ++a) {
        const TimeWindow& w = windows[a];
        if (w.label.empty()) {
            throw ConfigError("time window with empty label");
        }
        if (w.start > w.last_day) {
            throw ConfigError("time window '" + w.label + "' ends before it starts");
        }
        for (std::size_t b = a + 1; b < windows.size(); ++b) {
            const TimeWindow& o = windows[b];
            if (o.label == w.label) {
                throw ConfigError("duplicate time window label '" + w.label + "'");
            }
            if (w.start <= o.last_day && o.start <= w.last_day) {
                throw ConfigError("time windows '" + w.label + "' and '" + o.label + "' overlap");
            }
        }
    }
}

RecordStreams partition_records(std::span<const AisRecord> records, std::span<const TimeWindow> windows,
                                const ShipTypeTable& table) {
    validate_windows(windows);
    RecordStreams streams;
    for (const AisRecord& r : records) {
        auto w = std::find_if(windows.begin(), windows.end(),
                              [&](const TimeWindow& tw) { return tw.contains(r.timestamp); });
        if (w == windows.end()) {
            continue;
        }
        streams[StreamKey{table.categorize(r.ship_type), w->label}].push_back(r);
        streams[StreamKey{VesselCategory::All, w->label}].push_back(r);
    }
    return streams;
}

} // namespace aismarkov
