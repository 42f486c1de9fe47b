#pragma once

#include "aismarkov/timeutil.hpp"

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace aismarkov {

using VesselId = std::uint64_t;

/// One validated AIS position report.
struct AisRecord {
    VesselId vessel_id = 0;
    UnixSeconds timestamp = 0;
    double lat = 0.0;
    double lon = 0.0;
    std::optional<double> sog;  ///< knots
    std::optional<double> cog;  ///< degrees, [0, 360)
    std::optional<int> nav_status;
    std::optional<int> ship_type;

    friend bool operator==(const AisRecord&, const AisRecord&) = default;
};

/// `All` is the union aggregate; every record belongs to exactly one of the
/// other four.
enum class VesselCategory { Commercial, Fishing, Passenger, Other, All };

inline constexpr VesselCategory base_categories[] = {
    VesselCategory::Commercial, VesselCategory::Fishing, VesselCategory::Passenger,
    VesselCategory::Other};

std::string_view to_string(VesselCategory c);
std::optional<VesselCategory> parse_category(std::string_view name);

/// Column names and delimiter of an AIS CSV file. Only the first four
/// columns are mandatory in the header.
struct CsvSchema {
    char delimiter = ',';
    std::string vessel_id = "vessel_id";
    std::string timestamp = "timestamp";
    std::string lat = "lat";
    std::string lon = "lon";
    std::string sog = "sog";
    std::string cog = "cog";
    std::string nav_status = "nav_status";
    std::string ship_type = "ship_type";
};

/// `row` is the 1-based line number in the input (the header is line 1).
struct Rejection {
    std::size_t row = 0;
    std::string reason;

    friend bool operator==(const Rejection&, const Rejection&) = default;
};

struct ParseResult {
    /// Sorted by (vessel_id, timestamp), strictly increasing per vessel.
    std::vector<AisRecord> records;
    /// Sorted by row.
    std::vector<Rejection> rejections;
    /// Non-blank data rows seen; always records.size() + rejections.size().
    std::size_t rows = 0;
};

/// Parses delimiter-separated AIS text with a header row. Throws ConfigError
/// when a mandatory column is missing. Bad rows and duplicate
/// (vessel_id, timestamp) rows are rejected with a logged reason; the first
/// occurrence of a duplicate wins.
ParseResult parse_ais_csv(std::string_view text, const CsvSchema& schema = {});
ParseResult parse_ais_csv(std::istream& in, const CsvSchema& schema = {});

/// Serializes in the default schema's column order; parse_ais_csv reads it
/// back bit-exactly.
std::string write_ais_csv(std::span<const AisRecord> records, char delimiter = ',');

/// One `row<TAB>reason` line per rejection.
std::string format_rejection_log(std::span<const Rejection> rejections);

/// Sorts by (vessel_id, timestamp) and drops repeated (vessel_id, timestamp)
/// entries, keeping the first in input order. Returns the number dropped.
std::size_t sort_and_dedup(std::vector<AisRecord>& records);

/// Maps AIS ship type codes onto categories. Loaded from a versioned table
/// file with lines `lo,hi,Category`; codes not covered map to Other.
class ShipTypeTable {
public:
    struct Range {
        int lo;
        int hi;
        VesselCategory category;
    };

    static ShipTypeTable parse(std::string_view text);
    static ShipTypeTable load(const std::filesystem::path& path);
    /// The table shipped in core/data/ship_type_categories.csv.
    static const ShipTypeTable& builtin();

    VesselCategory categorize(std::optional<int> ship_type) const;
    int version() const { return version_; }
    std::span<const Range> ranges() const { return ranges_; }

private:
    int version_ = 0;
    std::vector<Range> ranges_;
};

VesselCategory categorize_vessel(std::optional<int> ship_type,
                                 const ShipTypeTable& table = ShipTypeTable::builtin());

/// Day-resolution window, both ends inclusive.
struct TimeWindow {
    std::string label;
    UnixSeconds start = 0;     ///< midnight of the first day
    UnixSeconds last_day = 0;  ///< midnight of the last day

    bool contains(UnixSeconds t) const { return t >= start && t < last_day + seconds_per_day; }
};

/// Yearly windows 2019 (pre), 2020 (pandemic_P1), 2021 (pandemic_P2), 2022 (post).
std::vector<TimeWindow> pandemic_window_preset();

/// Throws ConfigError on start > end, duplicate labels, or overlap.
void validate_windows(std::span<const TimeWindow> windows);

struct StreamKey {
    VesselCategory category;
    std::string window;

    friend auto operator<=>(const StreamKey&, const StreamKey&) = default;
};

using RecordStreams = std::map<StreamKey, std::vector<AisRecord>>;

/// Routes every record into its own category stream and the All stream of
/// the window containing it; records outside all windows are dropped.
/// Input order is preserved within each stream.
RecordStreams partition_records(std::span<const AisRecord> records,
                                std::span<const TimeWindow> windows,
                                const ShipTypeTable& table = ShipTypeTable::builtin());

} // namespace aismarkov
