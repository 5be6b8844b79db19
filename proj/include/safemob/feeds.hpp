#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "safemob/network.hpp"

namespace safemob {

struct ParkingStatus {
    std::string facility_id;
    std::string name;
    GeoPoint location;
    int capacity = 0;
    int free_spaces = 0;
    UnixTime observed_at = 0;
    bool stale = false;

    bool operator==(const ParkingStatus&) const = default;
};

enum class Pollutant { PM10, PM2_5, NO2, O3 };

std::string_view to_string(Pollutant pollutant) noexcept;
Pollutant pollutant_from_string(std::string_view text);

struct AirQualityReading {
    std::string station_id;
    GeoPoint location;
    Pollutant pollutant = Pollutant::PM10;
    double value_ugm3 = 0.0;
    UnixTime observed_at = 0;
    bool stale = false;

    bool operator==(const AirQualityReading&) const = default;
};

struct FeedConfig {
    UnixTime parking_ttl_s = 600;
    UnixTime air_quality_ttl_s = 3600;
};

template <class Record>
struct FeedResult {
    std::vector<Record> records;
    /// One entry per dropped record: `index N: reason`.
    std::vector<std::string> diagnostics;
};

/// Normalizes a `{"facilities": [...]}` document. Invalid records are
/// dropped with a diagnostic; a malformed document throws.
FeedResult<ParkingStatus> parse_parking(std::string_view text, UnixTime now,
                                        const FeedConfig& config = {});
/// Normalizes a `{"readings": [...]}` document.
FeedResult<AirQualityReading> parse_air_quality(std::string_view text, UnixTime now,
                                                const FeedConfig& config = {});

/// `source` is an `http://` URL or a local file path; both go through the
/// same parser.
std::string read_feed_source(const std::string& source);

FeedResult<ParkingStatus> fetch_parking(const std::string& source, UnixTime now,
                                        const FeedConfig& config = {});
FeedResult<AirQualityReading> fetch_air_quality(const std::string& source, UnixTime now,
                                                const FeedConfig& config = {});

nlohmann::json to_json(const ParkingStatus& p);
nlohmann::json to_json(const AirQualityReading& r);

}  // namespace safemob
