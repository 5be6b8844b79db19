#include "safemob/feeds.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <httplib.h>

namespace safemob {

std::string_view to_string(Pollutant p) noexcept {
    switch (p) {
        case Pollutant::PM10: return "PM10";
        case Pollutant::PM2_5: return "PM2.5";
        case Pollutant::NO2: return "NO2";
        case Pollutant::O3: return "O3";
    }
    return "PM10";
}

Pollutant pollutant_from_string(std::string_view text) {
    for (Pollutant p : {Pollutant::PM10, Pollutant::PM2_5, Pollutant::NO2, Pollutant::O3}) {
        if (to_string(p) == text) return p;
    }
    fail(ErrorKind::Parse, "unknown pollutant '" + std::string(text) + "'");
}

namespace {

nlohmann::json parse_document(std::string_view text, const char* list_key) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorKind::Parse, std::string("feed document: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains(list_key) || !doc[list_key].is_array()) {
        fail(ErrorKind::Parse, std::string("feed document: missing '") + list_key + "' array");
    }
    return doc;
}

template <class Record, class Build>
FeedResult<Record> normalize(const nlohmann::json& list, Build&& build) {
    FeedResult<Record> result;
    for (std::size_t i = 0; i < list.size(); ++i) {
        try {
            result.records.push_back(build(list[i]));
        } catch (const std::exception& e) {
            result.diagnostics.push_back("index " + std::to_string(i) + ": " + e.what());
        }
    }
    return result;
}

}  // namespace

FeedResult<ParkingStatus> parse_parking(std::string_view text, UnixTime now,
                                        const FeedConfig& config) {
    const auto doc = parse_document(text, "facilities");
    return normalize<ParkingStatus>(doc["facilities"], [&](const nlohmann::json& j) {
        ParkingStatus p{j.at("id").get<std::string>(),
                        j.value("name", std::string()),
                        GeoPoint(j.at("lat").get<double>(), j.at("lon").get<double>()),
                        j.at("capacity").get<int>(),
                        j.at("free_spaces").get<int>(),
                        j.at("observed_at").get<UnixTime>(),
                        false};
        if (p.facility_id.empty()) fail(ErrorKind::InvalidArgument, "empty facility id");
        if (p.capacity <= 0) fail(ErrorKind::InvalidArgument, "capacity must be positive");
        if (p.free_spaces < 0 || p.free_spaces > p.capacity) {
            fail(ErrorKind::InvalidArgument, "free_spaces outside [0, capacity]");
        }
        p.stale = now - p.observed_at > config.parking_ttl_s;
        return p;
    });
}

FeedResult<AirQualityReading> parse_air_quality(std::string_view text, UnixTime now,
                                                const FeedConfig& config) {
    const auto doc = parse_document(text, "readings");
    return normalize<AirQualityReading>(doc["readings"], [&](const nlohmann::json& j) {
        AirQualityReading r{j.at("station_id").get<std::string>(),
                            GeoPoint(j.at("lat").get<double>(), j.at("lon").get<double>()),
                            pollutant_from_string(j.at("pollutant").get<std::string>()),
                            j.at("value").get<double>(),
                            j.at("observed_at").get<UnixTime>(),
                            false};
        if (r.station_id.empty()) fail(ErrorKind::InvalidArgument, "empty station id");
        if (!std::isfinite(r.value_ugm3) || r.value_ugm3 < 0.0) {
            fail(ErrorKind::InvalidArgument, "value must be finite and non-negative");
        }
        r.stale = now - r.observed_at > config.air_quality_ttl_s;
        return r;
    });
}

std::string read_feed_source(const std::string& source) {
    if (source.rfind("http://", 0) == 0) {
        const auto slash = source.find('/', 7);
        const std::string host = source.substr(0, slash);
        const std::string path = slash == std::string::npos ? "/" : source.substr(slash);
        httplib::Client client(host);
        client.set_connection_timeout(5);
        client.set_read_timeout(10);
        auto res = client.Get(path);
        if (!res) fail(ErrorKind::Io, "feed unreachable: " + source);
        if (res->status != 200) {
            fail(ErrorKind::Io, "feed " + source + " returned HTTP " + std::to_string(res->status));
        }
        return res->body;
    }
    std::ifstream in(source);
    if (!in) fail(ErrorKind::Io, "feed unreachable: cannot open " + source);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

FeedResult<ParkingStatus> fetch_parking(const std::string& source, UnixTime now,
                                        const FeedConfig& config) {
    return parse_parking(read_feed_source(source), now, config);
}

FeedResult<AirQualityReading> fetch_air_quality(const std::string& source, UnixTime now,
                                                const FeedConfig& config) {
    return parse_air_quality(read_feed_source(source), now, config);
}

nlohmann::json to_json(const ParkingStatus& p) {
    return {{"facility_id", p.facility_id},
            {"name", p.name},
            {"lat", p.location.lat()},
            {"lon", p.location.lon()},
            {"capacity", p.capacity},
            {"free_spaces", p.free_spaces},
            {"observed_at", p.observed_at},
            {"stale", p.stale}};
}

nlohmann::json to_json(const AirQualityReading& r) {
    return {{"station_id", r.station_id},
            {"lat", r.location.lat()},
            {"lon", r.location.lon()},
            {"pollutant", std::string(to_string(r.pollutant))},
            {"value", r.value_ugm3},
            {"observed_at", r.observed_at},
            {"stale", r.stale}};
}

}  // namespace safemob
