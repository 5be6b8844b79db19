#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "safemob/alerts.hpp"
#include "safemob/feeds.hpp"
#include "safemob/ingest.hpp"
#include "safemob/network.hpp"
#include "safemob/privacy.hpp"
#include "safemob/routing.hpp"
#include "safemob/traffic.hpp"
#include "safemob/trips.hpp"

namespace httplib {
class Server;
}

namespace safemob {

inline constexpr const char* kVersion = "0.1.0";

struct ApiConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::filesystem::path network;
    /// Holds accounts.json and detections.log; empty keeps everything in memory.
    std::filesystem::path data_dir;
    PrivacySecrets secrets;
    PasswordCost password_cost = PasswordCost::interactive();
    TripConfig trips;
    RoutingParams routing;
    FeedConfig feeds;
    ApproachGate approach;
    std::string parking_source;
    std::string air_quality_source;
    std::filesystem::path intersections;
    /// Detections CSV ingested at startup.
    std::filesystem::path replay;
    /// When non-empty, POST /admin/replay needs a matching X-Admin-Token header.
    std::string admin_token;
    UnixTime session_lifetime_s = 24 * 3600;
};

/// Reads a JSON config; relative paths resolve against the config file's
/// directory. Hex secrets may come from SAFEMOB_SALT_HEX /
/// SAFEMOB_PROFILE_KEY_HEX instead. Every referenced path must exist.
ApiConfig load_api_config(const std::filesystem::path& path);

struct TrafficState {
    TrafficSnapshot snapshot;
    HistoricProfiles profiles;
    std::size_t samples = 0;
    std::size_t rejected_samples = 0;
};

struct UserTrip {
    std::string id;
    std::size_t mac_index = 0;
    Trip trip;
    PersonalTripRow row;
};

/// All platform services behind one object. Shared state is published as
/// immutable snapshots; writes (registration, replay) are serialized by the
/// underlying stores.
class Platform {
public:
    using Clock = std::function<UnixTime()>;

    explicit Platform(ApiConfig config, Clock clock = {});

    const ApiConfig& config() const noexcept { return config_; }
    const DetectorNetwork& network() const noexcept { return network_; }
    UnixTime now() const { return clock_(); }

    std::string register_user(const UserProfile& profile, const std::vector<std::string>& macs,
                              const std::string& email, const std::string& password);
    std::optional<Session> login(const std::string& email, const std::string& password);
    std::optional<std::string> resolve_session(const std::string& token) const;

    ReplayStats replay(std::istream& csv);
    std::size_t event_count() const { return log_.size(); }

    /// Trips of the user's pseudonyms (all, or only `mac_index`) within range.
    std::vector<UserTrip> user_trips(const std::string& user_id, const TimeRange& range,
                                     std::optional<std::size_t> mac_index = std::nullopt) const;
    DashboardSummary dashboard(const std::string& user_id, const TimeRange& range,
                               std::optional<std::size_t> mac_index = std::nullopt) const;

    std::shared_ptr<const TrafficState> traffic() const;
    std::optional<RouteResult> route(const RouteRequest& request,
                                     CostTier tier = CostTier::Auto) const;
    RouteComparison compare(const RouteRequest& request) const;

    std::vector<Alert> alerts(const VehicleApproach& vehicle, UnixTime now) const;
    const AlertDiagnostics& alert_diagnostics() const noexcept { return alert_diagnostics_; }

    FeedResult<ParkingStatus> parking(UnixTime now) const;
    FeedResult<AirQualityReading> air_quality(UnixTime now) const;

private:
    void rebuild_traffic();

    ApiConfig config_;
    Clock clock_;
    DetectorNetwork network_;
    AccountStore accounts_;
    SessionManager sessions_;
    EventLog log_;
    std::vector<IntersectionState> intersections_;
    mutable AlertDiagnostics alert_diagnostics_;

    std::mutex replay_mutex_;
    mutable std::mutex traffic_mutex_;
    std::shared_ptr<const TrafficState> traffic_;
};

/// Installs every endpoint on `server`. `platform` must outlive it.
void register_routes(httplib::Server& server, Platform& platform);

/// Binds and blocks until the server stops.
void serve(const ApiConfig& config);

nlohmann::json to_json(const DashboardSummary& summary);
nlohmann::json to_json(const UserTrip& trip, bool detail = false);
UserProfile user_profile_from_json(const nlohmann::json& doc);

}  // namespace safemob
