#include "safemob/platform.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iterator>

namespace safemob {

namespace {

UnixTime system_now() {
    return std::chrono::duration_cast<std::chrono::seconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

EventLog open_log(const ApiConfig& config) {
    if (config.data_dir.empty()) return EventLog::in_memory();
    std::filesystem::create_directories(config.data_dir);
    return EventLog::open(config.data_dir / "detections.log");
}

std::filesystem::path store_path(const ApiConfig& config) {
    if (config.data_dir.empty()) return {};
    std::filesystem::create_directories(config.data_dir);
    return config.data_dir / "accounts.json";
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorKind::Parse, path.string() + ": " + e.what());
    }
}

}  // namespace

ApiConfig load_api_config(const std::filesystem::path& path) {
    const nlohmann::json doc = read_json_file(path);
    const auto base = path.parent_path();
    auto resolve = [&](const std::string& p) -> std::filesystem::path {
        if (p.empty()) return {};
        std::filesystem::path fp(p);
        return fp.is_absolute() ? fp : base / fp;
    };
    auto must_exist = [](const std::filesystem::path& p, const char* what) {
        if (!p.empty() && !std::filesystem::exists(p)) {
            fail(ErrorKind::InvalidArgument, std::string("config: ") + what + " '" + p.string() +
                                                 "' does not exist");
        }
    };

    ApiConfig c;
    try {
        c.host = doc.value("host", c.host);
        c.port = doc.value("port", c.port);
        c.network = resolve(doc.at("network").get<std::string>());
        c.data_dir = resolve(doc.value("data_dir", std::string()));
        c.intersections = resolve(doc.value("intersections", std::string()));
        c.replay = resolve(doc.value("replay", std::string()));
        c.admin_token = doc.value("admin_token", std::string());
        c.trips.gap_threshold_s = doc.value("gap_threshold_s", c.trips.gap_threshold_s);
        c.session_lifetime_s = doc.value("session_lifetime_s", c.session_lifetime_s);
        if (doc.value("password_cost", std::string("interactive")) == "minimal") {
            c.password_cost = PasswordCost::minimal();
        }
        auto source = [&](const char* key) {
            const std::string s = doc.value(key, std::string());
            if (s.empty() || s.rfind("http://", 0) == 0) return s;
            return resolve(s).string();
        };
        c.parking_source = source("parking_source");
        c.air_quality_source = source("air_quality_source");

        std::string salt_hex = doc.value("salt_hex", std::string());
        std::string key_hex = doc.value("profile_key_hex", std::string());
        if (const char* env = std::getenv("SAFEMOB_SALT_HEX")) salt_hex = env;
        if (const char* env = std::getenv("SAFEMOB_PROFILE_KEY_HEX")) key_hex = env;
        c.secrets.salt = from_hex(salt_hex);
        c.secrets.profile_key = from_hex(key_hex);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Parse, path.string() + ": " + e.what());
    }
    if (c.secrets.salt.size() < kMinSaltBytes) fail(ErrorKind::InvalidArgument, "config: salt too short");
    if (c.secrets.profile_key.size() != 32) {
        fail(ErrorKind::InvalidArgument, "config: profile key must be 32 bytes");
    }
    if (c.port < 0 || c.port > 65535) fail(ErrorKind::InvalidArgument, "config: bad port");
    must_exist(c.network, "network");
    must_exist(c.intersections, "intersections");
    must_exist(c.replay, "replay");
    if (!c.parking_source.empty() && c.parking_source.rfind("http://", 0) != 0) {
        must_exist(c.parking_source, "parking_source");
    }
    if (!c.air_quality_source.empty() && c.air_quality_source.rfind("http://", 0) != 0) {
        must_exist(c.air_quality_source, "air_quality_source");
    }
    return c;
}

Platform::Platform(ApiConfig config, Clock clock)
    : config_(std::move(config)),
      clock_(clock ? std::move(clock) : Clock(system_now)),
      network_(load_network_file(config_.network)),
      accounts_(store_path(config_), config_.secrets, config_.password_cost, clock_),
      sessions_(config_.session_lifetime_s),
      log_(open_log(config_)) {
    if (!config_.intersections.empty()) {
        intersections_ = load_intersections(read_json_file(config_.intersections));
    }
    if (!config_.replay.empty()) {
        std::ifstream in(config_.replay);
        if (!in) fail(ErrorKind::Io, "cannot open replay file " + config_.replay.string());
        replay(in);
    } else {
        rebuild_traffic();
    }
}

std::string Platform::register_user(const UserProfile& profile,
                                    const std::vector<std::string>& macs,
                                    const std::string& email, const std::string& password) {
    return accounts_.register_user(profile, macs, email, password);
}

std::optional<Session> Platform::login(const std::string& email, const std::string& password) {
    const auto user = accounts_.authenticate(email, password);
    if (!user) return std::nullopt;
    return sessions_.issue(*user, now());
}

std::optional<std::string> Platform::resolve_session(const std::string& token) const {
    return sessions_.resolve(token, now());
}

ReplayStats Platform::replay(std::istream& csv) {
    std::lock_guard lock(replay_mutex_);
    ReplayStats stats = replay_csv(csv, network_, now(), accounts_.salt(), log_);
    rebuild_traffic();
    return stats;
}

void Platform::rebuild_traffic() {
    auto state = std::make_shared<TrafficState>();
    std::vector<TravelTimeSample> samples;
    for (const auto& pseudonym : log_.pseudonyms()) {
        const auto events = log_.query(pseudonym);
        const auto checkins =
            collapse_redetections(to_checkins(events), config_.trips.redetection_window_s);
        auto matched = match_link_traversals(checkins, network_);
        state->rejected_samples += matched.rejected;
        samples.insert(samples.end(), matched.samples.begin(), matched.samples.end());
    }
    state->samples = samples.size();
    state->snapshot = build_snapshot(samples, network_);
    state->profiles = build_historic_profiles(samples);
    std::lock_guard lock(traffic_mutex_);
    traffic_ = std::move(state);
}

std::shared_ptr<const TrafficState> Platform::traffic() const {
    std::lock_guard lock(traffic_mutex_);
    return traffic_;
}

std::vector<UserTrip> Platform::user_trips(const std::string& user_id, const TimeRange& range,
                                           std::optional<std::size_t> mac_index) const {
    const auto pseudonyms = accounts_.pseudonyms(user_id);
    if (mac_index && *mac_index >= pseudonyms.size()) {
        fail(ErrorKind::InvalidArgument, "mac_index out of range");
    }
    const auto state = traffic();
    std::vector<UserTrip> out;
    for (std::size_t i = 0; i < pseudonyms.size(); ++i) {
        if (mac_index && *mac_index != i) continue;
        const auto events = log_.query(pseudonyms[i], range.from, range.to);
        const TripSet set = reconstruct_trips(events, network_, config_.trips);
        const auto rows = personal_trips(set.trips, [&](const Trip& t) {
            return network_speed_kmh(t, state->snapshot, network_);
        });
        for (std::size_t k = 0; k < set.trips.size(); ++k) {
            out.push_back(UserTrip{std::to_string(i) + "-" + std::to_string(set.trips[k].start()), i,
                                   set.trips[k], rows[k]});
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const UserTrip& a, const UserTrip& b) {
        return a.trip.start() < b.trip.start();
    });
    return out;
}

DashboardSummary Platform::dashboard(const std::string& user_id, const TimeRange& range,
                                     std::optional<std::size_t> mac_index) const {
    const auto pseudonyms = accounts_.pseudonyms(user_id);
    if (mac_index && *mac_index >= pseudonyms.size()) {
        fail(ErrorKind::InvalidArgument, "mac_index out of range");
    }
    std::vector<Trip> trips;
    std::size_t singletons = 0;
    for (std::size_t i = 0; i < pseudonyms.size(); ++i) {
        if (mac_index && *mac_index != i) continue;
        const auto events = log_.query(pseudonyms[i], range.from, range.to);
        TripSet set = reconstruct_trips(events, network_, config_.trips);
        singletons += set.singleton_count;
        std::move(set.trips.begin(), set.trips.end(), std::back_inserter(trips));
    }
    return dashboard_summary(trips, singletons, range);
}

std::optional<RouteResult> Platform::route(const RouteRequest& request, CostTier tier) const {
    const auto state = traffic();
    return safemob::route(request, network_, state->snapshot, state->profiles, tier,
                          config_.routing);
}

RouteComparison Platform::compare(const RouteRequest& request) const {
    const auto state = traffic();
    return compare_routes(request, network_, state->snapshot, state->profiles, config_.routing);
}

std::vector<Alert> Platform::alerts(const VehicleApproach& vehicle, UnixTime at) const {
    std::vector<Alert> out;
    for (const auto& state : intersections_) {
        auto a = evaluate_approach(vehicle, state, at, config_.approach, &alert_diagnostics_);
        out.insert(out.end(), a.begin(), a.end());
    }
    return out;
}

FeedResult<ParkingStatus> Platform::parking(UnixTime at) const {
    if (config_.parking_source.empty()) return {};
    return fetch_parking(config_.parking_source, at, config_.feeds);
}

FeedResult<AirQualityReading> Platform::air_quality(UnixTime at) const {
    if (config_.air_quality_source.empty()) return {};
    return fetch_air_quality(config_.air_quality_source, at, config_.feeds);
}

namespace {

nlohmann::json optional_number(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json to_json(const DashboardSummary& s) {
    return {{"trip_count", s.trip_count},
            {"checkin_count", s.checkin_count},
            {"avg_speed_kmh", optional_number(s.avg_speed_kmh)},
            {"total_distance_m", s.total_distance_m},
            {"total_travel_time_s", s.total_travel_time_s},
            {"avg_trip_distance_m", optional_number(s.avg_trip_distance_m)}};
}

nlohmann::json to_json(const UserTrip& t, bool detail) {
    nlohmann::json j = {{"id", t.id},
                        {"mac_index", t.mac_index},
                        {"date_time", format_iso_datetime(t.row.date_time)},
                        {"start", t.row.date_time},
                        {"origin", t.row.origin},
                        {"destination", t.row.destination},
                        {"trip_time_s", t.row.trip_time_s},
                        {"distance_m", optional_number(t.row.distance_m)},
                        {"est_speed_kmh", optional_number(t.row.est_speed_kmh)},
                        {"comparison", optional_number(t.row.comparison)}};
    if (detail) {
        nlohmann::json checkins = nlohmann::json::array();
        for (const auto& c : t.trip.checkins) {
            checkins.push_back({{"detector_id", c.detector_id}, {"timestamp", c.timestamp}});
        }
        nlohmann::json path = nlohmann::json::array();
        for (const auto& k : t.trip.path) path.push_back({{"from", k.from}, {"to", k.to}});
        j["checkins"] = checkins;
        j["path"] = path;
        j["mode"] = t.trip.mode ? nlohmann::json(std::string(to_string(*t.trip.mode)))
                                : nlohmann::json(nullptr);
        j["unroutable"] = t.trip.unroutable;
    }
    return j;
}

UserProfile user_profile_from_json(const nlohmann::json& doc) {
    UserProfile p;
    try {
        p.name = doc.at("name").get<std::string>();
        p.surname = doc.at("surname").get<std::string>();
        p.fathers_name = doc.value("fathers_name", std::string());
        p.date_of_birth = parse_iso_date(doc.at("date_of_birth").get<std::string>());
        p.profession = doc.value("profession", std::string());
        p.family_status = doc.value("family_status", std::string());
        p.contact_number = doc.value("contact_number", std::string());
        p.address = doc.value("address", std::string());
        p.driving_license = doc.value("driving_license", false);
        p.car_owner = doc.value("car_owner", false);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Parse, std::string("profile: ") + e.what());
    }
    return p;
}

}  // namespace safemob
