// A Platform served over loopback on an ephemeral port, plus a small JSON
// client for talking to it.
#pragma once

#include <httplib.h>

#include <atomic>
#include <memory>
#include <thread>

#include "safemob/platform.hpp"

namespace fixture {

inline constexpr safemob::UnixTime kPlatformClock = 1533556800;  // 2018-08-06T12:00:00Z

inline safemob::ApiConfig platform_config(const std::filesystem::path& data_dir = {}) {
    using namespace safemob;
    ApiConfig cfg;
    cfg.network = SAFEMOB_SOURCE_DIR "/networks/thessaloniki40.json";
    cfg.data_dir = data_dir;
    cfg.secrets = {from_hex("a1a2a3a4a5a6a7a8a9aaabacadaeafb0"), Bytes(32, 0x5a)};
    cfg.password_cost = PasswordCost::minimal();
    cfg.intersections = SAFEMOB_SOURCE_DIR "/fixtures/spat/intersections.json";
    cfg.parking_source = SAFEMOB_SOURCE_DIR "/fixtures/feeds/parking.json";
    cfg.air_quality_source = SAFEMOB_SOURCE_DIR "/fixtures/feeds/airquality.json";
    cfg.admin_token = "local-admin";
    return cfg;
}

struct Reply {
    int status = 0;
    nlohmann::json body;
};

class LiveServer {
public:
    explicit LiveServer(safemob::ApiConfig cfg)
        : platform(std::move(cfg), [this] { return clock.load(); }) {
        safemob::register_routes(server_, platform);
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~LiveServer() {
        server_.stop();
        thread_.join();
    }
    LiveServer(const LiveServer&) = delete;
    LiveServer& operator=(const LiveServer&) = delete;

    int port() const { return port_; }

    Reply get(const std::string& path, const std::string& token = {}) {
        httplib::Client c("127.0.0.1", port_);
        httplib::Headers h;
        if (!token.empty()) h.emplace("Authorization", "Bearer " + token);
        return wrap(c.Get(path, h));
    }

    Reply post(const std::string& path, const std::string& body, const httplib::Headers& h = {},
               const char* type = "application/json") {
        httplib::Client c("127.0.0.1", port_);
        return wrap(c.Post(path, h, body, type));
    }

    Reply post(const std::string& path, const nlohmann::json& body) { return post(path, body.dump()); }

    std::atomic<safemob::UnixTime> clock{kPlatformClock};
    safemob::Platform platform;

private:
    static Reply wrap(const httplib::Result& r) {
        if (!r) return {0, nullptr};
        Reply out{r->status, nullptr};
        out.body = nlohmann::json::parse(r->body, nullptr, false);
        return out;
    }

    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
};

inline nlohmann::json profile_json(const std::string& name) {
    return {{"name", name},          {"surname", "Testopoulou"},   {"fathers_name", "Nikos"},
            {"date_of_birth", "1950-05-17"}, {"profession", "retired"}, {"family_status", "married"},
            {"contact_number", "+30 2310 111111"}, {"address", "Tsimiski 10"},
            {"driving_license", true}, {"car_owner", true}};
}

}  // namespace fixture
