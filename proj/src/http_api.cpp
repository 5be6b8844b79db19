#include <charconv>
#include <sstream>

#include <httplib.h>

#include "safemob/platform.hpp"

namespace safemob {

namespace {

int status_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument:
        case ErrorKind::Parse: return 400;
        case ErrorKind::NotFound: return 404;
        case ErrorKind::Conflict: return 409;
        case ErrorKind::Unauthorized: return 401;
        case ErrorKind::Io: return 500;
    }
    return 500;
}

void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& code,
                const std::string& message) {
    send_json(res, status, {{"code", code}, {"message", message}});
}

std::string code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "invalid_argument";
        case ErrorKind::Parse: return "bad_request";
        case ErrorKind::NotFound: return "not_found";
        case ErrorKind::Conflict: return "conflict";
        case ErrorKind::Unauthorized: return "unauthorized";
        case ErrorKind::Io: return "internal";
    }
    return "internal";
}

template <class Handler>
httplib::Server::Handler guarded(Handler handler) {
    return [handler](const httplib::Request& req, httplib::Response& res) {
        try {
            handler(req, res);
        } catch (const Error& e) {
            send_error(res, status_for(e.kind()), code_for(e.kind()), e.what());
        } catch (const nlohmann::json::exception& e) {
            send_error(res, 400, "bad_request", e.what());
        } catch (const std::exception& e) {
            send_error(res, 500, "internal", e.what());
        }
    };
}

nlohmann::json parse_body(const httplib::Request& req) {
    try {
        return nlohmann::json::parse(req.body);
    } catch (const nlohmann::json::parse_error&) {
        fail(ErrorKind::Parse, "request body is not valid JSON");
    }
}

double number_param(const httplib::Request& req, const char* name) {
    if (!req.has_param(name)) fail(ErrorKind::InvalidArgument, std::string("missing parameter '") + name + "'");
    const std::string v = req.get_param_value(name);
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::logic_error&) {
        fail(ErrorKind::InvalidArgument, std::string("parameter '") + name + "' is not a number");
    }
}

UnixTime now_param(const httplib::Request& req, const Platform& platform) {
    if (!req.has_param("now")) return platform.now();
    return static_cast<UnixTime>(number_param(req, "now"));
}

TimeRange range_params(const httplib::Request& req) {
    if (!req.has_param("from") || !req.has_param("to")) {
        fail(ErrorKind::InvalidArgument, "from and to dates are required");
    }
    const Date from = parse_iso_date(req.get_param_value("from"));
    const Date to = parse_iso_date(req.get_param_value("to"));
    if (to < from) fail(ErrorKind::InvalidArgument, "from is after to");
    return TimeRange{start_of_day(from), end_of_day(to)};
}

std::optional<std::size_t> mac_index_param(const httplib::Request& req) {
    if (!req.has_param("mac_index")) return std::nullopt;
    const std::string v = req.get_param_value("mac_index");
    std::size_t index = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), index);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        fail(ErrorKind::InvalidArgument, "mac_index must be a non-negative integer");
    }
    return index;
}

/// Resolves the bearer token or writes a 401 and returns nullopt.
std::optional<std::string> require_user(const Platform& platform, const httplib::Request& req,
                                        httplib::Response& res) {
    const std::string header = req.get_header_value("Authorization");
    constexpr std::string_view prefix = "Bearer ";
    if (header.rfind(prefix, 0) == 0) {
        if (auto user = platform.resolve_session(header.substr(prefix.size()))) return user;
    }
    send_error(res, 401, "unauthorized", "missing or expired session");
    return std::nullopt;
}

}  // namespace

void register_routes(httplib::Server& server, Platform& platform) {
    server.Get("/health", guarded([&](const httplib::Request&, httplib::Response& res) {
        send_json(res, 200,
                  {{"status", "ok"},
                   {"version", kVersion},
                   {"detectors", platform.network().node_count()},
                   {"events", platform.event_count()}});
    }));

    server.Post("/register", guarded([&](const httplib::Request& req, httplib::Response& res) {
        const auto body = parse_body(req);
        const auto profile = user_profile_from_json(body.at("profile"));
        const auto macs = body.value("macs", std::vector<std::string>{});
        const auto id = platform.register_user(profile, macs, body.at("email").get<std::string>(),
                                               body.at("password").get<std::string>());
        send_json(res, 201, {{"user_id", id}});
    }));

    server.Post("/login", guarded([&](const httplib::Request& req, httplib::Response& res) {
        const auto body = parse_body(req);
        const auto session = platform.login(body.value("email", std::string()),
                                            body.value("password", std::string()));
        if (!session) {
            send_error(res, 401, "invalid_credentials", "invalid email or password");
            return;
        }
        send_json(res, 200,
                  {{"token", session->token},
                   {"user_id", session->user_id},
                   {"expires_at", session->expires_at}});
    }));

    server.Get("/dashboard", guarded([&](const httplib::Request& req, httplib::Response& res) {
        const auto user = require_user(platform, req, res);
        if (!user) return;
        const auto summary = platform.dashboard(*user, range_params(req), mac_index_param(req));
        send_json(res, 200, to_json(summary));
    }));

    server.Get("/trips", guarded([&](const httplib::Request& req, httplib::Response& res) {
        const auto user = require_user(platform, req, res);
        if (!user) return;
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& t : platform.user_trips(*user, range_params(req), mac_index_param(req))) {
            rows.push_back(to_json(t));
        }
        send_json(res, 200, {{"trips", rows}});
    }));

    server.Get(R"(/trips/(\d+)-(-?\d+))",
               guarded([&](const httplib::Request& req, httplib::Response& res) {
                   const auto user = require_user(platform, req, res);
                   if (!user) return;
                   const std::size_t mac_index = std::stoul(req.matches[1]);
                   const UnixTime start = std::stoll(req.matches[2]);
                   const Date day = date_of(start);
                   // A trip can run past midnight; search one day either side.
                   const TimeRange range{start_of_day(day) - 86400, end_of_day(day) + 86400};
                   for (const auto& t : platform.user_trips(*user, range, mac_index)) {
                       if (t.trip.start() == start) {
                           send_json(res, 200, to_json(t, true));
                           return;
                       }
                   }
                   send_error(res, 404, "not_found", "no such trip");
               }));

    server.Get("/traffic", guarded([&](const httplib::Request& req, httplib::Response& res) {
        const auto state = platform.traffic();
        nlohmann::json doc;
        if (req.has_param("at")) {
            const auto window =
                TimeWindow::containing(static_cast<UnixTime>(number_param(req, "at")));
            doc = to_json(TrafficSnapshot(state->snapshot.in_window(window)));
        } else {
            doc = to_json(state->snapshot);
        }
        doc["samples"] = state->samples;
        doc["rejected_samples"] = state->rejected_samples;
        send_json(res, 200, doc);
    }));

    server.Post("/route", guarded([&](const httplib::Request& req, httplib::Response& res) {
        const auto body = parse_body(req);
        const RouteRequest request = route_request_from_json(body);
        if (body.value("compare", false)) {
            const auto cmp = platform.compare(request);
            if (!cmp.freeflow) {
                send_error(res, 404, "no_route", "no route found");
                return;
            }
            send_json(res, 200,
                      {{"request", to_json(request)},
                       {"realtime", to_json(*cmp.realtime)},
                       {"historic", to_json(*cmp.historic)},
                       {"freeflow", to_json(*cmp.freeflow)}});
            return;
        }
        const CostTier tier = cost_tier_from_string(body.value("tier", std::string("auto")));
        const auto result = platform.route(request, tier);
        if (!result) {
            send_error(res, 404, "no_route", "no route found");
            return;
        }
        auto doc = to_json(*result);
        doc["request"] = to_json(request);
        send_json(res, 200, doc);
    }));

    server.Get("/alerts", guarded([&](const httplib::Request& req, httplib::Response& res) {
        const VehicleApproach vehicle{GeoPoint(number_param(req, "lat"), number_param(req, "lon")),
                                      number_param(req, "speed"), number_param(req, "bearing")};
        if (!(vehicle.speed_mps >= 0.0) || !(vehicle.bearing_deg >= 0.0 && vehicle.bearing_deg < 360.0)) {
            fail(ErrorKind::InvalidArgument, "speed must be >= 0 and bearing in [0, 360)");
        }
        nlohmann::json alerts = nlohmann::json::array();
        for (const auto& a : platform.alerts(vehicle, now_param(req, platform))) {
            alerts.push_back(to_json(a));
        }
        send_json(res, 200, {{"alerts", alerts}});
    }));

    server.Get("/parking", guarded([&](const httplib::Request& req, httplib::Response& res) {
        const auto feed = platform.parking(now_param(req, platform));
        nlohmann::json list = nlohmann::json::array();
        for (const auto& p : feed.records) list.push_back(to_json(p));
        send_json(res, 200, {{"facilities", list}, {"dropped", feed.diagnostics.size()}});
    }));

    server.Get("/airquality", guarded([&](const httplib::Request& req, httplib::Response& res) {
        const auto feed = platform.air_quality(now_param(req, platform));
        nlohmann::json list = nlohmann::json::array();
        for (const auto& r : feed.records) list.push_back(to_json(r));
        send_json(res, 200, {{"readings", list}, {"dropped", feed.diagnostics.size()}});
    }));

    server.Post("/admin/replay", guarded([&](const httplib::Request& req, httplib::Response& res) {
        const auto& token = platform.config().admin_token;
        if (!token.empty() && req.get_header_value("X-Admin-Token") != token) {
            send_error(res, 401, "unauthorized", "admin token required");
            return;
        }
        std::istringstream in(req.body);
        const auto stats = platform.replay(in);
        send_json(res, 200,
                  {{"ingested", stats.ingested},
                   {"rejected", stats.rejected},
                   {"diagnostics", stats.diagnostics}});
    }));
}

void serve(const ApiConfig& config) {
    Platform platform(config);
    httplib::Server server;
    register_routes(server, platform);
    if (!server.bind_to_port(config.host, config.port)) {
        fail(ErrorKind::Io, "cannot bind " + config.host + ":" + std::to_string(config.port));
    }
    server.listen_after_bind();
}

}  // namespace safemob
