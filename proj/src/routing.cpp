#include "safemob/routing.hpp"

#include "safemob/detail/label_search.hpp"

namespace safemob {

std::string_view to_string(CostSource source) noexcept {
    switch (source) {
        case CostSource::Realtime: return "realtime";
        case CostSource::Historic: return "historic";
        case CostSource::Freeflow: return "freeflow";
    }
    return "freeflow";
}

std::string_view to_string(CostTier tier) noexcept {
    switch (tier) {
        case CostTier::Auto: return "auto";
        case CostTier::Realtime: return "realtime";
        case CostTier::Historic: return "historic";
        case CostTier::Freeflow: return "freeflow";
    }
    return "auto";
}

CostTier cost_tier_from_string(std::string_view text) {
    for (CostTier t : {CostTier::Auto, CostTier::Realtime, CostTier::Historic, CostTier::Freeflow}) {
        if (to_string(t) == text) return t;
    }
    fail(ErrorKind::InvalidArgument, "unknown cost tier '" + std::string(text) + "'");
}

LinkCost link_cost(const Link& link, double at, const TrafficSnapshot& realtime,
                   const HistoricProfiles& historic, TravelMode mode, CostTier tier,
                   const RoutingParams& params) {
    if (mode == TravelMode::Walk) {
        return {link.length_m / (params.walk_speed_kmh / 3.6), CostSource::Freeflow};
    }
    const LinkKey key = link.key();
    if (tier == CostTier::Auto || tier == CostTier::Realtime) {
        const LinkState* state = realtime.find(key, at);
        if (state && state->sample_count >= params.min_realtime_samples) {
            return {state->estimate_s, CostSource::Realtime};
        }
    }
    if (tier == CostTier::Auto || tier == CostTier::Historic) {
        if (const HistoricProfile* profile = historic.find(key, at)) {
            return {profile->estimate_s, CostSource::Historic};
        }
    }
    return {link.free_flow_seconds(), CostSource::Freeflow};
}

std::vector<LinkKey> RouteResult::path() const {
    std::vector<LinkKey> out;
    for (const auto& leg : per_link) out.push_back(leg.link);
    return out;
}

std::vector<std::string> RouteResult::nodes() const {
    std::vector<std::string> out;
    if (per_link.empty()) return out;
    out.push_back(per_link.front().link.from);
    for (const auto& leg : per_link) out.push_back(leg.link.to);
    return out;
}

RouteResult evaluate_path(std::span<const LinkKey> path, UnixTime depart, TravelMode mode,
                          const DetectorNetwork& net, const TrafficSnapshot& realtime,
                          const HistoricProfiles& historic, CostTier tier,
                          const RoutingParams& params) {
    RouteResult result;
    result.depart = depart;
    double t = static_cast<double>(depart);
    for (const auto& key : path) {
        const LinkCost c = link_cost(net.link(key), t, realtime, historic, mode, tier, params);
        t += c.seconds;
        result.total_time_s += c.seconds;
        result.per_link.push_back(RouteLeg{key, c.seconds, c.source});
    }
    result.arrive = static_cast<double>(depart) + result.total_time_s;
    return result;
}

std::optional<RouteResult> route(const RouteRequest& request, const DetectorNetwork& net,
                                 const TrafficSnapshot& realtime,
                                 const HistoricProfiles& historic, CostTier tier,
                                 const RoutingParams& params) {
    const std::size_t source = net.index_of(request.origin);
    const std::size_t target = net.index_of(request.destination);
    if (source == target) {
        RouteResult empty;
        empty.depart = request.depart;
        empty.arrive = static_cast<double>(request.depart);
        return empty;
    }

    auto extend = [&](const Link& link, double arrival) {
        return arrival +
               link_cost(link, arrival, realtime, historic, request.mode, tier, params).seconds;
    };
    const auto label = detail::label_setting(net, source, target,
                                             static_cast<double>(request.depart), extend);
    if (!label) return std::nullopt;

    std::vector<LinkKey> path;
    for (std::size_t li : label->links) path.push_back(net.links()[li].key());
    return evaluate_path(path, request.depart, request.mode, net, realtime, historic, tier, params);
}

RouteComparison compare_routes(const RouteRequest& request, const DetectorNetwork& net,
                               const TrafficSnapshot& realtime,
                               const HistoricProfiles& historic, const RoutingParams& params) {
    return RouteComparison{
        route(request, net, realtime, historic, CostTier::Realtime, params),
        route(request, net, realtime, historic, CostTier::Historic, params),
        route(request, net, realtime, historic, CostTier::Freeflow, params),
    };
}

nlohmann::json to_json(const RouteRequest& r) {
    return {{"origin", r.origin},
            {"destination", r.destination},
            {"depart", r.depart},
            {"mode", std::string(to_string(r.mode))}};
}

RouteRequest route_request_from_json(const nlohmann::json& doc) {
    RouteRequest r;
    try {
        r.origin = doc.at("origin").get<std::string>();
        r.destination = doc.at("destination").get<std::string>();
        r.depart = doc.at("depart").get<UnixTime>();
        r.mode = travel_mode_from_string(doc.value("mode", std::string("car")));
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Parse, std::string("route request: ") + e.what());
    }
    return r;
}

nlohmann::json to_json(const RouteResult& r) {
    nlohmann::json legs = nlohmann::json::array();
    for (const auto& leg : r.per_link) {
        legs.push_back({{"from", leg.link.from},
                        {"to", leg.link.to},
                        {"cost_seconds", leg.cost_seconds},
                        {"cost_source", std::string(to_string(leg.cost_source))}});
    }
    return {{"path", r.nodes()},
            {"per_link", legs},
            {"total_time", r.total_time_s},
            {"depart", r.depart},
            {"arrive", r.arrive}};
}

}  // namespace safemob
