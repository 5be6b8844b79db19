#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "safemob/network.hpp"
#include "safemob/traffic.hpp"

namespace safemob {

enum class CostSource { Realtime, Historic, Freeflow };

/// Which cost chain to follow. Auto is realtime -> historic -> freeflow;
/// a pinned tier falls straight through to freeflow when it has no data.
enum class CostTier { Auto, Realtime, Historic, Freeflow };

std::string_view to_string(CostSource source) noexcept;
std::string_view to_string(CostTier tier) noexcept;
CostTier cost_tier_from_string(std::string_view text);

struct RoutingParams {
    /// Realtime states with fewer samples are not trusted.
    std::size_t min_realtime_samples = 5;
    double walk_speed_kmh = 5.0;
};

struct LinkCost {
    double seconds = 0.0;
    CostSource source = CostSource::Freeflow;
};

/// Cost of entering `link` at time `at`. Walk mode ignores traffic.
LinkCost link_cost(const Link& link, double at, const TrafficSnapshot& realtime,
                   const HistoricProfiles& historic, TravelMode mode,
                   CostTier tier = CostTier::Auto, const RoutingParams& params = {});

struct RouteRequest {
    std::string origin;
    std::string destination;
    UnixTime depart = 0;
    TravelMode mode = TravelMode::Car;
};

struct RouteLeg {
    LinkKey link;
    double cost_seconds = 0.0;
    CostSource cost_source = CostSource::Freeflow;
};

struct RouteResult {
    std::vector<RouteLeg> per_link;
    double total_time_s = 0.0;
    UnixTime depart = 0;
    double arrive = 0.0;

    std::vector<LinkKey> path() const;
    std::vector<std::string> nodes() const;
};

/// Earliest-arrival time-dependent search; each link is costed at the time
/// the route reaches its tail. nullopt when the destination is unreachable.
std::optional<RouteResult> route(const RouteRequest& request, const DetectorNetwork& net,
                                 const TrafficSnapshot& realtime,
                                 const HistoricProfiles& historic,
                                 CostTier tier = CostTier::Auto,
                                 const RoutingParams& params = {});

/// Walks a fixed link sequence with the same costing as route().
RouteResult evaluate_path(std::span<const LinkKey> path, UnixTime depart, TravelMode mode,
                          const DetectorNetwork& net, const TrafficSnapshot& realtime,
                          const HistoricProfiles& historic, CostTier tier = CostTier::Auto,
                          const RoutingParams& params = {});

struct RouteComparison {
    std::optional<RouteResult> realtime;
    std::optional<RouteResult> historic;
    std::optional<RouteResult> freeflow;
};

RouteComparison compare_routes(const RouteRequest& request, const DetectorNetwork& net,
                               const TrafficSnapshot& realtime,
                               const HistoricProfiles& historic,
                               const RoutingParams& params = {});

nlohmann::json to_json(const RouteRequest& request);
RouteRequest route_request_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const RouteResult& result);

}  // namespace safemob
