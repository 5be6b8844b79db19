#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "safemob/common.hpp"

namespace safemob {

constexpr double kEarthRadiusM = 6371000.0;

/// WGS84-style coordinate in degrees; range-checked on construction.
class GeoPoint {
public:
    GeoPoint(double lat, double lon);

    double lat() const noexcept { return lat_; }
    double lon() const noexcept { return lon_; }

    bool operator==(const GeoPoint&) const = default;

private:
    double lat_;
    double lon_;
};

/// Great-circle distance in meters on a sphere of radius kEarthRadiusM.
double haversine_m(const GeoPoint& a, const GeoPoint& b) noexcept;

/// Initial great-circle bearing from `from` towards `to`, degrees in [0, 360).
double initial_bearing_deg(const GeoPoint& from, const GeoPoint& to) noexcept;

struct Detector {
    std::string id;
    std::string name;
    GeoPoint location;

    bool operator==(const Detector&) const = default;
};

struct LinkKey {
    std::string from;
    std::string to;

    auto operator<=>(const LinkKey&) const = default;
};

struct LinkKeyHash {
    std::size_t operator()(const LinkKey& key) const noexcept;
};

struct Link {
    std::string from;
    std::string to;
    double length_m = 0.0;
    double free_flow_kmh = 0.0;

    LinkKey key() const { return {from, to}; }
    double free_flow_seconds() const noexcept { return length_m / (free_flow_kmh / 3.6); }

    bool operator==(const Link&) const = default;
};

/// Directed detector graph. Immutable once built; detectors are kept in
/// ascending id order so node indices compare like ids.
class DetectorNetwork {
public:
    DetectorNetwork() = default;
    DetectorNetwork(std::vector<Detector> detectors, std::vector<Link> links);

    std::span<const Detector> detectors() const noexcept { return detectors_; }
    std::span<const Link> links() const noexcept { return links_; }

    std::size_t node_count() const noexcept { return detectors_.size(); }
    bool contains(std::string_view id) const;
    /// Throws NotFound for unknown ids.
    std::size_t index_of(std::string_view id) const;
    const Detector& detector(std::string_view id) const;
    const Detector& detector_at(std::size_t index) const { return detectors_.at(index); }

    const Link* find_link(std::string_view from, std::string_view to) const;
    const Link& link(const LinkKey& key) const;
    /// Indices into links(), sorted by destination id.
    std::span<const std::size_t> outgoing(std::size_t node) const { return adjacency_.at(node); }

    bool operator==(const DetectorNetwork& other) const {
        return detectors_ == other.detectors_ && links_ == other.links_;
    }

private:
    std::vector<Detector> detectors_;
    std::vector<Link> links_;
    std::unordered_map<std::string, std::size_t> index_;
    std::unordered_map<LinkKey, std::size_t, LinkKeyHash> link_index_;
    std::vector<std::vector<std::size_t>> adjacency_;
};

DetectorNetwork load_network(const nlohmann::json& doc);
DetectorNetwork load_network_file(const std::filesystem::path& path);
nlohmann::json to_json(const DetectorNetwork& net);

struct Path {
    std::vector<LinkKey> links;
    double total_cost = 0.0;

    /// Detector sequence; a single node for the empty path is not represented.
    std::vector<std::string> nodes() const;
};

using LinkCostFn = std::function<double(const Link&)>;

/// Minimum-cost directed path; equal-cost ties go to the lexicographically
/// smallest detector-id sequence. Costs must be finite and positive.
std::optional<Path> static_shortest_path(const DetectorNetwork& net, std::string_view from,
                                         std::string_view to, const LinkCostFn& cost);

double free_flow_cost(const Link& link);
double length_cost(const Link& link);

}  // namespace safemob
