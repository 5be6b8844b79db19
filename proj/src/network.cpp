#include "safemob/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "safemob/detail/label_search.hpp"

namespace safemob {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

void validate_token(std::string_view id, const std::string& where) {
    if (id.empty()) fail(ErrorKind::InvalidArgument, where + ": empty detector id");
    for (char c : id) {
        if (c == ',' || c == '"' || static_cast<unsigned char>(c) <= 0x20) {
            fail(ErrorKind::InvalidArgument,
                 where + ": detector id '" + std::string(id) +
                     "' contains whitespace, comma or quote");
        }
    }
}

template <class T>
T required(const nlohmann::json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) {
        fail(ErrorKind::Parse, where + ": missing field '" + key + "'");
    }
    try {
        return obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        fail(ErrorKind::Parse, where + ": field '" + key + "' has the wrong type");
    }
}

}  // namespace

GeoPoint::GeoPoint(double lat, double lon) : lat_(lat), lon_(lon) {
    if (!std::isfinite(lat) || !std::isfinite(lon) || lat < -90.0 || lat > 90.0 ||
        lon < -180.0 || lon > 180.0) {
        fail(ErrorKind::InvalidArgument, "coordinate out of range (" + std::to_string(lat) +
                                             ", " + std::to_string(lon) + ")");
    }
}

double haversine_m(const GeoPoint& a, const GeoPoint& b) noexcept {
    const double phi1 = a.lat() * kDegToRad;
    const double phi2 = b.lat() * kDegToRad;
    const double dphi = (b.lat() - a.lat()) * kDegToRad;
    const double dlambda = (b.lon() - a.lon()) * kDegToRad;
    const double s = std::sin(dphi / 2.0);
    const double t = std::sin(dlambda / 2.0);
    const double h = std::clamp(s * s + std::cos(phi1) * std::cos(phi2) * t * t, 0.0, 1.0);
    return 2.0 * kEarthRadiusM * std::asin(std::sqrt(h));
}

double initial_bearing_deg(const GeoPoint& from, const GeoPoint& to) noexcept {
    const double phi1 = from.lat() * kDegToRad;
    const double phi2 = to.lat() * kDegToRad;
    const double dlambda = (to.lon() - from.lon()) * kDegToRad;
    const double y = std::sin(dlambda) * std::cos(phi2);
    const double x =
        std::cos(phi1) * std::sin(phi2) - std::sin(phi1) * std::cos(phi2) * std::cos(dlambda);
    double deg = std::atan2(y, x) / kDegToRad;
    deg = std::fmod(deg + 360.0, 360.0);
    return deg >= 360.0 ? 0.0 : deg;
}

std::size_t LinkKeyHash::operator()(const LinkKey& key) const noexcept {
    const std::size_t h1 = std::hash<std::string>{}(key.from);
    const std::size_t h2 = std::hash<std::string>{}(key.to);
    return h1 ^ (h2 + 0x9e3779b97f4a7c15ULL + (h1 << 6) + (h1 >> 2));
}

DetectorNetwork::DetectorNetwork(std::vector<Detector> detectors, std::vector<Link> links)
    : detectors_(std::move(detectors)), links_(std::move(links)) {
    std::sort(detectors_.begin(), detectors_.end(),
              [](const Detector& a, const Detector& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < detectors_.size(); ++i) {
        validate_token(detectors_[i].id, "detectors");
        if (!index_.emplace(detectors_[i].id, i).second) {
            fail(ErrorKind::InvalidArgument, "duplicate detector id '" + detectors_[i].id + "'");
        }
    }

    std::sort(links_.begin(), links_.end(),
              [](const Link& a, const Link& b) { return a.key() < b.key(); });
    adjacency_.assign(detectors_.size(), {});
    for (std::size_t i = 0; i < links_.size(); ++i) {
        const Link& l = links_[i];
        const std::string where = "link " + l.from + "->" + l.to;
        if (!contains(l.from)) fail(ErrorKind::NotFound, where + ": unknown detector '" + l.from + "'");
        if (!contains(l.to)) fail(ErrorKind::NotFound, where + ": unknown detector '" + l.to + "'");
        if (l.from == l.to) fail(ErrorKind::InvalidArgument, where + ": self loop");
        if (!(l.length_m > 0.0) || !std::isfinite(l.length_m)) {
            fail(ErrorKind::InvalidArgument, where + ": length must be positive");
        }
        if (!(l.free_flow_kmh > 0.0) || !std::isfinite(l.free_flow_kmh)) {
            fail(ErrorKind::InvalidArgument, where + ": free-flow speed must be positive");
        }
        if (!link_index_.emplace(l.key(), i).second) {
            fail(ErrorKind::InvalidArgument, where + ": duplicate directed link");
        }
        adjacency_[index_.at(l.from)].push_back(i);
    }
}

bool DetectorNetwork::contains(std::string_view id) const {
    return index_.find(std::string(id)) != index_.end();
}

std::size_t DetectorNetwork::index_of(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) fail(ErrorKind::NotFound, "unknown detector '" + std::string(id) + "'");
    return it->second;
}

const Detector& DetectorNetwork::detector(std::string_view id) const {
    return detectors_[index_of(id)];
}

const Link* DetectorNetwork::find_link(std::string_view from, std::string_view to) const {
    auto it = link_index_.find(LinkKey{std::string(from), std::string(to)});
    return it == link_index_.end() ? nullptr : &links_[it->second];
}

const Link& DetectorNetwork::link(const LinkKey& key) const {
    const Link* l = find_link(key.from, key.to);
    if (!l) fail(ErrorKind::NotFound, "unknown link " + key.from + "->" + key.to);
    return *l;
}

DetectorNetwork load_network(const nlohmann::json& doc) {
    if (!doc.is_object()) fail(ErrorKind::Parse, "network document must be an object");
    if (!doc.contains("detectors") || !doc["detectors"].is_array()) {
        fail(ErrorKind::Parse, "network document: missing 'detectors' array");
    }
    if (!doc.contains("links") || !doc["links"].is_array()) {
        fail(ErrorKind::Parse, "network document: missing 'links' array");
    }

    std::vector<Detector> detectors;
    for (std::size_t i = 0; i < doc["detectors"].size(); ++i) {
        const auto& d = doc["detectors"][i];
        const std::string where = "detectors[" + std::to_string(i) + "]";
        auto id = required<std::string>(d, "id", where);
        auto name = d.value("name", id);
        const double lat = required<double>(d, "lat", where);
        const double lon = required<double>(d, "lon", where);
        try {
            detectors.push_back(Detector{std::move(id), std::move(name), GeoPoint(lat, lon)});
        } catch (const Error& e) {
            fail(e.kind(), where + ": " + e.what());
        }
    }

    std::vector<Link> links;
    for (std::size_t i = 0; i < doc["links"].size(); ++i) {
        const auto& l = doc["links"][i];
        const std::string where = "links[" + std::to_string(i) + "]";
        links.push_back(Link{required<std::string>(l, "from", where),
                             required<std::string>(l, "to", where),
                             required<double>(l, "length_m", where),
                             required<double>(l, "free_flow_kmh", where)});
    }

    try {
        return DetectorNetwork(std::move(detectors), std::move(links));
    } catch (const Error& e) {
        fail(e.kind(), std::string("network document: ") + e.what());
    }
}

DetectorNetwork load_network_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot open network file " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorKind::Parse, path.string() + ": " + e.what());
    }
    try {
        return load_network(doc);
    } catch (const Error& e) {
        fail(e.kind(), path.string() + ": " + e.what());
    }
}

nlohmann::json to_json(const DetectorNetwork& net) {
    nlohmann::json doc;
    doc["detectors"] = nlohmann::json::array();
    for (const auto& d : net.detectors()) {
        doc["detectors"].push_back(
            {{"id", d.id}, {"name", d.name}, {"lat", d.location.lat()}, {"lon", d.location.lon()}});
    }
    doc["links"] = nlohmann::json::array();
    for (const auto& l : net.links()) {
        doc["links"].push_back({{"from", l.from},
                                {"to", l.to},
                                {"length_m", l.length_m},
                                {"free_flow_kmh", l.free_flow_kmh}});
    }
    return doc;
}

std::vector<std::string> Path::nodes() const {
    std::vector<std::string> out;
    if (links.empty()) return out;
    out.push_back(links.front().from);
    for (const auto& l : links) out.push_back(l.to);
    return out;
}

double free_flow_cost(const Link& link) { return link.free_flow_seconds(); }
double length_cost(const Link& link) { return link.length_m; }

std::optional<Path> static_shortest_path(const DetectorNetwork& net, std::string_view from,
                                         std::string_view to, const LinkCostFn& cost) {
    const std::size_t source = net.index_of(from);
    const std::size_t target = net.index_of(to);
    if (source == target) return Path{};

    auto extend = [&](const Link& link, double value) {
        const double c = cost(link);
        if (!(c > 0.0) || !std::isfinite(c)) {
            fail(ErrorKind::InvalidArgument,
                 "link cost must be finite and positive on " + link.from + "->" + link.to);
        }
        return value + c;
    };
    auto label = detail::label_setting(net, source, target, 0.0, extend);
    if (!label) return std::nullopt;

    Path path;
    path.total_cost = label->value;
    for (std::size_t li : label->links) path.links.push_back(net.links()[li].key());
    return path;
}

}  // namespace safemob
