#include "safemob/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <random>
#include <set>

namespace safemob {

namespace {

double slowdown_for(const std::vector<Slowdown>& slowdowns, const LinkKey& link, UnixTime entry) {
    double factor = 1.0;
    for (const auto& s : slowdowns) {
        if (s.link == link && entry >= s.window_start && entry < s.window_end) factor *= s.factor;
    }
    return factor;
}

std::string fresh_mac(std::mt19937_64& rng, std::set<std::string>& used) {
    for (;;) {
        std::array<std::uint8_t, 6> octets{};
        const std::uint64_t bits = rng();
        for (std::size_t i = 0; i < 6; ++i) octets[i] = static_cast<std::uint8_t>(bits >> (8 * i));
        // Locally administered, unicast.
        octets[0] = static_cast<std::uint8_t>((octets[0] & 0xFC) | 0x02);
        std::string mac = MacAddress(octets).canonical();
        if (used.insert(mac).second) return mac;
    }
}

}  // namespace

DemandSpec load_demand(const nlohmann::json& doc) {
    DemandSpec d;
    try {
        d.period_start = doc.at("period").at("start").get<UnixTime>();
        d.period_end = doc.at("period").at("end").get<UnixTime>();
        if (doc.contains("speed_factor_range")) {
            d.speed_factor_min = doc["speed_factor_range"].at(0).get<double>();
            d.speed_factor_max = doc["speed_factor_range"].at(1).get<double>();
        }
        d.detection_probability = doc.value("detection_probability", 1.0);
        d.seed = doc.value("seed", std::uint64_t{0});
        for (const auto& od : doc.at("od_pairs")) {
            OdDemand o{od.at("origin").get<std::string>(), od.at("destination").get<std::string>(),
                       od.at("trips_per_hour").get<double>(), {}};
            if (od.contains("macs")) o.macs = od["macs"].get<std::vector<std::string>>();
            d.od_pairs.push_back(std::move(o));
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Parse, std::string("demand document: ") + e.what());
    }
    return d;
}

std::vector<Slowdown> load_slowdowns(const nlohmann::json& doc) {
    std::vector<Slowdown> out;
    if (!doc.contains("congestion")) return out;
    try {
        for (const auto& s : doc["congestion"]) {
            out.push_back(Slowdown{{s.at("from").get<std::string>(), s.at("to").get<std::string>()},
                                   s.at("window_start").get<UnixTime>(),
                                   s.at("window_end").get<UnixTime>(),
                                   s.at("slowdown").get<double>()});
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Parse, std::string("congestion scenario: ") + e.what());
    }
    return out;
}

SimulationOutput simulate(const DetectorNetwork& net, const DemandSpec& demand,
                          const std::vector<Slowdown>& slowdowns) {
    if (!(demand.period_end > demand.period_start)) {
        fail(ErrorKind::InvalidArgument, "demand period is empty");
    }
    if (!(demand.detection_probability >= 0.0 && demand.detection_probability <= 1.0)) {
        fail(ErrorKind::InvalidArgument, "detection probability must be in [0, 1]");
    }
    if (!(demand.speed_factor_min > 0.0 && demand.speed_factor_min <= demand.speed_factor_max)) {
        fail(ErrorKind::InvalidArgument, "speed factor range must be positive and ordered");
    }
    for (const auto& s : slowdowns) {
        net.link(s.link);
        if (!(s.factor > 0.0)) fail(ErrorKind::InvalidArgument, "slowdown factor must be positive");
    }

    std::mt19937_64 rng(demand.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::set<std::string> used_macs;
    for (const auto& od : demand.od_pairs) {
        for (const auto& m : od.macs) used_macs.insert(MacAddress::parse(m).canonical());
    }

    SimulationOutput out;
    for (const auto& od : demand.od_pairs) {
        const std::string pair = od.origin + "->" + od.destination;
        if (od.trips_per_hour < 0.0) fail(ErrorKind::InvalidArgument, pair + ": negative rate");
        if (od.trips_per_hour == 0.0) continue;
        if (od.origin == od.destination) {
            fail(ErrorKind::InvalidArgument, "OD pair " + pair + " has identical endpoints");
        }
        const auto path = static_shortest_path(net, od.origin, od.destination, free_flow_cost);
        if (!path) fail(ErrorKind::InvalidArgument, "OD pair " + pair + " is unreachable");

        const double headway = 3600.0 / od.trips_per_hour;
        for (std::size_t k = 0;; ++k) {
            const double nominal = static_cast<double>(k) * headway;
            if (nominal >= static_cast<double>(demand.period_end - demand.period_start)) break;
            const double jitter = unit(rng) * 0.5 * headway;
            const UnixTime departure =
                demand.period_start + static_cast<UnixTime>(std::floor(nominal + jitter));
            const double speed_factor =
                demand.speed_factor_min +
                unit(rng) * (demand.speed_factor_max - demand.speed_factor_min);

            GroundTruthTrip trip;
            trip.mac = od.macs.empty() ? fresh_mac(rng, used_macs)
                                       : MacAddress::parse(od.macs[k % od.macs.size()]).canonical();
            trip.departure = departure;
            UnixTime t = departure;
            for (const auto& key : path->links) {
                const Link& link = net.link(key);
                const double seconds =
                    link.free_flow_seconds() / speed_factor * slowdown_for(slowdowns, key, t);
                const auto traversal = std::max<UnixTime>(1, std::llround(seconds));
                trip.links.push_back(LinkPassage{key, t, t + traversal});
                t += traversal;
            }

            const auto nodes = path->nodes();
            for (std::size_t i = 0; i < nodes.size(); ++i) {
                const UnixTime at = i == 0 ? trip.departure : trip.links[i - 1].exit;
                if (unit(rng) < demand.detection_probability) {
                    out.detections.push_back(RawDetection{nodes[i], trip.mac, at});
                }
            }
            out.trips.push_back(std::move(trip));
        }
    }

    std::sort(out.detections.begin(), out.detections.end(),
              [](const RawDetection& a, const RawDetection& b) {
                  if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
                  if (a.detector_id != b.detector_id) return a.detector_id < b.detector_id;
                  return a.mac < b.mac;
              });
    std::stable_sort(out.trips.begin(), out.trips.end(),
                     [](const GroundTruthTrip& a, const GroundTruthTrip& b) {
                         return a.departure < b.departure;
                     });
    return out;
}

void write_detections_csv(std::ostream& out, const std::vector<RawDetection>& detections) {
    out << "detector_id,mac,timestamp\n";
    for (const auto& d : detections) out << d.detector_id << ',' << d.mac << ',' << d.timestamp << '\n';
}

nlohmann::json ground_truth_to_json(const std::vector<GroundTruthTrip>& trips) {
    nlohmann::json doc;
    doc["trips"] = nlohmann::json::array();
    for (const auto& t : trips) {
        nlohmann::json links = nlohmann::json::array();
        for (const auto& p : t.links) {
            links.push_back({{"from", p.link.from},
                             {"to", p.link.to},
                             {"entry", p.entry},
                             {"exit", p.exit}});
        }
        doc["trips"].push_back({{"mac", t.mac},
                                {"departure", t.departure},
                                {"origin", t.origin()},
                                {"destination", t.destination()},
                                {"arrival", t.arrival()},
                                {"links", links}});
    }
    return doc;
}

void write_simulation(const std::filesystem::path& dir, const SimulationOutput& output) {
    std::filesystem::create_directories(dir);
    std::ofstream csv(dir / "detections.csv", std::ios::trunc);
    if (!csv) fail(ErrorKind::Io, "cannot write " + (dir / "detections.csv").string());
    write_detections_csv(csv, output.detections);
    std::ofstream gt(dir / "ground_truth.json", std::ios::trunc);
    if (!gt) fail(ErrorKind::Io, "cannot write " + (dir / "ground_truth.json").string());
    gt << ground_truth_to_json(output.trips).dump(2) << '\n';
}

}  // namespace safemob
