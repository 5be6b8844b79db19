#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "safemob/ingest.hpp"
#include "safemob/network.hpp"

namespace safemob {

struct OdDemand {
    std::string origin;
    std::string destination;
    double trips_per_hour = 0.0;
    /// Optional fixed MACs reused round-robin (e.g. a registered user's
    /// device); otherwise every trip gets a fresh MAC.
    std::vector<std::string> macs;
};

struct Slowdown {
    LinkKey link;
    UnixTime window_start = 0;
    UnixTime window_end = 0;
    /// Multiplies traversal time for vehicles entering the link in the window.
    double factor = 1.0;
};

struct DemandSpec {
    std::vector<OdDemand> od_pairs;
    UnixTime period_start = 0;
    UnixTime period_end = 0;
    double speed_factor_min = 0.6;
    double speed_factor_max = 1.1;
    double detection_probability = 1.0;
    std::uint64_t seed = 0;
};

DemandSpec load_demand(const nlohmann::json& doc);
std::vector<Slowdown> load_slowdowns(const nlohmann::json& doc);

struct LinkPassage {
    LinkKey link;
    UnixTime entry = 0;
    UnixTime exit = 0;
};

struct GroundTruthTrip {
    std::string mac;
    UnixTime departure = 0;
    std::vector<LinkPassage> links;

    const std::string& origin() const { return links.front().link.from; }
    const std::string& destination() const { return links.back().link.to; }
    UnixTime arrival() const { return links.back().exit; }
};

struct SimulationOutput {
    /// Sorted by (timestamp, detector id, mac).
    std::vector<RawDetection> detections;
    std::vector<GroundTruthTrip> trips;
};

/// Deterministic given `demand.seed`. Each vehicle follows the free-flow
/// shortest path; a link takes round(free-flow time / speed factor x
/// slowdown) seconds (at least 1); each detector passed reports the vehicle
/// with the detection probability.
SimulationOutput simulate(const DetectorNetwork& net, const DemandSpec& demand,
                          const std::vector<Slowdown>& slowdowns = {});

void write_detections_csv(std::ostream& out, const std::vector<RawDetection>& detections);
nlohmann::json ground_truth_to_json(const std::vector<GroundTruthTrip>& trips);

/// Writes `detections.csv` and `ground_truth.json` into `dir`.
void write_simulation(const std::filesystem::path& dir, const SimulationOutput& output);

}  // namespace safemob
