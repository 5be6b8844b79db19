// Random routing instances with an attached brute-force answer key.
#pragma once

#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "safemob/routing.hpp"

namespace fixture {

/// Monday 2018-08-06 08:05:00 UTC.
constexpr safemob::UnixTime kMondayMorning = 1533542700;

enum class Tier { Realtime, UntrustedRealtime, Historic, Freeflow, RealtimeAtThreshold };

struct RoutingInstance {
    safemob::DetectorNetwork net;
    safemob::TrafficSnapshot snapshot;
    safemob::HistoricProfiles profiles;
    /// Cost the library should charge, in node-index space.
    std::vector<oracle::Edge> edges;
    std::vector<safemob::CostSource> expected_source;
    int nodes = 0;
};

inline std::string node_name(int i) { return "N" + std::to_string(i); }

/// Costs are integers and constant over `horizon_windows` windows from
/// `depart`, so floating sums are exact and the snapshot is time-invariant
/// over any route.
inline RoutingInstance random_instance(std::uint64_t seed, int max_nodes = 8,
                                       safemob::UnixTime depart = kMondayMorning,
                                       int horizon_windows = 6) {
    using namespace safemob;
    std::mt19937_64 rng(seed);
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

    RoutingInstance inst;
    inst.nodes = pick(2, max_nodes);
    std::vector<Detector> detectors;
    for (int i = 0; i < inst.nodes; ++i) {
        detectors.push_back({node_name(i), node_name(i), GeoPoint(40.6 + 0.001 * i, 22.9)});
    }
    const double density = std::uniform_real_distribution<double>(0.2, 0.7)(rng);
    std::vector<Link> links;
    for (int a = 0; a < inst.nodes; ++a) {
        for (int b = 0; b < inst.nodes; ++b) {
            if (a == b || std::bernoulli_distribution(density)(rng) == false) continue;
            links.push_back({node_name(a), node_name(b), 10.0 * pick(10, 200), 36.0});
        }
    }
    inst.net = DetectorNetwork(detectors, links);

    std::vector<LinkState> states;
    std::vector<HistoricProfile> profiles;
    const TimeWindow first = TimeWindow::containing(depart);
    for (const Link& l : inst.net.links()) {
        const auto tier = static_cast<Tier>(pick(0, 4));
        const double rt = pick(10, 200);
        const double hist = pick(10, 200);
        auto add_rt = [&](std::size_t count) {
            for (int w = 0; w < horizon_windows; ++w) {
                LinkState s;
                s.link = l.key();
                s.window = TimeWindow{first.start + w * TimeWindow::kWidth};
                s.estimate_s = rt;
                s.sample_count = count;
                s.congestion_ratio = l.free_flow_seconds() / rt;
                s.comfort = comfort_from_ratio(s.congestion_ratio);
                states.push_back(s);
            }
        };
        auto add_hist = [&] {
            for (int w = 0; w < horizon_windows; ++w) {
                const UnixTime t = first.start + w * TimeWindow::kWidth;
                profiles.push_back({l.key(), day_class_of(t), time_of_day_bin(t), hist, 6});
            }
        };
        double cost = 0.0;
        CostSource source = CostSource::Freeflow;
        switch (tier) {
            case Tier::Realtime: add_rt(8); add_hist(); cost = rt; source = CostSource::Realtime; break;
            case Tier::RealtimeAtThreshold: add_rt(5); cost = rt; source = CostSource::Realtime; break;
            case Tier::UntrustedRealtime: add_rt(4); add_hist(); cost = hist; source = CostSource::Historic; break;
            case Tier::Historic: add_hist(); cost = hist; source = CostSource::Historic; break;
            case Tier::Freeflow: cost = l.length_m / 10.0; break;
        }
        inst.edges.push_back({static_cast<int>(inst.net.index_of(l.from)),
                              static_cast<int>(inst.net.index_of(l.to)), cost});
        inst.expected_source.push_back(source);
    }
    inst.snapshot = TrafficSnapshot(std::move(states));
    inst.profiles = HistoricProfiles(std::move(profiles));
    return inst;
}

}  // namespace fixture
