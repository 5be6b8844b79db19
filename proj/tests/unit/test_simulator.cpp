#include <doctest.h>

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "../support/mac_grep.hpp"
#include "safemob/simulator.hpp"
#include "safemob/traffic.hpp"
#include "safemob/trips.hpp"

using namespace safemob;

namespace {

const Bytes kSalt = from_hex("8899aabbccddeeff0011223344556677");
constexpr UnixTime kStart = 1533538800;

DetectorNetwork city() { return load_network_file(SAFEMOB_SOURCE_DIR "/networks/thessaloniki40.json"); }

DemandSpec steady(std::vector<OdDemand> pairs, double p = 1.0, std::uint64_t seed = 1) {
    DemandSpec d;
    d.od_pairs = std::move(pairs);
    d.period_start = kStart;
    d.period_end = kStart + 3 * 3600;
    d.speed_factor_min = 1.0;
    d.speed_factor_max = 1.0;
    d.detection_probability = p;
    d.seed = seed;
    return d;
}

std::string csv_of(const SimulationOutput& out) {
    std::ostringstream ss;
    write_detections_csv(ss, out.detections);
    return ss.str();
}

/// Detections grouped per device, pseudonymized the way ingest does it.
std::map<std::string, std::vector<DetectionEvent>> by_device(const std::vector<RawDetection>& raw) {
    std::map<std::string, std::vector<DetectionEvent>> out;
    for (const auto& r : raw) {
        const auto mac = MacAddress::parse(r.mac);
        out[mac.canonical()].push_back({r.detector_id, pseudonymize_mac(mac, kSalt), r.timestamp});
    }
    return out;
}

}  // namespace

TEST_CASE("zero demand produces nothing") {
    const auto net = city();
    auto d = steady({{"D01", "D24", 0.0, {}}});
    const auto out = simulate(net, d);
    CHECK(out.detections.empty());
    CHECK(out.trips.empty());
    d.od_pairs.clear();
    CHECK(simulate(net, d).detections.empty());
}

TEST_CASE("one vehicle over a three-detector path") {
    const auto net = load_network_file(SAFEMOB_SOURCE_DIR "/networks/triangle.json");
    auto d = steady({{"A", "C", 1.0, {}}});
    d.period_end = kStart + 3600;
    const auto out = simulate(net, d);
    REQUIRE(out.trips.size() == 1);
    REQUIRE(out.detections.size() == 3);
    const auto& trip = out.trips[0];
    CHECK(trip.origin() == "A");
    CHECK(trip.destination() == "C");
    CHECK(trip.departure >= kStart);
    CHECK(trip.departure < kStart + 1800);
    CHECK(out.detections[0].detector_id == "A");
    CHECK(out.detections[1].detector_id == "B");
    CHECK(out.detections[2].detector_id == "C");
    CHECK(out.detections[1].timestamp - out.detections[0].timestamp == 100);
    CHECK(out.detections[2].timestamp - out.detections[1].timestamp == 100);
    CHECK(trip.arrival() == out.detections[2].timestamp);
}

TEST_CASE("same seed, same bytes") {
    const auto net = city();
    std::ifstream in(SAFEMOB_SOURCE_DIR "/fixtures/demand/morning.json");
    const auto demand = load_demand(nlohmann::json::parse(in));
    const auto a = simulate(net, demand);
    const auto b = simulate(net, demand);
    CHECK(csv_of(a) == csv_of(b));
    CHECK(ground_truth_to_json(a.trips) == ground_truth_to_json(b.trips));
    auto other = demand;
    other.seed += 1;
    CHECK(csv_of(simulate(net, other)) != csv_of(a));

    const auto dir = fixture::temp_dir("sim");
    write_simulation(dir, a);
    CHECK(fixture::slurp(dir / "detections.csv") == csv_of(a));
    CHECK(fixture::slurp(dir / "detections.csv").rfind("detector_id,mac,timestamp\n", 0) == 0);
    CHECK(nlohmann::json::parse(fixture::slurp(dir / "ground_truth.json")) == ground_truth_to_json(a.trips));
    std::filesystem::remove_all(dir);
}

TEST_CASE("detections are ordered and fresh MACs are unique") {
    const auto net = city();
    const auto out = simulate(net, steady({{"D01", "D24", 12, {}}, {"D33", "D08", 20, {}},
                                           {"D12", "D28", 2, {"02:00:00:00:00:aa"}}}));
    for (std::size_t i = 1; i < out.detections.size(); ++i) {
        const auto& a = out.detections[i - 1];
        const auto& b = out.detections[i];
        CHECK(std::tie(a.timestamp, a.detector_id, a.mac) <= std::tie(b.timestamp, b.detector_id, b.mac));
    }
    std::set<std::string> fresh;
    std::size_t fixed = 0;
    for (const auto& t : out.trips) {
        if (t.mac == "02:00:00:00:00:aa") {
            ++fixed;
        } else {
            CHECK(fresh.insert(t.mac).second);
        }
    }
    CHECK(fixed == 6);
    CHECK(fresh.size() == 36 + 60);
}

TEST_CASE("full detection reconstructs every trip exactly") {
    const auto net = city();
    auto d = steady({{"D01", "D24", 12, {}}, {"D24", "D01", 10, {}}, {"D05", "D37", 6, {}}});
    d.speed_factor_min = 0.6;
    d.speed_factor_max = 1.1;
    const auto out = simulate(net, d);
    const auto devices = by_device(out.detections);
    REQUIRE(devices.size() == out.trips.size());
    for (const auto& truth : out.trips) {
        const auto set = reconstruct_trips(devices.at(truth.mac), net);
        REQUIRE(set.trips.size() == 1);
        const Trip& got = set.trips[0];
        CHECK(got.origin() == truth.origin());
        CHECK(got.destination() == truth.destination());
        CHECK(got.duration_s == static_cast<double>(truth.arrival() - truth.departure));
        double length = 0;
        for (const auto& p : truth.links) length += net.link(p.link).length_m;
        CHECK(*got.distance_m == doctest::Approx(length));
    }
}

TEST_CASE("estimated link times recover simulated traversal times") {
    const auto net = city();
    std::ifstream in(SAFEMOB_SOURCE_DIR "/fixtures/demand/congestion.json");
    const auto slow = load_slowdowns(nlohmann::json::parse(in));
    REQUIRE(slow.size() == 2);
    const auto out = simulate(net, steady({{"D01", "D24", 30, {}}, {"D10", "D13", 30, {}}}), slow);

    std::vector<TravelTimeSample> samples;
    for (const auto& [mac, events] : by_device(out.detections)) {
        const auto m = match_link_traversals(to_checkins(events), net);
        CHECK(m.rejected == 0);
        samples.insert(samples.end(), m.samples.begin(), m.samples.end());
    }
    const auto snap = build_snapshot(samples, net);
    REQUIRE(!snap.states().empty());
    std::size_t congested = 0;
    for (const auto& s : snap.states()) {
        const Link& link = net.link(s.link);
        double factor = 1.0;
        for (const auto& sd : slow) {
            if (sd.link == s.link && s.window.start >= sd.window_start && s.window.start + 900 <= sd.window_end) {
                factor = sd.factor;
            }
        }
        // a whole window inside or outside a slowdown: every vehicle saw the same time
        bool mixed = false;
        for (const auto& sd : slow) {
            mixed |= sd.link == s.link && s.window.start < sd.window_end && s.window.start + 900 > sd.window_start &&
                     !(s.window.start >= sd.window_start && s.window.start + 900 <= sd.window_end);
        }
        if (mixed) continue;
        const double truth = std::max(1.0, std::round(link.free_flow_seconds() * factor));
        CHECK(std::abs(s.estimate_s - truth) <= 0.01 * truth);
        congested += factor > 1.0;
    }
    CHECK(congested > 0);
}

TEST_CASE("detection count stays within three sigma of the binomial mean") {
    const auto net = city();
    for (std::uint64_t seed : {3u, 4u, 5u}) {
        const double p = 0.8;
        const auto out = simulate(net, steady({{"D01", "D24", 40, {}}, {"D33", "D08", 40, {}}}, p, seed));
        double passes = 0;
        for (const auto& t : out.trips) passes += static_cast<double>(t.links.size() + 1);
        const double mean = passes * p;
        const double sigma = std::sqrt(passes * p * (1 - p));
        CHECK(std::abs(static_cast<double>(out.detections.size()) - mean) <= 3 * sigma);
    }
    CHECK(simulate(net, steady({{"D01", "D24", 40, {}}}, 0.0)).detections.empty());
}

TEST_CASE("slowdowns apply only on entry inside the window") {
    const auto net = load_network_file(SAFEMOB_SOURCE_DIR "/networks/triangle.json");
    auto d = steady({{"A", "B", 4, {}}});
    d.period_end = kStart + 3600;
    const std::vector<Slowdown> slow{{{"A", "B"}, kStart + 900, kStart + 1800, 2.0}};
    for (const auto& t : simulate(net, d, slow).trips) {
        const UnixTime entry = t.links[0].entry;
        const bool inside = entry >= kStart + 900 && entry < kStart + 1800;
        CHECK(t.links[0].exit - entry == (inside ? 200 : 100));
    }
}

TEST_CASE("demand validation") {
    const auto net = city();
    auto d = steady({{"D01", "D01", 1, {}}});
    CHECK_THROWS_AS(simulate(net, d), Error);
    d = steady({{"D01", "D24", -1, {}}});
    CHECK_THROWS_AS(simulate(net, d), Error);
    d = steady({{"D01", "nowhere", 1, {}}});
    CHECK_THROWS_AS(simulate(net, d), Error);
    d = steady({{"D01", "D24", 1, {}}}, 1.5);
    CHECK_THROWS_AS(simulate(net, d), Error);
    d = steady({{"D01", "D24", 1, {}}});
    d.period_end = d.period_start;
    CHECK_THROWS_AS(simulate(net, d), Error);
    d = steady({{"D01", "D24", 1, {"not-a-mac"}}});
    CHECK_THROWS_AS(simulate(net, d), Error);
    CHECK_THROWS_AS(load_demand(nlohmann::json{{"period", 3}}), Error);

    std::ifstream in(SAFEMOB_SOURCE_DIR "/fixtures/demand/morning.json");
    const auto demand = load_demand(nlohmann::json::parse(in));
    CHECK(demand.od_pairs.size() == 7);
    CHECK(demand.detection_probability == 0.9);
    CHECK(demand.seed == 42);
    CHECK(demand.od_pairs[5].macs == std::vector<std::string>{"AA:BB:CC:DD:EE:01"});
}
