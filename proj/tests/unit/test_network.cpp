#include <doctest.h>

#include <random>

#include "../support/oracles.hpp"
#include "../support/random_networks.hpp"
#include "safemob/network.hpp"

using namespace safemob;
using nlohmann::json;

namespace {

json two_node_doc() {
    return json::parse(R"({
      "detectors": [{"id": "A", "lat": 40.64, "lon": 22.94}, {"id": "B", "lat": 40.65, "lon": 22.94}],
      "links": [{"from": "A", "to": "B", "length_m": 1200, "free_flow_kmh": 50}]
    })");
}

DetectorNetwork triangle() {
    return load_network_file(SAFEMOB_SOURCE_DIR "/networks/triangle.json");
}

template <class F>
std::string error_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("load_network minimal document") {
    const auto net = load_network(two_node_doc());
    CHECK(net.node_count() == 2);
    CHECK(net.links().size() == 1);
    REQUIRE(net.find_link("A", "B") != nullptr);
    CHECK(net.find_link("B", "A") == nullptr);
    CHECK(net.find_link("A", "B")->free_flow_seconds() == doctest::Approx(86.4));
}

TEST_CASE("load_network rejects bad documents") {
    auto doc = two_node_doc();
    doc["links"][0]["to"] = "X";
    CHECK(error_of([&] { load_network(doc); }).find("unknown detector") != std::string::npos);

    doc = two_node_doc();
    doc["detectors"].push_back({{"id", "A"}, {"lat", 40.0}, {"lon", 22.0}});
    CHECK(error_of([&] { load_network(doc); }).find("duplicate") != std::string::npos);

    doc = two_node_doc();
    doc["links"][0]["length_m"] = 0;
    CHECK_THROWS_AS(load_network(doc), Error);

    doc = two_node_doc();
    doc["links"][0]["to"] = "A";
    CHECK_THROWS_AS(load_network(doc), Error);

    doc = two_node_doc();
    doc["links"].push_back(doc["links"][0]);
    CHECK_THROWS_AS(load_network(doc), Error);

    doc = two_node_doc();
    doc["detectors"][0]["lat"] = 91.0;
    CHECK_THROWS_AS(load_network(doc), Error);

    doc = two_node_doc();
    doc["detectors"][0].erase("lon");
    CHECK(error_of([&] { load_network(doc); }).find("detectors[0]") != std::string::npos);

    CHECK_THROWS_AS(load_network(json::object()), Error);
}

TEST_CASE("bundled network has 40 detectors") {
    const auto net = load_network_file(SAFEMOB_SOURCE_DIR "/networks/thessaloniki40.json");
    CHECK(net.node_count() == 40);
    // grid is strongly connected
    for (const auto& d : net.detectors()) {
        CHECK(static_shortest_path(net, "D01", d.id, free_flow_cost).has_value());
    }
}

TEST_CASE("network json round trip") {
    const auto net = load_network_file(SAFEMOB_SOURCE_DIR "/networks/thessaloniki40.json");
    const auto again = load_network(json::parse(to_json(net).dump()));
    CHECK(again == net);
    const auto once_more = load_network(to_json(again));
    CHECK(once_more == net);
}

TEST_CASE("haversine") {
    const GeoPoint a(40.64, 22.94);
    CHECK(haversine_m(a, a) == 0.0);

    const GeoPoint b(40.65, 22.94);
    const double d = haversine_m(a, b);
    CHECK(std::abs(d - oracle::cosine_law_m(40.64, 22.94, 40.65, 22.94)) <= 1.0);
    CHECK(d == doctest::Approx(1112.0).epsilon(1.0 / 1112.0));

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> lat(-80, 80), lon(-180, 180);
    for (int i = 0; i < 100; ++i) {
        const GeoPoint p(lat(rng), lon(rng)), q(lat(rng), lon(rng)), r(lat(rng), lon(rng));
        CHECK(haversine_m(p, q) == haversine_m(q, p));
        CHECK(haversine_m(p, r) <= haversine_m(p, q) + haversine_m(q, r) + 1e-6);
        // far-apart points: cosine law is well conditioned there
        CHECK(haversine_m(p, q) ==
              doctest::Approx(oracle::cosine_law_m(p.lat(), p.lon(), q.lat(), q.lon())).epsilon(1e-6));
    }
}

TEST_CASE("initial bearing") {
    const GeoPoint a(40.64, 22.94);
    CHECK(initial_bearing_deg(a, GeoPoint(40.65, 22.94)) == doctest::Approx(0.0));
    CHECK(initial_bearing_deg(a, GeoPoint(40.63, 22.94)) == doctest::Approx(180.0));
    CHECK(initial_bearing_deg(a, GeoPoint(40.64, 22.95)) == doctest::Approx(90.0).epsilon(0.01));
    CHECK(initial_bearing_deg(a, GeoPoint(40.64, 22.93)) == doctest::Approx(270.0).epsilon(0.01));
}

TEST_CASE("static shortest path on the triangle") {
    const auto net = triangle();
    const auto p = static_shortest_path(net, "A", "C", free_flow_cost);
    REQUIRE(p);
    CHECK(p->nodes() == std::vector<std::string>{"A", "B", "C"});
    CHECK(p->total_cost == 200.0);

    const auto self = static_shortest_path(net, "B", "B", free_flow_cost);
    REQUIRE(self);
    CHECK(self->links.empty());
    CHECK(self->total_cost == 0.0);

    CHECK_FALSE(static_shortest_path(net, "C", "A", free_flow_cost));
    CHECK_THROWS_AS(static_shortest_path(net, "A", "Z", free_flow_cost), Error);
}

TEST_CASE("isolated pair is unreachable") {
    const DetectorNetwork net({{"P", "", GeoPoint(40, 22)}, {"Q", "", GeoPoint(40.1, 22)}}, {});
    CHECK_FALSE(static_shortest_path(net, "P", "Q", free_flow_cost));
}

TEST_CASE("equal-cost ties go to the smallest id sequence") {
    // A->B->D and A->C->D both 200 m, A->D 300 m
    const DetectorNetwork net(
        {{"A", "", GeoPoint(40, 22)}, {"B", "", GeoPoint(40, 22)},
         {"C", "", GeoPoint(40, 22)}, {"D", "", GeoPoint(40, 22)}},
        {{"A", "C", 100, 36}, {"C", "D", 100, 36}, {"A", "B", 100, 36}, {"B", "D", 100, 36},
         {"A", "D", 300, 36}});
    const auto p = static_shortest_path(net, "A", "D", length_cost);
    REQUIRE(p);
    CHECK(p->nodes() == std::vector<std::string>{"A", "B", "D"});
}

TEST_CASE("static shortest path matches simple-path enumeration") {
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        const auto inst = fixture::random_instance(seed);
        std::vector<oracle::Edge> by_length;
        for (const auto& l : inst.net.links()) {
            by_length.push_back({static_cast<int>(inst.net.index_of(l.from)),
                                 static_cast<int>(inst.net.index_of(l.to)), l.length_m});
        }
        for (int s = 0; s < inst.nodes; ++s) {
            for (int t = 0; t < inst.nodes; ++t) {
                const auto got = static_shortest_path(inst.net, fixture::node_name(s),
                                                      fixture::node_name(t), length_cost);
                const auto want = oracle::best_simple_path(inst.nodes, by_length, s, t);
                REQUIRE(got.has_value() == want.has_value());
                if (!got) continue;
                CHECK(got->total_cost == want->cost);
                if (s != t) {
                    std::vector<std::string> names;
                    for (int i : want->nodes) names.push_back(fixture::node_name(i));
                    CHECK(got->nodes() == names);
                }
            }
        }
    }
}
