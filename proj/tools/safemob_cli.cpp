// Command-line front end: simulation, replay, estimation, routing, KPI
// scoring and the HTTP service.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "safemob/kpi.hpp"
#include "safemob/platform.hpp"
#include "safemob/simulator.hpp"

namespace {

using namespace safemob;

nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot open " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorKind::Parse, path + ": " + e.what());
    }
}

Bytes salt_from(const std::string& hex) {
    std::string h = hex;
    if (h.empty()) {
        if (const char* env = std::getenv("SAFEMOB_SALT_HEX")) h = env;
    }
    if (h.empty()) fail(ErrorKind::InvalidArgument, "salt required: --salt-hex or SAFEMOB_SALT_HEX");
    return from_hex(h);
}

UnixTime wall_clock() {
    return std::chrono::duration_cast<std::chrono::seconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

std::vector<TravelTimeSample> samples_from_log(const EventLog& log, const DetectorNetwork& net,
                                               std::size_t& rejected) {
    std::vector<TravelTimeSample> samples;
    for (const auto& p : log.pseudonyms()) {
        const auto events = log.query(p);
        const auto checkins = collapse_redetections(to_checkins(events), TripConfig{}.redetection_window_s);
        auto m = match_link_traversals(checkins, net);
        rejected += m.rejected;
        samples.insert(samples.end(), m.samples.begin(), m.samples.end());
    }
    return samples;
}

std::string fmt_opt(const std::optional<double>& v, int precision = 1) {
    if (!v) return "-";
    std::ostringstream ss;
    ss.setf(std::ios::fixed);
    ss.precision(precision);
    ss << *v;
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Safe mobility platform tools"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Generate BT detections and ground truth");
    std::string sim_network, sim_demand, sim_out, sim_congestion;
    std::optional<std::uint64_t> sim_seed;
    sim->add_option("--network", sim_network, "Network document")->required()->check(CLI::ExistingFile);
    sim->add_option("--demand", sim_demand, "Demand document")->required()->check(CLI::ExistingFile);
    sim->add_option("--seed", sim_seed, "Overrides the demand document seed");
    sim->add_option("--out", sim_out, "Output directory")->required();
    sim->add_option("--congestion", sim_congestion, "Congestion scenario document")
        ->check(CLI::ExistingFile);

    // replay
    auto* rep = app.add_subcommand("replay", "Ingest a detections CSV into an event log");
    std::string rep_network, rep_csv, rep_log, rep_salt;
    rep->add_option("--network", rep_network)->required()->check(CLI::ExistingFile);
    rep->add_option("--csv", rep_csv, "detector_id,mac,timestamp rows")->required()->check(CLI::ExistingFile);
    rep->add_option("--log", rep_log, "Event log file (created if missing)")->required();
    rep->add_option("--salt-hex", rep_salt, "Pseudonymization salt, hex");

    // traffic
    auto* trf = app.add_subcommand("traffic", "Estimate link states from an event log");
    std::string trf_network, trf_log, trf_out;
    trf->add_option("--network", trf_network)->required()->check(CLI::ExistingFile);
    trf->add_option("--log", trf_log)->required()->check(CLI::ExistingFile);
    trf->add_option("--out", trf_out, "Snapshot JSON (stdout if omitted)");

    // trips
    auto* trp = app.add_subcommand("trips", "Reconstruct one device's trips");
    std::string trp_network, trp_log, trp_salt, trp_mac, trp_from, trp_to;
    double trp_gap = TripConfig{}.gap_threshold_s;
    trp->add_option("--network", trp_network)->required()->check(CLI::ExistingFile);
    trp->add_option("--log", trp_log)->required()->check(CLI::ExistingFile);
    trp->add_option("--mac", trp_mac, "Device MAC address")->required();
    trp->add_option("--salt-hex", trp_salt);
    trp->add_option("--from", trp_from, "First day, YYYY-MM-DD");
    trp->add_option("--to", trp_to, "Last day, YYYY-MM-DD");
    trp->add_option("--gap", trp_gap, "Gap threshold in seconds");

    // route
    auto* rte = app.add_subcommand("route", "Time-dependent route between two detectors");
    std::string rte_network, rte_log, rte_origin, rte_dest, rte_mode = "car", rte_tier = "auto";
    UnixTime rte_depart = 0;
    rte->add_option("--network", rte_network)->required()->check(CLI::ExistingFile);
    rte->add_option("--log", rte_log, "Event log for realtime/historic costs")->check(CLI::ExistingFile);
    rte->add_option("--from", rte_origin)->required();
    rte->add_option("--to", rte_dest)->required();
    rte->add_option("--depart", rte_depart, "Departure, Unix seconds")->required();
    rte->add_option("--mode", rte_mode)->check(CLI::IsMember({"car", "walk"}));
    rte->add_option("--tier", rte_tier)->check(CLI::IsMember({"auto", "realtime", "historic", "freeflow"}));

    // kpi
    auto* kpi = app.add_subcommand("kpi", "Score survey phases against the KPI targets");
    std::string kpi_csv, kpi_def, kpi_json;
    kpi->add_option("--responses", kpi_csv)->required()->check(CLI::ExistingFile);
    kpi->add_option("--definition", kpi_def, "Survey definition document")->check(CLI::ExistingFile);
    kpi->add_option("--json", kpi_json, "Also write the report as JSON");

    // serve
    auto* srv = app.add_subcommand("serve", "Run the HTTP/JSON platform service");
    std::string srv_config;
    srv->add_option("--config", srv_config)->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim) {
            const auto net = load_network_file(sim_network);
            auto demand = load_demand(read_json(sim_demand));
            if (sim_seed) demand.seed = *sim_seed;
            std::vector<Slowdown> slowdowns;
            if (!sim_congestion.empty()) slowdowns = load_slowdowns(read_json(sim_congestion));
            const auto output = simulate(net, demand, slowdowns);
            write_simulation(sim_out, output);
            std::cout << output.trips.size() << " trips, " << output.detections.size()
                      << " detections written to " << sim_out << '\n';
        } else if (*rep) {
            const auto net = load_network_file(rep_network);
            auto log = EventLog::open(rep_log);
            std::ifstream in(rep_csv);
            const auto stats = replay_csv(in, net, wall_clock(), salt_from(rep_salt), log);
            std::cout << "ingested " << stats.ingested << ", rejected " << stats.rejected << '\n';
            for (const auto& d : stats.diagnostics) std::cerr << d << '\n';
        } else if (*trf) {
            const auto net = load_network_file(trf_network);
            const auto log = EventLog::open(trf_log);
            std::size_t rejected = 0;
            const auto samples = samples_from_log(log, net, rejected);
            auto doc = to_json(build_snapshot(samples, net));
            doc["samples"] = samples.size();
            doc["rejected_samples"] = rejected;
            if (trf_out.empty()) {
                std::cout << doc.dump(2) << '\n';
            } else {
                std::ofstream(trf_out) << doc.dump(2) << '\n';
            }
        } else if (*trp) {
            const auto net = load_network_file(trp_network);
            const auto log = EventLog::open(trp_log);
            const auto pseudonym = pseudonymize_mac(MacAddress::parse(trp_mac), salt_from(trp_salt));
            TimeRange range{std::numeric_limits<UnixTime>::min() / 2,
                            std::numeric_limits<UnixTime>::max() / 2};
            if (!trp_from.empty()) range.from = start_of_day(parse_iso_date(trp_from));
            if (!trp_to.empty()) range.to = end_of_day(parse_iso_date(trp_to));
            TripConfig config;
            config.gap_threshold_s = trp_gap;
            const auto events = log.query(pseudonym, range.from, range.to);
            const auto set = reconstruct_trips(events, net, config);
            std::size_t rejected = 0;
            const auto snapshot = build_snapshot(samples_from_log(log, net, rejected), net);
            const auto rows = personal_trips(set.trips, [&](const Trip& t) {
                return network_speed_kmh(t, snapshot, net);
            });
            std::cout << "date_time, origin, destination, trip_time_s, distance_m, est_speed_kmh, comparison\n";
            for (const auto& r : rows) {
                std::cout << format_iso_datetime(r.date_time) << ", " << r.origin << ", "
                          << r.destination << ", " << r.trip_time_s << ", "
                          << fmt_opt(r.distance_m, 0) << ", " << fmt_opt(r.est_speed_kmh) << ", "
                          << fmt_opt(r.comparison, 2) << '\n';
            }
            const auto s = dashboard_summary(set.trips, set.singleton_count, range);
            std::cout << "\ntrips " << s.trip_count << ", check-ins " << s.checkin_count
                      << ", avg speed " << fmt_opt(s.avg_speed_kmh) << " km/h, distance "
                      << s.total_distance_m / 1000.0 << " km, travel time "
                      << s.total_travel_time_s / 60.0 << " min, avg trip "
                      << fmt_opt(s.avg_trip_distance_m ? std::optional(*s.avg_trip_distance_m / 1000.0)
                                                       : std::nullopt,
                                 2)
                      << " km\n";
        } else if (*rte) {
            const auto net = load_network_file(rte_network);
            TrafficSnapshot snapshot;
            HistoricProfiles profiles;
            if (!rte_log.empty()) {
                const auto log = EventLog::open(rte_log);
                std::size_t rejected = 0;
                const auto samples = samples_from_log(log, net, rejected);
                snapshot = build_snapshot(samples, net);
                profiles = build_historic_profiles(samples);
            }
            const RouteRequest req{rte_origin, rte_dest, rte_depart, travel_mode_from_string(rte_mode)};
            const auto result = route(req, net, snapshot, profiles, cost_tier_from_string(rte_tier));
            if (!result) {
                std::cout << "no route found\n";
                return 2;
            }
            std::cout << to_json(*result).dump(2) << '\n';
        } else if (*kpi) {
            std::optional<SurveyDefinition> def;
            if (!kpi_def.empty()) def = SurveyDefinition::from_json(read_json(kpi_def));
            std::ifstream in(kpi_csv);
            const auto responses = parse_survey_csv(in, def ? &*def : nullptr);
            const auto eval = evaluate_kpis(responses);
            std::cout << format_kpi_table(eval);
            if (!kpi_json.empty()) std::ofstream(kpi_json) << to_json(eval).dump(2) << '\n';
        } else if (*srv) {
            const auto config = load_api_config(srv_config);
            std::cout << "listening on " << config.host << ':' << config.port << std::endl;
            serve(config);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
