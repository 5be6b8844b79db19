#include "safemob/trips.hpp"

#include <algorithm>

namespace safemob {

std::vector<Checkin> to_checkins(std::span<const DetectionEvent> events) {
    std::vector<Checkin> out;
    out.reserve(events.size());
    for (const auto& e : events) out.push_back(Checkin{e.detector_id, e.timestamp});
    return out;
}

std::vector<Checkin> collapse_redetections(std::span<const Checkin> checkins, UnixTime window_s) {
    std::vector<Checkin> out;
    UnixTime last_seen = 0;  // latest raw timestamp of the current same-detector run
    for (const auto& c : checkins) {
        if (!out.empty()) {
            const Checkin& kept = out.back();
            if (c.detector_id == kept.detector_id && c.timestamp - last_seen <= window_s) {
                last_seen = c.timestamp;
                continue;
            }
            if (c.timestamp == kept.timestamp) continue;
        }
        out.push_back(c);
        last_seen = c.timestamp;
    }
    return out;
}

Segmentation segment_trips(std::span<const Checkin> checkins, double gap_threshold_s) {
    if (!(gap_threshold_s > 0.0)) fail(ErrorKind::InvalidArgument, "gap threshold must be positive");
    for (std::size_t i = 1; i < checkins.size(); ++i) {
        if (checkins[i].timestamp < checkins[i - 1].timestamp) {
            fail(ErrorKind::InvalidArgument, "check-ins are not sorted by timestamp");
        }
    }

    Segmentation seg;
    std::vector<Checkin> run;
    auto close_run = [&] {
        if (run.empty()) return;
        if (run.size() >= 2) {
            seg.trips.push_back(run);
        } else {
            seg.singletons.push_back(run.front());
        }
        seg.runs.push_back(std::move(run));
        run.clear();
    };
    for (std::size_t i = 0; i < checkins.size(); ++i) {
        if (i > 0 && static_cast<double>(checkins[i].timestamp - checkins[i - 1].timestamp) >
                         gap_threshold_s) {
            close_run();
        }
        run.push_back(checkins[i]);
    }
    close_run();
    return seg;
}

TravelMode infer_mode(double est_speed_kmh, double walk_speed_limit_kmh) noexcept {
    return est_speed_kmh < walk_speed_limit_kmh ? TravelMode::Walk : TravelMode::Car;
}

Trip trip_metrics(std::span<const Checkin> checkins, const DetectorNetwork& net,
                  const TripConfig& config) {
    if (checkins.size() < 2) fail(ErrorKind::InvalidArgument, "a trip needs at least 2 check-ins");
    for (std::size_t i = 1; i < checkins.size(); ++i) {
        if (checkins[i].timestamp <= checkins[i - 1].timestamp) {
            fail(ErrorKind::InvalidArgument, "trip check-ins must be strictly time-ordered");
        }
    }

    Trip trip;
    trip.checkins.assign(checkins.begin(), checkins.end());
    trip.duration_s = static_cast<double>(trip.end() - trip.start());

    double distance = 0.0;
    for (std::size_t i = 1; i < checkins.size(); ++i) {
        const auto& a = checkins[i - 1].detector_id;
        const auto& b = checkins[i].detector_id;
        const auto leg = static_shortest_path(net, a, b, free_flow_cost);
        if (!leg) {
            trip.unroutable = true;
            trip.path.clear();
            return trip;
        }
        for (const auto& key : leg->links) {
            distance += net.link(key).length_m;
            trip.path.push_back(key);
        }
    }
    trip.distance_m = distance;
    trip.est_speed_kmh = (distance / 1000.0) / (trip.duration_s / 3600.0);
    trip.mode = infer_mode(*trip.est_speed_kmh, config.walk_speed_limit_kmh);
    return trip;
}

TripSet reconstruct_trips(std::span<const DetectionEvent> events, const DetectorNetwork& net,
                          const TripConfig& config) {
    const auto checkins = collapse_redetections(to_checkins(events), config.redetection_window_s);
    const auto seg = segment_trips(checkins, config.gap_threshold_s);
    TripSet out;
    out.singleton_count = seg.singletons.size();
    for (const auto& run : seg.trips) {
        Trip trip = trip_metrics(run, net, config);
        if (!events.empty()) trip.pseudonym = events.front().pseudonym.str();
        out.trips.push_back(std::move(trip));
    }
    return out;
}

DashboardSummary dashboard_summary(std::span<const Trip> trips, std::size_t singleton_count,
                                   const TimeRange& range) {
    if (range.from > range.to) fail(ErrorKind::InvalidArgument, "range has from > to");
    DashboardSummary s;
    s.trip_count = trips.size();
    s.checkin_count = singleton_count;
    std::size_t routable = 0;
    for (const auto& t : trips) {
        if (t.start() < range.from || t.end() > range.to) {
            fail(ErrorKind::InvalidArgument, "trip outside the summary range");
        }
        s.checkin_count += t.checkins.size();
        if (t.unroutable || !t.distance_m) continue;
        ++routable;
        s.total_distance_m += *t.distance_m;
        s.total_travel_time_s += t.duration_s;
    }
    if (s.total_travel_time_s > 0.0) {
        s.avg_speed_kmh = (s.total_distance_m / 1000.0) / (s.total_travel_time_s / 3600.0);
    }
    if (routable > 0) s.avg_trip_distance_m = s.total_distance_m / static_cast<double>(routable);
    return s;
}

std::vector<PersonalTripRow> personal_trips(std::span<const Trip> trips,
                                            const NetworkSpeedFn& network_speed) {
    std::vector<PersonalTripRow> rows;
    rows.reserve(trips.size());
    for (const auto& t : trips) {
        PersonalTripRow row{t.start(),        t.origin(),        t.destination(), t.duration_s,
                            t.distance_m,     t.est_speed_kmh,   std::nullopt};
        if (t.est_speed_kmh && network_speed) {
            const auto net_speed = network_speed(t);
            if (net_speed && *net_speed > 0.0) row.comparison = *t.est_speed_kmh / *net_speed;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace safemob
