#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "safemob/ingest.hpp"
#include "safemob/network.hpp"

namespace safemob {

struct Checkin {
    std::string detector_id;
    UnixTime timestamp = 0;

    bool operator==(const Checkin&) const = default;
};

std::vector<Checkin> to_checkins(std::span<const DetectionEvent> events);

struct TripConfig {
    double gap_threshold_s = 900.0;
    /// Repeat detections at one detector within this window collapse to the first.
    UnixTime redetection_window_s = 60;
    /// Trips strictly slower than this are walking.
    double walk_speed_limit_kmh = 7.0;
};

/// Collapses a run of same-detector repeats, each within `window_s` of the
/// one before, to its first check-in. Also drops any check-in sharing the
/// previous kept timestamp.
std::vector<Checkin> collapse_redetections(std::span<const Checkin> checkins, UnixTime window_s);

struct Segmentation {
    /// Every run in input order; concatenated they reproduce the input.
    std::vector<std::vector<Checkin>> runs;
    /// Runs of length >= 2.
    std::vector<std::vector<Checkin>> trips;
    /// Check-ins of length-1 runs.
    std::vector<Checkin> singletons;
};

/// Splits at every gap strictly greater than `gap_threshold_s`.
/// Input must be sorted by timestamp.
Segmentation segment_trips(std::span<const Checkin> checkins, double gap_threshold_s);

struct Trip {
    std::string pseudonym;
    std::vector<Checkin> checkins;
    /// Free-flow shortest-path links between consecutive check-ins.
    std::vector<LinkKey> path;
    std::optional<double> distance_m;
    double duration_s = 0.0;
    std::optional<double> est_speed_kmh;
    std::optional<TravelMode> mode;
    bool unroutable = false;

    const std::string& origin() const { return checkins.front().detector_id; }
    const std::string& destination() const { return checkins.back().detector_id; }
    UnixTime start() const { return checkins.front().timestamp; }
    UnixTime end() const { return checkins.back().timestamp; }
};

TravelMode infer_mode(double est_speed_kmh, double walk_speed_limit_kmh = 7.0) noexcept;

/// Needs >= 2 strictly time-ordered check-ins. A consecutive pair with no
/// connecting path marks the trip unroutable (no distance, speed or mode).
Trip trip_metrics(std::span<const Checkin> checkins, const DetectorNetwork& net,
                  const TripConfig& config = {});

struct TripSet {
    std::vector<Trip> trips;
    std::size_t singleton_count = 0;
};

/// collapse_redetections -> segment_trips -> trip_metrics for one pseudonym.
TripSet reconstruct_trips(std::span<const DetectionEvent> events, const DetectorNetwork& net,
                          const TripConfig& config = {});

struct TimeRange {
    UnixTime from = 0;
    UnixTime to = 0;
};

struct DashboardSummary {
    std::size_t trip_count = 0;
    std::size_t checkin_count = 0;
    std::optional<double> avg_speed_kmh;
    double total_distance_m = 0.0;
    double total_travel_time_s = 0.0;
    std::optional<double> avg_trip_distance_m;
};

/// Distance-weighted aggregates over routable trips; trip_count counts all.
/// Every trip must start and end inside `range`.
DashboardSummary dashboard_summary(std::span<const Trip> trips, std::size_t singleton_count,
                                   const TimeRange& range);

struct PersonalTripRow {
    UnixTime date_time = 0;
    std::string origin;
    std::string destination;
    double trip_time_s = 0.0;
    std::optional<double> distance_m;
    std::optional<double> est_speed_kmh;
    std::optional<double> comparison;
};

/// Network-average speed (km/h) over a trip's links and time window, if known.
using NetworkSpeedFn = std::function<std::optional<double>(const Trip&)>;

std::vector<PersonalTripRow> personal_trips(std::span<const Trip> trips,
                                            const NetworkSpeedFn& network_speed);

}  // namespace safemob
