#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "safemob/network.hpp"
#include "safemob/trips.hpp"

namespace safemob {

constexpr double kMaxPlausibleSpeedKmh = 150.0;

struct TravelTimeSample {
    LinkKey link;
    UnixTime depart = 0;
    double travel_time_s = 0.0;
};

/// 900 s window aligned to the epoch grid.
struct TimeWindow {
    static constexpr UnixTime kWidth = 900;

    UnixTime start = 0;

    static TimeWindow containing(UnixTime t);
    UnixTime end() const noexcept { return start + kWidth; }

    auto operator<=>(const TimeWindow&) const = default;
};

enum class Comfort { High, Medium, Low };

std::string_view to_string(Comfort comfort) noexcept;

/// High iff ratio >= 0.75, Medium iff 0.40 <= ratio < 0.75, Low otherwise.
Comfort comfort_from_ratio(double congestion_ratio) noexcept;

struct LinkState {
    LinkKey link;
    TimeWindow window;
    double estimate_s = 0.0;
    std::size_t sample_count = 0;
    /// Current speed over free-flow speed.
    double congestion_ratio = 0.0;
    Comfort comfort = Comfort::High;
};

Comfort comfort_index(const LinkState& state) noexcept;

struct MatchResult {
    std::vector<TravelTimeSample> samples;
    /// Adjacent pairs dropped for exceeding the speed cap.
    std::size_t rejected = 0;
};

/// One sample per consecutive check-in pair joined by a direct link.
MatchResult match_link_traversals(std::span<const Checkin> checkins, const DetectorNetwork& net,
                                  double max_speed_kmh = kMaxPlausibleSpeedKmh);

/// Median/MAD gate then mean of survivors. Values with
/// |x - median| > k * 1.4826 * MAD are dropped; when MAD is zero only values
/// equal to the median survive. Empty input gives nullopt.
std::optional<double> robust_mean(std::span<const double> values, double k = 3.0);

std::optional<LinkState> aggregate_link_window(const Link& link, TimeWindow window,
                                               std::span<const double> travel_times_s);

/// Realtime link states keyed by (link, window). Immutable once built.
class TrafficSnapshot {
public:
    TrafficSnapshot() = default;
    explicit TrafficSnapshot(std::vector<LinkState> states);

    /// State for the window containing `t`, if any.
    const LinkState* find(const LinkKey& link, double t) const;
    const LinkState* find(const LinkKey& link, TimeWindow window) const;

    std::span<const LinkState> states() const noexcept { return states_; }
    std::vector<LinkState> in_window(TimeWindow window) const;
    bool empty() const noexcept { return states_.empty(); }

private:
    std::vector<LinkState> states_;
    std::map<std::pair<LinkKey, UnixTime>, std::size_t> index_;
};

/// Buckets samples by (link, departure window) and aggregates each bucket.
TrafficSnapshot build_snapshot(std::span<const TravelTimeSample> samples,
                               const DetectorNetwork& net);

nlohmann::json to_json(const LinkState& state);
nlohmann::json to_json(const TrafficSnapshot& snapshot);
TrafficSnapshot snapshot_from_json(const nlohmann::json& doc, const DetectorNetwork& net);

enum class DayClass { Weekday, Weekend };

std::string_view to_string(DayClass day_class) noexcept;
DayClass day_class_of(UnixTime t);
/// 900 s bin of the UTC day, 0..95.
int time_of_day_bin(UnixTime t);

struct HistoricProfile {
    LinkKey link;
    DayClass day_class = DayClass::Weekday;
    int time_of_day_bin = 0;
    double estimate_s = 0.0;
    std::size_t sample_count = 0;
};

class HistoricProfiles {
public:
    HistoricProfiles() = default;
    explicit HistoricProfiles(std::vector<HistoricProfile> profiles);

    const HistoricProfile* find(const LinkKey& link, DayClass day_class, int bin) const;
    /// Profile for the day class and bin containing `t`.
    const HistoricProfile* find(const LinkKey& link, double t) const;

    std::span<const HistoricProfile> profiles() const noexcept { return profiles_; }
    std::size_t size() const noexcept { return profiles_.size(); }

private:
    std::vector<HistoricProfile> profiles_;
    std::map<std::tuple<LinkKey, DayClass, int>, std::size_t> index_;
};

HistoricProfiles build_historic_profiles(std::span<const TravelTimeSample> samples);

/// Network speed for a trip: total length over total realtime estimate of the
/// trip's path links that have a state in the window containing the trip
/// start. nullopt when none do.
std::optional<double> network_speed_kmh(const Trip& trip, const TrafficSnapshot& snapshot,
                                        const DetectorNetwork& net);

}  // namespace safemob
