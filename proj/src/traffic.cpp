#include "safemob/traffic.hpp"

#include <algorithm>
#include <cmath>

#include "safemob/calendar.hpp"

namespace safemob {

namespace {

constexpr double kMadToSigma = 1.4826;

UnixTime floor_div(UnixTime a, UnixTime b) {
    UnixTime q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

double median_of_sorted(std::span<const double> v) {
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Comfort comfort_from_string(std::string_view s) {
    if (s == "High") return Comfort::High;
    if (s == "Medium") return Comfort::Medium;
    if (s == "Low") return Comfort::Low;
    fail(ErrorKind::Parse, "unknown comfort level '" + std::string(s) + "'");
}

}  // namespace

TimeWindow TimeWindow::containing(UnixTime t) { return TimeWindow{floor_div(t, kWidth) * kWidth}; }

std::string_view to_string(Comfort comfort) noexcept {
    switch (comfort) {
        case Comfort::High: return "High";
        case Comfort::Medium: return "Medium";
        case Comfort::Low: return "Low";
    }
    return "Low";
}

Comfort comfort_from_ratio(double ratio) noexcept {
    if (ratio >= 0.75) return Comfort::High;
    if (ratio >= 0.40) return Comfort::Medium;
    return Comfort::Low;
}

Comfort comfort_index(const LinkState& state) noexcept {
    return comfort_from_ratio(state.congestion_ratio);
}

MatchResult match_link_traversals(std::span<const Checkin> checkins, const DetectorNetwork& net,
                                  double max_speed_kmh) {
    MatchResult result;
    for (std::size_t i = 1; i < checkins.size(); ++i) {
        const Checkin& a = checkins[i - 1];
        const Checkin& b = checkins[i];
        const Link* link = net.find_link(a.detector_id, b.detector_id);
        if (!link) continue;
        const double tt = static_cast<double>(b.timestamp - a.timestamp);
        if (!(tt > 0.0) || (link->length_m / tt) * 3.6 > max_speed_kmh) {
            ++result.rejected;
            continue;
        }
        result.samples.push_back(TravelTimeSample{link->key(), a.timestamp, tt});
    }
    return result;
}

std::optional<double> robust_mean(std::span<const double> values, double k) {
    if (values.empty()) return std::nullopt;
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double median = median_of_sorted(sorted);

    std::vector<double> deviations;
    deviations.reserve(sorted.size());
    for (double x : sorted) deviations.push_back(std::abs(x - median));
    std::sort(deviations.begin(), deviations.end());
    const double mad = median_of_sorted(deviations);

    double sum = 0.0;
    std::size_t kept = 0;
    for (double x : sorted) {
        const bool keep = mad == 0.0 ? x == median : std::abs(x - median) <= k * kMadToSigma * mad;
        if (keep) {
            sum += x;
            ++kept;
        }
    }
    return sum / static_cast<double>(kept);
}

std::optional<LinkState> aggregate_link_window(const Link& link, TimeWindow window,
                                               std::span<const double> travel_times_s) {
    const auto estimate = robust_mean(travel_times_s);
    if (!estimate) return std::nullopt;
    LinkState state;
    state.link = link.key();
    state.window = window;
    state.estimate_s = *estimate;
    state.sample_count = travel_times_s.size();
    state.congestion_ratio = link.free_flow_seconds() / *estimate;
    state.comfort = comfort_from_ratio(state.congestion_ratio);
    return state;
}

TrafficSnapshot::TrafficSnapshot(std::vector<LinkState> states) : states_(std::move(states)) {
    std::sort(states_.begin(), states_.end(), [](const LinkState& a, const LinkState& b) {
        if (a.window.start != b.window.start) return a.window.start < b.window.start;
        return a.link < b.link;
    });
    for (std::size_t i = 0; i < states_.size(); ++i) {
        if (!index_.emplace(std::pair(states_[i].link, states_[i].window.start), i).second) {
            fail(ErrorKind::InvalidArgument, "duplicate link state for " + states_[i].link.from +
                                                 "->" + states_[i].link.to);
        }
    }
}

const LinkState* TrafficSnapshot::find(const LinkKey& link, TimeWindow window) const {
    auto it = index_.find(std::pair(link, window.start));
    return it == index_.end() ? nullptr : &states_[it->second];
}

const LinkState* TrafficSnapshot::find(const LinkKey& link, double t) const {
    return find(link, TimeWindow::containing(static_cast<UnixTime>(std::floor(t))));
}

std::vector<LinkState> TrafficSnapshot::in_window(TimeWindow window) const {
    std::vector<LinkState> out;
    for (const auto& s : states_) {
        if (s.window == window) out.push_back(s);
    }
    return out;
}

TrafficSnapshot build_snapshot(std::span<const TravelTimeSample> samples,
                               const DetectorNetwork& net) {
    std::map<std::pair<LinkKey, UnixTime>, std::vector<double>> buckets;
    for (const auto& s : samples) {
        buckets[{s.link, TimeWindow::containing(s.depart).start}].push_back(s.travel_time_s);
    }
    std::vector<LinkState> states;
    for (const auto& [key, values] : buckets) {
        auto state = aggregate_link_window(net.link(key.first), TimeWindow{key.second}, values);
        if (state) states.push_back(std::move(*state));
    }
    return TrafficSnapshot(std::move(states));
}

nlohmann::json to_json(const LinkState& s) {
    return {{"from", s.link.from},
            {"to", s.link.to},
            {"window_start", s.window.start},
            {"window_seconds", TimeWindow::kWidth},
            {"estimate_s", s.estimate_s},
            {"sample_count", s.sample_count},
            {"congestion_ratio", s.congestion_ratio},
            {"comfort", std::string(to_string(s.comfort))}};
}

nlohmann::json to_json(const TrafficSnapshot& snapshot) {
    nlohmann::json doc;
    doc["window_seconds"] = TimeWindow::kWidth;
    doc["states"] = nlohmann::json::array();
    for (const auto& s : snapshot.states()) doc["states"].push_back(to_json(s));
    return doc;
}

TrafficSnapshot snapshot_from_json(const nlohmann::json& doc, const DetectorNetwork& net) {
    std::vector<LinkState> states;
    try {
        for (const auto& j : doc.at("states")) {
            LinkState s;
            s.link = {j.at("from").get<std::string>(), j.at("to").get<std::string>()};
            const Link& link = net.link(s.link);
            const UnixTime start = j.at("window_start").get<UnixTime>();
            s.window = TimeWindow::containing(start);
            if (s.window.start != start) {
                fail(ErrorKind::Parse, "window_start " + std::to_string(start) + " is not aligned");
            }
            s.estimate_s = j.at("estimate_s").get<double>();
            if (!(s.estimate_s > 0.0)) fail(ErrorKind::Parse, "estimate_s must be positive");
            s.sample_count = j.at("sample_count").get<std::size_t>();
            if (s.sample_count < 1) fail(ErrorKind::Parse, "sample_count must be >= 1");
            s.congestion_ratio = link.free_flow_seconds() / s.estimate_s;
            s.comfort = comfort_from_ratio(s.congestion_ratio);
            if (j.contains("comfort") && comfort_from_string(j["comfort"].get<std::string>()) != s.comfort) {
                fail(ErrorKind::Parse, "comfort does not match estimate");
            }
            states.push_back(std::move(s));
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Parse, std::string("traffic snapshot: ") + e.what());
    }
    return TrafficSnapshot(std::move(states));
}

std::string_view to_string(DayClass day_class) noexcept {
    return day_class == DayClass::Weekday ? "weekday" : "weekend";
}

DayClass day_class_of(UnixTime t) {
    // 1970-01-01 was a Thursday; 0 = Sunday below.
    const UnixTime days = floor_div(t, 86400);
    const UnixTime weekday = ((days + 4) % 7 + 7) % 7;
    return (weekday == 0 || weekday == 6) ? DayClass::Weekend : DayClass::Weekday;
}

int time_of_day_bin(UnixTime t) {
    const UnixTime secs = t - floor_div(t, 86400) * 86400;
    return static_cast<int>(secs / TimeWindow::kWidth);
}

HistoricProfiles::HistoricProfiles(std::vector<HistoricProfile> profiles)
    : profiles_(std::move(profiles)) {
    for (std::size_t i = 0; i < profiles_.size(); ++i) {
        const auto& p = profiles_[i];
        if (p.time_of_day_bin < 0 || p.time_of_day_bin >= 96 || !(p.estimate_s > 0.0)) {
            fail(ErrorKind::InvalidArgument, "invalid historic profile for " + p.link.from + "->" + p.link.to);
        }
        if (!index_.emplace(std::tuple(p.link, p.day_class, p.time_of_day_bin), i).second) {
            fail(ErrorKind::InvalidArgument, "duplicate historic profile");
        }
    }
}

const HistoricProfile* HistoricProfiles::find(const LinkKey& link, DayClass day_class,
                                              int bin) const {
    auto it = index_.find(std::tuple(link, day_class, bin));
    return it == index_.end() ? nullptr : &profiles_[it->second];
}

const HistoricProfile* HistoricProfiles::find(const LinkKey& link, double t) const {
    const auto secs = static_cast<UnixTime>(std::floor(t));
    return find(link, day_class_of(secs), time_of_day_bin(secs));
}

HistoricProfiles build_historic_profiles(std::span<const TravelTimeSample> samples) {
    std::map<std::tuple<LinkKey, DayClass, int>, std::vector<double>> buckets;
    for (const auto& s : samples) {
        buckets[{s.link, day_class_of(s.depart), time_of_day_bin(s.depart)}].push_back(
            s.travel_time_s);
    }
    std::vector<HistoricProfile> profiles;
    for (const auto& [key, values] : buckets) {
        const auto& [link, day_class, bin] = key;
        profiles.push_back(HistoricProfile{link, day_class, bin, *robust_mean(values), values.size()});
    }
    return HistoricProfiles(std::move(profiles));
}

std::optional<double> network_speed_kmh(const Trip& trip, const TrafficSnapshot& snapshot,
                                        const DetectorNetwork& net) {
    const TimeWindow window = TimeWindow::containing(trip.start());
    double length = 0.0;
    double time = 0.0;
    for (const auto& key : trip.path) {
        const LinkState* state = snapshot.find(key, window);
        if (!state) continue;
        length += net.link(key).length_m;
        time += state->estimate_s;
    }
    if (!(time > 0.0)) return std::nullopt;
    return (length / 1000.0) / (time / 3600.0);
}

}  // namespace safemob
