#include "safemob/alerts.hpp"

#include <algorithm>
#include <cmath>

namespace safemob {

std::string_view to_string(SignalPhase phase) noexcept {
    switch (phase) {
        case SignalPhase::Green: return "Green";
        case SignalPhase::Yellow: return "Yellow";
        case SignalPhase::Red: return "Red";
    }
    return "Red";
}

SignalPhase signal_phase_from_string(std::string_view text) {
    for (SignalPhase p : {SignalPhase::Green, SignalPhase::Yellow, SignalPhase::Red}) {
        if (to_string(p) == text) return p;
    }
    fail(ErrorKind::Parse, "unknown signal phase '" + std::string(text) + "'");
}

std::string_view to_string(AlertKind kind) noexcept {
    switch (kind) {
        case AlertKind::PedestrianCrossing: return "PedestrianCrossing";
        case AlertKind::QueueAhead: return "QueueAhead";
        case AlertKind::RedLightAtArrival: return "RedLightAtArrival";
    }
    return "RedLightAtArrival";
}

std::string_view to_string(AlertSeverity severity) noexcept {
    return severity == AlertSeverity::Warning ? "Warning" : "Info";
}

SpatMessage::SpatMessage(std::string intersection_id, GeoPoint location,
                         SignalPhase current_phase, double time_to_change_s,
                         std::vector<PhaseInterval> phase_plan)
    : intersection_id_(std::move(intersection_id)),
      location_(location),
      current_phase_(current_phase),
      time_to_change_s_(time_to_change_s),
      phase_plan_(std::move(phase_plan)) {
    if (!(time_to_change_s_ >= 0.0) || !std::isfinite(time_to_change_s_)) {
        fail(ErrorKind::InvalidArgument, intersection_id_ + ": time_to_change must be >= 0");
    }
    if (phase_plan_.empty()) fail(ErrorKind::InvalidArgument, intersection_id_ + ": empty phase plan");
    for (const auto& slot : phase_plan_) {
        if (!(slot.duration_s > 0.0) || !std::isfinite(slot.duration_s)) {
            fail(ErrorKind::InvalidArgument, intersection_id_ + ": phase durations must be positive");
        }
        cycle_length_s_ += slot.duration_s;
    }
    auto it = std::find_if(phase_plan_.begin(), phase_plan_.end(),
                           [&](const PhaseInterval& p) { return p.phase == current_phase_; });
    if (it == phase_plan_.end()) {
        fail(ErrorKind::InvalidArgument, intersection_id_ + ": current phase not in plan");
    }
    current_slot_ = static_cast<std::size_t>(it - phase_plan_.begin());
}

SignalPhase phase_at(const SpatMessage& spat, double offset_s) {
    if (!(offset_s > 0.0)) offset_s = 0.0;
    if (offset_s < spat.time_to_change_s()) return spat.current_phase();

    const auto& plan = spat.phase_plan();
    double into_cycle = std::fmod(offset_s - spat.time_to_change_s(), spat.cycle_length_s());
    std::size_t slot = (spat.current_slot() + 1) % plan.size();
    for (std::size_t step = 0; step < plan.size(); ++step) {
        if (into_cycle < plan[slot].duration_s) return plan[slot].phase;
        into_cycle -= plan[slot].duration_s;
        slot = (slot + 1) % plan.size();
    }
    // Rounding left a sliver past the last slot; that instant belongs to the
    // first slot of the next cycle.
    return plan[(spat.current_slot() + 1) % plan.size()].phase;
}

double bearing_difference_deg(double a, double b) noexcept {
    const double d = std::fmod(std::fabs(a - b), 360.0);
    return d > 180.0 ? 360.0 - d : d;
}

std::vector<Alert> evaluate_approach(const VehicleApproach& vehicle,
                                     const IntersectionState& state, UnixTime now,
                                     const ApproachGate& gate, AlertDiagnostics* diagnostics) {
    if (diagnostics) ++diagnostics->evaluated;
    std::vector<Alert> alerts;
    const double staleness = static_cast<double>(now - state.observed_at);
    if (staleness < 0.0 || staleness > gate.max_staleness_s) {
        if (diagnostics) ++diagnostics->stale_suppressed;
        return alerts;
    }

    const GeoPoint& target = state.spat.location();
    const double distance = haversine_m(vehicle.position, target);
    if (distance > gate.radius_m || !(vehicle.speed_mps > gate.min_speed_mps)) return alerts;
    if (distance > 0.0) {
        const double to_target = initial_bearing_deg(vehicle.position, target);
        if (bearing_difference_deg(vehicle.bearing_deg, to_target) > gate.bearing_tolerance_deg) {
            return alerts;
        }
    }

    const double eta = distance / vehicle.speed_mps;
    const std::string& id = state.spat.intersection_id();
    if (state.pedestrian_present) {
        alerts.push_back({id, AlertKind::PedestrianCrossing, eta, AlertSeverity::Warning});
    }
    if (state.queue_present) {
        alerts.push_back({id, AlertKind::QueueAhead, eta, AlertSeverity::Info});
    }
    if (phase_at(state.spat, eta) == SignalPhase::Red) {
        alerts.push_back({id, AlertKind::RedLightAtArrival, eta, AlertSeverity::Warning});
    }
    return alerts;
}

std::vector<IntersectionState> load_intersections(const nlohmann::json& doc) {
    std::vector<IntersectionState> out;
    try {
        const auto& list = doc.at("intersections");
        for (std::size_t i = 0; i < list.size(); ++i) {
            const auto& j = list[i];
            std::vector<PhaseInterval> plan;
            for (const auto& p : j.at("phase_plan")) {
                plan.push_back({signal_phase_from_string(p.at("phase").get<std::string>()),
                                p.at("duration").get<double>()});
            }
            try {
                SpatMessage spat(j.at("intersection_id").get<std::string>(),
                                 GeoPoint(j.at("lat").get<double>(), j.at("lon").get<double>()),
                                 signal_phase_from_string(j.at("current_phase").get<std::string>()),
                                 j.at("time_to_change").get<double>(), std::move(plan));
                out.push_back(IntersectionState{std::move(spat), j.value("pedestrian_present", false),
                                                j.value("queue_present", false),
                                                j.at("observed_at").get<UnixTime>()});
            } catch (const Error& e) {
                fail(e.kind(), "intersections[" + std::to_string(i) + "]: " + e.what());
            }
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Parse, std::string("intersection document: ") + e.what());
    }
    return out;
}

nlohmann::json to_json(const Alert& a) {
    return {{"intersection_id", a.intersection_id},
            {"kind", std::string(to_string(a.kind))},
            {"eta", a.eta_s},
            {"severity", std::string(to_string(a.severity))}};
}

}  // namespace safemob
