#pragma once

#include <atomic>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "safemob/network.hpp"

namespace safemob {

enum class SignalPhase { Green, Yellow, Red };

std::string_view to_string(SignalPhase phase) noexcept;
SignalPhase signal_phase_from_string(std::string_view text);

struct PhaseInterval {
    SignalPhase phase = SignalPhase::Red;
    double duration_s = 0.0;
};

/// Signal phase and timing: the current phase holds for `time_to_change`,
/// then the plan cycles starting after the current phase's slot.
class SpatMessage {
public:
    SpatMessage(std::string intersection_id, GeoPoint location, SignalPhase current_phase,
                double time_to_change_s, std::vector<PhaseInterval> phase_plan);

    const std::string& intersection_id() const noexcept { return intersection_id_; }
    const GeoPoint& location() const noexcept { return location_; }
    SignalPhase current_phase() const noexcept { return current_phase_; }
    double time_to_change_s() const noexcept { return time_to_change_s_; }
    const std::vector<PhaseInterval>& phase_plan() const noexcept { return phase_plan_; }
    double cycle_length_s() const noexcept { return cycle_length_s_; }
    /// Index of the current phase's slot in the plan (its first occurrence).
    std::size_t current_slot() const noexcept { return current_slot_; }

private:
    std::string intersection_id_;
    GeoPoint location_;
    SignalPhase current_phase_;
    double time_to_change_s_;
    std::vector<PhaseInterval> phase_plan_;
    double cycle_length_s_ = 0.0;
    std::size_t current_slot_ = 0;
};

/// Phase showing `offset_s` seconds from the message time. Negative offsets
/// are treated as zero.
SignalPhase phase_at(const SpatMessage& spat, double offset_s);

struct IntersectionState {
    SpatMessage spat;
    bool pedestrian_present = false;
    bool queue_present = false;
    UnixTime observed_at = 0;
};

struct VehicleApproach {
    GeoPoint position;
    double speed_mps = 0.0;
    double bearing_deg = 0.0;
};

enum class AlertKind { PedestrianCrossing, QueueAhead, RedLightAtArrival };
enum class AlertSeverity { Info, Warning };

std::string_view to_string(AlertKind kind) noexcept;
std::string_view to_string(AlertSeverity severity) noexcept;

struct Alert {
    std::string intersection_id;
    AlertKind kind = AlertKind::RedLightAtArrival;
    double eta_s = 0.0;
    AlertSeverity severity = AlertSeverity::Info;
};

struct ApproachGate {
    double radius_m = 150.0;
    double bearing_tolerance_deg = 45.0;
    double min_speed_mps = 1.0;
    double max_staleness_s = 30.0;
};

struct AlertDiagnostics {
    std::atomic<std::size_t> stale_suppressed{0};
    std::atomic<std::size_t> evaluated{0};
};

/// Smallest absolute angle between two bearings, degrees in [0, 180].
double bearing_difference_deg(double a, double b) noexcept;

/// Alerts for one intersection, ordered pedestrian, queue, red light. Stale
/// intersection data yields no alerts and bumps `diagnostics`.
std::vector<Alert> evaluate_approach(const VehicleApproach& vehicle,
                                     const IntersectionState& state, UnixTime now,
                                     const ApproachGate& gate = {},
                                     AlertDiagnostics* diagnostics = nullptr);

std::vector<IntersectionState> load_intersections(const nlohmann::json& doc);
nlohmann::json to_json(const Alert& alert);

}  // namespace safemob
