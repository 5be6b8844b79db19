#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "safemob/common.hpp"

namespace safemob {

enum class SurveyPhase { Baseline, Intermediate, PostPilot };
enum class KpiFactor { Comfort, Safety, Awareness };

inline constexpr std::array<KpiFactor, 3> kKpiFactors{KpiFactor::Comfort, KpiFactor::Safety,
                                                      KpiFactor::Awareness};

std::string_view to_string(SurveyPhase phase) noexcept;
std::string_view to_string(KpiFactor factor) noexcept;
SurveyPhase survey_phase_from_string(std::string_view text);
KpiFactor kpi_factor_from_string(std::string_view text);

/// Baseline questionnaires have 16 questions, the later two 35.
std::size_t expected_answer_count(SurveyPhase phase) noexcept;

/// Target increase in percent: Comfort 10, Safety 5, Awareness 100.
double kpi_target_percent(KpiFactor factor) noexcept;

struct SurveyAnswer {
    std::string question_id;
    KpiFactor factor = KpiFactor::Comfort;
    int score = 3;
};

struct SurveyResponse {
    std::string respondent_id;
    SurveyPhase phase = SurveyPhase::Baseline;
    std::vector<SurveyAnswer> answers;
};

/// Integer score sum and answer count; the mean is their ratio.
struct FactorScore {
    long long sum = 0;
    long long count = 0;

    double mean() const { return static_cast<double>(sum) / static_cast<double>(count); }
};

using PhaseScores = std::map<KpiFactor, FactorScore>;

/// Per-factor Likert means across all respondents and questions of one phase.
PhaseScores score_phase(const std::vector<SurveyResponse>& responses);

struct KpiLine {
    double baseline_mean = 0.0;
    double comparison_mean = 0.0;
    double percent_change = 0.0;
    double target_percent = 0.0;
    bool met = false;
};

using KpiReport = std::map<KpiFactor, KpiLine>;

/// `met` is decided in exact rational arithmetic on the score sums.
KpiReport kpi_report(const PhaseScores& baseline, const PhaseScores& comparison);

/// Maps question ids onto factors; loaded from a survey-definition document.
class SurveyDefinition {
public:
    static SurveyDefinition from_json(const nlohmann::json& doc);

    std::optional<KpiFactor> factor_of(const std::string& question_id) const;
    std::size_t size() const noexcept { return factors_.size(); }

private:
    std::map<std::string, KpiFactor> factors_;
};

/// Rows `respondent_id,phase,question_id,factor,score`, optional header.
/// When `definition` is given, every question must be in it with the same factor.
std::vector<SurveyResponse> parse_survey_csv(std::istream& in,
                                             const SurveyDefinition* definition = nullptr);

struct KpiEvaluation {
    PhaseScores baseline;
    std::map<SurveyPhase, PhaseScores> later_phases;
    std::map<SurveyPhase, KpiReport> reports;
};

/// Scores Baseline and every later phase present, reporting each against Baseline.
KpiEvaluation evaluate_kpis(const std::vector<SurveyResponse>& responses);

nlohmann::json to_json(const KpiReport& report);
nlohmann::json to_json(const KpiEvaluation& evaluation);
std::string format_kpi_table(const KpiEvaluation& evaluation);

}  // namespace safemob
