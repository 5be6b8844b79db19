#include "safemob/kpi.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <set>
#include <sstream>

namespace safemob {

std::string_view to_string(SurveyPhase phase) noexcept {
    switch (phase) {
        case SurveyPhase::Baseline: return "Baseline";
        case SurveyPhase::Intermediate: return "Intermediate";
        case SurveyPhase::PostPilot: return "PostPilot";
    }
    return "Baseline";
}

std::string_view to_string(KpiFactor factor) noexcept {
    switch (factor) {
        case KpiFactor::Comfort: return "Comfort";
        case KpiFactor::Safety: return "Safety";
        case KpiFactor::Awareness: return "Awareness";
    }
    return "Comfort";
}

SurveyPhase survey_phase_from_string(std::string_view text) {
    for (SurveyPhase p : {SurveyPhase::Baseline, SurveyPhase::Intermediate, SurveyPhase::PostPilot}) {
        if (to_string(p) == text) return p;
    }
    fail(ErrorKind::Parse, "unknown survey phase '" + std::string(text) + "'");
}

KpiFactor kpi_factor_from_string(std::string_view text) {
    for (KpiFactor f : kKpiFactors) {
        if (to_string(f) == text) return f;
    }
    fail(ErrorKind::Parse, "unknown KPI factor '" + std::string(text) + "'");
}

std::size_t expected_answer_count(SurveyPhase phase) noexcept {
    return phase == SurveyPhase::Baseline ? 16 : 35;
}

double kpi_target_percent(KpiFactor factor) noexcept {
    switch (factor) {
        case KpiFactor::Comfort: return 10.0;
        case KpiFactor::Safety: return 5.0;
        case KpiFactor::Awareness: return 100.0;
    }
    return 0.0;
}

namespace {

__extension__ using Wide = __int128;

long long target_integer(KpiFactor factor) {
    return static_cast<long long>(kpi_target_percent(factor));
}

}  // namespace

PhaseScores score_phase(const std::vector<SurveyResponse>& responses) {
    if (responses.empty()) fail(ErrorKind::InvalidArgument, "empty phase: no responses");
    const SurveyPhase phase = responses.front().phase;
    PhaseScores scores;
    for (const auto& r : responses) {
        if (r.phase != phase) {
            fail(ErrorKind::InvalidArgument, "responses mix phases " + std::string(to_string(phase)) +
                                                 " and " + std::string(to_string(r.phase)));
        }
        const std::size_t expected = expected_answer_count(phase);
        if (r.answers.size() != expected) {
            fail(ErrorKind::InvalidArgument,
                 "respondent " + r.respondent_id + ": " + std::string(to_string(phase)) +
                     " response has " + std::to_string(r.answers.size()) + " answers, expected " +
                     std::to_string(expected));
        }
        for (const auto& a : r.answers) {
            if (a.score < 1 || a.score > 5) {
                fail(ErrorKind::InvalidArgument, "respondent " + r.respondent_id + ", question " +
                                                     a.question_id + ": score outside 1..5");
            }
            auto& s = scores[a.factor];
            s.sum += a.score;
            ++s.count;
        }
    }
    return scores;
}

KpiReport kpi_report(const PhaseScores& baseline, const PhaseScores& comparison) {
    KpiReport report;
    for (KpiFactor f : kKpiFactors) {
        auto b = baseline.find(f);
        auto c = comparison.find(f);
        if (b == baseline.end() || c == comparison.end()) continue;
        const FactorScore& bs = b->second;
        const FactorScore& cs = c->second;
        if (bs.count == 0 || cs.count == 0) continue;
        if (bs.sum <= 0) {
            fail(ErrorKind::InvalidArgument,
                 std::string(to_string(f)) + ": baseline mean is 0, percent change undefined");
        }
        // percent = 100 (cs/cn - bs/bn) / (bs/bn) = 100 (cs*bn - bs*cn) / (bs*cn)
        const Wide num = static_cast<Wide>(100) *
                     (static_cast<Wide>(cs.sum) * bs.count -
                      static_cast<Wide>(bs.sum) * cs.count);
        const Wide den = static_cast<Wide>(bs.sum) * cs.count;
        KpiLine line;
        line.baseline_mean = bs.mean();
        line.comparison_mean = cs.mean();
        line.percent_change = static_cast<double>(static_cast<long double>(num) /
                                                  static_cast<long double>(den));
        line.target_percent = kpi_target_percent(f);
        line.met = num >= static_cast<Wide>(target_integer(f)) * den;
        report[f] = line;
    }
    return report;
}

SurveyDefinition SurveyDefinition::from_json(const nlohmann::json& doc) {
    SurveyDefinition def;
    try {
        for (const auto& q : doc.at("questions")) {
            const auto id = q.at("id").get<std::string>();
            if (!def.factors_.emplace(id, kpi_factor_from_string(q.at("factor").get<std::string>()))
                     .second) {
                fail(ErrorKind::Parse, "survey definition: duplicate question '" + id + "'");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Parse, std::string("survey definition: ") + e.what());
    }
    return def;
}

std::optional<KpiFactor> SurveyDefinition::factor_of(const std::string& question_id) const {
    auto it = factors_.find(question_id);
    if (it == factors_.end()) return std::nullopt;
    return it->second;
}

std::vector<SurveyResponse> parse_survey_csv(std::istream& in, const SurveyDefinition* definition) {
    std::map<std::pair<SurveyPhase, std::string>, SurveyResponse> grouped;
    std::vector<std::pair<SurveyPhase, std::string>> order;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) f.push_back(field);
        if (lineno == 1 && !f.empty() && f[0] == "respondent_id") continue;
        const std::string where = "survey line " + std::to_string(lineno);
        if (f.size() != 5) fail(ErrorKind::Parse, where + ": expected 5 fields");
        int score = 0;
        auto [ptr, ec] = std::from_chars(f[4].data(), f[4].data() + f[4].size(), score);
        if (ec != std::errc() || ptr != f[4].data() + f[4].size()) {
            fail(ErrorKind::Parse, where + ": bad score");
        }
        SurveyAnswer answer;
        SurveyPhase phase;
        try {
            phase = survey_phase_from_string(f[1]);
            answer = SurveyAnswer{f[2], kpi_factor_from_string(f[3]), score};
        } catch (const Error& e) {
            fail(ErrorKind::Parse, where + ": " + e.what());
        }
        if (definition) {
            const auto expected = definition->factor_of(answer.question_id);
            if (!expected) fail(ErrorKind::Parse, where + ": question not in survey definition");
            if (*expected != answer.factor) {
                fail(ErrorKind::Parse, where + ": factor disagrees with survey definition");
            }
        }
        const auto key = std::pair(phase, f[0]);
        auto [it, inserted] = grouped.try_emplace(key, SurveyResponse{f[0], phase, {}});
        if (inserted) order.push_back(key);
        it->second.answers.push_back(std::move(answer));
    }
    std::vector<SurveyResponse> out;
    for (const auto& key : order) out.push_back(std::move(grouped.at(key)));
    return out;
}

KpiEvaluation evaluate_kpis(const std::vector<SurveyResponse>& responses) {
    std::map<SurveyPhase, std::vector<SurveyResponse>> by_phase;
    for (const auto& r : responses) by_phase[r.phase].push_back(r);
    if (!by_phase.count(SurveyPhase::Baseline)) {
        fail(ErrorKind::InvalidArgument, "no Baseline responses");
    }
    KpiEvaluation eval;
    eval.baseline = score_phase(by_phase.at(SurveyPhase::Baseline));
    for (SurveyPhase p : {SurveyPhase::Intermediate, SurveyPhase::PostPilot}) {
        if (!by_phase.count(p)) continue;
        eval.later_phases[p] = score_phase(by_phase.at(p));
        eval.reports[p] = kpi_report(eval.baseline, eval.later_phases[p]);
    }
    return eval;
}

nlohmann::json to_json(const KpiReport& report) {
    nlohmann::json doc = nlohmann::json::object();
    for (const auto& [factor, line] : report) {
        doc[std::string(to_string(factor))] = {{"baseline_mean", line.baseline_mean},
                                               {"comparison_mean", line.comparison_mean},
                                               {"percent_change", line.percent_change},
                                               {"target_percent", line.target_percent},
                                               {"met", line.met}};
    }
    return doc;
}

nlohmann::json to_json(const KpiEvaluation& eval) {
    nlohmann::json doc;
    doc["baseline"] = nlohmann::json::object();
    for (const auto& [f, s] : eval.baseline) doc["baseline"][std::string(to_string(f))] = s.mean();
    doc["reports"] = nlohmann::json::object();
    for (const auto& [phase, report] : eval.reports) {
        doc["reports"][std::string(to_string(phase))] = to_json(report);
    }
    return doc;
}

std::string format_kpi_table(const KpiEvaluation& eval) {
    std::ostringstream out;
    char buf[160];
    for (const auto& [phase, report] : eval.reports) {
        out << "Baseline vs " << to_string(phase) << '\n';
        std::snprintf(buf, sizeof buf, "%-10s %9s %9s %9s %9s  %s\n", "factor", "baseline",
                      "compare", "change%", "target%", "met");
        out << buf;
        for (const auto& [factor, line] : report) {
            std::snprintf(buf, sizeof buf, "%-10s %9.3f %9.3f %9.2f %9.0f  %s\n",
                          std::string(to_string(factor)).c_str(), line.baseline_mean,
                          line.comparison_mean, line.percent_change, line.target_percent,
                          line.met ? "yes" : "no");
            out << buf;
        }
    }
    return out.str();
}

}  // namespace safemob
