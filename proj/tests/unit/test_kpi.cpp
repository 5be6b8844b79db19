#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "safemob/kpi.hpp"

using namespace safemob;

namespace {

/// Questions per factor: Comfort, Safety, Awareness.
std::array<int, 3> layout(SurveyPhase phase) {
    return phase == SurveyPhase::Baseline ? std::array{6, 5, 5} : std::array{13, 11, 11};
}

/// `respondents` answer sheets whose per-factor score sums are exactly `sums`.
std::vector<SurveyResponse> sheets(SurveyPhase phase, int respondents, std::array<long long, 3> sums) {
    const auto per = layout(phase);
    std::vector<SurveyResponse> out(respondents);
    for (int r = 0; r < respondents; ++r) {
        out[r].respondent_id = "R" + std::to_string(r);
        out[r].phase = phase;
    }
    for (std::size_t f = 0; f < 3; ++f) {
        const long long count = static_cast<long long>(per[f]) * respondents;
        const long long base = sums[f] / count;
        long long extra = sums[f] % count;
        for (int r = 0; r < respondents; ++r) {
            for (int q = 0; q < per[f]; ++q) {
                const int score = static_cast<int>(base + (extra > 0 ? 1 : 0));
                if (extra > 0) --extra;
                out[r].answers.push_back({"Q" + std::to_string(f) + "_" + std::to_string(q), kKpiFactors[f], score});
            }
        }
    }
    return out;
}

std::vector<SurveyResponse> operator+(std::vector<SurveyResponse> a, const std::vector<SurveyResponse>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

}  // namespace

TEST_CASE("targets and answer counts") {
    CHECK(kpi_target_percent(KpiFactor::Comfort) == 10.0);
    CHECK(kpi_target_percent(KpiFactor::Safety) == 5.0);
    CHECK(kpi_target_percent(KpiFactor::Awareness) == 100.0);
    CHECK(expected_answer_count(SurveyPhase::Baseline) == 16);
    CHECK(expected_answer_count(SurveyPhase::Intermediate) == 35);
    CHECK(expected_answer_count(SurveyPhase::PostPilot) == 35);
}

TEST_CASE("comfort 3.0 to 3.3 meets the target exactly") {
    // 10 respondents: 60 baseline comfort answers, 130 later
    const auto base = sheets(SurveyPhase::Baseline, 10, {180, 150, 100});
    auto eval = evaluate_kpis(base + sheets(SurveyPhase::PostPilot, 10, {429, 330, 220}));
    const auto& line = eval.reports.at(SurveyPhase::PostPilot).at(KpiFactor::Comfort);
    CHECK(line.baseline_mean == 3.0);
    CHECK(line.comparison_mean == doctest::Approx(3.3));
    CHECK(line.percent_change == doctest::Approx(10.0));
    CHECK(line.met);

    eval = evaluate_kpis(base + sheets(SurveyPhase::PostPilot, 10, {428, 330, 220}));
    CHECK_FALSE(eval.reports.at(SurveyPhase::PostPilot).at(KpiFactor::Comfort).met);
}

TEST_CASE("safety needs five percent") {
    // 20 respondents: 100 baseline safety answers at 3, 220 later
    const auto base = sheets(SurveyPhase::Baseline, 20, {360, 300, 200});
    auto eval = evaluate_kpis(base + sheets(SurveyPhase::Intermediate, 20, {780, 693, 440}));
    auto line = eval.reports.at(SurveyPhase::Intermediate).at(KpiFactor::Safety);
    CHECK(line.comparison_mean == doctest::Approx(3.15));
    CHECK(line.met);
    eval = evaluate_kpis(base + sheets(SurveyPhase::Intermediate, 20, {780, 692, 440}));
    CHECK_FALSE(eval.reports.at(SurveyPhase::Intermediate).at(KpiFactor::Safety).met);
}

TEST_CASE("awareness 2.0 to 4.0 doubles") {
    const auto base = sheets(SurveyPhase::Baseline, 4, {72, 60, 40});
    auto eval = evaluate_kpis(base + sheets(SurveyPhase::PostPilot, 4, {156, 132, 176}));
    auto line = eval.reports.at(SurveyPhase::PostPilot).at(KpiFactor::Awareness);
    CHECK(line.baseline_mean == 2.0);
    CHECK(line.comparison_mean == 4.0);
    CHECK(line.percent_change == 100.0);
    CHECK(line.met);
    // one answer at 3 instead of 4
    eval = evaluate_kpis(base + sheets(SurveyPhase::PostPilot, 4, {156, 132, 175}));
    CHECK_FALSE(eval.reports.at(SurveyPhase::PostPilot).at(KpiFactor::Awareness).met);
}

TEST_CASE("phases are reported separately against the baseline") {
    const auto base = sheets(SurveyPhase::Baseline, 3, {54, 45, 30});
    const auto eval = evaluate_kpis(base + sheets(SurveyPhase::Intermediate, 3, {117, 99, 66}) +
                                    sheets(SurveyPhase::PostPilot, 3, {156, 132, 132}));
    CHECK(eval.reports.size() == 2);
    CHECK_FALSE(eval.reports.at(SurveyPhase::Intermediate).at(KpiFactor::Comfort).met);
    CHECK(eval.reports.at(SurveyPhase::PostPilot).at(KpiFactor::Comfort).met);
    CHECK(evaluate_kpis(base).reports.empty());

    const auto doc = to_json(eval);
    CHECK(doc["baseline"]["Comfort"] == 3.0);
    CHECK(doc["reports"]["PostPilot"]["Awareness"]["met"] == true);
    CHECK(doc["reports"]["Intermediate"]["Safety"]["target_percent"] == 5.0);
    const auto table = format_kpi_table(eval);
    CHECK(table.find("Baseline vs PostPilot") != std::string::npos);
    CHECK(table.find("Awareness") != std::string::npos);
}

TEST_CASE("scoring rejects malformed phases") {
    auto base = sheets(SurveyPhase::Baseline, 2, {36, 30, 20});
    base[1].answers.pop_back();
    try {
        score_phase(base);
        FAIL("short sheet accepted");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("expected 16") != std::string::npos);
    }
    auto later = sheets(SurveyPhase::PostPilot, 1, {39, 33, 33});
    later[0].answers.push_back(later[0].answers.back());
    CHECK_THROWS_AS(score_phase(later), Error);

    auto wild = sheets(SurveyPhase::Baseline, 1, {18, 15, 10});
    wild[0].answers[0].score = 6;
    CHECK_THROWS_AS(score_phase(wild), Error);
    CHECK_THROWS_AS(score_phase({}), Error);
    CHECK_THROWS_AS(score_phase(sheets(SurveyPhase::Baseline, 1, {18, 15, 10}) +
                                sheets(SurveyPhase::PostPilot, 1, {39, 33, 33})),
                    Error);
    CHECK_THROWS_AS(evaluate_kpis(sheets(SurveyPhase::PostPilot, 1, {39, 33, 33})), Error);
}

TEST_CASE("kpi report properties") {
    std::mt19937_64 rng(71);
    auto rand_sum = [&](long long count) {
        return count + static_cast<long long>(rng() % static_cast<std::uint64_t>(4 * count + 1));
    };
    for (int trial = 0; trial < 300; ++trial) {
        const int nb = 1 + static_cast<int>(rng() % 8), nc = 1 + static_cast<int>(rng() % 8);
        const std::array<long long, 3> bs{rand_sum(6 * nb), rand_sum(5 * nb), rand_sum(5 * nb)};
        const std::array<long long, 3> cs{rand_sum(13 * nc), rand_sum(11 * nc), rand_sum(11 * nc)};
        const auto b = score_phase(sheets(SurveyPhase::Baseline, nb, bs));
        const auto c = score_phase(sheets(SurveyPhase::PostPilot, nc, cs));
        const auto report = kpi_report(b, c);

        // repeating every respondent k times changes nothing
        const int k = 2 + static_cast<int>(rng() % 3);
        const auto bk = score_phase(sheets(SurveyPhase::Baseline, nb * k, {bs[0] * k, bs[1] * k, bs[2] * k}));
        const auto ck = score_phase(sheets(SurveyPhase::PostPilot, nc * k, {cs[0] * k, cs[1] * k, cs[2] * k}));
        const auto scaled = kpi_report(bk, ck);
        for (KpiFactor f : kKpiFactors) {
            CHECK(scaled.at(f).met == report.at(f).met);
            CHECK(scaled.at(f).percent_change == doctest::Approx(report.at(f).percent_change));
            // exact decision agrees with the rational definition
            const auto& bf = b.at(f);
            const auto& cf = c.at(f);
            const long long lhs = 100 * (cf.sum * bf.count - bf.sum * cf.count);
            const long long rhs = static_cast<long long>(kpi_target_percent(f)) * bf.sum * cf.count;
            CHECK(report.at(f).met == (lhs >= rhs));
        }

        // one more point on a later answer never un-meets a target
        for (std::size_t f = 0; f < 3; ++f) {
            auto up = cs;
            if (up[f] >= 5LL * layout(SurveyPhase::PostPilot)[f] * nc) continue;
            ++up[f];
            const auto higher = kpi_report(b, score_phase(sheets(SurveyPhase::PostPilot, nc, up)));
            CHECK(static_cast<int>(higher.at(kKpiFactors[f]).met) >= static_cast<int>(report.at(kKpiFactors[f]).met));
        }
    }
}

TEST_CASE("survey csv with a definition") {
    std::ifstream def_in(SAFEMOB_SOURCE_DIR "/fixtures/surveys/definition.json");
    const auto def = SurveyDefinition::from_json(nlohmann::json::parse(def_in));
    CHECK(def.size() == 35);
    CHECK(def.factor_of("Q07") == KpiFactor::Safety);
    CHECK_FALSE(def.factor_of("Q99"));

    std::ifstream csv(SAFEMOB_SOURCE_DIR "/fixtures/surveys/responses.csv");
    const auto responses = parse_survey_csv(csv, &def);
    const auto eval = evaluate_kpis(responses);
    CHECK(eval.reports.size() == 2);

    // independent tally straight from the file
    std::ifstream again(SAFEMOB_SOURCE_DIR "/fixtures/surveys/responses.csv");
    std::map<std::pair<std::string, std::string>, std::pair<long long, long long>> tally;
    std::string line;
    std::getline(again, line);
    while (std::getline(again, line)) {
        std::stringstream ss(line);
        std::string id, phase, q, factor, score;
        std::getline(ss, id, ',');
        std::getline(ss, phase, ',');
        std::getline(ss, q, ',');
        std::getline(ss, factor, ',');
        std::getline(ss, score, ',');
        auto& t = tally[{phase, factor}];
        t.first += std::stoll(score);
        t.second += 1;
    }
    for (KpiFactor f : kKpiFactors) {
        const std::string name(to_string(f));
        const auto [bsum, bn] = tally.at({"Baseline", name});
        CHECK(eval.baseline.at(f).mean() == doctest::Approx(static_cast<double>(bsum) / bn));
        for (SurveyPhase p : {SurveyPhase::Intermediate, SurveyPhase::PostPilot}) {
            const auto [csum, cn] = tally.at({std::string(to_string(p)), name});
            const double b = static_cast<double>(bsum) / bn, c = static_cast<double>(csum) / cn;
            CHECK(eval.reports.at(p).at(f).percent_change == doctest::Approx(100.0 * (c - b) / b));
        }
    }

    std::istringstream wrong("R1,Baseline,Q01,Safety,3\n");
    CHECK_THROWS_AS(parse_survey_csv(wrong, &def), Error);
    std::istringstream unknown("R1,Baseline,Q77,Safety,3\n");
    CHECK_THROWS_AS(parse_survey_csv(unknown, &def), Error);
    std::istringstream junk("R1,Baseline,Q01,Comfort,three\n");
    CHECK_THROWS_AS(parse_survey_csv(junk), Error);
    std::istringstream fields("R1,Baseline,Q01\n");
    CHECK_THROWS_AS(parse_survey_csv(fields), Error);
    std::istringstream phase("R1,Midway,Q01,Comfort,3\n");
    CHECK_THROWS_AS(parse_survey_csv(phase), Error);
    CHECK_THROWS_AS(SurveyDefinition::from_json(nlohmann::json::parse(
                        R"({"questions": [{"id": "Q1", "factor": "Comfort"}, {"id": "Q1", "factor": "Safety"}]})")),
                    Error);
}
