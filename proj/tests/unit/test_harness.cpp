#include "srpm/batch.hpp"
#include "srpm/errors.hpp"
#include "srpm/rng.hpp"
#include "srpm/scenario_io.hpp"
#include "srpm/transcript_io.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace srpm;

#ifndef SRPM_SCENARIO_DIR
#define SRPM_SCENARIO_DIR "scenarios"
#endif

namespace {

const std::string kDir = SRPM_SCENARIO_DIR;

std::string minimal(const std::string& atoms, const std::string& extra = "") {
    return R"({"atoms": )" + atoms + R"(, "true_atom": "h", "hypothesis": ["h"],
               "experts": [{"id": "x", "info": ["h", "b"]}])" + extra + "}";
}

}  // namespace

TEST_CASE("bundled exm scenario") {
    const auto cfg = load_scenario(kDir + "/exm.scenario");
    CHECK(cfg.space.size() == 3);
    for (const auto& w : cfg.space.weights()) CHECK(w == Rational(1, 3));
    CHECK(cfg.experts.size() == 2);
    CHECK(cfg.numerics.rational);
    CHECK(cfg.market.mode == PriceMode::Instant);
    CHECK(cfg.fully_compliant());
    CHECK(scenario_fingerprint(cfg).size() == 16);
    CHECK(scenario_fingerprint(cfg) == scenario_fingerprint(load_scenario(kDir + "/exm.scenario")));
}

TEST_CASE("canonical form round trips") {
    const auto cfg = load_scenario(kDir + "/calibration.scenario");
    const auto again = scenario_from_json(scenario_to_json(cfg));
    CHECK(scenario_to_json(again).dump() == scenario_to_json(cfg).dump());
    auto changed = cfg;
    changed.market.liquidity_b = 50;
    CHECK(scenario_fingerprint(changed) != scenario_fingerprint(cfg));
}

TEST_CASE("scenario validation errors") {
    const std::string ok = R"([{"id":"h","weight":"1/3"},{"id":"a","weight":"1/3"},{"id":"b","weight":"1/3"}])";
    CHECK_NOTHROW(parse_scenario(minimal(ok)));
    CHECK_THROWS_AS(parse_scenario(minimal(R"([{"id":"h","weight":0.3},{"id":"a","weight":0.3},{"id":"b","weight":0.3}])")),
                    ValidationError);
    CHECK_THROWS_AS(parse_scenario(minimal(R"([{"id":"h","weight":0.5},{"id":"h","weight":0.5},{"id":"b","weight":0}])")),
                    ValidationError);
    CHECK_THROWS_AS(parse_scenario(minimal(ok, R"(, "colour": "red")")), ParseError);
    CHECK_THROWS_AS(parse_scenario(minimal(ok, R"(, "market": {"liquidity": 3})")), ParseError);
    CHECK_THROWS_AS(parse_scenario(minimal(ok, R"(, "market": {"liquidity_b": -3})")), ValidationError);
    CHECK_THROWS_AS(parse_scenario(minimal(ok, R"(, "market": {"mode": "slow"})")), ValidationError);

    try {
        parse_scenario("{\n  \"atoms\": [\n    oops\n  ]\n}");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    try {
        parse_scenario(minimal(ok, R"(, "market": {"endowment": "lots"})"));
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("market.endowment") != std::string::npos);
    }
}

TEST_CASE("run_batch: one run equals run_market") {
    const auto cfg = load_scenario(kDir + "/exm_prior.scenario");
    const auto rep = run_batch(cfg, 1, 40);
    REQUIRE(rep.records.size() == 1);
    const auto t = run_market(cfg, 40);
    CHECK(rep.records[0].seed == 40);
    CHECK(rep.records[0].final_price == t.resolution.final_price);
    CHECK(rep.records[0].theta == t.resolution.theta);
    CHECK(rep.records[0].k_infinity == t.k_infinity);
}

TEST_CASE("run_batch is independent of parallelism") {
    const auto cfg = load_scenario(kDir + "/calibration.scenario");
    BatchOptions one;
    one.run_checkers = true;
    BatchOptions many = one;
    many.parallelism = 8;
    const auto a = run_batch(cfg, 300, 5, one);
    const auto b = run_batch(cfg, 300, 5, many);
    CHECK(a == b);
    CHECK(a.check_failures() == 0);
    CHECK(a.checked() == 300);
}

TEST_CASE("merge is associative and order independent") {
    const auto cfg = load_scenario(kDir + "/exm_prior.scenario");
    const auto all = run_batch(cfg, 90, 0);
    RunReport a{all.fingerprint, {}}, b{all.fingerprint, {}}, c{all.fingerprint, {}};
    for (const auto& r : all.records) (r.index % 3 == 0 ? a : r.index % 3 == 1 ? b : c).records.push_back(r);
    CHECK(merge(merge(a, b), c) == merge(a, merge(b, c)));
    CHECK(merge(merge(a, b), c) == all);
    CHECK(merge(c, merge(b, a)) == all);
    CHECK_THROWS_AS(merge(a, a), std::invalid_argument);
}

TEST_CASE("calibration report") {
    std::vector<RunRecord> runs;
    for (int i = 0; i < 100000; ++i) {
        RunRecord r;
        r.final_price = 0.5;
        r.theta = draw_outcome(0.5, splitmix64(static_cast<std::uint64_t>(i) + 7));
        runs.push_back(r);
    }
    const auto rep = calibration_report(runs);
    const auto& b = rep.buckets[10];
    CHECK(b.count == 100000);
    CHECK(b.frequency >= 0.4953);
    CHECK(b.frequency <= 0.5047);
    CHECK(b.ci_low == doctest::Approx(0.5 - 3 * 0.5 / std::sqrt(1e5)));
    CHECK(b.status == BucketStatus::Ok);
    CHECK(rep.passed());

    std::vector<RunRecord> few(10);
    for (auto& r : few) r.final_price = 0.9;  // never resolved to 1: would be OUTSIDE
    const auto low = calibration_report(few);
    CHECK(low.buckets[18].status == BucketStatus::LowCount);
    CHECK(low.passed());

    std::vector<RunRecord> bad(100);
    for (auto& r : bad) r.final_price = 0.9;
    CHECK_FALSE(calibration_report(bad).passed());
}

TEST_CASE("profit experiment shape and zero-information expert") {
    const auto exm = load_scenario(kDir + "/exm.scenario");
    CHECK_THROWS_AS(profit_experiment(exm, 10, 1), BadExperimentShape);

    auto blind = load_scenario(kDir + "/profit.scenario");
    blind.experts.front().units = {Partition::trivial(blind.space.size())};
    const auto p = profit_experiment(blind, 200, 3);
    CHECK(p.compliant.mean == 0.0);
    CHECK(p.silent.mean == 0.0);
}

TEST_CASE("emit formats") {
    RunReport empty;
    std::ostringstream t;
    emit_batch(t, empty, OutputFormat::Table);
    const std::string header = t.str();
    CHECK(std::count(header.begin(), header.end(), '\n') == 1);
    std::ostringstream r;
    emit_batch(r, empty, OutputFormat::Records);
    CHECK(r.str().empty());

    const auto cfg = load_scenario(kDir + "/exm_prior.scenario");
    const auto rep = run_batch(cfg, 20, 1);
    std::ostringstream x, y;
    emit_batch(x, rep, OutputFormat::Records);
    emit_batch(y, rep, OutputFormat::Records);
    CHECK(x.str() == y.str());
    CHECK(format_probability(1.0 / 3.0) == "0.333333333333");
}
