#include "srpm/errors.hpp"
#include "srpm/protocol.hpp"
#include "srpm/scenario_io.hpp"
#include "srpm/transcript_io.hpp"

#include <doctest.h>

using namespace srpm;

namespace {

ScenarioConfig exm(Policy second = Policy::Compliant) {
    auto space = SampleSpace::exact({"h", "a", "b"}, {Rational(1, 3), Rational(1, 3), Rational(1, 3)}, 0);
    ScenarioConfig cfg{.name = "exm", .space = space, .hypothesis = space.event({"h"})};
    ExpertSpec a;
    a.id = "notA";
    a.units.push_back(Partition::binary(space.event({"h", "b"})));
    ExpertSpec b;
    b.id = "notB";
    b.policy = second;
    b.units.push_back(Partition::binary(space.event({"h", "a"})));
    cfg.experts = {a, b};
    cfg.market.entry_order = EntryOrder::Fifo;
    cfg.numerics.rational = true;
    return cfg;
}

}  // namespace

TEST_CASE("exm run: prices, public information and final state") {
    const auto cfg = exm();
    const Transcript t = run_market(cfg, 1);
    REQUIRE(t.rounds.size() == 3);
    CHECK(t.k_infinity == 3);
    CHECK(*t.rounds[0].xi.exact == Rational(1, 3));
    CHECK(*t.rounds[1].xi.exact == Rational(1, 2));
    CHECK(*t.rounds[2].xi.exact == 1);
    CHECK(t.rounds[0].omega == cfg.space.full());
    CHECK(t.rounds[1].omega == cfg.space.event({"h", "b"}));
    CHECK(t.rounds[2].omega == cfg.space.event({"h"}));
    CHECK(t.rounds[1].entered == "notA");
    CHECK(t.rounds[2].entered == "notB");
    CHECK(t.resolution.theta == 1);

    const auto r = check_all(t, cfg, 1e-9);
    CHECK(r.entangled());
    CHECK(r.final_state_ok);
    CHECK(r.t2_class == T2Class::ProvedH);
    CHECK(r.t2_arms.proved_h);
    CHECK(r.t2_arms.full_pooling);
    CHECK_FALSE(r.t2_arms.proved_not_h);
}

TEST_CASE("same seed, same transcript bytes") {
    auto cfg = exm();
    cfg.market.entry_order = EntryOrder::Random;
    for (std::uint64_t seed : {1ULL, 2ULL, 99ULL}) {
        const auto a = transcript_to_string(run_market(cfg, seed), cfg.space);
        const auto b = transcript_to_string(run_market(cfg, seed), cfg.space);
        CHECK(a == b);
    }
}

TEST_CASE("all-ignorant scenario is a single round") {
    auto cfg = exm();
    for (auto& e : cfg.experts) e.units = {Partition::trivial(3)};
    const Transcript t = run_market(cfg, 5);
    CHECK(t.rounds.size() == 1);
    CHECK(*t.rounds[0].xi.exact == Rational(1, 3));
    CHECK(t.rounds[0].chat.empty());
    CHECK(t.rounds[0].members.size() == 3);
    CHECK(check_all(t, cfg, 1e-9).passed());
}

TEST_CASE("ent1 fails when a silent deviant enters") {
    const auto cfg = exm(Policy::SilentDeviant);
    const Transcript t = run_market(cfg, 3);
    const auto r = check_entangled(t, cfg, 1e-9);
    CHECK_FALSE(r.ent1);
    REQUIRE(r.first_failing_round);
}

TEST_CASE("ent2 catches a perturbed price") {
    const auto cfg = exm();
    Transcript t = run_market(cfg, 1);
    t.rounds[1].xi = Price::of(0.6);
    const auto r = check_entangled(t, cfg, 1e-9);
    CHECK_FALSE(r.ent2);
    CHECK(r.first_failing_round == 2);
}

TEST_CASE("structure check catches a growing Omega") {
    const auto cfg = exm();
    Transcript t = run_market(cfg, 1);
    t.rounds[2].omega = cfg.space.full();
    CHECK_FALSE(check_entangled(t, cfg, 1e-9).structure);
}

TEST_CASE("ent3b fails when an outsider still disagrees") {
    const auto cfg = exm();
    Transcript t = run_market(cfg, 1);
    t.rounds.pop_back();
    t.k_infinity = 2;
    const auto r = check_entangled(t, cfg, 1e-9);
    CHECK_FALSE(r.ent3b);
    CHECK_FALSE(check_final_state(t, cfg, 1e-9));
}

TEST_CASE("null refinement still counts as full pooling") {
    // z has zero weight: a null atom that one expert can split off
    auto space = SampleSpace::exact({"h", "a", "z"}, {Rational(1, 2), Rational(1, 2), Rational(0)}, 0);
    ScenarioConfig cfg{.name = "null", .space = space, .hypothesis = space.event({"h", "z"})};
    ExpertSpec x;
    x.id = "x";
    x.units.push_back(Partition::binary(space.event({"h", "a"})));
    cfg.experts = {x};
    cfg.numerics.rational = true;
    const Transcript t = run_market(cfg, 1);
    T2Arms arms;
    const auto c = check_t2(t, cfg, &arms);
    CHECK(c != T2Class::Violation);
    CHECK(arms.full_pooling);
}

TEST_CASE("T2 is not applicable without direct arguments") {
    auto space = SampleSpace::exact({"h1", "h2", "n1", "n2"},
                                    {Rational(1, 4), Rational(1, 4), Rational(1, 4), Rational(1, 4)}, 0);
    ScenarioConfig cfg{.name = "straddle", .space = space, .hypothesis = space.event({"h1", "h2"})};
    ExpertSpec x;
    x.id = "x";
    x.units.push_back(Partition::binary(space.event({"h1", "n1"})));
    cfg.experts = {x};
    const Transcript t = run_market(cfg, 1);
    CHECK(check_t2(t, cfg) == T2Class::NotApplicable);
}

TEST_CASE("k_inf bound and fully compliant sweep") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto cfg = random_scenario(seed, 2 + seed % 10, 2 + seed % 4);
        const Transcript t = run_market(cfg, seed);
        const auto e1 = initial_members(cfg, cfg.space).size() - 1;
        REQUIRE(t.k_infinity <= static_cast<std::int64_t>(cfg.experts.size() - e1 + 1));
        const auto r = check_all(t, cfg, cfg.numerics.epsilon);
        REQUIRE(r.passed());
    }
}

TEST_CASE("transcript round trip reproduces the check report") {
    auto cfg = exm();
    cfg.market.entry_order = EntryOrder::Random;
    const Transcript t = run_market(cfg, 8);
    const auto text = transcript_to_string(t, cfg.space);
    const Transcript back = parse_transcript(text, cfg);
    CHECK(transcript_to_string(back, cfg.space) == text);
    const auto a = check_all(t, cfg, 1e-9);
    const auto b = check_all(back, cfg, 1e-9);
    CHECK(a.passed() == b.passed());
    CHECK(a.t2_class == b.t2_class);
    CHECK(back.rounds.back().members == t.rounds.back().members);

    CHECK_THROWS_AS(parse_transcript("{\"k\":1}\n", cfg), ParseError);
    CHECK_THROWS_AS(parse_transcript("not json\n", cfg), ParseError);
}

TEST_CASE("float mode transcript uses 12 significant digits") {
    auto cfg = exm();
    cfg.numerics.rational = false;
    const Transcript t = run_market(cfg, 1);
    CHECK_FALSE(t.rounds[0].xi.exact);
    const auto text = transcript_to_string(t, cfg.space);
    CHECK(text.find("\"xi\":\"0.333333333333\"") != std::string::npos);
    CHECK(check_all(parse_transcript(text, cfg), cfg, 1e-9).passed());
}

TEST_CASE("ticked mode follows the instant path") {
    auto cfg = exm();
    const Transcript inst = run_market(cfg, 4);
    cfg.market.mode = PriceMode::Ticked;
    const Transcript tick = run_market(cfg, 4);
    REQUIRE(inst.rounds.size() == tick.rounds.size());
    for (std::size_t i = 0; i < inst.rounds.size(); ++i) {
        CHECK(inst.rounds[i].omega == tick.rounds[i].omega);
        CHECK(inst.rounds[i].members == tick.rounds[i].members);
        CHECK(std::abs(inst.rounds[i].xi.value - tick.rounds[i].xi.value) <= 1e-6);
    }
    CHECK(check_all(tick, cfg, effective_epsilon(cfg)).passed());
}

TEST_CASE("degenerate run when the crowd cannot stabilize") {
    auto cfg = exm();
    cfg.market.endowment = 1.0;
    cfg.market.crowd_size = 1.0;
    const Transcript t = run_market(cfg, 1);
    CHECK(t.degenerate);
    CHECK(t.degenerate_reason.find("CrowdBudgetExhausted") != std::string::npos);
}

TEST_CASE("martingale statistics") {
    CHECK(martingale_from_paths({}).increments.empty());
    CHECK(martingale_from_paths({{0.3}, {0.3}}).increments.empty());

    const auto stopped = martingale_from_paths({{0.5, 1.0}, {0.5, 0.0, 0.0}, {0.5}});
    REQUIRE(stopped.increments.size() == 2);
    CHECK(stopped.increments[0].mean == doctest::Approx(0.0));
    CHECK(stopped.increments[1].mean == doctest::Approx(0.0));

    auto family = exm();
    family.true_atom_sampling.mode = TrueAtomMode::PriorSampled;
    family.market.entry_order = EntryOrder::Random;
    const auto rep = martingale_report(family, 2000, 11);
    CHECK(rep.within_3se);
    CHECK_FALSE(rep.not_a_martingale_design);

    const auto fixed = martingale_report(exm(), 10, 11);
    CHECK(fixed.not_a_martingale_design);
    CHECK(fixed.increments.front().mean > 0);
}
