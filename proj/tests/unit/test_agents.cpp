#include "srpm/agents.hpp"
#include "srpm/errors.hpp"

#include <doctest.h>

#include <cmath>

using namespace srpm;

namespace {

struct Exm {
    SampleSpace space = SampleSpace::exact({"h", "a", "b"}, {Rational(1, 3), Rational(1, 3), Rational(1, 3)}, 0);
    Event h = space.event({"h"});
    MarketParams params;
    Ledger ledger{1000.0};
    MarketState state;

    Exm() {
        ledger.open(std::string(kCrowdId), params.crowd_size);
        ledger.open("notA");
    }
    MarketContext ctx() { return {ledger, state, params}; }

    ExpertAgent agent(const std::string& id, std::initializer_list<std::string_view> info, Policy policy) {
        ExpertSpec spec;
        spec.id = id;
        spec.policy = policy;
        spec.units.push_back(Partition::binary(space.event(info)));
        if (!ledger.has(id)) ledger.open(id);
        return ExpertAgent::realize(spec, space);
    }
};

}  // namespace

TEST_CASE("crowd_target") {
    Exm e;
    auto pub = PublicState::initial(e.space);
    CHECK(crowd_target(pub, e.space, e.h) == Rational(1, 3));
    pub.omega = e.space.event({"h", "b"});
    CHECK(crowd_target(pub, e.space, e.h) == Rational(1, 2));
    pub.omega = e.space.event({"h"});
    CHECK(crowd_target(pub, e.space, e.h) == 1);
}

TEST_CASE("crowd_step instant") {
    Exm e;
    auto ctx = e.ctx();
    const auto r = crowd_step(ctx, 1.0 / 3.0);
    CHECK(r.trades.size() == 1);
    CHECK_FALSE(r.exhausted);
    CHECK(std::abs(lmsr_price(e.state) - 1.0 / 3.0) <= 1e-12);

    const auto again = crowd_step(ctx, 1.0 / 3.0);
    CHECK(again.trades.empty());
    CHECK(e.state.quiet_ticks == 1);
}

TEST_CASE("crowd_step ticked converges monotonically") {
    Exm e;
    e.params.mode = PriceMode::Ticked;
    e.params.tick_rate = 0.2;
    auto ctx = e.ctx();
    const auto r = crowd_step(ctx, 1.0 / 3.0);
    REQUIRE(r.trades.size() > 5);
    double prev = 0.5;
    for (const auto& t : r.trades) {
        CHECK(t.price_after < prev);
        prev = t.price_after;
    }
    CHECK(std::abs(r.price - 1.0 / 3.0) < 1e-6);
}

TEST_CASE("crowd_step reports an exhausted budget") {
    Exm e;
    e.params.crowd_size = 0.001;  // one unit of cash in total
    Ledger small(1.0);
    small.open(std::string(kCrowdId));
    MarketContext ctx{small, e.state, e.params};
    const auto r = crowd_step(ctx, 0.999);
    CHECK(r.exhausted);
    CHECK(r.price < 0.999);
    CHECK_THROWS_AS(require_stabilized(r), CrowdBudgetExhausted);
}

TEST_CASE("entry_decision") {
    Exm e;
    auto pub = PublicState::initial(e.space);
    const auto ignorant = e.agent("ign", {"h", "a", "b"}, Policy::Compliant);
    const auto not_a = e.agent("notA", {"h", "b"}, Policy::Compliant);
    const auto not_b = e.agent("notB", {"h", "a"}, Policy::Compliant);
    const Price third = Price::of(Rational(1, 3));
    CHECK(entry_decision(ignorant, pub, e.space, e.h, third, 1e-9) == EntryDecision::StayOut);
    CHECK(entry_decision(not_a, pub, e.space, e.h, third, 1e-9) == EntryDecision::Enter);
    pub.omega = e.space.event({"h"});
    CHECK(entry_decision(not_b, pub, e.space, e.h, Price::of(Rational(1)), 1e-9) == EntryDecision::StayOut);

    // float prices use the tolerance
    pub = PublicState::initial(e.space);
    CHECK(entry_decision(not_a, pub, e.space, e.h, Price::of(0.5 + 1e-12), 1e-9) == EntryDecision::StayOut);
    CHECK(entry_decision(not_a, pub, e.space, e.h, Price::of(0.5 + 1e-6), 1e-9) == EntryDecision::Enter);
}

TEST_CASE("compliant_act buys then discloses") {
    Exm e;
    auto ctx = e.ctx();
    crowd_step(ctx, 1.0 / 3.0);
    const auto pub = PublicState::initial(e.space);
    const auto not_a = e.agent("notA", {"h", "b"}, Policy::Compliant);
    const auto r = compliant_act(not_a, pub, e.space, e.h, ctx);
    REQUIRE(r.trades.size() == 1);
    CHECK(r.trades.front().delta > 0);
    REQUIRE(r.messages.size() == 1);
    CHECK(r.messages.front().verdict == Verdict::Verified);
    CHECK(r.public_state.omega == e.space.event({"h", "b"}));
    CHECK(prob(e.space, r.public_state.omega) < prob(e.space, pub.omega));
    CHECK(e.ledger.account("notA").cash >= 500.0 - 1e-9);
}

TEST_CASE("compliant_act shorts when the posterior is below the price") {
    Exm e;
    auto ctx = e.ctx();
    crowd_step(ctx, 1.0 / 3.0);
    const auto pub = PublicState::initial(e.space);
    // an expert holding not-H in a world where a is true
    ExpertSpec spec;
    spec.id = "notH";
    spec.units.push_back(Partition::binary(e.space.event({"a", "b"})));
    const SampleSpace at_a = e.space.with_true_atom(1);
    e.ledger.open("notH");
    const auto agent = ExpertAgent::realize(spec, at_a);
    const auto r = compliant_act(agent, pub, at_a, e.h, ctx);
    CHECK(r.trades.front().delta < 0);
    CHECK(r.public_state.omega == e.space.event({"a", "b"}));
}

TEST_CASE("silent deviant trades and stays silent; crowd restores the price") {
    Exm e;
    auto ctx = e.ctx();
    crowd_step(ctx, 1.0 / 3.0);
    const auto pub = PublicState::initial(e.space);
    const auto dev = e.agent("notA", {"h", "b"}, Policy::SilentDeviant);
    const auto r = deviant_act(dev, pub, e.space, e.h, ctx);
    CHECK(r.messages.empty());
    CHECK(r.public_state.omega == pub.omega);
    CHECK(lmsr_price(e.state) > 1.0 / 3.0);
    crowd_step(ctx, to_double(crowd_target(r.public_state, e.space, e.h)));
    CHECK(std::abs(lmsr_price(e.state) - 1.0 / 3.0) <= 1e-12);
}

TEST_CASE("manipulator pushes the price and its claim is rejected") {
    Exm e;
    auto ctx = e.ctx();
    crowd_step(ctx, 1.0 / 3.0);
    const auto pub = PublicState::initial(e.space);
    const auto m = e.agent("m", {"h", "b"}, Policy::Manipulator);
    const auto r = deviant_act(m, pub, e.space, e.h, ctx);
    REQUIRE(r.messages.size() == 1);
    CHECK(r.messages.front().verdict == Verdict::Rejected);
    CHECK(r.public_state.omega == pub.omega);
    const double pushed = lmsr_price(e.state);
    CHECK(pushed > 1.0 / 3.0);
    CHECK(pushed <= 1.0 / 3.0 + 0.2 + 1e-9);
    crowd_step(ctx, 1.0 / 3.0);
    CHECK(std::abs(lmsr_price(e.state) - 1.0 / 3.0) <= 1e-12);
}

TEST_CASE("multi-unit compliant expert discloses every unit") {
    const auto s = SampleSpace::exact({"h", "a", "b", "c"},
                                      {Rational(1, 4), Rational(1, 4), Rational(1, 4), Rational(1, 4)}, 0);
    const Event h = s.event({"h"});
    ExpertSpec spec;
    spec.id = "mu";
    spec.policy = Policy::CompliantMultiunit;
    spec.units.push_back(Partition::binary(s.event({"h", "b", "c"})));
    spec.units.push_back(Partition::binary(s.event({"h", "a", "c"})));
    const auto agent = ExpertAgent::realize(spec, s);
    MarketParams params;
    Ledger ledger(1000.0);
    ledger.open(std::string(kCrowdId), params.crowd_size);
    ledger.open("mu");
    MarketState state;
    MarketContext ctx{ledger, state, params};
    crowd_step(ctx, 0.25);
    const auto r = compliant_act(agent, PublicState::initial(s), s, h, ctx);
    CHECK(r.messages.size() == 2);
    CHECK(r.substeps.size() == 1);
    CHECK(r.public_state.omega == s.event({"h", "c"}));
}
