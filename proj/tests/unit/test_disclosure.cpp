#include "srpm/disclosure.hpp"
#include "srpm/errors.hpp"
#include "srpm/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>

using namespace srpm;

namespace {

SampleSpace thirds() {
    return SampleSpace::exact({"h", "a", "b"}, {Rational(1, 3), Rational(1, 3), Rational(1, 3)}, 0);
}

ChatMessage claim(const std::string& who, const Event& e) { return {who, e, 1, Verdict::Rejected}; }

Rational abs_r(const Rational& x) { return x < 0 ? Rational(-x) : x; }

// Every order of the units, scored by summing |price move| step by step.
std::vector<std::size_t> brute_force_plan(const SampleSpace& s, const Event& h, const Event& omega,
                                          const std::vector<Event>& units) {
    std::vector<std::size_t> order(units.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<std::size_t> best;
    Rational best_len = -1;
    do {
        Event cur = omega;
        Rational len = 0;
        for (auto i : order) {
            const Event next = cur & units[i];
            len += abs_r(cond_prob(s, h, next) - cond_prob(s, h, cur));
            cur = next;
        }
        if (len > best_len) {
            best_len = len;
            best = order;
        }
    } while (std::next_permutation(order.begin(), order.end()));
    return best;
}

}  // namespace

TEST_CASE("verify_disclosure") {
    const auto s = thirds();
    const Partition p = Partition::binary(s.event({"h", "b"}));
    CHECK(verify_disclosure(s, p, claim("m", s.event({"h", "b"}))) == Verdict::Verified);
    CHECK(verify_disclosure(s, p, claim("m", s.event({"a"}))) == Verdict::Rejected);
    CHECK(verify_disclosure(s, p, claim("m", s.event({"h"}))) == Verdict::Rejected);
    CHECK(to_string(Verdict::Verified) == "VERIFIED");
}

TEST_CASE("apply_disclosure and apply_silence") {
    const auto s = thirds();
    const auto p0 = PublicState::initial(s);
    CHECK(p0.omega == s.full());
    CHECK(p0.round == 1);

    auto m1 = claim("notA", s.event({"h", "b"}));
    m1.verdict = Verdict::Verified;
    const auto p1 = apply_disclosure(p0, m1);
    CHECK(p1.omega == s.event({"h", "b"}));
    CHECK(p1.round == 2);
    CHECK(p1.history.size() == 1);

    auto m2 = claim("notB", s.event({"h", "a"}));
    m2.verdict = Verdict::Verified;
    const auto p2 = apply_disclosure(p1, m2);
    CHECK(p2.omega == s.event({"h"}));

    auto m3 = claim("x", s.full());
    m3.verdict = Verdict::Verified;
    CHECK(apply_disclosure(p2, m3).omega == p2.omega);

    CHECK_THROWS_AS(apply_disclosure(p0, claim("x", s.event({"h"}))), NotVerified);

    const auto q1 = apply_silence(p1);
    const auto q2 = apply_silence(q1);
    CHECK(q2.omega == p1.omega);
    CHECK(q2.round == p1.round + 2);
    CHECK(q2.history.size() == p1.history.size());
}

TEST_CASE("split_units: single unit and consistency") {
    const auto s = thirds();
    const auto pub = PublicState::initial(s);
    const Event h = s.event({"h"});
    const std::vector<Event> one{s.event({"h", "b"})};
    CHECK(split_units(s, h, one.front(), pub, one) == std::vector<std::size_t>{0});
    CHECK_THROWS_AS(split_units(s, h, s.event({"h"}), pub, one), UnitsInconsistent);
    const std::vector<Event> bad{s.event({"a", "b"})};
    CHECK_THROWS_AS(split_units(s, h, s.event({"a", "b"}), pub, bad), UnitsInconsistent);
}

TEST_CASE("split_units: equal trajectories tie to the lower index") {
    // symmetric units: both orders travel 1/2 -> 2/3 -> 1
    const auto s = SampleSpace::exact({"h", "x", "y"}, {Rational(1, 2), Rational(1, 4), Rational(1, 4)}, 0);
    const Event h = s.event({"h"});
    const auto pub = PublicState::initial(s);
    const std::vector<Event> units{s.event({"h", "x"}), s.event({"h", "y"})};
    const auto plan = split_units(s, h, s.event({"h"}), pub, units);
    CHECK(trajectory_length(s, h, pub, units, std::vector<std::size_t>{0, 1}) ==
          trajectory_length(s, h, pub, units, std::vector<std::size_t>{1, 0}));
    CHECK(plan == std::vector<std::size_t>{0, 1});
}

TEST_CASE("split_units agrees with the factorial oracle") {
    Rng rng(17);
    int checked = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 5 + rng.below(6);
        std::vector<std::string> ids;
        std::vector<Rational> w;
        Rational total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            ids.push_back("w" + std::to_string(i));
            w.emplace_back(1 + static_cast<int>(rng.below(9)));
            total += w.back();
        }
        for (auto& x : w) x /= total;
        const std::size_t omega0 = rng.below(n);
        const auto s = SampleSpace::exact(ids, w, omega0);
        Event h = Event::empty(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (rng.below(2)) h.insert(i);
        }
        const std::size_t k = 1 + rng.below(6);
        std::vector<Event> units;
        Event info = s.full();
        for (std::size_t u = 0; u < k; ++u) {
            Event cell = Event::of(n, {omega0});
            for (std::size_t i = 0; i < n; ++i) {
                if (rng.below(3)) cell.insert(i);
            }
            units.push_back(cell);
            info = info & cell;
        }
        const auto pub = PublicState::initial(s);
        const auto plan = split_units(s, h, info, pub, units);
        const auto oracle = brute_force_plan(s, h, pub.omega, units);
        REQUIRE(plan == oracle);
        ++checked;
    }
    CHECK(checked == 300);
}
