#include "srpm/errors.hpp"
#include "srpm/revision.hpp"
#include "srpm/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace srpm;

namespace {

RevisionScenario rs(const char* h, const char* a, const char* b) {
    return {parse_rational(h), parse_rational(a), parse_rational(b)};
}

// Midpoint rule with many panels, independent of the adaptive integrator.
double midpoint_expected_posterior(double ph, double a, double b) {
    const int n = 400000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = a + (b - a) * (i + 0.5) / n;
        sum += ph / (1.0 - x);
    }
    return sum / n;
}

}  // namespace

TEST_CASE("round1") {
    const auto r = round1(rs("1/3", "1/3", "1/3"));
    CHECK(r.not_a == Rational(1, 2));
    CHECK(r.not_b == Rational(1, 2));
    CHECK(r.crowd == Rational(1, 3));
    CHECK(round1(rs("0.3", "0", "0.2")).not_a == parse_rational("0.3"));
    const auto d = round1(rs("0.2", "0.5", "0.1"));
    CHECK(d.not_a == parse_rational("0.4"));
    CHECK(d.not_b == Rational(2, 9));
    CHECK(d.crowd == parse_rational("0.2"));

    // cross-check with conditioning on the four-atom space
    const auto s = SampleSpace::exact({"h", "a", "b", "r"},
                                      {parse_rational("0.2"), parse_rational("0.5"), parse_rational("0.1"),
                                       parse_rational("0.2")},
                                      0);
    CHECK(cond_prob(s, s.event({"h"}), s.event({"h", "b", "r"})) == d.not_a);
    CHECK(cond_prob(s, s.event({"h"}), s.event({"h", "a", "r"})) == d.not_b);
}

TEST_CASE("consensus regimes on the one-third instance") {
    const auto s = rs("1/3", "1/3", "1/3");
    CHECK(consensus_disjoint(s) == 1);
    CHECK(consensus_nested(s) == Rational(1, 2));
    const auto u = consensus_uniform_overlap(s);
    CHECK(std::abs(u.closed_form - std::log(2.0)) <= 1e-12);
    CHECK(std::abs(u.quadrature - u.closed_form) <= 1e-10);
    CHECK(revise(s, OverlapModel::Nested).steps == 2);
}

TEST_CASE("consensus examples and errors") {
    CHECK(consensus_disjoint(rs("0.2", "0.3", "0.3")) == parse_rational("0.5"));
    CHECK(consensus_disjoint(rs("0.2", "0.3", "0")) == consensus_nested(rs("0.2", "0.3", "0")));
    CHECK(consensus_nested(rs("0.2", "0.5", "0.1")) == parse_rational("0.4"));
    CHECK(consensus_nested(rs("0.2", "0.3", "0.3")) == round1(rs("0.2", "0.3", "0.3")).not_a);
    CHECK_THROWS_AS(consensus_uniform_overlap(rs("0.2", "0.3", "0")), DegenerateInterval);
    CHECK_THROWS_AS(RevisionScenario(rs("0.5", "0.4", "0.2")).validate(), InvalidRevisionScenario);
    CHECK_THROWS_AS(consensus_disjoint(rs("0", "0.5", "0.5")), InvalidRevisionScenario);
}

TEST_CASE("uniform overlap: continuity at a collapsing interval") {
    const double ph = 0.2;
    const double b = 0.5;
    const auto near = consensus_uniform_overlap({parse_rational("0.2"), parse_rational("0.499999"), parse_rational("0.000001")});
    CHECK(std::abs(near.closed_form - ph / (1 - b)) <= 1e-4);
}

TEST_CASE("uniform overlap: closed form, quadrature and midpoint oracle agree") {
    Rng rng(2024);
    for (int i = 0; i < 100; ++i) {
        const Rational pa(1 + static_cast<int>(rng.below(300)), 1000);
        const Rational pb(1 + static_cast<int>(rng.below(300)), 1000);
        const Rational ph(1 + static_cast<int>(rng.below(300)), 1000);
        const auto u = consensus_uniform_overlap({ph, pa, pb});
        REQUIRE(std::abs(u.closed_form - u.quadrature) <= 1e-10);
        const double a = std::max(to_double(pa), to_double(pb));
        const double b = to_double(pa + pb);
        if (b - a > 1e-3) REQUIRE(std::abs(u.closed_form - midpoint_expected_posterior(to_double(ph), a, b)) <= 1e-9);
    }
}

TEST_CASE("ordering nested <= uniform <= disjoint over random scenarios") {
    Rng rng(7);
    for (int i = 0; i < 10000; ++i) {
        const Rational pa(1 + static_cast<int>(rng.below(333)), 1000);
        const Rational pb(1 + static_cast<int>(rng.below(333)), 1000);
        const Rational ph(1 + static_cast<int>(rng.below(333)), 1000);
        const RevisionScenario s{ph, pa, pb};
        const double u = consensus_uniform_overlap(s).closed_form;
        REQUIRE(to_double(consensus_nested(s)) < u);
        REQUIRE(u < to_double(consensus_disjoint(s)));
    }
}

TEST_CASE("uniform overlap increases with p_h") {
    double prev = 0.0;
    for (int k = 1; k <= 30; ++k) {
        const double v = consensus_uniform_overlap({Rational(k, 100), Rational(3, 10), Rational(1, 5)}).closed_form;
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("market_vs_revision") {
    const auto c = market_vs_revision(rs("1/3", "1/3", "1/3"));
    CHECK(c.market_price == 1);
    CHECK(c.disjoint == 1);
    CHECK(c.nested == Rational(1, 2));
    CHECK(c.uniform_overlap == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    const auto d = market_vs_revision(rs("0.2", "0.3", "0.3"));
    CHECK(d.market_price == parse_rational("0.5"));
    CHECK(d.market_price == d.disjoint);

    const auto z = market_vs_revision(rs("0.4", "0", "0"));
    CHECK(z.market_price == parse_rational("0.4"));
    CHECK(z.nested == parse_rational("0.4"));
    CHECK(z.uniform_overlap == doctest::Approx(0.4));

    Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        const RevisionScenario s{Rational(1 + static_cast<int>(rng.below(300)), 1000),
                                 Rational(1 + static_cast<int>(rng.below(300)), 1000),
                                 Rational(1 + static_cast<int>(rng.below(300)), 1000)};
        REQUIRE(market_vs_revision(s).market_price == consensus_disjoint(s));
    }
}
