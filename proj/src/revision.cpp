#include "srpm/revision.hpp"

#include "srpm/errors.hpp"
#include "srpm/protocol.hpp"

#include <cmath>
#include <stdexcept>

namespace srpm {

std::string_view to_string(OverlapModel m) {
    switch (m) {
        case OverlapModel::Disjoint: return "DISJOINT";
        case OverlapModel::Nested: return "NESTED";
        case OverlapModel::UniformOverlap: return "UNIFORM_OVERLAP";
    }
    return "DISJOINT";
}

void RevisionScenario::validate() const {
    if (!(p_h > 0 && p_h < 1)) throw InvalidRevisionScenario("p_h must lie in (0, 1)");
    if (p_a < 0 || p_a >= 1) throw InvalidRevisionScenario("p_a must lie in [0, 1)");
    if (p_b < 0 || p_b >= 1) throw InvalidRevisionScenario("p_b must lie in [0, 1)");
    if (p_h + p_a + p_b > 1) throw InvalidRevisionScenario("p_h + p_a + p_b exceeds 1");
}

Announcements round1(const RevisionScenario& s) {
    s.validate();
    return {s.p_h / (1 - s.p_a), s.p_h / (1 - s.p_b), s.p_h};
}

Rational consensus_disjoint(const RevisionScenario& s) {
    s.validate();
    if (s.p_a + s.p_b >= 1) throw DegenerateDenominator("p_a + p_b >= 1");
    return s.p_h / (1 - s.p_a - s.p_b);
}

Rational consensus_nested(const RevisionScenario& s) {
    s.validate();
    const Rational a = s.p_a > s.p_b ? s.p_a : s.p_b;
    if (a >= 1) throw DegenerateDenominator("max(p_a, p_b) >= 1");
    return s.p_h / (1 - a);
}

UniformOverlapValue consensus_uniform_overlap(const RevisionScenario& s) {
    s.validate();
    const Rational ra = s.p_a > s.p_b ? s.p_a : s.p_b;
    const Rational rb = s.p_a + s.p_b;
    if (rb >= 1) throw DegenerateDenominator("p_a + p_b >= 1");
    if (ra == rb) throw DegenerateInterval("max(p_a, p_b) = p_a + p_b");
    const double a = to_double(ra);
    const double b = to_double(rb);
    const double ph = to_double(s.p_h);
    UniformOverlapValue v;
    // log1p keeps precision when a and b are close to 0
    v.closed_form = ph * (std::log1p(-a) - std::log1p(-b)) / (b - a);
    v.quadrature = ph / (b - a) * adaptive_simpson([](double x) { return 1.0 / (1.0 - x); }, a, b, 1e-12);
    return v;
}

RevisionResult revise(const RevisionScenario& s, OverlapModel model) {
    RevisionResult r;
    r.round1 = round1(s);
    switch (model) {
        case OverlapModel::Disjoint: r.consensus = to_double(consensus_disjoint(s)); break;
        case OverlapModel::Nested: r.consensus = to_double(consensus_nested(s)); break;
        case OverlapModel::UniformOverlap: r.consensus = consensus_uniform_overlap(s).closed_form; break;
    }
    return r;
}

MarketComparison market_vs_revision(const RevisionScenario& s) {
    s.validate();
    const Rational rest = 1 - s.p_h - s.p_a - s.p_b;
    std::vector<std::string> ids{"h", "a", "b"};
    std::vector<Rational> weights{s.p_h, s.p_a, s.p_b};
    if (rest > 0) {
        ids.push_back("rest");
        weights.push_back(rest);
    }
    const std::size_t n = ids.size();
    SampleSpace space = SampleSpace::exact(ids, weights, 0);

    auto expert = [&](std::string id, std::size_t excluded) {
        ExpertSpec spec;
        spec.id = std::move(id);
        spec.policy = Policy::Compliant;
        Event info = Event::full(n);
        info.erase(excluded);
        spec.units.push_back(Partition::binary(info));
        return spec;
    };

    ScenarioConfig cfg{.name = "revision", .space = space, .hypothesis = Event::of(n, {0})};
    // a null A or B carries no information and is left out of the market
    if (s.p_a > 0) cfg.experts.push_back(expert("notA", 1));
    if (s.p_b > 0) cfg.experts.push_back(expert("notB", 2));
    cfg.market.entry_order = EntryOrder::Fifo;
    cfg.numerics.rational = true;

    const Transcript t = run_market(cfg, cfg.seed);
    const Price& final_price = t.final_round().xi;
    if (!final_price.exact) throw std::logic_error("market_vs_revision: run did not carry exact prices");

    MarketComparison c;
    c.market_price = *final_price.exact;
    Event pooled = space.full();
    if (s.p_a > 0) pooled.erase(1);
    if (s.p_b > 0) pooled.erase(2);
    c.pooled = cond_prob(space, cfg.hypothesis, pooled);
    c.disjoint = consensus_disjoint(s);
    c.nested = consensus_nested(s);
    try {
        c.uniform_overlap = consensus_uniform_overlap(s).closed_form;
    } catch (const DegenerateInterval&) {
        const Rational a = s.p_a > s.p_b ? s.p_a : s.p_b;
        c.uniform_overlap = to_double(s.p_h / (1 - a));
    }
    if (c.market_price != c.pooled) throw std::logic_error("market_vs_revision: market price differs from pooled posterior");
    return c;
}

}  // namespace srpm
