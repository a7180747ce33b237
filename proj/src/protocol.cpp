#include "srpm/protocol.hpp"

#include "srpm/errors.hpp"
#include "srpm/rng.hpp"
#include "srpm/scenario_io.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace srpm {

std::string_view to_string(T2Class c) {
    switch (c) {
        case T2Class::ProvedH: return "PROVED_H";
        case T2Class::ProvedNotH: return "PROVED_NOT_H";
        case T2Class::FullPooling: return "FULL_POOLING";
        case T2Class::Violation: return "VIOLATION";
        case T2Class::NotApplicable: return "NOT_APPLICABLE";
    }
    return "NOT_APPLICABLE";
}

SampleSpace realized_space(const ScenarioConfig& scenario, std::uint64_t seed) {
    const auto& sampling = scenario.true_atom_sampling;
    if (sampling.mode == TrueAtomMode::Fixed) return scenario.space;
    const Event support = sampling.restrict_to.value_or(scenario.space.full());
    std::vector<double> weights(scenario.space.size(), 0.0);
    for (auto i : support.indices()) weights[i] = to_double(scenario.space.weight(i));
    Rng rng(stream_seed(seed, Stream::TrueAtom));
    return scenario.space.with_true_atom(rng.categorical(weights));
}

double effective_epsilon(const ScenarioConfig& scenario) {
    if (scenario.market.mode == PriceMode::Ticked)
        return std::max(scenario.numerics.epsilon, 10.0 * scenario.market.tick_tolerance);
    return scenario.numerics.epsilon;
}

std::vector<std::string> initial_members(const ScenarioConfig& scenario, const SampleSpace& space) {
    std::vector<std::string> members{std::string(kCrowdId)};
    for (const auto& spec : scenario.experts) {
        if (realized_info(spec.partition(), space.true_atom()) == space.full()) members.push_back(spec.id);
    }
    return members;
}

namespace {

bool wants_to_enter(const ExpertAgent& agent, const PublicState& pub, const SampleSpace& space,
                    const Event& h, const Price& xi, double epsilon) {
    if (agent.entered) return false;
    if (agent.policy() == Policy::Manipulator) return true;
    return entry_decision(agent, pub, space, h, xi, epsilon) == EntryDecision::Enter;
}

std::vector<ChatEntry> chat_entries(const std::vector<ChatMessage>& messages) {
    std::vector<ChatEntry> out;
    for (const auto& m : messages) out.push_back({m.sender, m.claimed_info, m.verdict});
    return out;
}

}  // namespace

Transcript run_market(const ScenarioConfig& scenario, std::uint64_t seed) {
    scenario.validate();
    const SampleSpace space = realized_space(scenario, seed);
    const Event& h = scenario.hypothesis;
    const MarketParams& params = scenario.market;
    const bool exact = scenario.numerics.rational && params.mode == PriceMode::Instant;
    const double epsilon = effective_epsilon(scenario);

    std::vector<ExpertAgent> agents;
    for (const auto& spec : scenario.experts) agents.push_back(ExpertAgent::realize(spec, space));

    Ledger ledger(params.endowment, params.collateral_factor);
    ledger.open(std::string(kCrowdId), params.crowd_size);
    for (const auto& a : agents) ledger.open(a.id(), 1.0);
    MarketState state;
    state.liquidity_b = params.liquidity_b;
    MarketContext ctx{ledger, state, params};

    Transcript t;
    t.seed = seed;
    t.true_atom = space.true_atom();
    t.fingerprint = scenario_fingerprint(scenario);

    std::vector<std::string> members = initial_members(scenario, space);
    for (auto& a : agents) {
        if (std::find(members.begin(), members.end(), a.id()) != members.end()) a.entered = true;
    }

    Rng entry_rng(stream_seed(seed, Stream::EntryOrder));
    PublicState pub = PublicState::initial(space);
    RoundRecord pending;  // entry-related fields of the round being built
    std::int64_t k = 1;

    for (;;) {
        const Rational target = crowd_target(pub, space, h);
        const CrowdStepResult step = crowd_step(ctx, to_double(target));

        RoundRecord round = std::move(pending);
        pending = RoundRecord{};
        round.k = k;
        round.members = members;
        round.omega = pub.omega;
        round.xi = exact && !step.exhausted ? Price::of(target) : Price::of(step.price);
        t.rounds.push_back(std::move(round));

        if (step.exhausted) {
            t.degenerate = true;
            t.degenerate_reason = "CrowdBudgetExhausted: crowd could not fund stabilization at round " +
                                  std::to_string(k);
            break;
        }
        const Price& xi = t.rounds.back().xi;

        std::vector<std::size_t> candidates;
        for (std::size_t i = 0; i < agents.size(); ++i) {
            if (wants_to_enter(agents[i], pub, space, h, xi, epsilon)) candidates.push_back(i);
        }
        if (candidates.empty()) {
            while (!inactivity_closed(state, params.inactivity_threshold)) advance_quiet_tick(state);
            break;
        }
        const std::size_t pick = params.entry_order == EntryOrder::Fifo
                                     ? candidates.front()
                                     : candidates[entry_rng.below(candidates.size())];
        ExpertAgent& entrant = agents[pick];

        ActionResult act;
        switch (entrant.policy()) {
            case Policy::Compliant:
            case Policy::CompliantMultiunit:
            case Policy::IgnorantCrowd:
                act = compliant_act(entrant, pub, space, h, ctx);
                break;
            case Policy::SilentDeviant:
            case Policy::Manipulator:
                act = deviant_act(entrant, pub, space, h, ctx);
                break;
        }
        entrant.entered = true;
        members.push_back(entrant.id());
        pub = std::move(act.public_state);
        ++k;
        pub.round = k;
        pending.entered = entrant.id();
        pending.chat = chat_entries(act.messages);
        pending.substeps = std::move(act.substeps);
        if (act.crowd_exhausted) {
            RoundRecord round = std::move(pending);
            round.k = k;
            round.members = members;
            round.omega = pub.omega;
            round.xi = Price::of(lmsr_price(state));
            t.rounds.push_back(std::move(round));
            t.degenerate = true;
            t.degenerate_reason = "CrowdBudgetExhausted: crowd could not fund a unit disclosure";
            break;
        }
    }

    state.closed = true;
    t.k_infinity = static_cast<std::int64_t>(t.rounds.size());
    t.resolution = resolve_at(t.final_round().xi.value, stream_seed(seed, Stream::Resolution));
    t.final_balances = settle(ledger, t.resolution);
    std::vector<double> amounts;
    for (const auto& b : t.final_balances) amounts.push_back(b.amount);
    if (std::any_of(amounts.begin(), amounts.end(), [](double a) { return a > 0; }))
        t.rewards = rewards(amounts, scenario.reward_pool, scenario.reward_precision);
    return t;
}

// ---------------------------------------------------------------------------
// checkers

namespace {

bool price_matches(const Rational& value, const Price& price, double epsilon) {
    return !differs(value, price, epsilon);
}

std::string fmt_round(std::int64_t k) { return "round " + std::to_string(k); }

void fail(CheckReport& r, bool CheckReport::*clause, std::int64_t k, std::string msg) {
    if (r.*clause) r.diagnostics.push_back(std::move(msg));
    r.*clause = false;
    if (!r.first_failing_round || k < *r.first_failing_round) r.first_failing_round = k;
}

struct RunView {
    SampleSpace space;
    std::vector<ExpertAgent> agents;

    const ExpertAgent* find(std::string_view id) const {
        for (const auto& a : agents) {
            if (a.id() == id) return &a;
        }
        return nullptr;
    }

    Event info(std::string_view id) const {
        if (id == kCrowdId) return space.full();
        const auto* a = find(id);
        if (!a) throw ValidationError("transcript names unknown expert '" + std::string(id) + "'");
        return a->realized_info;
    }
};

RunView view_of(const Transcript& t, const ScenarioConfig& scenario) {
    RunView v{scenario.space.with_true_atom(t.true_atom), {}};
    for (const auto& spec : scenario.experts) v.agents.push_back(ExpertAgent::realize(spec, v.space));
    return v;
}

}  // namespace

CheckReport check_entangled(const Transcript& t, const ScenarioConfig& scenario, double epsilon) {
    CheckReport r;
    if (t.rounds.empty()) {
        fail(r, &CheckReport::structure, 0, "empty transcript");
        return r;
    }
    const RunView v = view_of(t, scenario);
    const Event& h = scenario.hypothesis;

    for (std::size_t i = 0; i < t.rounds.size(); ++i) {
        const RoundRecord& rd = t.rounds[i];
        if (rd.k != static_cast<std::int64_t>(i) + 1)
            fail(r, &CheckReport::structure, rd.k, fmt_round(rd.k) + ": rounds are not numbered 1..k_inf");
        if (i == 0) {
            if (rd.members != initial_members(scenario, v.space))
                fail(r, &CheckReport::structure, rd.k, "round 1: e_1 is not the set of ignorant experts");
            if (rd.omega != v.space.full())
                fail(r, &CheckReport::structure, rd.k, "round 1: Omega_1 is not the full space");
        } else {
            const RoundRecord& prev = t.rounds[i - 1];
            const bool grows_by_one = rd.entered && rd.members.size() == prev.members.size() + 1 &&
                                      std::equal(prev.members.begin(), prev.members.end(),
                                                 rd.members.begin()) &&
                                      rd.members.back() == *rd.entered;
            if (!grows_by_one)
                fail(r, &CheckReport::structure, rd.k, fmt_round(rd.k) + ": e_k must grow by exactly one entrant");
            if (!rd.omega.is_subset_of(prev.omega))
                fail(r, &CheckReport::structure, rd.k, fmt_round(rd.k) + ": Omega_k is not contained in Omega_{k-1}");
        }
        if (!(rd.xi.value >= 0.0 && rd.xi.value <= 1.0))
            fail(r, &CheckReport::structure, rd.k, fmt_round(rd.k) + ": price outside [0, 1]");
        if (!rd.omega.contains(t.true_atom))
            fail(r, &CheckReport::structure, rd.k, fmt_round(rd.k) + ": Omega_k excludes the true state");

        // ent1
        for (const auto& n : rd.members) {
            if (!is_null(v.space, rd.omega - v.info(n)))
                fail(r, &CheckReport::ent1, rd.k,
                     fmt_round(rd.k) + ": information of '" + n + "' is not public");
        }
        // ent2
        const Rational posterior = cond_prob(v.space, h, rd.omega);
        if (!price_matches(posterior, rd.xi, epsilon))
            fail(r, &CheckReport::ent2, rd.k,
                 fmt_round(rd.k) + ": xi = " + std::to_string(rd.xi.value) + " but pi(H | Omega_k) = " +
                     std::to_string(to_double(posterior)));
        // ent3a, for the entrant who joined after this round
        if (i + 1 < t.rounds.size() && t.rounds[i + 1].entered) {
            const std::string& n = *t.rounds[i + 1].entered;
            const Rational p = cond_prob(v.space, h, rd.omega & v.info(n));
            if (price_matches(p, rd.xi, epsilon))
                fail(r, &CheckReport::ent3a, rd.k,
                     fmt_round(rd.k) + ": '" + n + "' entered although its posterior equals the price");
        }
    }

    // ent3b
    const RoundRecord& last = t.final_round();
    for (const auto& a : v.agents) {
        if (std::find(last.members.begin(), last.members.end(), a.id()) != last.members.end()) continue;
        const Rational p = cond_prob(v.space, h, last.omega & a.realized_info);
        if (!price_matches(p, last.xi, epsilon))
            fail(r, &CheckReport::ent3b, last.k,
                 "final round: outsider '" + a.id() + "' still disagrees with the price");
    }
    return r;
}

bool check_final_state(const Transcript& t, const ScenarioConfig& scenario, double epsilon,
                       std::vector<std::string>* diagnostics) {
    auto note = [&](std::string msg) {
        if (diagnostics) diagnostics->push_back(std::move(msg));
        return false;
    };
    if (t.rounds.empty()) return note("final state: empty transcript");
    const RunView v = view_of(t, scenario);
    const Event& h = scenario.hypothesis;
    const RoundRecord& last = t.final_round();

    Event pooled = v.space.full();
    for (const auto& n : last.members) pooled = pooled & v.info(n);
    bool ok = true;
    if (last.omega != pooled) ok = note("final state: Omega_k_inf differs from the entrants' pooled information");

    const Rational posterior = cond_prob(v.space, h, last.omega);
    if (!price_matches(posterior, last.xi, epsilon))
        ok = note("final state: xi_k_inf differs from pi(H | Omega_k_inf)");
    for (const auto& a : v.agents) {
        const Rational p = cond_prob(v.space, h, last.omega & a.realized_info);
        if (!price_matches(p, last.xi, epsilon))
            ok = note("final state: pi(H | Omega_k_inf & I_" + a.id() + ") differs from xi_k_inf");
    }
    return ok;
}

T2Class check_t2(const Transcript& t, const ScenarioConfig& scenario, T2Arms* arms) {
    const RunView v = view_of(t, scenario);
    const Event& h = scenario.hypothesis;
    Event pooled = v.space.full();
    for (const auto& a : v.agents) {
        if (classify_direct_argument(v.space, a.realized_info, h) == DirectArgumentClass::None)
            return T2Class::NotApplicable;
        pooled = pooled & a.realized_info;
    }
    const Event& omega = t.final_round().omega;
    T2Arms found;
    found.proved_h = is_null(v.space, omega - h);
    found.proved_not_h = is_null(v.space, omega & h);
    found.full_pooling = is_null(v.space, (omega - pooled) | (pooled - omega));
    if (arms) *arms = found;
    if (found.proved_h) return T2Class::ProvedH;
    if (found.proved_not_h) return T2Class::ProvedNotH;
    if (found.full_pooling) return T2Class::FullPooling;
    return T2Class::Violation;
}

CheckReport check_all(const Transcript& t, const ScenarioConfig& scenario, double epsilon) {
    CheckReport r = check_entangled(t, scenario, epsilon);
    r.final_state_ok = check_final_state(t, scenario, epsilon, &r.diagnostics);
    r.t2_class = check_t2(t, scenario, &r.t2_arms);
    if (r.t2_class == T2Class::Violation) r.diagnostics.push_back("T2: no conclusion holds");
    return r;
}

// ---------------------------------------------------------------------------

MartingaleReport martingale_from_paths(const std::vector<std::vector<double>>& paths) {
    MartingaleReport rep;
    std::size_t longest = 0;
    for (const auto& p : paths) longest = std::max(longest, p.size());
    if (paths.empty() || longest < 2) return rep;

    for (std::size_t k = 0; k + 1 < longest; ++k) {
        double sum = 0.0;
        double sum_sq = 0.0;
        for (const auto& p : paths) {
            // a stopped path keeps its final price
            const double a = p[std::min(k, p.size() - 1)];
            const double b = p[std::min(k + 1, p.size() - 1)];
            sum += b - a;
            sum_sq += (b - a) * (b - a);
        }
        const double n = static_cast<double>(paths.size());
        IncrementStats s;
        s.k = static_cast<std::int64_t>(k) + 1;
        s.count = static_cast<std::int64_t>(paths.size());
        s.mean = sum / n;
        const double var = n > 1 ? std::max(0.0, (sum_sq - n * s.mean * s.mean) / (n - 1)) : 0.0;
        s.std_error = std::sqrt(var / n);
        rep.max_abs_mean = std::max(rep.max_abs_mean, std::abs(s.mean));
        if (std::abs(s.mean) > 3.0 * s.std_error + 1e-12) rep.within_3se = false;
        rep.increments.push_back(s);
    }
    return rep;
}

MartingaleReport martingale_report(const ScenarioConfig& scenario, std::int64_t n_runs,
                                   std::uint64_t seed) {
    std::vector<std::vector<double>> paths;
    paths.reserve(static_cast<std::size_t>(std::max<std::int64_t>(n_runs, 0)));
    for (std::int64_t i = 0; i < n_runs; ++i) {
        const Transcript t = run_market(scenario, run_seed(seed, static_cast<std::uint64_t>(i)));
        std::vector<double> path;
        for (const auto& rd : t.rounds) path.push_back(rd.xi.value);
        paths.push_back(std::move(path));
    }
    MartingaleReport rep = martingale_from_paths(paths);
    const auto& sampling = scenario.true_atom_sampling;
    rep.not_a_martingale_design = sampling.mode != TrueAtomMode::PriorSampled;
    return rep;
}

}  // namespace srpm
