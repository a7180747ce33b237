#include "srpm/agents.hpp"

#include "srpm/errors.hpp"

#include <cmath>
#include <limits>

namespace srpm {

namespace {

constexpr std::int64_t kMaxCrowdTicks = 100000;

const AgentId& crowd_account() {
    static const AgentId id(kCrowdId);
    return id;
}

}  // namespace

bool differs(const Rational& posterior, const Price& price, double epsilon) {
    if (price.exact) return posterior != *price.exact;
    return std::abs(to_double(posterior) - price.value) > epsilon;
}

ExpertAgent ExpertAgent::realize(const ExpertSpec& spec, const SampleSpace& space) {
    ExpertAgent agent{spec, spec.partition(), Event{}, {}, false};
    agent.realized_info = srpm::realized_info(agent.partition, space.true_atom());
    for (const auto& unit : spec.units) agent.realized_units.push_back(srpm::realized_info(unit, space.true_atom()));
    return agent;
}

Rational crowd_target(const PublicState& pub, const SampleSpace& space, const Event& h) {
    return cond_prob(space, h, pub.omega);
}

CrowdStepResult crowd_step(MarketContext& ctx, double target) {
    CrowdStepResult result;
    const double goal = clamp_price(target);
    const double inf = std::numeric_limits<double>::infinity();

    // false when the crowd could only afford part of the move
    auto move_to = [&](double p) {
        const double desired = shares_to_reach(ctx.state, p);
        const double d = feasible_delta(ctx.ledger, ctx.state, crowd_account(), desired, inf);
        if (d != 0.0) result.trades.push_back(execute_trade(ctx.ledger, ctx.state, crowd_account(), d));
        return d == desired;
    };

    if (ctx.params.mode == PriceMode::Instant) {
        if (std::abs(lmsr_price(ctx.state) - goal) <= 1e-15) {
            advance_quiet_tick(ctx.state);
        } else if (!move_to(goal)) {
            result.exhausted = true;
        }
    } else {
        const double tol = ctx.params.tick_tolerance;
        if (std::abs(lmsr_price(ctx.state) - goal) < tol) advance_quiet_tick(ctx.state);
        for (std::int64_t i = 0; i < kMaxCrowdTicks; ++i) {
            const double p = lmsr_price(ctx.state);
            if (std::abs(p - goal) < tol) break;
            if (!move_to(p + ctx.params.tick_rate * (goal - p))) {
                result.exhausted = true;
                break;
            }
        }
    }
    result.price = lmsr_price(ctx.state);
    return result;
}

void require_stabilized(const CrowdStepResult& result) {
    if (result.exhausted)
        throw CrowdBudgetExhausted("crowd stopped at price " + std::to_string(result.price));
}

EntryDecision entry_decision(const ExpertAgent& agent, const PublicState& pub,
                             const SampleSpace& space, const Event& h, const Price& price,
                             double epsilon) {
    const Rational posterior = cond_prob(space, h, pub.omega & agent.realized_info);
    return differs(posterior, price, epsilon) ? EntryDecision::Enter : EntryDecision::StayOut;
}

TradeRecord trade_toward(MarketContext& ctx, const AgentId& agent, double belief) {
    const double desired = shares_to_reach(ctx.state, clamp_price(belief));
    const double max_loss = ctx.params.budget_fraction * ctx.ledger.account(agent).cash;
    const double d = feasible_delta(ctx.ledger, ctx.state, agent, desired, max_loss);
    return execute_trade(ctx.ledger, ctx.state, agent, d);
}

namespace {

ChatMessage make_message(const ExpertAgent& agent, const Event& claim, const PublicState& pub,
                         const SampleSpace& space) {
    ChatMessage msg{agent.id(), claim, pub.round, Verdict::Rejected};
    msg.verdict = verify_disclosure(space, std::span<const Partition>(agent.spec.units), msg);
    return msg;
}

PublicState post(const PublicState& pub, const ChatMessage& msg) {
    // a rejected claim counts as silence
    return msg.verdict == Verdict::Verified ? apply_disclosure(pub, msg) : apply_silence(pub);
}

}  // namespace

ActionResult compliant_act(const ExpertAgent& agent, const PublicState& pub,
                           const SampleSpace& space, const Event& h, MarketContext& ctx) {
    ActionResult out{{}, {}, pub, {}, false};

    if (agent.policy() != Policy::CompliantMultiunit || agent.realized_units.size() == 1) {
        const Rational posterior = cond_prob(space, h, pub.omega & agent.realized_info);
        out.trades.push_back(trade_toward(ctx, agent.id(), to_double(posterior)));
        out.messages.push_back(make_message(agent, agent.realized_info, pub, space));
        out.public_state = post(pub, out.messages.back());
        return out;
    }

    const auto plan = split_units(space, h, agent.realized_info, pub, agent.realized_units);
    for (std::size_t i = 0; i < plan.size(); ++i) {
        const Event& unit = agent.realized_units[plan[i]];
        const Rational next = cond_prob(space, h, out.public_state.omega & unit);
        out.trades.push_back(trade_toward(ctx, agent.id(), to_double(next)));
        out.messages.push_back(make_message(agent, unit, out.public_state, space));
        out.public_state = post(out.public_state, out.messages.back());
        if (i + 1 < plan.size()) {
            auto step = crowd_step(ctx, to_double(crowd_target(out.public_state, space, h)));
            out.substeps.push_back(step.price);
            out.trades.insert(out.trades.end(), step.trades.begin(), step.trades.end());
            if (step.exhausted) {
                out.crowd_exhausted = true;
                break;
            }
        }
    }
    return out;
}

ActionResult deviant_act(const ExpertAgent& agent, const PublicState& pub,
                         const SampleSpace& space, const Event& h, MarketContext& ctx) {
    ActionResult out{{}, {}, apply_silence(pub), {}, false};
    if (agent.policy() == Policy::SilentDeviant) {
        const Rational posterior = cond_prob(space, h, pub.omega & agent.realized_info);
        out.trades.push_back(trade_toward(ctx, agent.id(), to_double(posterior)));
        return out;
    }
    if (agent.policy() != Policy::Manipulator)
        throw std::invalid_argument("deviant_act on a non-deviant policy");

    const double target = to_double(crowd_target(pub, space, h));
    out.trades.push_back(trade_toward(ctx, agent.id(), target + agent.spec.manipulator_push));

    // a claim the referee cannot confirm: a cell that excludes the true atom
    Event claim = Event::empty(space.size());
    for (const auto& cell : agent.partition.cells()) {
        if (!cell.contains(space.true_atom())) {
            claim = cell;
            break;
        }
    }
    if (claim.is_empty()) {
        for (std::size_t i = 0; i < space.size(); ++i) {
            if (i != space.true_atom()) {
                claim.insert(i);
                break;
            }
        }
    }
    out.messages.push_back(make_message(agent, claim, pub, space));
    return out;
}

}  // namespace srpm
