#pragma once

// Expert behaviour: the aggregate ignorant crowd that drives the price to the
// public posterior, the entry rule, and the compliant and deviant actions of
// an entering expert.

#include "srpm/disclosure.hpp"
#include "srpm/market.hpp"
#include "srpm/scenario.hpp"
#include "srpm/world_model.hpp"

#include <optional>
#include <vector>

namespace srpm {

/// A stabilized price: the market's floating value, plus the exact rational it
/// represents when the run carries exact arithmetic.
struct Price {
    double value = 0.0;
    std::optional<Rational> exact;

    static Price of(double v) { return {v, std::nullopt}; }
    static Price of(const Rational& r) { return {to_double(r), r}; }
};

/// True when `posterior` differs from the price: exactly when both are exact,
/// otherwise by more than `epsilon`.
bool differs(const Rational& posterior, const Price& price, double epsilon);

struct ExpertAgent {
    ExpertSpec spec;
    Partition partition;
    Event realized_info;
    /// Realized cell of each unit partition (one entry for indivisible info).
    std::vector<Event> realized_units;
    bool entered = false;

    static ExpertAgent realize(const ExpertSpec& spec, const SampleSpace& space);

    const std::string& id() const { return spec.id; }
    Policy policy() const { return spec.policy; }
    bool ignorant(const SampleSpace& space) const { return realized_info == space.full(); }
};

struct BeliefPoint {
    Rational rho;
    std::int64_t round = 0;
};

/// Mutable market state of one run, shared by the crowd and the entrants.
struct MarketContext {
    Ledger& ledger;
    MarketState& state;
    const MarketParams& params;
};

/// pi(H | Omega_k), the price the ignorant crowd settles on.
Rational crowd_target(const PublicState& pub, const SampleSpace& space, const Event& h);

struct CrowdStepResult {
    std::vector<TradeRecord> trades;
    bool exhausted = false;
    double price = 0.0;
};

/// Moves the price to `target` with the aggregate crowd account. Instant mode
/// uses one trade; ticked mode closes a `tick_rate` share of the remaining gap
/// per tick until within `tick_tolerance`. A crowd that cannot fund the move
/// stops at its feasible extreme and reports `exhausted`.
CrowdStepResult crowd_step(MarketContext& ctx, double target);

/// Throws CrowdBudgetExhausted for an exhausted step.
void require_stabilized(const CrowdStepResult& result);

enum class EntryDecision { Enter, StayOut };

/// Enter iff pi(H | Omega_k & I_n) differs from the stabilized price.
EntryDecision entry_decision(const ExpertAgent& agent, const PublicState& pub,
                             const SampleSpace& space, const Event& h, const Price& price,
                             double epsilon);

struct ActionResult {
    std::vector<TradeRecord> trades;
    std::vector<ChatMessage> messages;
    PublicState public_state;
    /// Prices the crowd stabilized at between unit disclosures (multi-unit only).
    std::vector<double> substeps;
    bool crowd_exhausted = false;
};

/// Buy or short toward `belief`, risking at most budget_fraction of cash.
TradeRecord trade_toward(MarketContext& ctx, const AgentId& agent, double belief);

/// Trade toward the private posterior, then disclose the realized information
/// (unit by unit along the split_units plan for multi-unit experts).
ActionResult compliant_act(const ExpertAgent& agent, const PublicState& pub,
                           const SampleSpace& space, const Event& h, MarketContext& ctx);

/// Silent deviant: trade toward the private posterior, disclose nothing.
/// Manipulator: push the price `manipulator_push` away from the crowd target
/// and post an unverifiable claim, which the referee rejects.
ActionResult deviant_act(const ExpertAgent& agent, const PublicState& pub,
                         const SampleSpace& space, const Event& h, MarketContext& ctx);

}  // namespace srpm
