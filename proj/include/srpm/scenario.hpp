#pragma once

// Experiment inputs: the sample space, the hypothesis, the experts and the
// market/numeric parameters of one scenario, plus a seeded generator of random
// scenarios for property sweeps.

#include "srpm/world_model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace srpm {

enum class Policy { IgnorantCrowd, Compliant, CompliantMultiunit, SilentDeviant, Manipulator };
enum class PriceMode { Instant, Ticked };
enum class EntryOrder { Random, Fifo };
enum class TrueAtomMode { Fixed, PriorSampled };

std::string_view to_string(Policy p);
std::string_view to_string(PriceMode m);
std::string_view to_string(EntryOrder o);
std::string_view to_string(TrueAtomMode m);
Policy parse_policy(std::string_view s);
PriceMode parse_price_mode(std::string_view s);
EntryOrder parse_entry_order(std::string_view s);
TrueAtomMode parse_true_atom_mode(std::string_view s);

inline constexpr std::string_view kCrowdId = "crowd";

struct ExpertSpec {
    std::string id;
    Policy policy = Policy::Compliant;
    /// Independently provable units of information; a single entry for
    /// indivisible information. The expert's partition is their meet.
    std::vector<Partition> units;
    /// Signed price offset a manipulator pushes away from the crowd target.
    double manipulator_push = 0.2;

    Partition partition() const;
};

struct MarketParams {
    double liquidity_b = 100.0;
    double endowment = 1000.0;
    /// Number of ignorant experts folded into the aggregate crowd account.
    double crowd_size = 100.0;
    std::int64_t inactivity_threshold = 3;
    PriceMode mode = PriceMode::Instant;
    double tick_rate = 0.2;
    double tick_tolerance = 1e-6;
    /// Share of cash an informed entrant may put at risk on one trade.
    double budget_fraction = 0.5;
    EntryOrder entry_order = EntryOrder::Random;
    double collateral_factor = 1.0;
};

struct Numerics {
    double epsilon = 1e-9;
    bool rational = false;
};

struct TrueAtomSampling {
    TrueAtomMode mode = TrueAtomMode::Fixed;
    /// Sample from the prior conditioned on this event.
    std::optional<Event> restrict_to;
};

struct ScenarioConfig {
    std::string name;
    SampleSpace space;
    Event hypothesis;
    std::vector<ExpertSpec> experts;
    MarketParams market;
    Numerics numerics;
    TrueAtomSampling true_atom_sampling;
    double reward_pool = 100.0;
    double reward_precision = 0.01;
    std::uint64_t seed = 0;

    /// Throws ValidationError naming the violated invariant.
    void validate() const;

    const ExpertSpec& expert(std::string_view id) const;
    bool fully_compliant() const;
};

struct ScenarioConstraints {
    /// Every realized information event is nested with H or with not-H.
    bool direct_arguments = false;
    /// Minimum number of experts whose realized information is not everything.
    std::size_t min_informed = 0;
    std::size_t max_cells = 4;
    Policy policy = Policy::Compliant;
    bool rational = true;
};

/// Seeded random scenario: positive weights, a proper nonempty hypothesis and
/// one random partition per expert. Same arguments, same scenario.
ScenarioConfig random_scenario(std::uint64_t seed, std::size_t n_atoms, std::size_t n_experts,
                               const ScenarioConstraints& constraints = {});

}  // namespace srpm
