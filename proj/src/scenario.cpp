#include "srpm/scenario.hpp"

#include "srpm/errors.hpp"
#include "srpm/rng.hpp"

#include <algorithm>
#include <set>

namespace srpm {

std::string_view to_string(Policy p) {
    switch (p) {
        case Policy::IgnorantCrowd: return "ignorant_crowd";
        case Policy::Compliant: return "compliant";
        case Policy::CompliantMultiunit: return "compliant_multiunit";
        case Policy::SilentDeviant: return "silent_deviant";
        case Policy::Manipulator: return "manipulator";
    }
    return "compliant";
}

std::string_view to_string(PriceMode m) { return m == PriceMode::Instant ? "instant" : "ticked"; }
std::string_view to_string(EntryOrder o) { return o == EntryOrder::Random ? "random" : "fifo"; }
std::string_view to_string(TrueAtomMode m) { return m == TrueAtomMode::Fixed ? "fixed" : "prior"; }

Policy parse_policy(std::string_view s) {
    for (auto p : {Policy::IgnorantCrowd, Policy::Compliant, Policy::CompliantMultiunit,
                   Policy::SilentDeviant, Policy::Manipulator}) {
        if (to_string(p) == s) return p;
    }
    throw ValidationError("unknown policy '" + std::string(s) + "'");
}

PriceMode parse_price_mode(std::string_view s) {
    if (s == "instant") return PriceMode::Instant;
    if (s == "ticked") return PriceMode::Ticked;
    throw ValidationError("unknown price mode '" + std::string(s) + "'");
}

EntryOrder parse_entry_order(std::string_view s) {
    if (s == "random") return EntryOrder::Random;
    if (s == "fifo") return EntryOrder::Fifo;
    throw ValidationError("unknown entry order '" + std::string(s) + "'");
}

TrueAtomMode parse_true_atom_mode(std::string_view s) {
    if (s == "fixed") return TrueAtomMode::Fixed;
    if (s == "prior") return TrueAtomMode::PriorSampled;
    throw ValidationError("unknown true-atom mode '" + std::string(s) + "'");
}

Partition ExpertSpec::partition() const {
    if (units.empty()) throw ValidationError("expert '" + id + "' has no information partition");
    return units.size() == 1 ? units.front() : Partition::meet(units);
}

const ExpertSpec& ScenarioConfig::expert(std::string_view id) const {
    for (const auto& e : experts) {
        if (e.id == id) return e;
    }
    throw ValidationError("no expert '" + std::string(id) + "'");
}

bool ScenarioConfig::fully_compliant() const {
    return std::all_of(experts.begin(), experts.end(), [](const ExpertSpec& e) {
        return e.policy == Policy::IgnorantCrowd || e.policy == Policy::Compliant ||
               e.policy == Policy::CompliantMultiunit;
    });
}

void ScenarioConfig::validate() const {
    const std::size_t n = space.size();
    if (hypothesis.universe_size() != n) throw ValidationError("hypothesis: wrong atom universe");
    std::set<std::string_view> ids;
    for (const auto& e : experts) {
        if (e.id.empty()) throw ValidationError("experts: empty expert id");
        if (e.id == kCrowdId) throw ValidationError("experts: id 'crowd' is reserved");
        if (!ids.insert(e.id).second) throw ValidationError("experts: duplicated id '" + e.id + "'");
        if (e.units.empty()) throw ValidationError("experts." + e.id + ": no partition");
        for (const auto& u : e.units) {
            if (u.universe_size() != n) throw ValidationError("experts." + e.id + ": wrong atom universe");
        }
        if (e.policy != Policy::CompliantMultiunit && e.units.size() != 1)
            throw ValidationError("experts." + e.id + ": several units require compliant_multiunit");
        if (e.policy == Policy::IgnorantCrowd && e.partition().cells().size() != 1)
            throw ValidationError("experts." + e.id + ": an ignorant expert must hold the trivial partition");
    }
    const auto& m = market;
    if (!(m.liquidity_b > 0)) throw ValidationError("market.liquidity_b must be > 0");
    if (!(m.endowment > 0)) throw ValidationError("market.endowment must be > 0");
    if (!(m.crowd_size > 0)) throw ValidationError("market.crowd_size must be > 0");
    if (m.inactivity_threshold < 1) throw ValidationError("market.inactivity_threshold must be >= 1");
    if (!(m.tick_rate > 0 && m.tick_rate <= 1)) throw ValidationError("market.tick_rate must be in (0, 1]");
    if (!(m.tick_tolerance > 0)) throw ValidationError("market.tick_tolerance must be > 0");
    if (!(m.budget_fraction > 0 && m.budget_fraction <= 1))
        throw ValidationError("market.budget_fraction must be in (0, 1]");
    if (!(m.collateral_factor >= 0)) throw ValidationError("market.collateral_factor must be >= 0");
    if (!(numerics.epsilon >= 0)) throw ValidationError("numerics.epsilon must be >= 0");
    if (true_atom_sampling.restrict_to) {
        if (true_atom_sampling.restrict_to->universe_size() != n)
            throw ValidationError("true_atom.restrict_to: wrong atom universe");
        if (is_null(space, *true_atom_sampling.restrict_to))
            throw ValidationError("true_atom.restrict_to is a null event");
    }
    if (!(reward_pool >= 0)) throw ValidationError("reward_pool must be >= 0");
    if (!(reward_precision > 0)) throw ValidationError("reward_precision must be > 0");
}

// ---------------------------------------------------------------------------

namespace {

Event random_subset(Rng& rng, const Event& of) {
    Event out = Event::empty(of.universe_size());
    for (auto i : of.indices()) {
        if (rng.below(2)) out.insert(i);
    }
    return out;
}

/// Splits `atoms` into at most `max_cells` nonempty random cells.
std::vector<Event> random_cells(Rng& rng, const Event& atoms, std::size_t max_cells) {
    std::vector<Event> cells;
    if (atoms.is_empty()) return cells;
    const std::size_t m = 1 + rng.below(std::max<std::size_t>(max_cells, 1));
    std::vector<Event> buckets(m, Event::empty(atoms.universe_size()));
    for (auto i : atoms.indices()) buckets[rng.below(m)].insert(i);
    for (auto& b : buckets) {
        if (!b.is_empty()) cells.push_back(std::move(b));
    }
    return cells;
}

Event direct_argument_cell(Rng& rng, const Event& h, std::size_t omega0) {
    const std::size_t n = h.universe_size();
    const Event not_h = h.complement();
    const Event self = Event::of(n, {omega0});
    const bool in_h = h.contains(omega0);
    switch (rng.below(3)) {
        case 0:  // conclusive: inside whichever side holds the true atom
            return self | random_subset(rng, in_h ? h : not_h);
        case 1:  // rules out part of the other side
            return (in_h ? h : not_h) | random_subset(rng, in_h ? not_h : h);
        default:  // rules out part of the own side
            return (in_h ? not_h : h) | self | random_subset(rng, in_h ? h : not_h);
    }
}

}  // namespace

ScenarioConfig random_scenario(std::uint64_t seed, std::size_t n_atoms, std::size_t n_experts,
                               const ScenarioConstraints& constraints) {
    if (n_atoms < 2) throw InfeasibleConstraints("need at least 2 atoms");
    if (n_experts < 2) throw InfeasibleConstraints("need at least 2 experts");
    if (n_atoms > 64) throw InfeasibleConstraints("at most 64 atoms");
    if (constraints.max_cells < 1) throw InfeasibleConstraints("max_cells must be >= 1");
    if (constraints.min_informed > n_experts)
        throw InfeasibleConstraints("min_informed exceeds the number of experts");
    if (constraints.min_informed > 0 && constraints.max_cells < 2 && !constraints.direct_arguments)
        throw InfeasibleConstraints("informed experts need partitions with at least 2 cells");

    Rng rng(stream_seed(seed, Stream::Scenario));

    std::vector<std::string> ids;
    std::vector<Rational> raw;
    Rational total = 0;
    for (std::size_t i = 0; i < n_atoms; ++i) {
        ids.push_back("w" + std::to_string(i));
        raw.emplace_back(1 + static_cast<int>(rng.below(9)));
        total += raw.back();
    }
    for (auto& w : raw) w /= total;
    const std::size_t omega0 = rng.below(n_atoms);
    SampleSpace space = SampleSpace::exact(std::move(ids), std::move(raw), omega0);

    Event h = Event::empty(n_atoms);
    while (h.is_empty() || h.count() == n_atoms) h = random_subset(rng, space.full());

    std::vector<ExpertSpec> experts;
    for (std::size_t i = 0; i < n_experts; ++i) {
        const bool force_informed = i < constraints.min_informed;
        std::vector<Event> cells;
        for (int attempt = 0;; ++attempt) {
            if (attempt > 1000) throw InfeasibleConstraints("could not draw an informed partition");
            if (constraints.direct_arguments) {
                Event realized = direct_argument_cell(rng, h, omega0);
                cells = {realized};
                auto rest = random_cells(rng, realized.complement(),
                                         std::max<std::size_t>(constraints.max_cells, 2) - 1);
                cells.insert(cells.end(), rest.begin(), rest.end());
            } else {
                cells = random_cells(rng, space.full(), constraints.max_cells);
            }
            Partition p(cells);
            if (!force_informed || realized_info(p, omega0).count() < n_atoms) break;
        }
        ExpertSpec spec;
        spec.id = "x" + std::to_string(i);
        spec.policy = constraints.policy;
        spec.units.emplace_back(std::move(cells));
        experts.push_back(std::move(spec));
    }

    ScenarioConfig cfg{.name = "random-" + std::to_string(seed),
                       .space = std::move(space),
                       .hypothesis = std::move(h),
                       .experts = std::move(experts)};
    cfg.numerics.rational = constraints.rational;
    cfg.seed = seed;
    cfg.validate();
    return cfg;
}

}  // namespace srpm
