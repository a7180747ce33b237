#pragma once

// The round loop of the entangled market and the transcript checkers.
//
// A run produces the sequence of states (e_k, xi_k, Omega_k), k = 1..k_inf:
// e_k the experts in the market, xi_k the price at the k-th stabilization
// point, Omega_k the public information. Between consecutive rounds exactly
// one expert enters. After the last round the market resolves by a Bernoulli
// draw at xi_{k_inf}.

#include "srpm/agents.hpp"
#include "srpm/disclosure.hpp"
#include "srpm/market.hpp"
#include "srpm/scenario.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace srpm {

struct ChatEntry {
    std::string sender;
    Event claim;
    Verdict verdict = Verdict::Rejected;
};

struct RoundRecord {
    std::int64_t k = 1;
    /// The expert whose entry led to this round; empty for k = 1.
    std::optional<std::string> entered;
    /// e_k in entry order: the crowd, then ignorant experts, then entrants.
    std::vector<std::string> members;
    Price xi;
    Event omega;
    std::vector<ChatEntry> chat;
    std::vector<double> substeps;
};

struct Transcript {
    std::vector<RoundRecord> rounds;
    std::int64_t k_infinity = 0;
    ResolutionRecord resolution;
    std::size_t true_atom = 0;
    std::uint64_t seed = 0;
    std::string fingerprint;
    bool degenerate = false;
    std::string degenerate_reason;
    std::vector<Balance> final_balances;
    std::vector<double> rewards;

    const RoundRecord& final_round() const { return rounds.back(); }
};

/// Realized space of a run: the scenario space with omega0 drawn for `seed`
/// when the scenario samples it from the prior.
SampleSpace realized_space(const ScenarioConfig& scenario, std::uint64_t seed);

/// The entry threshold the engine uses: epsilon, widened in ticked mode to ten
/// times the crowd's convergence tolerance.
double effective_epsilon(const ScenarioConfig& scenario);

/// Runs the market until nobody wants to enter and the inactivity window has
/// passed, then resolves and settles. Deterministic in (scenario, seed).
Transcript run_market(const ScenarioConfig& scenario, std::uint64_t seed);

/// e_1: the crowd plus every expert whose realized information is everything.
std::vector<std::string> initial_members(const ScenarioConfig& scenario, const SampleSpace& space);

enum class T2Class { ProvedH, ProvedNotH, FullPooling, Violation, NotApplicable };
std::string_view to_string(T2Class c);

struct T2Arms {
    bool proved_h = false;
    bool proved_not_h = false;
    bool full_pooling = false;
};

struct CheckReport {
    bool ent1 = true;
    bool ent2 = true;
    bool ent3a = true;
    bool ent3b = true;
    bool structure = true;
    bool final_state_ok = true;
    T2Class t2_class = T2Class::NotApplicable;
    T2Arms t2_arms;
    std::optional<std::int64_t> first_failing_round;
    std::vector<std::string> diagnostics;

    bool entangled() const { return ent1 && ent2 && ent3a && ent3b && structure; }
    bool passed() const {
        return entangled() && final_state_ok && t2_class != T2Class::Violation;
    }
};

/// ent1: entrants' information is public; ent2: xi_k = pi(H | Omega_k);
/// ent3a: every entrant's posterior differed from the price;
/// ent3b: no outsider's posterior differs at k_inf. Also checks the transcript
/// structure (one entrant per round, Omega non-increasing).
CheckReport check_entangled(const Transcript& t, const ScenarioConfig& scenario, double epsilon);

/// Omega_{k_inf} is the intersection of the entrants' information and
/// xi_{k_inf} = pi(H | Omega_{k_inf}) = pi(H | Omega_{k_inf} & I_n) for every n.
bool check_final_state(const Transcript& t, const ScenarioConfig& scenario, double epsilon,
                       std::vector<std::string>* diagnostics = nullptr);

/// Classifies the outcome when every realized information is a direct argument.
T2Class check_t2(const Transcript& t, const ScenarioConfig& scenario, T2Arms* arms = nullptr);

/// All three checks.
CheckReport check_all(const Transcript& t, const ScenarioConfig& scenario, double epsilon);

struct IncrementStats {
    std::int64_t k = 0;
    std::int64_t count = 0;
    double mean = 0.0;
    double std_error = 0.0;
};

struct MartingaleReport {
    std::vector<IncrementStats> increments;
    double max_abs_mean = 0.0;
    bool within_3se = true;
    /// Set when omega0 is not drawn from the prior, so no martingale is implied.
    bool not_a_martingale_design = false;
};

/// Mean of xi_{k+1} - xi_k per round index over runs seeded run_seed(seed, i).
/// Runs that stopped earlier contribute a zero increment (the stopped process).
MartingaleReport martingale_report(const ScenarioConfig& scenario, std::int64_t n_runs,
                                   std::uint64_t seed);

/// Martingale statistics over already computed price paths.
MartingaleReport martingale_from_paths(const std::vector<std::vector<double>>& paths);

}  // namespace srpm
