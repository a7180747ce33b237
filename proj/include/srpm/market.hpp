#pragma once

// LMSR market maker over a single binary contract, the equal-endowment
// play-money ledger, the inactivity clock and Bernoulli self-resolution.
//
// All trades are signed YES-share trades: positive buys, negative sells.
// q_no never moves after construction. A short position is collateralized by
// its maximum liability (one unit per share if the outcome resolves to 1).

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace srpm {

/// Prices handed to the Bernoulli draw are clamped to [kPriceClamp, 1 - kPriceClamp].
inline constexpr double kPriceClamp = 1e-12;

double clamp_price(double p);

struct MarketState {
    double q_yes = 0.0;
    double q_no = 0.0;
    double liquidity_b = 100.0;
    std::int64_t tick = 0;
    std::int64_t quiet_ticks = 0;
    bool closed = false;
};

double lmsr_price(const MarketState& state);
double lmsr_cost(const MarketState& state);

/// cost(q_yes + delta) - cost(q_yes).
double trade_cost(const MarketState& state, double delta);

/// Signed YES quantity that moves the price to `target`; throws TargetOutOfRange
/// unless 0 < target < 1.
double shares_to_reach(const MarketState& state, double target);

using AgentId = std::string;

struct TradeRecord;
struct ResolutionRecord;
struct Balance;

struct Account {
    double cash = 0.0;
    double position = 0.0;
};

class Ledger {
public:
    /// `collateral_factor` scales the liability a short must cover with cash.
    explicit Ledger(double initial_endowment, double collateral_factor = 1.0);

    /// Opens an account holding `units` endowments (units > 1 models an
    /// aggregate of identical agents).
    void open(const AgentId& id, double units = 1.0);

    bool has(const AgentId& id) const { return accounts_.contains(id); }
    const Account& account(const AgentId& id) const;
    Account& account(const AgentId& id);
    const std::map<AgentId, Account>& accounts() const { return accounts_; }

    double initial_endowment() const { return initial_endowment_; }
    double collateral_factor() const { return collateral_factor_; }

    /// Net cash received by the market maker so far (trade costs minus payouts).
    double maker_intake() const { return maker_intake_; }
    double total_cash() const;

    /// True when the account could absorb this post-trade cash/position pair.
    bool solvent(double cash, double position) const;

private:
    friend TradeRecord execute_trade(Ledger&, MarketState&, const AgentId&, double);
    friend std::vector<Balance> settle(Ledger&, const ResolutionRecord&);

    double initial_endowment_;
    double collateral_factor_;
    double maker_intake_ = 0.0;
    std::map<AgentId, Account> accounts_;
};

struct TradeRecord {
    AgentId agent;
    double delta = 0.0;
    double cost = 0.0;
    double price_before = 0.0;
    double price_after = 0.0;
    std::int64_t tick = 0;
};

/// Applies a trade. Throws InsufficientFunds / CollateralExceeded (leaving both
/// ledger and state untouched) when the account cannot carry the result.
TradeRecord execute_trade(Ledger& ledger, MarketState& state, const AgentId& agent, double delta);

/// Settlement loss of a trade in the worse of the two outcomes:
/// cost for a buy, |delta| minus proceeds for a sale.
double worst_case_loss(const MarketState& state, double delta);

/// Largest |d| <= |desired| in the direction of `desired` that the account can
/// carry and whose worst-case loss stays within `max_loss`.
double feasible_delta(const Ledger& ledger, const MarketState& state, const AgentId& agent,
                      double desired, double max_loss);

/// One logical clock step without a trade.
void advance_quiet_tick(MarketState& state);

bool inactivity_closed(const MarketState& state, std::int64_t threshold_ticks);

struct ResolutionRecord {
    double final_price = 0.0;
    int theta = 0;
    std::uint64_t rng_seed = 0;
};

/// Bernoulli draw at the clamped price. Replayable from `seed`.
int draw_outcome(double final_price, std::uint64_t seed);

/// Throws MarketStillOpen unless the market was closed.
ResolutionRecord resolve(const MarketState& state, std::uint64_t seed);

/// Resolution at an externally recorded final price.
ResolutionRecord resolve_at(double final_price, std::uint64_t seed);

struct Balance {
    AgentId agent;
    double amount = 0.0;
};

/// Pays position * theta to every account, zeroes positions, returns final cash.
std::vector<Balance> settle(Ledger& ledger, const ResolutionRecord& record);

/// Splits `pool` proportionally to balances, rounded to `precision` by the
/// largest-remainder rule so the payouts add up to the pool exactly.
std::vector<double> rewards(std::span<const double> balances, double pool, double precision = 0.01);

}  // namespace srpm
