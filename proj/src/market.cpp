#include "srpm/market.hpp"

#include "srpm/errors.hpp"
#include "srpm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace srpm {

namespace {

// ln(1 + e^x) without overflow
double softplus(double x) {
    return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

constexpr double kSolvencySlack = 1e-9;

}  // namespace

double clamp_price(double p) { return std::clamp(p, kPriceClamp, 1.0 - kPriceClamp); }

double lmsr_price(const MarketState& state) {
    const double x = (state.q_yes - state.q_no) / state.liquidity_b;
    // the logistic rounds to exactly 0 or 1 far out; keep it strictly inside
    const double p = x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
    return std::clamp(p, std::numeric_limits<double>::denorm_min(), std::nextafter(1.0, 0.0));
}

double lmsr_cost(const MarketState& state) {
    const double b = state.liquidity_b;
    return state.q_no + b * softplus((state.q_yes - state.q_no) / b);
}

double trade_cost(const MarketState& state, double delta) {
    if (delta == 0.0) return 0.0;
    const double b = state.liquidity_b;
    const double x0 = (state.q_yes - state.q_no) / b;
    const double x1 = (state.q_yes + delta - state.q_no) / b;
    return b * (softplus(x1) - softplus(x0));
}

double shares_to_reach(const MarketState& state, double target) {
    if (!(target > 0.0 && target < 1.0))
        throw TargetOutOfRange("target price " + std::to_string(target) + " outside (0, 1)");
    const double logit = std::log(target) - std::log1p(-target);
    return state.liquidity_b * logit - (state.q_yes - state.q_no);
}

// ---------------------------------------------------------------------------

Ledger::Ledger(double initial_endowment, double collateral_factor)
    : initial_endowment_(initial_endowment), collateral_factor_(collateral_factor) {
    if (!(initial_endowment > 0)) throw std::invalid_argument("endowment must be positive");
    if (!(collateral_factor >= 0)) throw std::invalid_argument("collateral factor must be >= 0");
}

void Ledger::open(const AgentId& id, double units) {
    if (accounts_.contains(id)) throw std::invalid_argument("account '" + id + "' already open");
    if (!(units > 0)) throw std::invalid_argument("account units must be positive");
    accounts_.emplace(id, Account{initial_endowment_ * units, 0.0});
}

const Account& Ledger::account(const AgentId& id) const {
    auto it = accounts_.find(id);
    if (it == accounts_.end()) throw UnknownAgent("no account '" + id + "'");
    return it->second;
}

Account& Ledger::account(const AgentId& id) {
    auto it = accounts_.find(id);
    if (it == accounts_.end()) throw UnknownAgent("no account '" + id + "'");
    return it->second;
}

double Ledger::total_cash() const {
    double total = 0;
    for (const auto& [_, acc] : accounts_) total += acc.cash;
    return total;
}

bool Ledger::solvent(double cash, double position) const {
    return cash >= -kSolvencySlack &&
           cash + collateral_factor_ * std::min(position, 0.0) >= -kSolvencySlack;
}

TradeRecord execute_trade(Ledger& ledger, MarketState& state, const AgentId& agent, double delta) {
    Account& acc = ledger.account(agent);
    TradeRecord rec{agent, delta, 0.0, lmsr_price(state), lmsr_price(state), state.tick};
    if (delta == 0.0) return rec;

    const double cost = trade_cost(state, delta);
    const double cash = acc.cash - cost;
    const double position = acc.position + delta;
    if (cash < -kSolvencySlack)
        throw InsufficientFunds("agent '" + agent + "' cannot pay " + std::to_string(cost));
    if (!ledger.solvent(cash, position))
        throw CollateralExceeded("agent '" + agent + "' cannot collateralize position " +
                                 std::to_string(position));

    // a residue within the solvency slack is absorbed by the maker so cash stays >= 0
    acc.cash = std::max(cash, 0.0);
    acc.position = position;
    ledger.maker_intake_ += cost + (cash - acc.cash);
    state.q_yes += delta;
    ++state.tick;
    state.quiet_ticks = 0;

    rec.cost = cost;
    rec.price_after = lmsr_price(state);
    return rec;
}

double worst_case_loss(const MarketState& state, double delta) {
    return trade_cost(state, delta) - std::min(delta, 0.0);
}

double feasible_delta(const Ledger& ledger, const MarketState& state, const AgentId& agent,
                      double desired, double max_loss) {
    if (desired == 0.0) return 0.0;
    const Account& acc = ledger.account(agent);
    auto ok = [&](double d) {
        const double cost = trade_cost(state, d);
        if (cost - std::min(d, 0.0) > max_loss) return false;
        return acc.cash - cost >= 0.0 && ledger.solvent(acc.cash - cost, acc.position + d);
    };
    if (ok(desired)) return desired;
    double lo = 0.0;
    double hi = 1.0;
    for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
        const double mid = 0.5 * (lo + hi);
        (ok(mid * desired) ? lo : hi) = mid;
    }
    return lo * desired;
}

void advance_quiet_tick(MarketState& state) {
    ++state.tick;
    ++state.quiet_ticks;
}

bool inactivity_closed(const MarketState& state, std::int64_t threshold_ticks) {
    if (threshold_ticks < 1) throw std::invalid_argument("inactivity threshold must be >= 1");
    return state.quiet_ticks >= threshold_ticks;
}

// ---------------------------------------------------------------------------

int draw_outcome(double final_price, std::uint64_t seed) {
    Rng rng(seed);
    return rng.bernoulli(clamp_price(final_price)) ? 1 : 0;
}

ResolutionRecord resolve_at(double final_price, std::uint64_t seed) {
    return ResolutionRecord{final_price, draw_outcome(final_price, seed), seed};
}

ResolutionRecord resolve(const MarketState& state, std::uint64_t seed) {
    if (!state.closed) throw MarketStillOpen("cannot resolve an open market");
    return resolve_at(lmsr_price(state), seed);
}

std::vector<Balance> settle(Ledger& ledger, const ResolutionRecord& record) {
    std::vector<Balance> out;
    out.reserve(ledger.accounts_.size());
    for (auto& [id, acc] : ledger.accounts_) {
        const double payout = acc.position * record.theta;
        acc.cash += payout;
        ledger.maker_intake_ -= payout;
        acc.position = 0.0;
        out.push_back({id, acc.cash});
    }
    return out;
}

std::vector<double> rewards(std::span<const double> balances, double pool, double precision) {
    if (!(pool >= 0)) throw std::invalid_argument("reward pool must be >= 0");
    if (!(precision > 0)) throw std::invalid_argument("reward precision must be > 0");
    long double total = 0;
    for (double b : balances) {
        if (b < 0) throw std::invalid_argument("negative balance");
        total += b;
    }
    if (!(total > 0)) throw AllBalancesZero("no positive balance to reward");

    const auto units = static_cast<long long>(std::llround(pool / precision));
    std::vector<long long> paid(balances.size());
    std::vector<long double> remainder(balances.size());
    long long assigned = 0;
    for (std::size_t i = 0; i < balances.size(); ++i) {
        const long double exact = static_cast<long double>(units) * balances[i] / total;
        paid[i] = static_cast<long long>(std::floor(exact));
        remainder[i] = exact - paid[i];
        assigned += paid[i];
    }
    std::vector<std::size_t> order(balances.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    for (std::size_t i = 0; assigned < units; ++i, ++assigned) ++paid[order[i % order.size()]];

    std::vector<double> out(balances.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<double>(paid[i]) * precision;
    return out;
}

}  // namespace srpm
