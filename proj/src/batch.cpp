#include "srpm/batch.hpp"

#include "srpm/errors.hpp"
#include "srpm/rng.hpp"
#include "srpm/scenario_io.hpp"
#include "srpm/transcript_io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace srpm {

using json = nlohmann::ordered_json;

std::int64_t RunReport::errors() const {
    return std::count_if(records.begin(), records.end(), [](const RunRecord& r) { return !r.error.empty(); });
}

std::int64_t RunReport::checked() const {
    return std::count_if(records.begin(), records.end(),
                         [](const RunRecord& r) { return r.checks_passed.has_value(); });
}

std::int64_t RunReport::check_failures() const {
    return std::count_if(records.begin(), records.end(),
                         [](const RunRecord& r) { return r.checks_passed && !*r.checks_passed; });
}

std::int64_t RunReport::t2_violations() const {
    return std::count_if(records.begin(), records.end(), [](const RunRecord& r) { return r.t2_class == "VIOLATION"; });
}

namespace {

RunRecord run_one(const ScenarioConfig& scenario, std::int64_t index, std::uint64_t seed,
                  const BatchOptions& options) {
    RunRecord rec;
    rec.index = index;
    rec.seed = seed;
    try {
        const Transcript t = run_market(scenario, seed);
        rec.k_infinity = t.k_infinity;
        rec.final_price = t.resolution.final_price;
        rec.theta = t.resolution.theta;
        rec.degenerate = t.degenerate;
        for (const auto& r : t.rounds) rec.prices.push_back(r.xi.value);
        if (options.run_checkers) {
            const double eps = options.epsilon.value_or(effective_epsilon(scenario));
            const CheckReport c = check_all(t, scenario, eps);
            rec.checks_passed = c.passed();
            rec.t2_class = std::string(to_string(c.t2_class));
        }
    } catch (const std::exception& e) {
        rec.error = e.what();
    }
    return rec;
}

}  // namespace

RunReport run_batch(const ScenarioConfig& scenario, std::int64_t n_runs, std::uint64_t base_seed,
                    const BatchOptions& options) {
    if (n_runs < 0) throw std::invalid_argument("n_runs must be >= 0");
    RunReport report;
    report.fingerprint = scenario_fingerprint(scenario);
    report.records.resize(static_cast<std::size_t>(n_runs));

    std::atomic<std::int64_t> next{0};
    auto worker = [&] {
        for (std::int64_t i = next++; i < n_runs; i = next++)
            report.records[i] = run_one(scenario, i, run_seed(base_seed, i), options);
    };
    const std::int64_t threads = std::clamp<std::int64_t>(options.parallelism, 1, std::max<std::int64_t>(n_runs, 1));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::int64_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    }
    return report;
}

RunReport merge(const RunReport& a, const RunReport& b) {
    if (!a.records.empty() && !b.records.empty() && a.fingerprint != b.fingerprint)
        throw std::invalid_argument("merge: reports come from different scenarios");
    RunReport out;
    out.fingerprint = a.records.empty() ? b.fingerprint : a.fingerprint;
    out.records.reserve(a.records.size() + b.records.size());
    auto by_index = [](const RunRecord& x, const RunRecord& y) { return x.index < y.index; };
    std::merge(a.records.begin(), a.records.end(), b.records.begin(), b.records.end(),
               std::back_inserter(out.records), by_index);
    std::stable_sort(out.records.begin(), out.records.end(), by_index);
    for (std::size_t i = 1; i < out.records.size(); ++i) {
        if (out.records[i].index == out.records[i - 1].index)
            throw std::invalid_argument("merge: run " + std::to_string(out.records[i].index) + " appears twice");
    }
    return out;
}

std::string_view to_string(BucketStatus s) {
    switch (s) {
        case BucketStatus::Ok: return "OK";
        case BucketStatus::Outside: return "OUTSIDE";
        case BucketStatus::LowCount: return "LOW_COUNT";
    }
    return "LOW_COUNT";
}

bool CalibrationReport::passed() const {
    return std::none_of(buckets.begin(), buckets.end(),
                        [](const CalibrationBucket& b) { return b.status == BucketStatus::Outside; });
}

CalibrationReport calibration_report(const std::vector<RunRecord>& runs) {
    constexpr int kBuckets = 20;
    CalibrationReport rep;
    std::vector<double> price_sum(kBuckets, 0.0);
    for (int i = 0; i < kBuckets; ++i) {
        CalibrationBucket b;
        b.lower = i * kBucketWidth;
        b.upper = (i + 1) * kBucketWidth;
        rep.buckets.push_back(b);
    }
    for (const auto& r : runs) {
        if (!r.error.empty()) continue;
        const int i = std::clamp(static_cast<int>(std::floor(r.final_price * kBuckets)), 0, kBuckets - 1);
        rep.buckets[i].count += 1;
        rep.buckets[i].hits += r.theta;
        price_sum[i] += r.final_price;
    }
    for (int i = 0; i < kBuckets; ++i) {
        auto& b = rep.buckets[i];
        if (b.count == 0) continue;
        const double n = static_cast<double>(b.count);
        b.mean_price = price_sum[i] / n;
        b.frequency = static_cast<double>(b.hits) / n;
        const double half = 3.0 * std::sqrt(b.mean_price * (1.0 - b.mean_price) / n);
        b.ci_low = b.mean_price - half;
        b.ci_high = b.mean_price + half;
        if (b.count < kMinBucketCount) {
            b.status = BucketStatus::LowCount;
        } else {
            // 1e-12 absorbs the rounding in the mean of identical prices
            const bool inside = b.frequency >= b.ci_low - 1e-12 && b.frequency <= b.ci_high + 1e-12;
            b.status = inside ? BucketStatus::Ok : BucketStatus::Outside;
        }
    }
    return rep;
}

MartingaleReport martingale_of(const RunReport& report, const ScenarioConfig& scenario) {
    std::vector<std::vector<double>> paths;
    for (const auto& r : report.records) {
        if (r.error.empty()) paths.push_back(r.prices);
    }
    MartingaleReport rep = martingale_from_paths(paths);
    rep.not_a_martingale_design = scenario.true_atom_sampling.mode != TrueAtomMode::PriorSampled;
    return rep;
}

// ---------------------------------------------------------------------------

namespace {

ProfitStats stats_of(const std::vector<double>& xs) {
    ProfitStats s;
    s.n = static_cast<std::int64_t>(xs.size());
    if (xs.empty()) return s;
    double sum = 0.0;
    for (double x : xs) sum += x;
    s.mean = sum / xs.size();
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.std_error = xs.size() > 1 ? std::sqrt(ss / (xs.size() - 1) / xs.size()) : 0.0;
    return s;
}

double settled_profit(const ScenarioConfig& scenario, std::uint64_t seed, const std::string& id) {
    const Transcript t = run_market(scenario, seed);
    for (const auto& b : t.final_balances) {
        if (b.agent == id) return b.amount - scenario.market.endowment;
    }
    throw UnknownAgent("no settled balance for '" + id + "'");
}

}  // namespace

ProfitReport profit_experiment(const ScenarioConfig& scenario, std::int64_t n_runs, std::uint64_t seed) {
    if (scenario.experts.size() != 1)
        throw BadExperimentShape("the profit experiment needs exactly one expert besides the crowd, got " +
                                 std::to_string(scenario.experts.size()));
    ScenarioConfig compliant = scenario;
    compliant.experts.front().policy = Policy::Compliant;
    ScenarioConfig silent = scenario;
    silent.experts.front().policy = Policy::SilentDeviant;
    const std::string& id = scenario.experts.front().id;

    std::vector<double> a;
    std::vector<double> b;
    for (std::int64_t i = 0; i < n_runs; ++i) {
        const std::uint64_t s = run_seed(seed, static_cast<std::uint64_t>(i));
        a.push_back(settled_profit(compliant, s, id));
        b.push_back(settled_profit(silent, s, id));
    }
    ProfitReport rep;
    rep.expert = id;
    rep.compliant = stats_of(a);
    rep.silent = stats_of(b);
    rep.compliant_positive = rep.compliant.mean > 3.0 * rep.compliant.std_error;
    rep.silent_zero = std::abs(rep.silent.mean) <= 3.0 * rep.silent.std_error + 1e-12;
    return rep;
}

// ---------------------------------------------------------------------------

namespace {

std::string fixed(double x, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

}  // namespace

void emit_batch(std::ostream& out, const RunReport& report, OutputFormat format) {
    if (format == OutputFormat::Records) {
        for (const auto& r : report.records) {
            json rec;
            rec["index"] = r.index;
            rec["seed"] = r.seed;
            rec["k_infinity"] = r.k_infinity;
            rec["final_price"] = format_probability(r.final_price);
            rec["theta"] = r.theta;
            rec["degenerate"] = r.degenerate;
            rec["checks"] = r.checks_passed ? json(*r.checks_passed ? "PASS" : "FAIL") : json(nullptr);
            rec["t2"] = r.t2_class.empty() ? json(nullptr) : json(r.t2_class);
            if (!r.error.empty()) rec["error"] = r.error;
            out << rec.dump() << '\n';
        }
        return;
    }
    char line[160];
    std::snprintf(line, sizeof line, "%8s %20s %4s %14s %5s %6s %-14s\n", "run", "seed", "k", "final_price",
                  "theta", "checks", "t2");
    out << line;
    for (const auto& r : report.records) {
        const char* checks = r.checks_passed ? (*r.checks_passed ? "PASS" : "FAIL") : "-";
        std::snprintf(line, sizeof line, "%8lld %20llu %4lld %14s %5d %6s %-14s\n", static_cast<long long>(r.index),
                      static_cast<unsigned long long>(r.seed), static_cast<long long>(r.k_infinity),
                      format_probability(r.final_price).c_str(), r.theta, checks,
                      r.t2_class.empty() ? "-" : r.t2_class.c_str());
        out << line;
        if (!r.error.empty()) out << "         error: " << r.error << '\n';
    }
    if (!report.records.empty()) {
        out << "runs " << report.records.size() << ", errors " << report.errors() << ", checked " << report.checked()
            << ", check failures " << report.check_failures() << ", T2 violations " << report.t2_violations()
            << '\n';
    }
}

void emit_calibration(std::ostream& out, const CalibrationReport& report, OutputFormat format) {
    if (format == OutputFormat::Records) {
        for (const auto& b : report.buckets) {
            json rec;
            rec["lower"] = fixed(b.lower, 2);
            rec["upper"] = fixed(b.upper, 2);
            rec["count"] = b.count;
            rec["mean_price"] = format_probability(b.mean_price);
            rec["frequency"] = format_probability(b.frequency);
            rec["ci_low"] = format_probability(b.ci_low);
            rec["ci_high"] = format_probability(b.ci_high);
            rec["status"] = to_string(b.status);
            out << rec.dump() << '\n';
        }
        return;
    }
    char line[160];
    std::snprintf(line, sizeof line, "%-11s %8s %10s %10s %10s %10s %s\n", "bucket", "count", "mean", "freq",
                  "ci_low", "ci_high", "status");
    out << line;
    for (const auto& b : report.buckets) {
        if (b.count == 0) continue;
        std::snprintf(line, sizeof line, "[%.2f,%.2f) %8lld %10s %10s %10s %10s %s\n", b.lower, b.upper,
                      static_cast<long long>(b.count), fixed(b.mean_price).c_str(), fixed(b.frequency).c_str(),
                      fixed(b.ci_low).c_str(), fixed(b.ci_high).c_str(), std::string(to_string(b.status)).c_str());
        out << line;
    }
    out << "calibration " << (report.passed() ? "PASS" : "FAIL") << '\n';
}

void emit_martingale(std::ostream& out, const MartingaleReport& report, OutputFormat format) {
    if (format == OutputFormat::Records) {
        for (const auto& s : report.increments) {
            json rec;
            rec["k"] = s.k;
            rec["count"] = s.count;
            rec["mean_increment"] = format_probability(s.mean);
            rec["std_error"] = format_probability(s.std_error);
            out << rec.dump() << '\n';
        }
        return;
    }
    char line[128];
    std::snprintf(line, sizeof line, "%4s %8s %16s %16s\n", "k", "count", "mean_increment", "std_error");
    out << line;
    for (const auto& s : report.increments) {
        std::snprintf(line, sizeof line, "%4lld %8lld %16.3e %16.3e\n", static_cast<long long>(s.k),
                      static_cast<long long>(s.count), s.mean, s.std_error);
        out << line;
    }
    out << "max |mean increment| " << format_probability(report.max_abs_mean) << ", within 3 SE "
        << (report.within_3se ? "yes" : "no");
    if (report.not_a_martingale_design) out << " (NOT_A_MARTINGALE_DESIGN: omega0 is fixed)";
    out << '\n';
}

void emit_profit(std::ostream& out, const ProfitReport& report, OutputFormat format) {
    if (format == OutputFormat::Records) {
        for (auto [name, s] : {std::pair{"compliant", report.compliant}, std::pair{"silent_deviant", report.silent}}) {
            json rec;
            rec["expert"] = report.expert;
            rec["policy"] = name;
            rec["n"] = s.n;
            rec["mean_profit"] = format_probability(s.mean);
            rec["std_error"] = format_probability(s.std_error);
            out << rec.dump() << '\n';
        }
        return;
    }
    char line[160];
    std::snprintf(line, sizeof line, "%-16s %8s %14s %12s %s\n", "policy", "n", "mean_profit", "std_error", "verdict");
    out << line;
    std::snprintf(line, sizeof line, "%-16s %8lld %14.6f %12.6f %s\n", "compliant",
                  static_cast<long long>(report.compliant.n), report.compliant.mean, report.compliant.std_error,
                  report.compliant_positive ? "positive at 3 SE" : "NOT positive at 3 SE");
    out << line;
    std::snprintf(line, sizeof line, "%-16s %8lld %14.6f %12.6f %s\n", "silent_deviant",
                  static_cast<long long>(report.silent.n), report.silent.mean, report.silent.std_error,
                  report.silent_zero ? "within 3 SE of 0" : "NOT within 3 SE of 0");
    out << line;
}

}  // namespace srpm
