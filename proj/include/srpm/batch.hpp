#pragma once

// Monte Carlo batches over one scenario and the experiments built on them.
//
// A RunReport stores one record per run. Every aggregate (pass rates,
// calibration, martingale statistics) is recomputed from the records, so two
// reports merge by a sorted union and the result does not depend on how the
// runs were split or scheduled.

#include "srpm/protocol.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace srpm {

struct RunRecord {
    std::int64_t index = 0;
    std::uint64_t seed = 0;
    std::int64_t k_infinity = 0;
    double final_price = 0.0;
    int theta = 0;
    bool degenerate = false;
    /// Set when the checkers ran on this run.
    std::optional<bool> checks_passed;
    std::string t2_class;
    std::vector<double> prices;
    /// Non-empty when the run raised instead of finishing.
    std::string error;

    friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

struct RunReport {
    std::string fingerprint;
    std::vector<RunRecord> records;

    std::int64_t errors() const;
    std::int64_t checked() const;
    std::int64_t check_failures() const;
    std::int64_t t2_violations() const;

    friend bool operator==(const RunReport&, const RunReport&) = default;
};

struct BatchOptions {
    std::int64_t parallelism = 1;
    bool run_checkers = false;
    /// Overrides the scenario's epsilon for the checkers.
    std::optional<double> epsilon;
};

/// Runs i = 0..n-1 with seed base_seed + i.
RunReport run_batch(const ScenarioConfig& scenario, std::int64_t n_runs, std::uint64_t base_seed,
                    const BatchOptions& options = {});

/// Sorted union by run index; throws std::invalid_argument on a clashing index
/// or differing fingerprints.
RunReport merge(const RunReport& a, const RunReport& b);

enum class BucketStatus { Ok, Outside, LowCount };
std::string_view to_string(BucketStatus s);

struct CalibrationBucket {
    double lower = 0.0;
    double upper = 0.0;
    std::int64_t count = 0;
    std::int64_t hits = 0;
    double mean_price = 0.0;
    double frequency = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    BucketStatus status = BucketStatus::LowCount;
};

struct CalibrationReport {
    std::vector<CalibrationBucket> buckets;
    bool passed() const;
};

inline constexpr double kBucketWidth = 0.05;
inline constexpr std::int64_t kMinBucketCount = 30;

/// Buckets final prices at width 0.05; a bucket holding at least 30 runs must
/// have its outcome frequency within mean_price +- 3 binomial standard errors.
CalibrationReport calibration_report(const std::vector<RunRecord>& runs);

MartingaleReport martingale_of(const RunReport& report, const ScenarioConfig& scenario);

struct ProfitStats {
    std::int64_t n = 0;
    double mean = 0.0;
    double std_error = 0.0;
};

struct ProfitReport {
    std::string expert;
    ProfitStats compliant;
    ProfitStats silent;
    bool compliant_positive = false;
    bool silent_zero = false;
    bool passed() const { return compliant_positive && silent_zero; }
};

/// Runs the scenario's single expert as compliant and as silent deviant on the
/// same seeds and compares settled profits (final cash minus endowment).
/// Throws BadExperimentShape unless the scenario has exactly one expert.
ProfitReport profit_experiment(const ScenarioConfig& scenario, std::int64_t n_runs, std::uint64_t seed);

enum class OutputFormat { Table, Records };

void emit_batch(std::ostream& out, const RunReport& report, OutputFormat format);
void emit_calibration(std::ostream& out, const CalibrationReport& report, OutputFormat format);
void emit_martingale(std::ostream& out, const MartingaleReport& report, OutputFormat format);
void emit_profit(std::ostream& out, const ProfitReport& report, OutputFormat format);

}  // namespace srpm
