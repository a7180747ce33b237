// srpm: command-line driver for the entangled prediction market.
//
//   srpm run       --scenario exm.scenario [--seed S] [--format records]
//   srpm batch     --scenario F --runs N --seed S --parallelism P
//   srpm check     --scenario F --transcript T
//   srpm calibrate --scenario F --runs N
//   srpm profit    --scenario F --runs N
//   srpm martingale --scenario F --runs N
//   srpm revise    [--ph 1/3 --pa 1/3 --pb 1/3]
//
// Exit status is 0 iff every checker that ran passed, 1 if one failed and 2 on
// bad input.

#include "srpm/batch.hpp"
#include "srpm/errors.hpp"
#include "srpm/protocol.hpp"
#include "srpm/revision.hpp"
#include "srpm/scenario_io.hpp"
#include "srpm/transcript_io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using namespace srpm;

struct Options {
    std::string scenario;
    std::string transcript;
    std::int64_t runs = 1000;
    std::optional<std::uint64_t> seed;
    std::int64_t parallelism = 1;
    std::string mode;
    std::optional<double> epsilon;
    bool rational = false;
    std::string out;
    std::string format = "table";
    std::string ph = "1/3";
    std::string pa = "1/3";
    std::string pb = "1/3";
};

ScenarioConfig load(const Options& o) {
    ScenarioConfig s = load_scenario(o.scenario);
    if (!o.mode.empty()) s.market.mode = parse_price_mode(o.mode);
    if (o.epsilon) s.numerics.epsilon = *o.epsilon;
    if (o.rational) s.numerics.rational = true;
    if (o.seed) s.seed = *o.seed;
    s.validate();
    return s;
}

OutputFormat format_of(const Options& o) {
    return o.format == "records" ? OutputFormat::Records : OutputFormat::Table;
}

/// Writes to --out when given, else stdout.
void publish(const Options& o, const std::string& text) {
    if (o.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + o.out);
    f << text;
}

void print_check(std::ostream& out, const CheckReport& r) {
    auto line = [&](const char* name, bool ok) { out << "  " << name << ": " << (ok ? "PASS" : "FAIL") << '\n'; };
    out << "checks\n";
    line("structure", r.structure);
    line("ent1", r.ent1);
    line("ent2", r.ent2);
    line("ent3a", r.ent3a);
    line("ent3b", r.ent3b);
    line("final_state", r.final_state_ok);
    out << "  T2: " << to_string(r.t2_class) << '\n';
    if (r.first_failing_round) out << "  first failing round: " << *r.first_failing_round << '\n';
    for (const auto& d : r.diagnostics) out << "  - " << d << '\n';
}

void print_rounds(std::ostream& out, const Transcript& t, const SampleSpace& space) {
    out << "    k  entered         xi              omega\n";
    for (const auto& r : t.rounds) {
        std::string omega;
        for (const auto& id : space.atom_ids(r.omega)) omega += (omega.empty() ? "" : ",") + id;
        char buf[64];
        std::snprintf(buf, sizeof buf, "%5lld  %-14s  %-14s  ", static_cast<long long>(r.k),
                      r.entered ? r.entered->c_str() : "-", format_price(r.xi).c_str());
        out << buf << '{' << omega << "}\n";
    }
    out << "k_inf " << t.k_infinity << ", final price " << format_price(t.final_round().xi) << ", theta "
        << t.resolution.theta << ", seed " << t.seed << '\n';
    if (t.degenerate) out << "degenerate: " << t.degenerate_reason << '\n';
}

int cmd_run(const Options& o) {
    const ScenarioConfig s = load(o);
    const Transcript t = run_market(s, s.seed);
    const SampleSpace space = s.space.with_true_atom(t.true_atom);
    std::ostringstream out;
    int status = 0;
    if (format_of(o) == OutputFormat::Records) {
        write_transcript(out, t, space);
    } else {
        print_rounds(out, t, space);
    }
    if (s.fully_compliant()) {
        const CheckReport r = check_all(t, s, effective_epsilon(s));
        if (format_of(o) == OutputFormat::Table) print_check(out, r);
        if (!r.passed()) {
            if (format_of(o) == OutputFormat::Records) print_check(std::cerr, r);
            status = 1;
        }
    }
    publish(o, out.str());
    return status;
}

int cmd_batch(const Options& o) {
    const ScenarioConfig s = load(o);
    BatchOptions opts;
    opts.parallelism = o.parallelism;
    opts.run_checkers = s.fully_compliant();
    const RunReport report = run_batch(s, o.runs, s.seed, opts);
    std::ostringstream out;
    emit_batch(out, report, format_of(o));
    publish(o, out.str());
    return report.check_failures() == 0 && report.errors() == 0 ? 0 : 1;
}

int cmd_check(const Options& o) {
    const ScenarioConfig s = load(o);
    std::ifstream in(o.transcript);
    if (!in) throw ParseError(o.transcript + ": cannot open");
    const Transcript t = read_transcript(in, s);
    if (!t.fingerprint.empty() && t.fingerprint != scenario_fingerprint(s))
        std::cerr << "warning: transcript fingerprint " << t.fingerprint << " does not match the scenario\n";
    const CheckReport r = check_all(t, s, effective_epsilon(s));
    std::ostringstream out;
    print_check(out, r);
    publish(o, out.str());
    return r.passed() ? 0 : 1;
}

int cmd_calibrate(const Options& o) {
    const ScenarioConfig s = load(o);
    BatchOptions opts;
    opts.parallelism = o.parallelism;
    const RunReport report = run_batch(s, o.runs, s.seed, opts);
    const CalibrationReport cal = calibration_report(report.records);
    std::ostringstream out;
    emit_calibration(out, cal, format_of(o));
    publish(o, out.str());
    return cal.passed() && report.errors() == 0 ? 0 : 1;
}

int cmd_martingale(const Options& o) {
    const ScenarioConfig s = load(o);
    BatchOptions opts;
    opts.parallelism = o.parallelism;
    const RunReport report = run_batch(s, o.runs, s.seed, opts);
    const MartingaleReport m = martingale_of(report, s);
    std::ostringstream out;
    emit_martingale(out, m, format_of(o));
    publish(o, out.str());
    return m.within_3se && report.errors() == 0 ? 0 : 1;
}

int cmd_profit(const Options& o) {
    const ScenarioConfig s = load(o);
    const ProfitReport p = profit_experiment(s, o.runs, s.seed);
    std::ostringstream out;
    emit_profit(out, p, format_of(o));
    publish(o, out.str());
    return p.passed() ? 0 : 1;
}

int cmd_revise(const Options& o) {
    const RevisionScenario s{parse_rational(o.ph), parse_rational(o.pa), parse_rational(o.pb)};
    const Announcements r1 = round1(s);
    const MarketComparison c = market_vs_revision(s);
    std::ostringstream out;
    auto row = [&](const std::string& name, const std::string& value) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "%-28s %s\n", name.c_str(), value.c_str());
        out << buf;
    };
    row("round 1: pi(H | not A)", format_rational(r1.not_a));
    row("round 1: pi(H | not B)", format_rational(r1.not_b));
    row("round 1: pi(H)", format_rational(r1.crowd));
    row("consensus DISJOINT", format_rational(c.disjoint));
    row("consensus NESTED", format_rational(c.nested));
    row("consensus UNIFORM_OVERLAP", format_probability(c.uniform_overlap));
    row("pooled pi(H | not A, not B)", format_rational(c.pooled));
    row("market final price", format_rational(c.market_price));
    row("steps", "2");
    publish(o, out.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Entangled prediction market simulator"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub, bool needs_scenario) {
        auto* opt = sub->add_option("--scenario", o.scenario, "Scenario file")->check(CLI::ExistingFile);
        if (needs_scenario) opt->required();
        sub->add_option("--runs", o.runs, "Number of runs")->check(CLI::PositiveNumber);
        sub->add_option("--seed", o.seed, "Base seed (default: the scenario's)");
        sub->add_option("--parallelism", o.parallelism, "Worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--mode", o.mode, "Price mode")->check(CLI::IsMember({"instant", "ticked"}));
        sub->add_option("--epsilon", o.epsilon, "Entry/checker tolerance");
        sub->add_flag("--rational", o.rational, "Exact rational prices");
        sub->add_option("--out", o.out, "Output file");
        sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"table", "records"}));
    };

    auto* run = app.add_subcommand("run", "Run one market and check it");
    common(run, true);
    auto* batch = app.add_subcommand("batch", "Run many seeded markets");
    common(batch, true);
    auto* check = app.add_subcommand("check", "Re-check a stored transcript");
    common(check, true);
    check->add_option("--transcript", o.transcript, "Transcript file")->required()->check(CLI::ExistingFile);
    auto* calibrate = app.add_subcommand("calibrate", "Calibration of final prices against outcomes");
    common(calibrate, true);
    auto* profit = app.add_subcommand("profit", "Compliant vs silent profit on paired seeds");
    common(profit, true);
    auto* martingale = app.add_subcommand("martingale", "Mean price increments per round");
    common(martingale, true);
    auto* revise = app.add_subcommand("revise", "Posterior revision vs the market");
    common(revise, false);
    revise->add_option("--ph", o.ph, "pi(H)");
    revise->add_option("--pa", o.pa, "pi(A)");
    revise->add_option("--pb", o.pb, "pi(B)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(o);
        if (batch->parsed()) return cmd_batch(o);
        if (check->parsed()) return cmd_check(o);
        if (calibrate->parsed()) return cmd_calibrate(o);
        if (profit->parsed()) return cmd_profit(o);
        if (martingale->parsed()) return cmd_martingale(o);
        if (revise->parsed()) return cmd_revise(o);
    } catch (const srpm::Error& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
