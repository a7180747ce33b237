#include "srpm/transcript_io.hpp"

#include "srpm/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <istream>
#include <sstream>

namespace srpm {

using json = nlohmann::ordered_json;

std::string format_probability(double p) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", p);
    return buf;
}

std::string format_price(const Price& p) {
    return p.exact ? format_rational(*p.exact) : format_probability(p.value);
}

namespace {

json sorted_ids(const SampleSpace& space, const Event& e) {
    auto ids = space.atom_ids(e);
    std::sort(ids.begin(), ids.end());
    return json(ids);
}

Event event_of(const SampleSpace& space, const json& v, const std::string& where) {
    if (!v.is_array()) throw ParseError(where + ": expected an atom list");
    Event e = Event::empty(space.size());
    for (const auto& a : v) {
        if (!a.is_string()) throw ParseError(where + ": atom ids must be strings");
        try {
            e.insert(space.index_of(a.get<std::string>()));
        } catch (const InvalidSpace&) {
            throw ParseError(where + ": unknown atom '" + a.get<std::string>() + "'");
        }
    }
    return e;
}

}  // namespace

void write_transcript(std::ostream& out, const Transcript& t, const SampleSpace& space) {
    bool exact = !t.rounds.empty();
    for (const auto& r : t.rounds) exact = exact && r.xi.exact.has_value();

    for (const auto& r : t.rounds) {
        json rec;
        rec["k"] = r.k;
        rec["entered"] = r.entered ? json(*r.entered) : json(nullptr);
        rec["xi"] = format_price(r.xi);
        rec["omega"] = sorted_ids(space, r.omega);
        json chat = json::array();
        for (const auto& c : r.chat)
            chat.push_back({{"sender", c.sender}, {"claim", sorted_ids(space, c.claim)}, {"verdict", to_string(c.verdict)}});
        rec["chat"] = chat;
        if (!r.substeps.empty()) {
            json sub = json::array();
            for (double s : r.substeps) sub.push_back(format_probability(s));
            rec["substeps"] = sub;
        }
        out << rec.dump() << '\n';
    }
    json term;
    term["k_infinity"] = t.k_infinity;
    term["final_price"] = t.rounds.empty() ? format_probability(t.resolution.final_price)
                                           : format_price(t.final_round().xi);
    term["theta"] = t.resolution.theta;
    term["seed"] = t.seed;
    term["true_atom"] = space.ids().at(t.true_atom);
    term["exact"] = exact;
    term["fingerprint"] = t.fingerprint;
    if (t.degenerate) term["degenerate"] = t.degenerate_reason;
    out << term.dump() << '\n';
}

std::string transcript_to_string(const Transcript& t, const SampleSpace& space) {
    std::ostringstream ss;
    write_transcript(ss, t, space);
    return ss.str();
}

Transcript read_transcript(std::istream& in, const ScenarioConfig& scenario) {
    std::vector<json> rounds;
    std::optional<json> term;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (term) throw ParseError("line " + std::to_string(lineno) + ": record after the terminal record");
        json rec;
        try {
            rec = json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
        }
        if (!rec.is_object()) throw ParseError("line " + std::to_string(lineno) + ": expected an object");
        if (rec.contains("k_infinity")) {
            term = std::move(rec);
        } else {
            rounds.push_back(std::move(rec));
        }
    }
    if (!term) throw ParseError("missing terminal record");

    Transcript t;
    try {
        const SampleSpace& base = scenario.space;
        const auto true_id = term->at("true_atom").get<std::string>();
        t.true_atom = base.index_of(true_id);
        const SampleSpace space = base.with_true_atom(t.true_atom);
        const bool exact = term->value("exact", false);
        t.k_infinity = term->at("k_infinity").get<std::int64_t>();
        t.seed = term->at("seed").get<std::uint64_t>();
        t.fingerprint = term->value("fingerprint", std::string());
        if (term->contains("degenerate")) {
            t.degenerate = true;
            t.degenerate_reason = term->at("degenerate").get<std::string>();
        }
        t.resolution.theta = term->at("theta").get<int>();

        auto price_of = [&](const std::string& s) {
            const Rational r = parse_rational(s);
            return exact ? Price::of(r) : Price::of(to_double(r));
        };

        std::vector<std::string> members = initial_members(scenario, space);
        for (std::size_t i = 0; i < rounds.size(); ++i) {
            const json& rec = rounds[i];
            const std::string where = "round record " + std::to_string(i + 1);
            RoundRecord r;
            r.k = rec.at("k").get<std::int64_t>();
            if (!rec.at("entered").is_null()) {
                r.entered = rec.at("entered").get<std::string>();
                members.push_back(*r.entered);
            }
            r.members = members;
            r.xi = price_of(rec.at("xi").get<std::string>());
            r.omega = event_of(space, rec.at("omega"), where + ".omega");
            for (const auto& c : rec.at("chat")) {
                const auto verdict = c.at("verdict").get<std::string>();
                r.chat.push_back({c.at("sender").get<std::string>(), event_of(space, c.at("claim"), where + ".chat"),
                                  verdict == "VERIFIED" ? Verdict::Verified : Verdict::Rejected});
            }
            if (rec.contains("substeps")) {
                for (const auto& s : rec.at("substeps")) r.substeps.push_back(std::stod(s.get<std::string>()));
            }
            t.rounds.push_back(std::move(r));
        }
        const Price final_price = price_of(term->at("final_price").get<std::string>());
        t.resolution.final_price = final_price.value;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("transcript: ") + e.what());
    } catch (const InvalidSpace& e) {
        throw ParseError(std::string("transcript: ") + e.what());
    }
    if (t.rounds.empty()) throw ParseError("transcript has no round records");
    return t;
}

Transcript parse_transcript(const std::string& text, const ScenarioConfig& scenario) {
    std::istringstream ss(text);
    return read_transcript(ss, scenario);
}

}  // namespace srpm
