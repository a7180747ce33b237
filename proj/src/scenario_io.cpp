#include "srpm/scenario_io.hpp"

#include "srpm/errors.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace srpm {

using json = nlohmann::ordered_json;

namespace {

void reject_unknown(const json& obj, std::string_view where, std::initializer_list<std::string_view> known) {
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (auto k : known) ok = ok || key == k;
        if (!ok) throw ParseError(std::string(where) + ": unknown field '" + key + "'");
    }
}

const json& require(const json& obj, std::string_view where, const char* key) {
    if (!obj.contains(key)) throw ParseError(std::string(where) + ": missing field '" + key + "'");
    return obj.at(key);
}

template <class T>
T get(const json& v, const std::string& field) {
    try {
        return v.get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ParseError(field + ": wrong type (" + std::string(v.type_name()) + ")");
    }
}

template <class T>
void get_opt(const json& obj, const char* key, const std::string& where, T& out) {
    if (obj.contains(key)) out = get<T>(obj.at(key), where + "." + key);
}

Rational weight_of(const json& v, const std::string& field) {
    try {
        if (v.is_string()) return parse_rational(v.get<std::string>());
        if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
        if (v.is_number()) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
            return parse_rational(buf);
        }
    } catch (const Error&) {
        throw ParseError(field + ": not a number");
    }
    throw ParseError(field + ": expected a number or a fraction string");
}

Event event_of(const SampleSpace& space, const json& v, const std::string& field) {
    if (!v.is_array()) throw ParseError(field + ": expected a list of atom ids");
    Event e = Event::empty(space.size());
    for (const auto& a : v) {
        const auto id = get<std::string>(a, field);
        try {
            e.insert(space.index_of(id));
        } catch (const InvalidSpace&) {
            throw ValidationError(field + ": unknown atom '" + id + "'");
        }
    }
    return e;
}

Partition partition_of(const SampleSpace& space, const json& v, const std::string& field) {
    if (!v.is_array()) throw ParseError(field + ": expected a list of cells");
    std::vector<Event> cells;
    for (std::size_t i = 0; i < v.size(); ++i)
        cells.push_back(event_of(space, v[i], field + "[" + std::to_string(i) + "]"));
    try {
        return Partition(std::move(cells));
    } catch (const Error& e) {
        throw ValidationError(field + ": " + e.what());
    }
}

json ids_json(const SampleSpace& space, const Event& e) {
    json out = json::array();
    for (const auto& id : space.atom_ids(e)) out.push_back(id);
    return out;
}

json partition_json(const SampleSpace& space, const Partition& p) {
    json out = json::array();
    for (const auto& c : p.cells()) out.push_back(ids_json(space, c));
    return out;
}

std::size_t line_of(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
        if (text[i] == '\n') ++line;
    }
    return line;
}

}  // namespace

ScenarioConfig scenario_from_json(const json& doc) {
    if (!doc.is_object()) throw ParseError("top level: expected an object");
    reject_unknown(doc, "scenario",
                   {"name", "atoms", "true_atom", "true_atom_sampling", "hypothesis", "experts", "market",
                    "numerics", "reward_pool", "reward_precision", "seed"});

    const json& atoms = require(doc, "scenario", "atoms");
    if (!atoms.is_array() || atoms.empty()) throw ParseError("atoms: expected a nonempty list");
    std::vector<std::string> ids;
    std::vector<Rational> weights;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        const std::string where = "atoms[" + std::to_string(i) + "]";
        if (!atoms[i].is_object()) throw ParseError(where + ": expected an object");
        reject_unknown(atoms[i], where, {"id", "weight"});
        ids.push_back(get<std::string>(require(atoms[i], where, "id"), where + ".id"));
        weights.push_back(weight_of(require(atoms[i], where, "weight"), where + ".weight"));
    }
    const auto true_id = get<std::string>(require(doc, "scenario", "true_atom"), "true_atom");
    std::size_t true_atom = ids.size();
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (ids[i] == true_id) true_atom = i;
    }
    if (true_atom == ids.size()) throw ValidationError("true_atom: unknown atom '" + true_id + "'");

    std::optional<SampleSpace> space;
    try {
        space = SampleSpace::approximate(std::move(ids), std::move(weights), true_atom);
    } catch (const Error& e) {
        throw ValidationError(std::string("atoms: ") + e.what());
    }

    ScenarioConfig cfg{.space = *space, .hypothesis = event_of(*space, require(doc, "scenario", "hypothesis"), "hypothesis")};
    get_opt(doc, "name", "scenario", cfg.name);

    const json& experts = require(doc, "scenario", "experts");
    if (!experts.is_array()) throw ParseError("experts: expected a list");
    for (std::size_t i = 0; i < experts.size(); ++i) {
        const json& x = experts[i];
        std::string where = "experts[" + std::to_string(i) + "]";
        if (!x.is_object()) throw ParseError(where + ": expected an object");
        reject_unknown(x, where, {"id", "policy", "partition", "info", "units", "push"});
        ExpertSpec spec;
        spec.id = get<std::string>(require(x, where, "id"), where + ".id");
        where = "experts." + spec.id;
        if (x.contains("policy")) spec.policy = parse_policy(get<std::string>(x.at("policy"), where + ".policy"));
        const int forms = x.contains("partition") + x.contains("info") + x.contains("units");
        if (forms != 1) throw ParseError(where + ": give exactly one of partition, info, units");
        if (x.contains("partition")) {
            spec.units.push_back(partition_of(*space, x.at("partition"), where + ".partition"));
        } else if (x.contains("info")) {
            spec.units.push_back(Partition::binary(event_of(*space, x.at("info"), where + ".info")));
        } else {
            const json& units = x.at("units");
            if (!units.is_array() || units.empty()) throw ParseError(where + ".units: expected a nonempty list");
            for (std::size_t u = 0; u < units.size(); ++u)
                spec.units.push_back(partition_of(*space, units[u], where + ".units[" + std::to_string(u) + "]"));
        }
        get_opt(x, "push", where, spec.manipulator_push);
        cfg.experts.push_back(std::move(spec));
    }

    if (doc.contains("market")) {
        const json& m = doc.at("market");
        if (!m.is_object()) throw ParseError("market: expected an object");
        reject_unknown(m, "market",
                       {"liquidity_b", "endowment", "crowd_size", "inactivity_threshold", "mode", "tick_rate",
                        "tick_tolerance", "budget_fraction", "entry_order", "collateral_factor"});
        auto& p = cfg.market;
        get_opt(m, "liquidity_b", "market", p.liquidity_b);
        get_opt(m, "endowment", "market", p.endowment);
        get_opt(m, "crowd_size", "market", p.crowd_size);
        get_opt(m, "inactivity_threshold", "market", p.inactivity_threshold);
        if (m.contains("mode")) p.mode = parse_price_mode(get<std::string>(m.at("mode"), "market.mode"));
        get_opt(m, "tick_rate", "market", p.tick_rate);
        get_opt(m, "tick_tolerance", "market", p.tick_tolerance);
        get_opt(m, "budget_fraction", "market", p.budget_fraction);
        if (m.contains("entry_order"))
            p.entry_order = parse_entry_order(get<std::string>(m.at("entry_order"), "market.entry_order"));
        get_opt(m, "collateral_factor", "market", p.collateral_factor);
    }
    if (doc.contains("numerics")) {
        const json& n = doc.at("numerics");
        if (!n.is_object()) throw ParseError("numerics: expected an object");
        reject_unknown(n, "numerics", {"epsilon", "rational"});
        get_opt(n, "epsilon", "numerics", cfg.numerics.epsilon);
        get_opt(n, "rational", "numerics", cfg.numerics.rational);
    }
    if (doc.contains("true_atom_sampling")) {
        const json& s = doc.at("true_atom_sampling");
        if (!s.is_object()) throw ParseError("true_atom_sampling: expected an object");
        reject_unknown(s, "true_atom_sampling", {"mode", "restrict_to"});
        if (s.contains("mode"))
            cfg.true_atom_sampling.mode =
                parse_true_atom_mode(get<std::string>(s.at("mode"), "true_atom_sampling.mode"));
        if (s.contains("restrict_to"))
            cfg.true_atom_sampling.restrict_to =
                event_of(*space, s.at("restrict_to"), "true_atom_sampling.restrict_to");
    }
    get_opt(doc, "reward_pool", "scenario", cfg.reward_pool);
    get_opt(doc, "reward_precision", "scenario", cfg.reward_precision);
    get_opt(doc, "seed", "scenario", cfg.seed);

    try {
        cfg.validate();
    } catch (const ValidationError&) {
        throw;
    } catch (const Error& e) {
        throw ValidationError(e.what());
    }
    return cfg;
}

ScenarioConfig parse_scenario(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("line " + std::to_string(line_of(text, e.byte)) + ": " + e.what());
    }
    return scenario_from_json(doc);
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path.string() + ": cannot open");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_scenario(ss.str());
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

json scenario_to_json(const ScenarioConfig& s) {
    const SampleSpace& space = s.space;
    json doc;
    doc["name"] = s.name;
    json atoms = json::array();
    for (std::size_t i = 0; i < space.size(); ++i)
        atoms.push_back({{"id", space.ids()[i]}, {"weight", format_rational(space.weight(i))}});
    doc["atoms"] = atoms;
    doc["true_atom"] = space.ids()[space.true_atom()];
    json sampling = {{"mode", to_string(s.true_atom_sampling.mode)}};
    if (s.true_atom_sampling.restrict_to) sampling["restrict_to"] = ids_json(space, *s.true_atom_sampling.restrict_to);
    doc["true_atom_sampling"] = sampling;
    doc["hypothesis"] = ids_json(space, s.hypothesis);
    json experts = json::array();
    for (const auto& e : s.experts) {
        json x = {{"id", e.id}, {"policy", to_string(e.policy)}};
        if (e.units.size() == 1) {
            x["partition"] = partition_json(space, e.units.front());
        } else {
            json units = json::array();
            for (const auto& u : e.units) units.push_back(partition_json(space, u));
            x["units"] = units;
        }
        if (e.policy == Policy::Manipulator) x["push"] = e.manipulator_push;
        experts.push_back(x);
    }
    doc["experts"] = experts;
    const auto& m = s.market;
    doc["market"] = {{"liquidity_b", m.liquidity_b},
                     {"endowment", m.endowment},
                     {"crowd_size", m.crowd_size},
                     {"inactivity_threshold", m.inactivity_threshold},
                     {"mode", to_string(m.mode)},
                     {"tick_rate", m.tick_rate},
                     {"tick_tolerance", m.tick_tolerance},
                     {"budget_fraction", m.budget_fraction},
                     {"entry_order", to_string(m.entry_order)},
                     {"collateral_factor", m.collateral_factor}};
    doc["numerics"] = {{"epsilon", s.numerics.epsilon}, {"rational", s.numerics.rational}};
    doc["reward_pool"] = s.reward_pool;
    doc["reward_precision"] = s.reward_precision;
    doc["seed"] = s.seed;
    return doc;
}

std::string scenario_fingerprint(const ScenarioConfig& scenario) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : scenario_to_json(scenario).dump()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

}  // namespace srpm
