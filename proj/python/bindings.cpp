#include "srpm/batch.hpp"
#include "srpm/errors.hpp"
#include "srpm/protocol.hpp"
#include "srpm/revision.hpp"
#include "srpm/scenario_io.hpp"
#include "srpm/transcript_io.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace srpm;

namespace {

py::list atom_list(const SampleSpace& space, const Event& e) { return py::cast(space.atom_ids(e)); }

py::dict round_dict(const RoundRecord& r, const SampleSpace& space) {
    py::dict d;
    d["k"] = r.k;
    d["entered"] = r.entered ? py::cast(*r.entered) : py::none();
    d["members"] = r.members;
    d["xi"] = r.xi.value;
    d["xi_exact"] = r.xi.exact ? py::cast(format_rational(*r.xi.exact)) : py::none();
    d["omega"] = atom_list(space, r.omega);
    py::list chat;
    for (const auto& c : r.chat) {
        py::dict m;
        m["sender"] = c.sender;
        m["claim"] = atom_list(space, c.claim);
        m["verdict"] = std::string(to_string(c.verdict));
        chat.append(m);
    }
    d["chat"] = chat;
    d["substeps"] = r.substeps;
    return d;
}

RevisionScenario revision_of(const std::string& ph, const std::string& pa, const std::string& pb) {
    return {parse_rational(ph), parse_rational(pa), parse_rational(pb)};
}

}  // namespace

PYBIND11_MODULE(_srpm, m) {
    m.doc() = "Entangled prediction market simulator";

    static py::exception<Error> base(m, "SrpmError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            PyErr_SetString(base.ptr(), e.what());
        }
    });

    py::class_<ScenarioConfig>(m, "Scenario")
        .def_readonly("name", &ScenarioConfig::name)
        .def_readonly("seed", &ScenarioConfig::seed)
        .def_property_readonly("atoms", [](const ScenarioConfig& s) { return s.space.ids(); })
        .def_property_readonly("experts",
                               [](const ScenarioConfig& s) {
                                   std::vector<std::string> ids;
                                   for (const auto& e : s.experts) ids.push_back(e.id);
                                   return ids;
                               })
        .def_property_readonly("fingerprint", [](const ScenarioConfig& s) { return scenario_fingerprint(s); })
        .def_property_readonly("fully_compliant", &ScenarioConfig::fully_compliant)
        .def("to_json", [](const ScenarioConfig& s) { return scenario_to_json(s).dump(2); })
        .def(
            "with_mode",
            [](ScenarioConfig s, const std::string& mode) {
                s.market.mode = parse_price_mode(mode);
                return s;
            },
            py::arg("mode"));

    m.def("load_scenario", [](const std::string& path) { return load_scenario(path); }, py::arg("path"));
    m.def("parse_scenario", [](const std::string& text) { return parse_scenario(text); }, py::arg("text"));
    m.def(
        "random_scenario",
        [](std::uint64_t seed, std::size_t n_atoms, std::size_t n_experts, bool direct_arguments) {
            ScenarioConstraints c;
            c.direct_arguments = direct_arguments;
            return random_scenario(seed, n_atoms, n_experts, c);
        },
        py::arg("seed"), py::arg("n_atoms"), py::arg("n_experts"), py::arg("direct_arguments") = false);

    py::class_<Transcript>(m, "Transcript")
        .def_readonly("k_infinity", &Transcript::k_infinity)
        .def_readonly("seed", &Transcript::seed)
        .def_readonly("degenerate", &Transcript::degenerate)
        .def_property_readonly("theta", [](const Transcript& t) { return t.resolution.theta; })
        .def_property_readonly("final_price", [](const Transcript& t) { return t.final_round().xi.value; })
        .def_property_readonly("prices",
                               [](const Transcript& t) {
                                   std::vector<double> p;
                                   for (const auto& r : t.rounds) p.push_back(r.xi.value);
                                   return p;
                               })
        .def_property_readonly("final_balances", [](const Transcript& t) {
            py::dict d;
            for (const auto& b : t.final_balances) d[py::str(b.agent)] = b.amount;
            return d;
        });

    m.def("run_market", &run_market, py::arg("scenario"), py::arg("seed"));
    m.def(
        "rounds",
        [](const Transcript& t, const ScenarioConfig& s) {
            const SampleSpace space = s.space.with_true_atom(t.true_atom);
            py::list out;
            for (const auto& r : t.rounds) out.append(round_dict(r, space));
            return out;
        },
        py::arg("transcript"), py::arg("scenario"));
    m.def(
        "transcript_records",
        [](const Transcript& t, const ScenarioConfig& s) {
            return transcript_to_string(t, s.space.with_true_atom(t.true_atom));
        },
        py::arg("transcript"), py::arg("scenario"));
    m.def("parse_transcript", &parse_transcript, py::arg("text"), py::arg("scenario"));

    m.def(
        "check",
        [](const Transcript& t, const ScenarioConfig& s, std::optional<double> epsilon) {
            const CheckReport r = check_all(t, s, epsilon.value_or(effective_epsilon(s)));
            py::dict d;
            d["ent1"] = r.ent1;
            d["ent2"] = r.ent2;
            d["ent3a"] = r.ent3a;
            d["ent3b"] = r.ent3b;
            d["structure"] = r.structure;
            d["final_state"] = r.final_state_ok;
            d["t2"] = std::string(to_string(r.t2_class));
            d["passed"] = r.passed();
            d["first_failing_round"] = r.first_failing_round ? py::cast(*r.first_failing_round) : py::none();
            d["diagnostics"] = r.diagnostics;
            return d;
        },
        py::arg("transcript"), py::arg("scenario"), py::arg("epsilon") = py::none());

    m.def(
        "run_batch",
        [](const ScenarioConfig& s, std::int64_t n_runs, std::uint64_t seed, std::int64_t parallelism,
           bool checkers) {
            BatchOptions o;
            o.parallelism = parallelism;
            o.run_checkers = checkers;
            RunReport rep;
            {
                py::gil_scoped_release release;
                rep = run_batch(s, n_runs, seed, o);
            }
            py::list out;
            for (const auto& r : rep.records) {
                py::dict d;
                d["index"] = r.index;
                d["seed"] = r.seed;
                d["k_infinity"] = r.k_infinity;
                d["final_price"] = r.final_price;
                d["theta"] = r.theta;
                d["checks_passed"] = r.checks_passed ? py::cast(*r.checks_passed) : py::none();
                d["t2"] = r.t2_class;
                d["error"] = r.error;
                out.append(d);
            }
            return out;
        },
        py::arg("scenario"), py::arg("n_runs"), py::arg("seed"), py::arg("parallelism") = 1,
        py::arg("checkers") = false);

    m.def(
        "calibration",
        [](const ScenarioConfig& s, std::int64_t n_runs, std::uint64_t seed) {
            const auto cal = calibration_report(run_batch(s, n_runs, seed).records);
            py::list buckets;
            for (const auto& b : cal.buckets) {
                if (b.count == 0) continue;
                py::dict d;
                d["lower"] = b.lower;
                d["upper"] = b.upper;
                d["count"] = b.count;
                d["mean_price"] = b.mean_price;
                d["frequency"] = b.frequency;
                d["ci"] = py::make_tuple(b.ci_low, b.ci_high);
                d["status"] = std::string(to_string(b.status));
                buckets.append(d);
            }
            return py::make_tuple(cal.passed(), buckets);
        },
        py::arg("scenario"), py::arg("n_runs"), py::arg("seed"));

    m.def(
        "martingale",
        [](const ScenarioConfig& s, std::int64_t n_runs, std::uint64_t seed) {
            const auto rep = martingale_report(s, n_runs, seed);
            py::dict d;
            d["max_abs_mean"] = rep.max_abs_mean;
            d["within_3se"] = rep.within_3se;
            d["not_a_martingale_design"] = rep.not_a_martingale_design;
            py::list inc;
            for (const auto& x : rep.increments) inc.append(py::make_tuple(x.k, x.mean, x.std_error));
            d["increments"] = inc;
            return d;
        },
        py::arg("scenario"), py::arg("n_runs"), py::arg("seed"));

    m.def(
        "profit",
        [](const ScenarioConfig& s, std::int64_t n_runs, std::uint64_t seed) {
            const auto p = profit_experiment(s, n_runs, seed);
            py::dict d;
            d["compliant"] = py::make_tuple(p.compliant.mean, p.compliant.std_error);
            d["silent"] = py::make_tuple(p.silent.mean, p.silent.std_error);
            d["passed"] = p.passed();
            return d;
        },
        py::arg("scenario"), py::arg("n_runs"), py::arg("seed"));

    m.def(
        "revise",
        [](const std::string& ph, const std::string& pa, const std::string& pb) {
            const auto s = revision_of(ph, pa, pb);
            const auto r1 = round1(s);
            const auto c = market_vs_revision(s);
            py::dict d;
            d["round1"] = py::make_tuple(to_double(r1.not_a), to_double(r1.not_b), to_double(r1.crowd));
            d["disjoint"] = to_double(c.disjoint);
            d["nested"] = to_double(c.nested);
            d["uniform_overlap"] = c.uniform_overlap;
            d["market"] = to_double(c.market_price);
            d["pooled"] = to_double(c.pooled);
            return d;
        },
        py::arg("p_h") = "1/3", py::arg("p_a") = "1/3", py::arg("p_b") = "1/3");
    m.def(
        "uniform_overlap",
        [](const std::string& ph, const std::string& pa, const std::string& pb) {
            const auto v = consensus_uniform_overlap(revision_of(ph, pa, pb));
            return py::make_tuple(v.closed_form, v.quadrature);
        },
        py::arg("p_h"), py::arg("p_a"), py::arg("p_b"));
}
