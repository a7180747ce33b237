#pragma once

// Scenario files. The format is JSON:
//
//   {
//     "name": "exm",
//     "atoms": [{"id": "h", "weight": "1/3"}, ...],     weights: fraction strings or numbers
//     "true_atom": "h",
//     "true_atom_sampling": {"mode": "fixed" | "prior", "restrict_to": ["h", ...]},
//     "hypothesis": ["h"],
//     "experts": [{"id": "notA", "policy": "compliant",
//                  "partition": [["h", "b"], ["a"]]        or
//                  "info": ["h", "b"]                      (binary partition {info, rest}) or
//                  "units": [[["h"], ["a", "b"]], ...],    (compliant_multiunit)
//                  "push": 0.2}],                          (manipulator only)
//     "market": {"liquidity_b", "endowment", "crowd_size", "inactivity_threshold",
//                "mode", "tick_rate", "tick_tolerance", "budget_fraction",
//                "entry_order", "collateral_factor"},
//     "numerics": {"epsilon", "rational"},
//     "reward_pool", "reward_precision", "seed"
//   }
//
// Only "atoms", "true_atom", "hypothesis" and "experts" are required. Unknown
// fields are rejected.

#include "srpm/scenario.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <string_view>

namespace srpm {

ScenarioConfig load_scenario(const std::filesystem::path& path);
ScenarioConfig parse_scenario(std::string_view text);
ScenarioConfig scenario_from_json(const nlohmann::ordered_json& doc);

/// Canonical form: every field present, fixed key order, exact weights.
nlohmann::ordered_json scenario_to_json(const ScenarioConfig& scenario);

/// FNV-1a 64 of the canonical dump, as 16 lowercase hex digits.
std::string scenario_fingerprint(const ScenarioConfig& scenario);

}  // namespace srpm
