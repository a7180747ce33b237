#pragma once

// Line-delimited transcript records, one JSON object per line with a fixed key
// order:
//
//   {"k":1,"entered":null,"xi":"1/3","omega":["a","b","h"],"chat":[]}
//   {"k":2,"entered":"notA","xi":"1/2","omega":["b","h"],
//    "chat":[{"sender":"notA","claim":["b","h"],"verdict":"VERIFIED"}]}
//   ...
//   {"k_infinity":3,"final_price":"1","theta":1,"seed":7,"true_atom":"h",
//    "exact":true,"fingerprint":"..."}
//
// Atom lists are sorted by id. Prices are decimal strings with 12 significant
// digits, or exact fractions when the run carried exact prices ("exact":true).
// Multi-unit rounds add "substeps" (intermediate prices); degenerate runs add
// "degenerate" to the terminal record.

#include "srpm/protocol.hpp"

#include <iosfwd>
#include <string>

namespace srpm {

std::string format_probability(double p);
std::string format_price(const Price& p);

void write_transcript(std::ostream& out, const Transcript& t, const SampleSpace& space);
std::string transcript_to_string(const Transcript& t, const SampleSpace& space);

/// Inverse of write_transcript. Members are rebuilt from the scenario and the
/// entry sequence. Throws ParseError on malformed input.
Transcript read_transcript(std::istream& in, const ScenarioConfig& scenario);
Transcript parse_transcript(const std::string& text, const ScenarioConfig& scenario);

}  // namespace srpm
