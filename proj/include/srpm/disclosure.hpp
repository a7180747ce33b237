#pragma once

// The public chat: verification of disclosed information against an
// omniscient referee, and the public-information update it drives.

#include "srpm/world_model.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace srpm {

enum class Verdict { Verified, Rejected };

std::string_view to_string(Verdict v);

struct ChatMessage {
    std::string sender;
    Event claimed_info;
    std::int64_t round = 0;
    Verdict verdict = Verdict::Rejected;
};

/// Omega_k together with the verified messages that produced it.
struct PublicState {
    Event omega;
    std::int64_t round = 1;
    std::vector<ChatMessage> history;

    static PublicState initial(const SampleSpace& space);
};

/// Verified iff the claim is a cell of the sender's partition and holds the true atom.
Verdict verify_disclosure(const SampleSpace& space, const Partition& sender_partition,
                          const ChatMessage& msg);

/// Same check against a sender who holds several independently provable units.
Verdict verify_disclosure(const SampleSpace& space, std::span<const Partition> unit_partitions,
                          const ChatMessage& msg);

/// omega_{k+1} = omega_k & claim. Throws NotVerified for anything not verified.
PublicState apply_disclosure(const PublicState& pub, const ChatMessage& msg);

/// omega_{k+1} = omega_k.
PublicState apply_silence(const PublicState& pub);

/// Order in which to disclose `unit_cells` so that the summed absolute move of
/// pi(H | public) is maximal; ties go to the lexicographically smallest order.
/// Throws UnitsInconsistent unless the units intersect to exactly `info`.
std::vector<std::size_t> split_units(const SampleSpace& space, const Event& h, const Event& info,
                                     const PublicState& pub, std::span<const Event> unit_cells);

/// Summed |price move| of disclosing units in `order`, starting from `pub`.
Rational trajectory_length(const SampleSpace& space, const Event& h, const PublicState& pub,
                           std::span<const Event> unit_cells, std::span<const std::size_t> order);

}  // namespace srpm
