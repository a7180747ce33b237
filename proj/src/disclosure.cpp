#include "srpm/disclosure.hpp"

#include "srpm/errors.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>

namespace srpm {

std::string_view to_string(Verdict v) { return v == Verdict::Verified ? "VERIFIED" : "REJECTED"; }

PublicState PublicState::initial(const SampleSpace& space) {
    return PublicState{space.full(), 1, {}};
}

Verdict verify_disclosure(const SampleSpace& space, const Partition& sender_partition,
                          const ChatMessage& msg) {
    if (msg.claimed_info.universe_size() != space.size()) return Verdict::Rejected;
    if (!msg.claimed_info.contains(space.true_atom())) return Verdict::Rejected;
    return sender_partition.has_cell(msg.claimed_info) ? Verdict::Verified : Verdict::Rejected;
}

Verdict verify_disclosure(const SampleSpace& space, std::span<const Partition> unit_partitions,
                          const ChatMessage& msg) {
    for (const auto& p : unit_partitions) {
        if (verify_disclosure(space, p, msg) == Verdict::Verified) return Verdict::Verified;
    }
    return Verdict::Rejected;
}

PublicState apply_disclosure(const PublicState& pub, const ChatMessage& msg) {
    if (msg.verdict != Verdict::Verified)
        throw NotVerified("message from '" + msg.sender + "' was not verified");
    PublicState next = pub;
    next.omega = pub.omega & msg.claimed_info;
    ++next.round;
    next.history.push_back(msg);
    return next;
}

PublicState apply_silence(const PublicState& pub) {
    PublicState next = pub;
    ++next.round;
    return next;
}

namespace {

Rational abs_diff(const Rational& a, const Rational& b) { return a > b ? a - b : b - a; }

}  // namespace

Rational trajectory_length(const SampleSpace& space, const Event& h, const PublicState& pub,
                           std::span<const Event> unit_cells, std::span<const std::size_t> order) {
    Event omega = pub.omega;
    Rational price = cond_prob(space, h, omega);
    Rational total = 0;
    for (auto u : order) {
        omega = omega & unit_cells[u];
        Rational next = cond_prob(space, h, omega);
        total += abs_diff(next, price);
        price = std::move(next);
    }
    return total;
}

std::vector<std::size_t> split_units(const SampleSpace& space, const Event& h, const Event& info,
                                     const PublicState& pub, std::span<const Event> unit_cells) {
    if (unit_cells.empty()) throw UnitsInconsistent("no units");
    if (unit_cells.size() > 20) throw UnitsInconsistent("too many units to plan exactly");
    Event meet = space.full();
    for (const auto& u : unit_cells) {
        if (!u.contains(space.true_atom())) throw UnitsInconsistent("a unit excludes the true atom");
        meet = meet & u;
    }
    if (meet != info) throw UnitsInconsistent("units do not intersect to the disclosed information");

    // The price after disclosing a set S of units depends only on S, so the
    // longest trajectory is a longest path in the subset lattice.
    const std::size_t k = unit_cells.size();
    const std::size_t n_sets = std::size_t{1} << k;
    std::vector<Rational> price(n_sets);
    for (std::size_t s = 0; s < n_sets; ++s) {
        Event omega = pub.omega;
        for (std::size_t u = 0; u < k; ++u) {
            if (s & (std::size_t{1} << u)) omega = omega & unit_cells[u];
        }
        price[s] = cond_prob(space, h, omega);
    }
    // best[s]: longest remaining trajectory once the units in s are public
    std::vector<Rational> best(n_sets);
    for (std::size_t s = n_sets - 1; s-- > 0;) {
        std::optional<Rational> top;
        for (std::size_t u = 0; u < k; ++u) {
            const std::size_t bit = std::size_t{1} << u;
            if (s & bit) continue;
            Rational v = abs_diff(price[s | bit], price[s]) + best[s | bit];
            if (!top || v > *top) top = std::move(v);
        }
        best[s] = *top;
    }
    std::vector<std::size_t> order;
    std::size_t s = 0;
    while (order.size() < k) {
        for (std::size_t u = 0; u < k; ++u) {
            const std::size_t bit = std::size_t{1} << u;
            if (s & bit) continue;
            if (abs_diff(price[s | bit], price[s]) + best[s | bit] == best[s]) {
                order.push_back(u);
                s |= bit;
                break;
            }
        }
    }
    return order;
}

}  // namespace srpm
