#pragma once

// Finite probability spaces: weighted atoms, events as atom sets, partitions,
// and the direct-argument classification of information events.

#include <boost/dynamic_bitset.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace srpm {

using Rational = boost::multiprecision::cpp_rational;

double to_double(const Rational& r);

/// Parses "1/3", "0.25", "2" or "-1e-3" into an exact rational.
Rational parse_rational(std::string_view text);

/// Exact fraction rendering, e.g. "1/2", "1", "0".
std::string format_rational(const Rational& r);

/// A set of atom indices of a fixed-size sample space.
class Event {
public:
    Event() = default;

    static Event empty(std::size_t n_atoms);
    static Event full(std::size_t n_atoms);
    static Event of(std::size_t n_atoms, std::span<const std::size_t> members);
    static Event of(std::size_t n_atoms, std::initializer_list<std::size_t> members);

    std::size_t universe_size() const { return bits_.size(); }
    std::size_t count() const { return bits_.count(); }
    bool is_empty() const { return bits_.none(); }
    bool contains(std::size_t atom) const { return atom < bits_.size() && bits_.test(atom); }
    void insert(std::size_t atom);
    void erase(std::size_t atom);

    /// Member indices in increasing order.
    std::vector<std::size_t> indices() const;

    Event complement() const;
    bool is_subset_of(const Event& other) const;
    bool intersects(const Event& other) const;

    friend Event operator&(const Event& a, const Event& b);
    friend Event operator|(const Event& a, const Event& b);
    /// Set difference a \ b.
    friend Event operator-(const Event& a, const Event& b);
    friend bool operator==(const Event& a, const Event& b) = default;

private:
    explicit Event(boost::dynamic_bitset<> bits) : bits_(std::move(bits)) {}

    boost::dynamic_bitset<> bits_;
};

/// Finite weighted atoms with a designated true atom. Immutable once built.
class SampleSpace {
public:
    /// Weights must sum to exactly one.
    static SampleSpace exact(std::vector<std::string> ids, std::vector<Rational> weights,
                             std::size_t true_atom);

    /// Weights must sum to one within 1e-12; they are then normalized exactly.
    static SampleSpace approximate(std::vector<std::string> ids, std::vector<Rational> weights,
                                   std::size_t true_atom);

    std::size_t size() const { return ids_.size(); }
    const std::vector<std::string>& ids() const { return ids_; }
    const std::vector<Rational>& weights() const { return weights_; }
    const Rational& weight(std::size_t atom) const { return weights_.at(atom); }
    std::size_t true_atom() const { return true_atom_; }

    /// Index of the atom with this identifier; throws InvalidSpace if absent.
    std::size_t index_of(std::string_view id) const;

    /// Same atoms and weights with another realized state.
    SampleSpace with_true_atom(std::size_t atom) const;

    Event full() const { return Event::full(size()); }
    Event event(std::initializer_list<std::string_view> ids) const;
    Event event(std::span<const std::string> ids) const;
    std::vector<std::string> atom_ids(const Event& e) const;

private:
    SampleSpace(std::vector<std::string> ids, std::vector<Rational> weights, std::size_t true_atom);

    std::vector<std::string> ids_;
    std::vector<Rational> weights_;
    std::size_t true_atom_ = 0;
};

/// Pairwise disjoint, nonempty cells covering every atom.
class Partition {
public:
    explicit Partition(std::vector<Event> cells);

    static Partition trivial(std::size_t n_atoms);
    static Partition singletons(std::size_t n_atoms);
    /// {info, complement of info}, or the trivial partition when info is everything.
    static Partition binary(const Event& info);

    const std::vector<Event>& cells() const { return cells_; }
    std::size_t universe_size() const { return cells_.front().universe_size(); }
    bool has_cell(const Event& e) const;
    const Event& cell_containing(std::size_t atom) const;

    /// Common refinement (meet) of several partitions of the same space.
    static Partition meet(std::span<const Partition> parts);

private:
    std::vector<Event> cells_;
};

enum class DirectArgumentClass { SubsetH, SupersetH, SubsetNotH, SupersetNotH, None };

std::string_view to_string(DirectArgumentClass c);

Rational prob(const SampleSpace& space, const Event& e);

/// pi(target | given); throws ZeroConditioningEvent when pi(given) = 0.
Rational cond_prob(const SampleSpace& space, const Event& target, const Event& given);

/// The cell of `partition` holding the true atom.
Event realized_info(const Partition& partition, std::size_t true_atom);

/// Nesting of `info` against h and its complement, judged up to null sets.
/// Precedence when several hold: SubsetH, SubsetNotH, SupersetH, SupersetNotH.
DirectArgumentClass classify_direct_argument(const SampleSpace& space, const Event& info,
                                             const Event& h);

bool is_null(const SampleSpace& space, const Event& e);

}  // namespace srpm
