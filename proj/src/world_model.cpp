#include "srpm/world_model.hpp"

#include "srpm/errors.hpp"

#include <algorithm>
#include <charconv>
#include <set>

namespace srpm {

double to_double(const Rational& r) { return r.convert_to<double>(); }

namespace {

using boost::multiprecision::cpp_int;

cpp_int pow10(unsigned n) {
    cpp_int p = 1;
    for (unsigned i = 0; i < n; ++i) p *= 10;
    return p;
}

Rational parse_decimal(std::string_view text) {
    bool negative = false;
    std::size_t pos = 0;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
        negative = text[pos] == '-';
        ++pos;
    }
    cpp_int mantissa = 0;
    int exponent = 0;
    bool any_digit = false;
    bool seen_point = false;
    for (; pos < text.size(); ++pos) {
        char c = text[pos];
        if (c >= '0' && c <= '9') {
            mantissa = mantissa * 10 + (c - '0');
            if (seen_point) --exponent;
            any_digit = true;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else {
            break;
        }
    }
    if (!any_digit) throw std::invalid_argument("not a number: " + std::string(text));
    if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
        int e = 0;
        std::string_view rest = text.substr(pos + 1);
        if (!rest.empty() && rest.front() == '+') rest.remove_prefix(1);
        auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), e);
        if (ec != std::errc{} || ptr != rest.data() + rest.size())
            throw std::invalid_argument("bad exponent: " + std::string(text));
        exponent += e;
        pos = text.size();
    }
    if (pos != text.size()) throw std::invalid_argument("trailing characters: " + std::string(text));
    Rational r = exponent >= 0 ? Rational(mantissa * pow10(unsigned(exponent)))
                               : Rational(mantissa, pow10(unsigned(-exponent)));
    return negative ? -r : r;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    auto slash = text.find('/');
    if (slash == std::string_view::npos) return parse_decimal(text);
    Rational num = parse_decimal(text.substr(0, slash));
    Rational den = parse_decimal(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator: " + std::string(text));
    return num / den;
}

std::string format_rational(const Rational& r) {
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

// ---------------------------------------------------------------------------
// Event

Event Event::empty(std::size_t n_atoms) { return Event(boost::dynamic_bitset<>(n_atoms)); }

Event Event::full(std::size_t n_atoms) {
    boost::dynamic_bitset<> bits(n_atoms);
    bits.set();
    return Event(std::move(bits));
}

Event Event::of(std::size_t n_atoms, std::span<const std::size_t> members) {
    Event e = empty(n_atoms);
    for (auto m : members) e.insert(m);
    return e;
}

Event Event::of(std::size_t n_atoms, std::initializer_list<std::size_t> members) {
    return of(n_atoms, std::span<const std::size_t>(members.begin(), members.size()));
}

void Event::insert(std::size_t atom) {
    if (atom >= bits_.size()) throw InvalidSpace("atom index " + std::to_string(atom) + " out of range");
    bits_.set(atom);
}

void Event::erase(std::size_t atom) {
    if (atom < bits_.size()) bits_.reset(atom);
}

std::vector<std::size_t> Event::indices() const {
    std::vector<std::size_t> out;
    out.reserve(bits_.count());
    for (auto i = bits_.find_first(); i != boost::dynamic_bitset<>::npos; i = bits_.find_next(i))
        out.push_back(i);
    return out;
}

Event Event::complement() const { return Event(~bits_); }

bool Event::is_subset_of(const Event& other) const { return bits_.is_subset_of(other.bits_); }

bool Event::intersects(const Event& other) const { return bits_.intersects(other.bits_); }

Event operator&(const Event& a, const Event& b) { return Event(a.bits_ & b.bits_); }
Event operator|(const Event& a, const Event& b) { return Event(a.bits_ | b.bits_); }
Event operator-(const Event& a, const Event& b) { return Event(a.bits_ - b.bits_); }

// ---------------------------------------------------------------------------
// SampleSpace

SampleSpace::SampleSpace(std::vector<std::string> ids, std::vector<Rational> weights,
                         std::size_t true_atom)
    : ids_(std::move(ids)), weights_(std::move(weights)), true_atom_(true_atom) {
    if (ids_.empty()) throw InvalidSpace("sample space has no atoms");
    if (ids_.size() != weights_.size()) throw InvalidSpace("atom and weight counts differ");
    std::set<std::string_view> seen;
    for (const auto& id : ids_) {
        if (!seen.insert(id).second) throw InvalidSpace("duplicated atom id '" + id + "'");
    }
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        if (weights_[i] < 0) throw InvalidSpace("negative weight on atom '" + ids_[i] + "'");
    }
    if (true_atom_ >= ids_.size()) throw InvalidSpace("true atom out of range");
    if (weights_[true_atom_] == 0) throw InvalidSpace("true atom '" + ids_[true_atom_] + "' has zero weight");
}

SampleSpace SampleSpace::exact(std::vector<std::string> ids, std::vector<Rational> weights,
                               std::size_t true_atom) {
    Rational total = 0;
    for (const auto& w : weights) total += w;
    if (total != 1) throw InvalidSpace("weights sum to " + format_rational(total) + ", not 1");
    return SampleSpace(std::move(ids), std::move(weights), true_atom);
}

SampleSpace SampleSpace::approximate(std::vector<std::string> ids, std::vector<Rational> weights,
                                     std::size_t true_atom) {
    Rational total = 0;
    for (const auto& w : weights) total += w;
    Rational gap = total - 1;
    if (gap < 0) gap = -gap;
    if (gap > Rational(1, 1000000000000LL))
        throw InvalidSpace("weights sum to " + std::to_string(to_double(total)) +
                           ", not 1 within 1e-12");
    for (auto& w : weights) w /= total;
    return SampleSpace(std::move(ids), std::move(weights), true_atom);
}

std::size_t SampleSpace::index_of(std::string_view id) const {
    auto it = std::find(ids_.begin(), ids_.end(), id);
    if (it == ids_.end()) throw InvalidSpace("unknown atom id '" + std::string(id) + "'");
    return std::size_t(it - ids_.begin());
}

SampleSpace SampleSpace::with_true_atom(std::size_t atom) const {
    return SampleSpace(ids_, weights_, atom);
}

Event SampleSpace::event(std::initializer_list<std::string_view> ids) const {
    Event e = Event::empty(size());
    for (auto id : ids) e.insert(index_of(id));
    return e;
}

Event SampleSpace::event(std::span<const std::string> ids) const {
    Event e = Event::empty(size());
    for (const auto& id : ids) e.insert(index_of(id));
    return e;
}

std::vector<std::string> SampleSpace::atom_ids(const Event& e) const {
    std::vector<std::string> out;
    for (auto i : e.indices()) out.push_back(ids_.at(i));
    return out;
}

// ---------------------------------------------------------------------------
// Partition

Partition::Partition(std::vector<Event> cells) : cells_(std::move(cells)) {
    if (cells_.empty()) throw InvalidSpace("partition has no cells");
    const std::size_t n = cells_.front().universe_size();
    Event covered = Event::empty(n);
    for (const auto& cell : cells_) {
        if (cell.universe_size() != n) throw InvalidSpace("partition cells belong to different spaces");
        if (cell.is_empty()) throw InvalidSpace("partition has an empty cell");
        if (cell.intersects(covered)) throw InvalidSpace("partition cells overlap");
        covered = covered | cell;
    }
    if (covered.count() != n) throw InvalidSpace("partition cells do not cover every atom");
}

Partition Partition::trivial(std::size_t n_atoms) { return Partition({Event::full(n_atoms)}); }

Partition Partition::singletons(std::size_t n_atoms) {
    std::vector<Event> cells;
    for (std::size_t i = 0; i < n_atoms; ++i) cells.push_back(Event::of(n_atoms, {i}));
    return Partition(std::move(cells));
}

Partition Partition::binary(const Event& info) {
    Event rest = info.complement();
    if (rest.is_empty()) return trivial(info.universe_size());
    return Partition({info, rest});
}

bool Partition::has_cell(const Event& e) const {
    return std::find(cells_.begin(), cells_.end(), e) != cells_.end();
}

const Event& Partition::cell_containing(std::size_t atom) const {
    for (const auto& cell : cells_) {
        if (cell.contains(atom)) return cell;
    }
    throw InvalidSpace("atom " + std::to_string(atom) + " not covered by partition");
}

Partition Partition::meet(std::span<const Partition> parts) {
    if (parts.empty()) throw InvalidSpace("meet of no partitions");
    std::vector<Event> cells = parts.front().cells();
    for (const auto& p : parts.subspan(1)) {
        std::vector<Event> next;
        for (const auto& a : cells) {
            for (const auto& b : p.cells()) {
                Event c = a & b;
                if (!c.is_empty()) next.push_back(std::move(c));
            }
        }
        cells = std::move(next);
    }
    return Partition(std::move(cells));
}

// ---------------------------------------------------------------------------
// measure

std::string_view to_string(DirectArgumentClass c) {
    switch (c) {
        case DirectArgumentClass::SubsetH: return "SUBSET_H";
        case DirectArgumentClass::SupersetH: return "SUPERSET_H";
        case DirectArgumentClass::SubsetNotH: return "SUBSET_NOT_H";
        case DirectArgumentClass::SupersetNotH: return "SUPERSET_NOT_H";
        case DirectArgumentClass::None: return "NONE";
    }
    return "NONE";
}

Rational prob(const SampleSpace& space, const Event& e) {
    if (e.universe_size() != space.size()) throw InvalidSpace("event does not belong to this space");
    Rational total = 0;
    for (auto i : e.indices()) total += space.weight(i);
    return total;
}

bool is_null(const SampleSpace& space, const Event& e) { return prob(space, e) == 0; }

Rational cond_prob(const SampleSpace& space, const Event& target, const Event& given) {
    Rational denom = prob(space, given);
    if (denom == 0) throw ZeroConditioningEvent("conditioning on a null event");
    return prob(space, target & given) / denom;
}

Event realized_info(const Partition& partition, std::size_t true_atom) {
    return partition.cell_containing(true_atom);
}

DirectArgumentClass classify_direct_argument(const SampleSpace& space, const Event& info,
                                             const Event& h) {
    if (is_null(space, info)) throw ZeroConditioningEvent("information event is null");
    const Event not_h = h.complement();
    if (is_null(space, info - h)) return DirectArgumentClass::SubsetH;
    if (is_null(space, info & h)) return DirectArgumentClass::SubsetNotH;
    if (is_null(space, h - info)) return DirectArgumentClass::SupersetH;
    if (is_null(space, not_h - info)) return DirectArgumentClass::SupersetNotH;
    return DirectArgumentClass::None;
}

}  // namespace srpm
