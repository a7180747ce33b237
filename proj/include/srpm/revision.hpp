#pragma once

// Iterated posterior announcements for the two-informed-expert example: H, A
// and B pairwise disjoint, one expert knows not-A, the other not-B. Round one
// announces pi(H | not A) and pi(H | not B); the consensus after round two
// depends on what the experts believe about how A and B relate.

#include "srpm/world_model.hpp"

#include <cmath>
#include <string_view>

namespace srpm {

enum class OverlapModel { Disjoint, Nested, UniformOverlap };
std::string_view to_string(OverlapModel m);

struct RevisionScenario {
    Rational p_h;
    Rational p_a;
    Rational p_b;

    /// Each prior in (0, 1) and p_h + p_a + p_b <= 1; throws InvalidRevisionScenario.
    /// Zero values for p_a or p_b are allowed (vacuous information).
    void validate() const;
};

struct Announcements {
    Rational not_a;  ///< pi(H | not A)
    Rational not_b;  ///< pi(H | not B)
    Rational crowd;  ///< pi(H)
};

Announcements round1(const RevisionScenario& s);

/// p_h / (1 - p_a - p_b); throws DegenerateDenominator when p_a + p_b >= 1.
Rational consensus_disjoint(const RevisionScenario& s);

/// p_h / (1 - max(p_a, p_b)).
Rational consensus_nested(const RevisionScenario& s);

struct UniformOverlapValue {
    double closed_form = 0.0;
    double quadrature = 0.0;
};

/// Expected posterior when pi(A u B) is uniform on [max(p_a, p_b), p_a + p_b]:
/// p_h ln((1 - a)/(1 - b)) / (b - a), also integrated numerically by adaptive
/// Simpson. Throws DegenerateInterval when a = b, DegenerateDenominator when b >= 1.
UniformOverlapValue consensus_uniform_overlap(const RevisionScenario& s);

/// Adaptive Simpson on [lo, hi] with absolute tolerance `tol`.
template <class F>
double adaptive_simpson(F&& f, double lo, double hi, double tol);

struct RevisionResult {
    Announcements round1;
    double consensus = 0.0;
    int steps = 2;
};

RevisionResult revise(const RevisionScenario& s, OverlapModel model);

struct MarketComparison {
    Rational market_price;
    Rational pooled;
    Rational disjoint;
    Rational nested;
    /// Closed form; the a = b limit p_h / (1 - a) when the interval collapses.
    double uniform_overlap = 0.0;
};

/// Builds the four-atom market {h, a, b, rest} with omega0 = h and the experts
/// not-A and not-B, runs it in exact instant mode and compares its final price
/// with the three consensus values. Throws std::logic_error if the market price
/// differs from the pooled posterior.
MarketComparison market_vs_revision(const RevisionScenario& s);

// ---------------------------------------------------------------------------

namespace detail {

template <class F>
double simpson_step(F& f, double a, double b, double fa, double fm, double fb, double whole, double tol,
                    int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double diff = left + right - whole;
    if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

template <class F>
double adaptive_simpson(F&& f, double lo, double hi, double tol) {
    const double fa = f(lo);
    const double fb = f(hi);
    const double fm = f(0.5 * (lo + hi));
    const double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_step(f, lo, hi, fa, fm, fb, whole, tol, 50);
}

}  // namespace srpm
