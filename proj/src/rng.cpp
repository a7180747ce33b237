#include "srpm/rng.hpp"

#include <numeric>
#include <stdexcept>

namespace srpm {

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below(0)");
    // rejection sampling keeps the result unbiased
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
        x = next();
    } while (x >= limit);
    return x % n;
}

std::size_t Rng::categorical(std::span<const double> weights) {
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(total > 0)) throw std::invalid_argument("categorical weights sum to zero");
    const double u = uniform() * total;
    double acc = 0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0) continue;
        acc += weights[i];
        last_positive = i;
        if (u < acc) return i;
    }
    return last_positive;
}

}  // namespace srpm
