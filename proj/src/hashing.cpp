#include "bqs/hashing.hpp"

#include <stdexcept>

namespace bqs {

int HashFn::eval(const BitString& x) const {
    if (static_cast<int>(x.size()) != n)
        throw std::invalid_argument("HashFn::eval: input length mismatch");
    return r.dot(x);
}

HashFn sample_hash(int n, Rng& rng) {
    if (n < 1) throw std::invalid_argument("sample_hash: n must be >= 1");
    return HashFn{n, BitString::random(static_cast<std::size_t>(n), rng)};
}

HashFn hash_from_descriptor(const BitString& r) {
    if (r.size() == 0) throw std::invalid_argument("hash_from_descriptor: empty descriptor");
    return HashFn{static_cast<int>(r.size()), r};
}

BoundReport verify_two_universal(int n, Rng& rng) {
    if (n < 1 || n > 12) throw std::invalid_argument("verify_two_universal: n must be in [1,12]");
    const std::uint64_t family = 1ULL << n;
    const std::uint64_t target = family / 2;

    std::uint64_t max_collisions = 0;
    std::uint64_t min_collisions = family;
    long pairs_checked = 0;

    auto count_pair = [&](std::uint64_t xv, std::uint64_t yv) {
        const BitString x = BitString::from_value(xv, static_cast<std::size_t>(n));
        const BitString y = BitString::from_value(yv, static_cast<std::size_t>(n));
        std::uint64_t collisions = 0;
        for (std::uint64_t rv = 0; rv < family; ++rv) {
            const HashFn f = hash_from_descriptor(BitString::from_value(rv, static_cast<std::size_t>(n)));
            collisions += (f.eval(x) == f.eval(y));
        }
        max_collisions = std::max(max_collisions, collisions);
        min_collisions = std::min(min_collisions, collisions);
        ++pairs_checked;
    };

    const bool exhaustive = n <= 8;
    if (exhaustive) {
        for (std::uint64_t xv = 0; xv < family; ++xv)
            for (std::uint64_t yv = xv + 1; yv < family; ++yv) count_pair(xv, yv);
    } else {
        const int samples = 2000;
        for (int s = 0; s < samples; ++s) {
            const std::uint64_t xv = rng.below(family);
            std::uint64_t yv;
            do {
                yv = rng.below(family);
            } while (yv == xv);
            count_pair(xv, yv);
        }
    }

    BoundReport rep = exact_report("two_universal_collision_fraction",
                                   static_cast<double>(max_collisions) / static_cast<double>(family),
                                   0.5, 0.0);
    rep.method = exhaustive ? "exact" : "monte-carlo";
    rep.trials = pairs_checked;
    rep.seed = rng.seed();
    rep.note = "min collision count " + std::to_string(min_collisions) + ", max " +
               std::to_string(max_collisions) + ", family " + std::to_string(family) +
               (min_collisions == target && max_collisions == target ? "; exactly |F|/2 everywhere"
                                                                     : "");
    return rep;
}

}  // namespace bqs
