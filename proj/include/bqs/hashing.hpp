#pragma once

// The two-universal class F_n of hash functions {0,1}^n -> {0,1}: linear
// inner-product functions f_r(x) = r.x over GF(2), with r drawn uniformly.
//
// A FIXED linear f is insecure as a mask (the Bell-measurement attack learns
// any fixed linear function of x with no quantum memory); the protocols only
// ever use a fresh uniform f announced after the memory bound, which is the
// setting the privacy-amplification theorem covers. The all-zero descriptor
// stays in the family so collision counts are exactly |F|/2; its 2^-n weight
// is absorbed by the amplification bound.

#include "bqs/bitstring.hpp"
#include "bqs/report.hpp"
#include "bqs/rng.hpp"

namespace bqs {

struct HashFn {
    int n = 0;
    BitString r;  // descriptor

    int eval(const BitString& x) const;       // r.x over GF(2)
    std::string descriptor_hex() const { return r.to_hex(); }
};

HashFn sample_hash(int n, Rng& rng);
HashFn hash_from_descriptor(const BitString& r);

// Counts collisions |{f : f(x) = f(y)}| by brute force over all 2^n
// descriptors; exhaustive over pairs for n <= 8, randomized pair sampling
// above that (n <= 12). Passes iff every checked pair collides under exactly
// half the family.
BoundReport verify_two_universal(int n, Rng& rng);

}  // namespace bqs
