#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "bqs/coding.hpp"

using namespace bqs;

namespace {

// All error patterns of weight <= t on l bits.
std::vector<std::uint32_t> patterns_up_to(int l, int t) {
    std::vector<std::uint32_t> out;
    for (std::uint32_t e = 0; e < (1u << l); ++e)
        if (__builtin_popcount(e) <= t) out.push_back(e);
    return out;
}

BitString apply_pattern(const BitString& x, std::uint32_t e) {
    BitString out = x;
    for (std::size_t i = 0; i < out.size(); ++i)
        if ((e >> i) & 1) out.set(i, 1 - out[i]);
    return out;
}

}  // namespace

TEST_CASE("hamming7 syndromes: zero word, single errors, linearity") {
    const auto code = LinearCode::hamming74();
    CHECK(code.syndrome(BitString::zeros(7)) == BitString::zeros(3));

    // Syndrome of a single error at position i is the binary encoding of i+1
    // (bit j of the syndrome = bit j of i+1) -- i.e. column i of H.
    for (int i = 0; i < 7; ++i) {
        BitString e(7);
        e.set(static_cast<std::size_t>(i), 1);
        const auto syn = code.syndrome(e);
        for (int j = 0; j < 3; ++j) CHECK(syn[static_cast<std::size_t>(j)] == (((i + 1) >> j) & 1));
    }

    Rng rng(5);
    for (int t = 0; t < 100; ++t) {
        const auto x = BitString::random(14, rng);
        const auto y = BitString::random(14, rng);
        CHECK(code.syndrome(x ^ y) == (code.syndrome(x) ^ code.syndrome(y)));
    }
}

TEST_CASE("exhaustive correctness: every pattern within radius decodes, all base codes") {
    for (const auto& code : {LinearCode::repetition(3), LinearCode::repetition(5),
                             LinearCode::repetition(7), LinearCode::hamming74()}) {
        const int l = code.block_length();
        const int t = code.correction_radius();
        for (std::uint32_t xv = 0; xv < (1u << l); ++xv) {
            const auto x = BitString::from_value(xv, static_cast<std::size_t>(l));
            const auto syn = code.syndrome(x);
            for (std::uint32_t e : patterns_up_to(l, t)) {
                const auto rec = code.reconcile(apply_pattern(x, e), syn);
                REQUIRE(rec.has_value());
                CHECK(*rec == x);
            }
        }
    }
}

TEST_CASE("hamming7 with two flips miscorrects somewhere (distance-3 code)") {
    const auto code = LinearCode::hamming74();
    const auto x = BitString::zeros(7);
    const auto syn = code.syndrome(x);
    bool some_wrong = false;
    for (std::uint32_t e = 0; e < (1u << 7); ++e) {
        if (__builtin_popcount(e) != 2) continue;
        const auto rec = code.reconcile(apply_pattern(x, e), syn);
        if (!rec.has_value() || !(*rec == x)) some_wrong = true;
    }
    CHECK(some_wrong);
}

TEST_CASE("concatenation and verbatim remainder") {
    const auto code = LinearCode::repetition(5);
    CHECK(code.syndrome_length(15) == 12);       // 3 blocks x 4
    CHECK(code.syndrome_length(17) == 14);       // + 2 verbatim
    CHECK(code.syndrome_rate(15) == doctest::Approx(0.8));

    Rng rng(9);
    const auto x = BitString::random(17, rng);
    const auto syn = code.syndrome(x);
    // Up to 2 flips per full block plus any damage on the remainder recovers.
    BitString noisy = x;
    noisy.set(0, 1 - noisy[0]);
    noisy.set(6, 1 - noisy[6]);
    noisy.set(7, 1 - noisy[7]);
    noisy.set(15, 1 - noisy[15]);
    noisy.set(16, 1 - noisy[16]);
    const auto rec = code.reconcile(noisy, syn);
    REQUIRE(rec.has_value());
    CHECK(*rec == x);

    // Three flips in one rep5 block exceed the radius: failure or wrong word,
    // never a silent exception.
    BitString bad = x;
    bad.set(0, 1 - bad[0]);
    bad.set(1, 1 - bad[1]);
    bad.set(2, 1 - bad[2]);
    const auto rec2 = code.reconcile(bad, syn);
    CHECK((!rec2.has_value() || !(*rec2 == x)));
}

TEST_CASE("bsc: identity at zero, flip statistics, composition") {
    Rng rng(123);
    const auto x = BitString::random(64, rng);
    CHECK(bsc(x, 0.0, rng) == x);

    const int n = 10000;
    const double phi = 0.45;
    const auto big = BitString::zeros(static_cast<std::size_t>(n));
    const auto flipped = bsc(big, phi, rng);
    const double frac = static_cast<double>(flipped.hamming_weight()) / n;
    const double se = std::sqrt(phi * (1 - phi) / n);
    CHECK(std::abs(frac - phi) <= 4 * se);

    // Two passes compose to flip rate 2 phi (1 - phi).
    const double phi2 = 0.1;
    const auto twice = bsc(bsc(big, phi2, rng), phi2, rng);
    const double want = 2 * phi2 * (1 - phi2);
    const double frac2 = static_cast<double>(twice.hamming_weight()) / n;
    const double se2 = std::sqrt(want * (1 - want) / n);
    CHECK(std::abs(frac2 - want) <= 4 * se2);

    CHECK_THROWS_AS(bsc(x, 0.5, rng), std::invalid_argument);
}

TEST_CASE("select_code: noiseless, radius coverage, infeasible") {
    const auto none = select_code(100, 0.0, 0.05);
    CHECK(none.name() == "trivial");
    CHECK(none.syndrome_length(100) == 0);

    // rep5 covers phi + eps = 0.1 with radius fraction 0.4.
    CHECK(LinearCode::repetition(5).radius_fraction() == doctest::Approx(0.4));
    const auto c1 = select_code(200, 0.05, 0.05);
    CHECK(c1.radius_fraction() >= 0.1);

    // At phi = 0.01 the best-rate qualifying block is hamming7.
    const auto c2 = select_code(200, 0.01, 0.05);
    CHECK(c2.name() == "hamming7");
    CHECK(c2.rate() == doctest::Approx(4.0 / 7.0));

    CHECK_THROWS_AS(select_code(200, 0.45, 0.05), std::runtime_error);
}

TEST_CASE("analytic per-block failure arithmetic matches brute force (hamming7)") {
    // Fraction of weight-2 patterns that fail to decode back: all of them
    // (leader has weight <= 1), so P[block wrong] = P[>= 2 flips] exactly.
    const double phi = 0.01;
    double p_ge2 = 0.0;
    for (int k = 2; k <= 7; ++k) {
        double c = 1.0;
        for (int j = 0; j < k; ++j) c = c * (7 - j) / (j + 1);
        p_ge2 += c * std::pow(phi, k) * std::pow(1 - phi, 7 - k);
    }
    CHECK(p_ge2 == doctest::Approx(21 * phi * phi).epsilon(0.05));  // ~ C(7,2) phi^2
}
