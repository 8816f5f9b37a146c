#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <vector>

#include "bqs/qstate.hpp"
#include "bqs/register.hpp"

using namespace bqs;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

PureState random_pure(int qubits, Rng& rng) {
    Eigen::VectorXcd v(Eigen::Index(1) << qubits);
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = Cplx(rng.gaussian(), rng.gaussian());
    v /= v.norm();
    return PureState(qubits, std::move(v));
}

// Explicit Bell vectors on 2 qubits, written out independently of the
// simulator's Bell machinery.
PureState bell_vector(BellOutcome o) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(4);
    switch (o) {
        case BellOutcome::PhiPlus: v(0) = kInvSqrt2; v(3) = kInvSqrt2; break;
        case BellOutcome::PsiPlus: v(1) = kInvSqrt2; v(2) = kInvSqrt2; break;
        case BellOutcome::PhiMinus: v(0) = kInvSqrt2; v(3) = -kInvSqrt2; break;
        case BellOutcome::PsiMinus: v(1) = kInvSqrt2; v(2) = -kInvSqrt2; break;
    }
    return PureState(2, std::move(v));
}

}  // namespace

TEST_CASE("encode_bb84 produces the conjugate-coding amplitudes") {
    // |0>_x = (|0>+|1>)/sqrt2
    auto s = encode_bb84(BitString::from_string("0"), BasisString::from_string("x"));
    CHECK(s.amp(0).real() == doctest::Approx(kInvSqrt2).epsilon(1e-12));
    CHECK(s.amp(1).real() == doctest::Approx(kInvSqrt2).epsilon(1e-12));

    // |1>_x = (|0>-|1>)/sqrt2
    s = encode_bb84(BitString::from_string("1"), BasisString::from_string("x"));
    CHECK(s.amp(0).real() == doctest::Approx(kInvSqrt2).epsilon(1e-12));
    CHECK(s.amp(1).real() == doctest::Approx(-kInvSqrt2).epsilon(1e-12));

    // computational-basis encoding: |10> is basis vector 2
    s = encode_bb84(BitString::from_string("10"), BasisString::from_string("++"));
    CHECK(std::abs(s.amp(2) - Cplx(1.0, 0.0)) < 1e-12);
    CHECK(std::abs(s.amp(0)) < 1e-12);

    CHECK_THROWS_AS(encode_bb84(BitString::from_string("01"), BasisString::from_string("+")),
                    std::invalid_argument);
}

TEST_CASE("make_epr_pairs: amplitudes and correlations") {
    auto omega = make_epr_pairs(1);
    CHECK(omega.amp(0).real() == doctest::Approx(kInvSqrt2).epsilon(1e-12));
    CHECK(std::abs(omega.amp(1)) < 1e-12);
    CHECK(std::abs(omega.amp(2)) < 1e-12);
    CHECK(omega.amp(3).real() == doctest::Approx(kInvSqrt2).epsilon(1e-12));

    CHECK_THROWS_AS(make_epr_pairs(0), std::invalid_argument);

    // Expanding |Omega> in the x (x) x basis by direct linear algebra:
    // (H (x) H)|Omega| must have no weight on 01 or 10.
    Eigen::VectorXcd a = omega.amplitudes();
    apply_single_qubit(a, 2, 0, hadamard());
    apply_single_qubit(a, 2, 1, hadamard());
    CHECK(std::abs(a(1)) < 1e-12);
    CHECK(std::abs(a(2)) < 1e-12);

    // Both halves measured in the same basis agree, every trial.
    Rng rng(11);
    for (Basis b : {Basis::Plus, Basis::Times}) {
        for (int trial = 0; trial < 200; ++trial) {
            auto st = make_epr_pairs(2);
            const std::array<int, 2> first_halves{0, 2};
            const std::array<int, 2> second_halves{1, 3};
            auto r1 = measure_qubits(st, first_halves, BasisString(2, b), rng);
            auto r2 = measure_qubits(r1.post, second_halves, BasisString(2, b), rng);
            CHECK(r1.outcome == r2.outcome);
        }
    }
}

TEST_CASE("measure: eigenstates, conjugate bases, repeatability") {
    Rng rng(7);
    const std::array<int, 1> q0{0};

    auto zero = PureState(1);
    auto res = measure_qubits(zero, q0, BasisString::from_string("+"), rng);
    CHECK(res.outcome[0] == 0);

    // |0>_x measured in + is uniform: check the distribution, then sample.
    auto plus = encode_bb84(BitString::from_string("0"), BasisString::from_string("x"));
    auto dist = outcome_distribution(plus, q0, BasisString::from_string("+"));
    CHECK(dist(0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(dist(1) == doctest::Approx(0.5).epsilon(1e-12));

    // Repeated measurement of the same indices in the same basis reproduces
    // the outcome with probability 1, and post states stay normalized.
    for (int trial = 0; trial < 50; ++trial) {
        auto st = random_pure(3, rng);
        const std::array<int, 2> idx{0, 2};
        auto bases = BasisString::from_string("x+");
        auto first = measure_qubits(st, idx, bases, rng);
        CHECK(first.post.amplitudes().norm() == doctest::Approx(1.0).epsilon(1e-9));
        auto second = measure_qubits(first.post, idx, bases, rng);
        CHECK(first.outcome == second.outcome);
    }
}

TEST_CASE("outcome_distribution: point masses, uniformity, EPR") {
    const std::array<int, 2> both{0, 1};

    auto basis00 = encode_bb84(BitString::from_string("00"), BasisString::from_string("++"));
    auto d = outcome_distribution(basis00, both, BasisString::from_string("++"));
    CHECK(d(0) == doctest::Approx(1.0));

    // |0^n> in the diagonal basis is uniform (Hadamard image of a basis vector).
    for (int n = 1; n <= 4; ++n) {
        std::vector<int> reg(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) reg[static_cast<std::size_t>(i)] = i;
        auto st = PureState(n);
        auto dist = outcome_distribution(st, reg, BasisString(static_cast<std::size_t>(n), Basis::Times));
        for (Eigen::Index i = 0; i < dist.size(); ++i)
            CHECK(dist(i) == doctest::Approx(std::pow(2.0, -n)).epsilon(1e-9));
    }

    auto omega = make_epr_pairs(1);
    d = outcome_distribution(omega, both, BasisString::from_string("++"));
    CHECK(d(0) == doctest::Approx(0.5));
    CHECK(d(3) == doctest::Approx(0.5));
    CHECK(d(1) == doctest::Approx(0.0));
}

TEST_CASE("basis duality: decoding in the encoding bases is deterministic (exhaustive n <= 6)") {
    for (int n = 1; n <= 6; ++n) {
        std::vector<int> reg(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) reg[static_cast<std::size_t>(i)] = i;
        for (std::uint64_t xv = 0; xv < (1ULL << n); ++xv) {
            for (std::uint64_t tv = 0; tv < (1ULL << n); ++tv) {
                const auto x = BitString::from_value(xv, static_cast<std::size_t>(n));
                const auto theta = BasisString::from_bits(BitString::from_value(tv, static_cast<std::size_t>(n)));
                auto dist = outcome_distribution(encode_bb84(x, theta), reg, theta);
                CHECK(dist(static_cast<Eigen::Index>(xv)) == doctest::Approx(1.0).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("Born consistency: sampled frequencies match the distribution (4 sigma)") {
    Rng rng(1234);
    auto st = random_pure(3, rng);
    const std::array<int, 2> reg{0, 2};
    auto bases = BasisString::from_string("x+");
    auto dist = outcome_distribution(st, reg, bases);

    const int trials = 20000;
    std::array<int, 4> counts{0, 0, 0, 0};
    for (int t = 0; t < trials; ++t) {
        auto res = measure_qubits(st, reg, bases, rng);
        counts[res.outcome.to_value()]++;
    }
    for (int o = 0; o < 4; ++o) {
        const double p = dist(o);
        const double se = std::sqrt(p * (1.0 - p) / trials);
        CHECK(std::abs(counts[static_cast<std::size_t>(o)] / double(trials) - p) <= 4.0 * se + 1e-12);
    }
}

TEST_CASE("bell_measure: fresh EPR pair is Phi+ with certainty") {
    Rng rng(5);
    for (int t = 0; t < 64; ++t) {
        auto res = bell_measure(make_epr_pairs(1), 0, 1, rng);
        CHECK(res.outcome == BellOutcome::PhiPlus);
    }
}

TEST_CASE("Bell XOR table: exact on amplitudes for every outcome and basis") {
    // For each Bell vector, measuring both qubits in r (x) r must place all
    // probability on outcomes whose xor equals the prediction.
    const std::array<int, 2> both{0, 1};
    for (auto o : {BellOutcome::PhiPlus, BellOutcome::PsiPlus, BellOutcome::PhiMinus,
                   BellOutcome::PsiMinus}) {
        for (Basis r : {Basis::Plus, Basis::Times}) {
            auto dist = outcome_distribution(bell_vector(o), both, BasisString(2, r));
            const int want = bell_xor_prediction(o, r);
            for (int v = 0; v < 4; ++v) {
                const int xor_bits = ((v >> 1) & 1) ^ (v & 1);
                if (xor_bits != want) CHECK(dist(v) == doctest::Approx(0.0));
            }
        }
    }

    // And the measurement itself identifies each injected Bell vector.
    Rng rng(17);
    for (auto o : {BellOutcome::PhiPlus, BellOutcome::PsiPlus, BellOutcome::PhiMinus,
                   BellOutcome::PsiMinus}) {
        auto res = bell_measure(bell_vector(o), 0, 1, rng);
        CHECK(res.outcome == o);
        // Collapsed state is that same Bell vector.
        for (int i = 0; i < 4; ++i)
            CHECK(std::abs(res.post.amp(static_cast<std::uint64_t>(i)) -
                           bell_vector(o).amp(static_cast<std::uint64_t>(i))) < 1e-9);
    }
}

TEST_CASE("bell_measure on sender halves: spec examples Psi+ / Phi-") {
    // After observing Psi+ on one side of two EPR pairs, the other side
    // measured in + has xor 1, in x has xor 0; Phi- is the reverse.
    CHECK(bell_xor_prediction(BellOutcome::PsiPlus, Basis::Plus) == 1);
    CHECK(bell_xor_prediction(BellOutcome::PsiPlus, Basis::Times) == 0);
    CHECK(bell_xor_prediction(BellOutcome::PhiMinus, Basis::Plus) == 0);
    CHECK(bell_xor_prediction(BellOutcome::PhiMinus, Basis::Times) == 1);

    // Dynamics check: receiver Bell-measures its halves of two EPR pairs;
    // the sender pair collapses to the same Bell state, so sender outcomes
    // obey the prediction in every trial.
    Rng rng(23);
    for (int t = 0; t < 200; ++t) {
        auto st = make_epr_pairs(2);  // sender halves 0,2; receiver halves 1,3
        auto bell = bell_measure(st, 1, 3, rng);
        const Basis r = rng.bit() ? Basis::Times : Basis::Plus;
        const std::array<int, 2> sender{0, 2};
        auto sres = measure_qubits(bell.post, sender, BasisString(2, r), rng);
        CHECK((sres.outcome[0] ^ sres.outcome[1]) == bell_xor_prediction(bell.outcome, r));
    }
}

TEST_CASE("partial_trace: EPR half, product state, trace property") {
    const std::array<int, 1> first{0};
    auto half = partial_trace(make_epr_pairs(1), first);
    CHECK((half.matrix() - Eigen::MatrixXcd::Identity(2, 2) * 0.5).norm() < 1e-9);

    const std::array<int, 1> second{1};
    auto prod = partial_trace(encode_bb84(BitString::from_string("01"), BasisString::from_string("++")), second);
    CHECK(prod.matrix()(1, 1).real() == doctest::Approx(1.0));

    Rng rng(3);
    for (int t = 0; t < 20; ++t) {
        auto st = random_pure(3, rng);
        const std::array<int, 2> keep{2, 0};
        auto rho = partial_trace(st, keep);
        CHECK(rho.matrix().trace().real() == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(rho.qubits() == 2);

        // Tracing out nothing returns the density form of the input.
        const std::array<int, 3> all{0, 1, 2};
        auto full = partial_trace(st, all);
        CHECK((full.matrix() - st.to_density().matrix()).norm() < 1e-9);
    }
}

TEST_CASE("mub_bases: three pairwise unbiased bases, first two are +/x") {
    for (int m = 1; m <= 3; ++m) {
        auto mubs = mub_bases(m);
        const double want = std::pow(2.0, -m);
        for (int i = 0; i < 3; ++i) {
            for (int j = i + 1; j < 3; ++j) {
                for (std::uint64_t a = 0; a < (1ULL << m); ++a) {
                    for (std::uint64_t b = 0; b < (1ULL << m); ++b) {
                        const Cplx ip = mubs[static_cast<std::size_t>(i)].vector(a).adjoint() *
                                        mubs[static_cast<std::size_t>(j)].vector(b);
                        CHECK(std::norm(ip) == doctest::Approx(want).epsilon(1e-9));
                    }
                }
            }
        }
    }

    auto mubs = mub_bases(2);
    CHECK((mubs[0].rotation - Eigen::Matrix2cd::Identity()).norm() < 1e-12);
    CHECK((mubs[1].rotation - hadamard()).norm() < 1e-12);

    // Distribution through MUB 1 equals the x-basis distribution.
    Rng rng(9);
    auto st = random_pure(2, rng);
    const std::array<int, 2> reg{0, 1};
    auto via_mub = outcome_distribution(st, mubs[1]);
    auto via_basis = outcome_distribution(st, reg, BasisString(2, Basis::Times));
    CHECK((via_mub - via_basis).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("register: factors stay small, merging happens on demand") {
    Rng rng(31);
    QuantumRegister reg;

    // BB84 product qubits arrive as independent factors; Bell-measuring two
    // of them merges exactly those factors.
    auto q0 = reg.add_qubit(encode_bb84(BitString::from_string("0"), BasisString::from_string("+")));
    auto q1 = reg.add_qubit(encode_bb84(BitString::from_string("0"), BasisString::from_string("+")));
    auto out = reg.bell_measure(q0, q1, rng);
    // |00> = (Phi+ + Phi-)/sqrt2: the outcome is one of those two.
    CHECK((out == BellOutcome::PhiPlus || out == BellOutcome::PhiMinus));
    CHECK(reg.active_count() == 0);

    // EPR pair: measuring one half collapses the other.
    auto ids = reg.add_group(make_epr_pairs(1));
    const int a = reg.measure_one(ids[0], Basis::Plus, rng);
    const int b = reg.measure_one(ids[1], Basis::Plus, rng);
    CHECK(a == b);
    CHECK(reg.measured_bit(ids[0]) == a);

    // Reduced density of one EPR half is maximally mixed.
    auto ids2 = reg.add_group(make_epr_pairs(1));
    const std::array<int, 1> keep{ids2[0]};
    auto rho = reg.reduced_density(keep);
    CHECK((rho.matrix() - Eigen::MatrixXcd::Identity(2, 2) * 0.5).norm() < 1e-9);
}

TEST_CASE("register snapshot reorders qubits as requested") {
    Rng rng(41);
    QuantumRegister reg;
    auto ids = reg.add_group(encode_bb84(BitString::from_string("01"), BasisString::from_string("++")));
    const std::array<int, 2> swapped{ids[1], ids[0]};
    auto snap = reg.snapshot(swapped);
    // |01> with qubits swapped reads |10>.
    CHECK(std::abs(snap.state.amp(2) - Cplx(1.0, 0.0)) < 1e-12);
    CHECK(snap.ids[0] == ids[1]);
}
