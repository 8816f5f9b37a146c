#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bqs/adversary.hpp"
#include "bqs/analysis.hpp"
#include "bqs/register.hpp"

using namespace bqs;

namespace {

const DensityOp kTrivialSide(0, Eigen::MatrixXcd::Ones(1, 1));

DensityOp zero_state(int n) { return PureState(n).to_density(); }

// X uniform over n bits with side information built per entry.
CqEnsemble uniform_ensemble(int n, const std::function<DensityOp(const BitString&)>& side) {
    CqEnsemble e;
    const double p = std::pow(2.0, -n);
    for (std::uint64_t v = 0; v < (1ULL << n); ++v) {
        const BitString x = BitString::from_value(v, static_cast<std::size_t>(n));
        e.entries.push_back({x, p, side(x)});
    }
    return e;
}

}  // namespace

TEST_CASE("uncertainty (two bases): point mass, worked rhs, vacuous flag") {
    // |0000>: Q+ is a point mass, Qx uniform.
    auto rep = check_uncertainty_two(zero_state(4), {0}, {5});
    CHECK(rep.lhs == doctest::Approx(1.0 + 1.0 / 16).epsilon(1e-9));
    CHECK(rep.rhs == doctest::Approx(1.5625));  // (1 + 1/4)^2
    CHECK(rep.status == CheckStatus::Pass);

    // |L+| = |Lx| = 2^{n/2} makes the bound vacuous: rhs = 4.
    std::vector<std::uint64_t> l4{0, 1, 2, 3};
    auto vac = check_uncertainty_two(zero_state(4), l4, l4);
    CHECK(vac.rhs == doctest::Approx(4.0));
    CHECK(vac.status == CheckStatus::Vacuous);
}

TEST_CASE("uncertainty (two bases): no violations on reduced random states") {
    Rng rng(2024);
    for (int t = 0; t < 60; ++t) {
        const DensityOp rho = random_reduced_state(3, 2, rng);
        // Adversarial set choice: the top-2 outcomes of each distribution.
        std::vector<int> reg{0, 1, 2};
        const auto qp = outcome_distribution(rho, reg, BasisString(3, Basis::Plus));
        const auto qt = outcome_distribution(rho, reg, BasisString(3, Basis::Times));
        auto top2 = [](const Eigen::VectorXd& q) {
            std::vector<std::uint64_t> idx(static_cast<std::size_t>(q.size()));
            for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
            std::sort(idx.begin(), idx.end(), [&](auto a, auto b) {
                return q(static_cast<Eigen::Index>(a)) > q(static_cast<Eigen::Index>(b));
            });
            return std::vector<std::uint64_t>{idx[0], idx[1]};
        };
        auto rep = check_uncertainty_two(rho, top2(qp), top2(qt));
        CHECK(rep.passed());
        CHECK(rep.lhs <= rep.rhs + 1e-9);
    }
}

TEST_CASE("uncertainty (MUB): degenerate N=1 equals the two-basis form; N=2 worked rhs") {
    Rng rng(77);
    const DensityOp rho = random_reduced_state(3, 2, rng);
    auto two = check_uncertainty_two(rho, {1}, {6});
    auto mub2 = check_uncertainty_mub(rho, {{1}, {6}});
    CHECK(mub2.lhs == doctest::Approx(two.lhs).epsilon(1e-12));
    CHECK(mub2.rhs == doctest::Approx(two.rhs).epsilon(1e-12));

    auto mub3 = check_uncertainty_mub(zero_state(4), {{0}, {3}, {9}});
    CHECK(mub3.rhs == doctest::Approx(2.6875));  // 1 - 3 + 3 (1.25)^2
    CHECK(mub3.lhs == doctest::Approx(1.0 + 2.0 / 16).epsilon(1e-9));
    CHECK(mub3.status == CheckStatus::Pass);
}

TEST_CASE("min-entropy sum: |0^n> hand values and random-state sweep") {
    for (int n : {3, 4, 5}) {
        auto chk = check_minentropy_sum(zero_state(n), 3);
        CHECK(chk.sum == doctest::Approx(2.0 * n).epsilon(1e-9));
        CHECK(chk.report.passed());
        if (n >= 3) CHECK(chk.sum >= 3 * std::log2(3.0) - 1e-9);
    }
    // Single qubit |0>, two bases: sum = 0 + 1.
    auto one = check_minentropy_sum(zero_state(1), 2);
    CHECK(one.sum == doctest::Approx(1.0).epsilon(1e-9));

    Rng rng(31);
    for (int t = 0; t < 200; ++t) {
        auto chk = check_minentropy_sum(random_reduced_state(3, 2, rng), 3);
        CHECK(chk.report.passed());
    }

    // Measured slack shrinks with n on the fixed family |0^n>.
    const double s2 = check_minentropy_sum(zero_state(2), 3).measured_slack;
    const double s4 = check_minentropy_sum(zero_state(4), 3).measured_slack;
    const double s6 = check_minentropy_sum(zero_state(6), 3).measured_slack;
    CHECK(s4 < s2);
    CHECK(s6 < s4);
}

TEST_CASE("pmax product: worked bound values and the pi/8 state") {
    auto rep = check_pmax_product(zero_state(4));
    CHECK(rep.lhs == doctest::Approx(1.0 / 16).epsilon(1e-9));
    CHECK(rep.rhs == doctest::Approx(0.25 * std::pow(1.25, 4.0)).epsilon(1e-12));
    CHECK(rep.rhs == doctest::Approx(0.6104).epsilon(1e-3));
    CHECK(rep.status == CheckStatus::Pass);

    // Single qubit halfway between the bases: product = cos^4(pi/8).
    Eigen::VectorXcd v(2);
    v << std::cos(M_PI / 8), std::sin(M_PI / 8);
    auto rep1 = check_pmax_product(PureState(1, v).to_density());
    CHECK(rep1.lhs == doctest::Approx(std::pow(std::cos(M_PI / 8), 4.0)).epsilon(1e-9));
    CHECK(rep1.lhs == doctest::Approx(0.7286).epsilon(1e-3));
    CHECK(rep1.rhs == doctest::Approx(0.25 * std::pow(1.0 + std::sqrt(0.5), 4.0)).epsilon(1e-12));
    CHECK(rep1.passed());
}

TEST_CASE("small sets: |0^n> masses, maximally mixed, bound arithmetic") {
    // gamma + kappa = 0.4 at n = 5: S+ misses only 0^n, Sx is everything.
    auto chk = check_small_sets_mass(zero_state(5), 0.2, 0.2);
    CHECK(chk.sets.q_plus == doctest::Approx(0.0));
    CHECK(chk.sets.q_times == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(chk.sets.l_plus == 1);
    CHECK(chk.sets.l_times == 0);
    CHECK(chk.report.passed());

    auto mixed = check_small_sets_mass(DensityOp::maximally_mixed(4), 0.2, 0.2);
    CHECK(mixed.sets.q_plus + mixed.sets.q_times == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(mixed.report.status == CheckStatus::Pass);

    // Adversarial stored-subset conditional state at n = 6: the sender side
    // after a receiver measured 4 of the 6 EPR halves in +. Mass stays
    // within the rearranged uncertainty bound.
    Rng rng(606);
    QuantumRegister reg;
    std::vector<int> sender;
    for (int i = 0; i < 6; ++i) {
        auto ids = reg.add_group(make_epr_pairs(1));
        sender.push_back(ids[0]);
        if (i >= 2) (void)reg.measure_one(ids[1], Basis::Plus, rng);
    }
    const auto rho = reg.reduced_density(sender);
    auto cond = check_small_sets_mass(rho, 1.0 / 3.0, 1.0 / 12.0);
    CHECK(cond.report.passed());
    CHECK(cond.sets.q_plus + cond.sets.q_times >= 1.0 - (cond.report.rhs + 1e-9));
}

TEST_CASE("privacy amplification: the three worked ensembles") {
    // (1) X uniform on 4 bits, trivial side info: only the zero descriptor
    // contributes, lhs = 2^-4 * 1/2 = 1/32.
    auto no_side = uniform_ensemble(4, [](const BitString&) { return kTrivialSide; });
    auto pa = check_pa_bound(no_side);
    CHECK(pa.lhs == doctest::Approx(1.0 / 32).epsilon(1e-9));
    CHECK(pa.rhs_hinf == doctest::Approx(0.5 * std::pow(2.0, -1.5)).epsilon(1e-12));
    CHECK(pa.report.passed());
    CHECK(pa.report_weak.passed());
    CHECK(pa.report_order.passed());

    // (2) Full storage rho_x = |x><x|: lhs = 1/2, bound vacuous but true.
    auto full = uniform_ensemble(4, [](const BitString& x) {
        return encode_bb84(x, BasisString(4, Basis::Plus)).to_density();
    });
    auto pa_full = check_pa_bound(full);
    CHECK(pa_full.lhs == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(pa_full.rhs_hinf >= 0.5);
    CHECK(pa_full.report_weak.status == CheckStatus::Vacuous);

    // (3) One stored qubit: first bit in the diagonal basis; lhs <= 1/4.
    auto one_qubit = uniform_ensemble(4, [](const BitString& x) {
        BitString b(1);
        b.set(0, x[0]);
        return encode_bb84(b, BasisString(1, Basis::Times)).to_density();
    });
    auto pa_one = check_pa_bound(one_qubit);
    CHECK(pa_one.rhs_hinf == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(pa_one.lhs <= 0.25 + 1e-9);
    CHECK(pa_one.lhs == doctest::Approx(1.0 / 16).epsilon(1e-9));  // r=0 and r=1000 contribute 1/2 each
    CHECK(pa_one.report.passed());
    CHECK(pa_one.report_order.passed());
}

TEST_CASE("privacy amplification chain holds on random constructed ensembles") {
    Rng rng(101);
    for (int t = 0; t < 25; ++t) {
        const int n = 3 + static_cast<int>(rng.below(2));  // 3..4
        const int q = 1 + static_cast<int>(rng.below(2));  // 1..2
        // Random storage: each x maps to a random pure state on q qubits,
        // drawn once per x (deterministic side channel).
        std::vector<DensityOp> sides;
        for (std::uint64_t v = 0; v < (1ULL << n); ++v)
            sides.push_back(random_pure_state(q, rng).to_density());
        auto e = uniform_ensemble(n, [&](const BitString& x) {
            return sides[static_cast<std::size_t>(x.to_value())];
        });
        auto pa = check_pa_bound(e);
        CHECK(pa.report.passed());
        CHECK(pa.report_weak.passed());
        CHECK(pa.report_order.passed());
    }
}

TEST_CASE("ball guessing: uniform guess, full storage, stored-prefix arithmetic") {
    auto no_side = uniform_ensemble(4, [](const BitString&) { return kTrivialSide; });
    ProjectiveGuesser fixed{BasisString{}, [](const BitString&) { return BitString::zeros(4); }};
    auto rep = check_ball_guess(no_side, fixed, 0);
    CHECK(rep.lhs == doctest::Approx(1.0 / 16).epsilon(1e-9));
    CHECK(rep.rhs == doctest::Approx(std::pow(2.0, -1.5)).epsilon(1e-12));
    CHECK(rep.status == CheckStatus::Pass);

    auto full = uniform_ensemble(4, [](const BitString& x) {
        return encode_bb84(x, BasisString(4, Basis::Plus)).to_density();
    });
    ProjectiveGuesser identity{BasisString(4, Basis::Plus),
                               [](const BitString& o) { return o; }};
    auto rep_full = check_ball_guess(full, identity, 0);
    CHECK(rep_full.lhs == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rep_full.status == CheckStatus::Vacuous);  // rhs >= 1, success may hit 1

    // n = 8, q = 2, radius 1: stored prefix + zero fill succeeds iff the
    // remaining 6 bits have weight <= 1, i.e. 7/64; bound 9 * 2^-2.5 is
    // flagged non-informative.
    auto prefix = uniform_ensemble(8, [](const BitString& x) {
        BitString b(2);
        b.set(0, x[0]);
        b.set(1, x[1]);
        return encode_bb84(b, BasisString(2, Basis::Plus)).to_density();
    });
    ProjectiveGuesser stored{BasisString(2, Basis::Plus), [](const BitString& o) {
                                 BitString g = BitString::zeros(8);
                                 g.set(0, o[0]);
                                 g.set(1, o[1]);
                                 return g;
                             }};
    auto rep_prefix = check_ball_guess(prefix, stored, 1);
    CHECK(rep_prefix.lhs == doctest::Approx(7.0 / 64).epsilon(1e-9));
    CHECK(rep_prefix.rhs == doctest::Approx(9.0 * std::pow(2.0, -2.5)).epsilon(1e-12));
    CHECK(rep_prefix.status == CheckStatus::Vacuous);
}

TEST_CASE("purified analysis: branch probabilities form a distribution") {
    for (int q : {0, 2}) {
        auto analysis = analyze_purified_qot(store_subset_spec(4, q, Basis::Plus));
        double total = 0;
        for (const auto& be : analysis.branches) {
            total += be.prob;
            CHECK(be.weights[0].sum() == doctest::Approx(be.prob).epsilon(1e-9));
            CHECK(be.weights[1].sum() == doctest::Approx(be.prob).epsilon(1e-9));
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(analysis.kept == q);
    }
}

TEST_CASE("exact receiver distance: frozen values for the shipped strategies") {
    // Bell pairing on n = 4: f aligned on both pairs with probability 1/4,
    // each aligned family member fully determined, so d = 1/4 * 1/2 = 1/8.
    BitString ones(4);
    for (int i = 0; i < 4; ++i) ones.set(static_cast<std::size_t>(i), 1);
    CHECK(exact_receiver_distance(bell_pairs_spec(ones, false)) ==
          doctest::Approx(0.125).epsilon(1e-9));

    // Measure-all-in-+ at n = 6: matched announce leaks everything (1/2),
    // mismatched leaves only the zero descriptor (2^-n-1).
    CHECK(exact_receiver_distance(store_subset_spec(6, 0, Basis::Plus)) ==
          doctest::Approx(0.25 + std::pow(2.0, -8.0)).epsilon(1e-9));
}

TEST_CASE("sender privacy: q=0 and q=2 events at n=6, slack shrinks with n") {
    auto res0 = check_sender_privacy(store_subset_spec(6, 0, Basis::Plus), 0.0);
    CHECK(res0.p_event == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(res0.event_report.passed());
    CHECK(res0.distance_report.passed());
    CHECK(res0.distance <= res0.distance_bound + 1e-9);
    // Honest-receiver reading of the same event: distance is exactly
    // 2^-(n+1), the zero-descriptor weight, not 0.
    CHECK(res0.distance == doctest::Approx(std::pow(2.0, -7.0)).epsilon(1e-9));

    auto res2 = check_sender_privacy(store_subset_spec(6, 2, Basis::Plus), 2.0 / 6.0);
    CHECK(res2.event_report.passed());
    CHECK(res2.distance_report.passed());
    CHECK(res2.q == 2);

    // Both the certified event slack and the distance shrink from n=4 to n=6.
    auto a4 = check_sender_privacy(store_subset_spec(4, 0, Basis::Plus), 0.0);
    CHECK(res0.event_slack_bound < a4.event_slack_bound);
    CHECK(res0.distance < a4.distance);
}

TEST_CASE("sender privacy: store-everything receiver is hypothesis-violating") {
    auto res = check_sender_privacy(store_subset_spec(4, 4, Basis::Plus), 1.0);
    // gamma = 1 > 1/2: no passing event among the proof's candidates; the
    // report flags the violated hypothesis instead of certifying anything.
    CHECK(res.distance_report.status == CheckStatus::Hypothesis);
    CHECK(res.event_report.status == CheckStatus::Hypothesis);
    CHECK(res.distance_report.status != CheckStatus::Pass);
}

TEST_CASE("receiver privacy distance is exactly zero") {
    CHECK(receiver_privacy_distance(4) == 0.0);
}

TEST_CASE("adversarial advantage is non-increasing in n at fixed gamma") {
    // Fixed family: store q = floor(n/4) qubits, measure the rest in +. The
    // exact view distance d with q kept qubits is 1/4 + 2^(q-n-2).
    auto advantage = [](int n) {
        const int q = n / 4;
        return exact_receiver_distance(store_subset_spec(n, q, Basis::Plus));
    };
    const double d4 = advantage(4), d6 = advantage(6), d8 = advantage(8);
    CHECK(d4 == doctest::Approx(0.25 + std::pow(2.0, 1 - 4 - 2)).epsilon(1e-9));
    CHECK(d6 == doctest::Approx(0.25 + std::pow(2.0, 1 - 6 - 2)).epsilon(1e-9));
    CHECK(d8 == doctest::Approx(0.25 + std::pow(2.0, 2 - 8 - 2)).epsilon(1e-9));
    CHECK(d6 < d4);
    CHECK(d8 < d6);
}

TEST_CASE("binding estimate: measure_all oracle and unbounded committer") {
    Rng rng(555);
    auto est = estimate_binding([] { return make_measure_all_committer(0); }, CommKind::Plain, 8,
                                WeakModelParams{}, 0.0, 2000, std::pow(0.75, 8), rng);
    CHECK(est.p0 == doctest::Approx(1.0));
    CHECK(est.p1 == doctest::Approx(std::pow(0.75, 8)).epsilon(0.5));
    CHECK(est.report.passed());
    CHECK(std::abs(est.sum - (1.0 + std::pow(0.75, 8))) <= 4 * est.sigma + 1e-12);

    Rng rng2(556);
    auto diverging = estimate_binding([] { return make_unbounded_committer(); }, CommKind::Plain, 6,
                                      WeakModelParams{}, 0.0, 300, 1.0, rng2);
    CHECK(diverging.sum == doctest::Approx(2.0));
}

TEST_CASE("gamma thresholds: worked values to 1e-4 and clamping") {
    CHECK(threshold_gamma(ProtocolKind::Qot, 0.0, 0.0).value == doctest::Approx(0.5));
    CHECK(threshold_gamma(ProtocolKind::Comm, 0.0, 0.0).value == doctest::Approx(0.5));
    CHECK(threshold_gamma(ProtocolKind::Bb84Qot, 0.01, 0.1).value ==
          doctest::Approx(0.1846).epsilon(1e-4));
    CHECK(threshold_gamma(ProtocolKind::CommPrime, 0.01, 0.1).value ==
          doctest::Approx(0.2884).epsilon(1e-4));
    auto clamped = threshold_gamma(ProtocolKind::Bb84Qot, 0.3, 0.5);
    CHECK(clamped.value == 0.0);
    CHECK(clamped.clamped);
}
