#include "bqs/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "bqs/adversary.hpp"
#include "bqs/analysis.hpp"
#include "bqs/protocols.hpp"

namespace bqs {

namespace {

using nlohmann::json;

BitString all_ones(int n) {
    BitString d(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) d.set(static_cast<std::size_t>(i), 1);
    return d;
}

BoundReport compare_proportions(std::string name, double p1, long n1, double p2, long n2,
                                std::uint64_t seed) {
    const double sigma = std::sqrt(p1 * (1 - p1) / static_cast<double>(n1) +
                                   p2 * (1 - p2) / static_cast<double>(n2));
    auto rep = mc_report(std::move(name), std::abs(p1 - p2), 0.0, n1 + n2, sigma, seed);
    rep.note = "plain " + std::to_string(p1) + " vs epr " + std::to_string(p2);
    return rep;
}

struct SweepAccumulator {
    double worst_violation = -1e300;  // max of lhs - rhs
    long checks = 0;
    long violations = 0;

    void add(const BoundReport& r) {
        worst_violation = std::max(worst_violation, r.lhs - r.rhs);
        ++checks;
        violations += r.status == CheckStatus::Fail;
    }
    BoundReport summary(const std::string& name, std::uint64_t seed) const {
        auto rep = exact_report(name, worst_violation, 0.0, 1e-9);
        rep.seed = seed;
        rep.trials = checks;
        rep.note = std::to_string(violations) + " violations in " + std::to_string(checks) +
                   " checks; worst lhs-rhs = " + std::to_string(worst_violation);
        return rep;
    }
};

std::vector<std::uint64_t> top_k(const Eigen::VectorXd& q, int k) {
    std::vector<std::uint64_t> idx(static_cast<std::size_t>(q.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) {
        return q(static_cast<Eigen::Index>(a)) > q(static_cast<Eigen::Index>(b));
    });
    idx.resize(static_cast<std::size_t>(k));
    return idx;
}

// --- targeted sweeps (also reused by the acceptance criteria) ---

std::vector<BoundReport> uncertainty_sweep(int n, int samples, std::uint64_t seed) {
    Rng rng(seed);
    SweepAccumulator two, mub, pmax, minent;
    std::vector<int> reg(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) reg[static_cast<std::size_t>(i)] = i;
    for (int s = 0; s < samples; ++s) {
        Rng state_rng = rng.derive(static_cast<std::uint64_t>(s));
        const DensityOp rho = random_reduced_state(n, 2, state_rng);
        const auto qp = outcome_distribution(rho, reg, BasisString(reg.size(), Basis::Plus));
        const auto qt = outcome_distribution(rho, reg, BasisString(reg.size(), Basis::Times));
        // Exhaustive singleton pairs.
        for (std::uint64_t x = 0; x < (1ULL << n); ++x)
            for (std::uint64_t z = 0; z < (1ULL << n); ++z)
                two.add(check_uncertainty_two(rho, {x}, {z}));
        // Adversarial small sets: the heaviest outcomes of each distribution.
        two.add(check_uncertainty_two(rho, top_k(qp, 2), top_k(qt, 2)));
        if (n >= 3) two.add(check_uncertainty_two(rho, top_k(qp, 4), top_k(qt, 4)));
        // MUB triple with the heaviest singleton per basis.
        const auto mubs = mub_bases(n);
        std::vector<std::vector<std::uint64_t>> singles;
        for (int i = 0; i < 3; ++i)
            singles.push_back(top_k(outcome_distribution(rho, mubs[static_cast<std::size_t>(i)]), 1));
        mub.add(check_uncertainty_mub(rho, singles));
        minent.add(check_minentropy_sum(rho, 3).report);
        pmax.add(check_pmax_product(rho));
    }
    return {two.summary("uncertainty_two_sweep_n" + std::to_string(n), seed),
            mub.summary("uncertainty_mub_sweep_n" + std::to_string(n), seed),
            minent.summary("minentropy_sum_sweep_n" + std::to_string(n), seed),
            pmax.summary("pmax_product_sweep_n" + std::to_string(n), seed)};
}

CqEnsemble uniform_ensemble(int n, const std::function<DensityOp(const BitString&)>& side) {
    CqEnsemble e;
    const double p = std::pow(2.0, -n);
    for (std::uint64_t v = 0; v < (1ULL << n); ++v) {
        const BitString x = BitString::from_value(v, static_cast<std::size_t>(n));
        e.entries.push_back({x, p, side(x)});
    }
    return e;
}

CqEnsemble random_classical_ensemble(int n, Rng& rng) {
    CqEnsemble e;
    const DensityOp trivial(0, Eigen::MatrixXcd::Ones(1, 1));
    Eigen::VectorXd p(Eigen::Index(1) << n);
    for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = -std::log(1.0 - rng.uniform01());
    p /= p.sum();
    for (std::uint64_t v = 0; v < (1ULL << n); ++v)
        e.entries.push_back(
            {BitString::from_value(v, static_cast<std::size_t>(n)), p(static_cast<Eigen::Index>(v)), trivial});
    return e;
}

std::vector<CqEnsemble> pa_ensemble_family(std::uint64_t seed) {
    Rng rng(seed);
    std::vector<CqEnsemble> out;
    const DensityOp trivial(0, Eigen::MatrixXcd::Ones(1, 1));

    // The three worked ensembles.
    out.push_back(uniform_ensemble(4, [&](const BitString&) { return trivial; }));
    out.push_back(uniform_ensemble(4, [](const BitString& x) {
        return encode_bb84(x, BasisString(4, Basis::Plus)).to_density();
    }));
    out.push_back(uniform_ensemble(4, [](const BitString& x) {
        BitString b(1);
        b.set(0, x[0]);
        return encode_bb84(b, BasisString(1, Basis::Times)).to_density();
    }));

    // Random classical distributions, no quantum side information.
    for (int i = 0; i < 10; ++i) {
        Rng r = rng.derive(100 + static_cast<std::uint64_t>(i));
        out.push_back(random_classical_ensemble(i % 2 ? 6 : 4, r));
    }
    // Stored prefixes in per-ensemble random bases (q = 1, 2).
    for (int i = 0; i < 14; ++i) {
        Rng r = rng.derive(200 + static_cast<std::uint64_t>(i));
        const int n = i % 2 ? 6 : 4;
        const int q = 1 + (i % 2);
        const BasisString bases = BasisString::random(static_cast<std::size_t>(q), r);
        out.push_back(uniform_ensemble(n, [&](const BitString& x) {
            BitString b(static_cast<std::size_t>(q));
            for (int j = 0; j < q; ++j) b.set(static_cast<std::size_t>(j), x[static_cast<std::size_t>(j)]);
            return encode_bb84(b, bases).to_density();
        }));
    }
    // Random pure side states, fresh per x.
    for (int i = 0; i < 14; ++i) {
        Rng r = rng.derive(300 + static_cast<std::uint64_t>(i));
        const int q = 1 + (i % 2);
        std::vector<DensityOp> sides;
        for (std::uint64_t v = 0; v < (1ULL << 4); ++v)
            sides.push_back(random_pure_state(q, r).to_density());
        out.push_back(uniform_ensemble(
            4, [&](const BitString& x) { return sides[static_cast<std::size_t>(x.to_value())]; }));
    }
    // Mixed side states (reduced from a larger random register), q up to 4.
    for (int i = 0; i < 12; ++i) {
        Rng r = rng.derive(400 + static_cast<std::uint64_t>(i));
        const int q = 2 + (i % 3);
        std::vector<DensityOp> sides;
        for (std::uint64_t v = 0; v < (1ULL << 4); ++v)
            sides.push_back(random_reduced_state(q, 1, r));
        out.push_back(uniform_ensemble(
            4, [&](const BitString& x) { return sides[static_cast<std::size_t>(x.to_value())]; }));
    }
    return out;
}

std::vector<BoundReport> pa_sweep(std::uint64_t seed) {
    SweepAccumulator strong, weak, order;
    const auto family = pa_ensemble_family(seed);
    for (const auto& e : family) {
        const auto pa = check_pa_bound(e);
        strong.add(pa.report);
        weak.add(pa.report_weak);
        order.add(pa.report_order);
    }
    auto reports = std::vector<BoundReport>{
        strong.summary("pa_lhs_vs_s2s0_sweep", seed),
        weak.summary("pa_lhs_vs_hinf_sweep", seed),
        order.summary("pa_ordering_sweep", seed),
    };
    reports[0].note += "; ensembles = " + std::to_string(family.size());
    return reports;
}

// --- protocol batches ---

struct OtBatch {
    long trials = 0;
    long received = 0;
    long correct_given_a = 0;
    long guessed = 0;
    long guess_right = 0;
    std::vector<Transcript> kept_transcripts;
};

OtBatch run_ot_batch(const std::string& protocol, int n, const WeakModelParams& params,
                     const LinearCode* code, const std::string& strategy, bool fixed_xor,
                     long trials, std::uint64_t seed, int keep_transcripts = 0) {
    OtBatch batch;
    Rng master(seed);
    const std::optional<BitString> fixed =
        fixed_xor ? std::optional<BitString>(all_ones(n)) : std::nullopt;
    for (long t = 0; t < trials; ++t) {
        Rng rng = master.derive(static_cast<std::uint64_t>(t));
        const int b = static_cast<int>(t & 1);
        auto recv = receiver_by_name(strategy, n);
        Transcript tr;
        if (protocol == "qot")
            tr = run_qot(b, QotConfig{n, fixed, false}, *recv, rng);
        else if (protocol == "epr_qot")
            tr = run_epr_qot(b, QotConfig{n, fixed, false}, *recv, rng);
        else if (protocol == "bb84_qot")
            tr = run_bb84_qot(b, Bb84Config{n, params, code}, *recv, rng);
        else if (protocol == "bb84_epr_qot")
            tr = run_bb84_epr_qot(b, Bb84Config{n, params, code}, *recv, rng);
        else
            throw std::runtime_error("unknown OT protocol: " + protocol);
        ++batch.trials;
        if (tr.outputs.contains("guess")) {
            ++batch.guessed;
            batch.guess_right += tr.outputs.at("guess").get<int>() == b;
        } else {
            const int a = tr.outputs.at("a").get<int>();
            if (a == 1) {
                ++batch.received;
                batch.correct_given_a += tr.outputs.at("b_prime").get<int>() == b;
            }
        }
        if (static_cast<int>(batch.kept_transcripts.size()) < keep_transcripts)
            batch.kept_transcripts.push_back(std::move(tr));
    }
    return batch;
}

struct CommBatch {
    long trials = 0;
    long accepts = 0;
    std::vector<Transcript> kept_transcripts;
};

CommBatch run_comm_batch(const std::string& protocol, int n, const WeakModelParams& params,
                         double epsilon, const std::string& strategy, int commit_bit, int open_bit,
                         long trials, std::uint64_t seed, int keep_transcripts = 0) {
    CommBatch batch;
    Rng master(seed);
    for (long t = 0; t < trials; ++t) {
        Rng rng = master.derive(static_cast<std::uint64_t>(t));
        auto committer = committer_by_name(strategy);
        CommitSession session = [&]() {
            if (protocol == "comm") return run_comm(commit_bit, n, *committer, rng);
            if (protocol == "epr_comm") return run_epr_comm(commit_bit, n, *committer, rng);
            if (protocol == "comm_prime")
                return run_comm_prime(commit_bit, n, params, epsilon, *committer, rng);
            throw std::runtime_error("unknown commitment protocol: " + protocol);
        }();
        ++batch.trials;
        batch.accepts += session.open(open_bit, rng) ? 1 : 0;
        if (static_cast<int>(batch.kept_transcripts.size()) < keep_transcripts)
            batch.kept_transcripts.push_back(session.transcript());
    }
    return batch;
}

// --- acceptance criteria ---

using Details = std::vector<BoundReport>;

template <typename F>
CriterionResult guarded(int id, std::string title, F&& body) {
    CriterionResult res;
    res.id = id;
    res.title = std::move(title);
    try {
        res.pass = body(res.details);
    } catch (const std::exception& ex) {
        res.pass = false;
        BoundReport r;
        r.name = "exception";
        r.status = CheckStatus::Fail;
        r.note = ex.what();
        res.details.push_back(std::move(r));
    }
    return res;
}

bool all_pass(const Details& d) {
    return std::all_of(d.begin(), d.end(), [](const BoundReport& r) { return r.passed(); });
}

CriterionResult criterion_uncertainty_two(std::uint64_t seed) {
    return guarded(1, "uncertainty relation, two bases (500 random states, exhaustive small sets)",
                   [&](Details& d) {
                       auto reps = uncertainty_sweep(4, 400, seed);
                       d.push_back(reps[0]);
                       auto reps3 = uncertainty_sweep(3, 100, seed + 1);
                       d.push_back(reps3[0]);
                       return all_pass(d);
                   });
}

CriterionResult criterion_mub_and_minentropy(std::uint64_t seed) {
    return guarded(2, "MUB relation (N=2) and min-entropy sum; |0^n> hand values", [&](Details& d) {
        auto reps = uncertainty_sweep(4, 400, seed);
        d.push_back(reps[1]);
        d.push_back(reps[2]);
        // Hand values on |0^n>: sum = 2n against (N+1)log(N+1).
        const auto chk = check_minentropy_sum(PureState(4).to_density(), 3);
        auto hand = exact_report("minentropy_zero_state_hand_value",
                                 std::abs(chk.sum - 8.0), 0.0, 1e-9);
        hand.note = "sum = " + std::to_string(chk.sum) + ", 3 log 3 = " +
                    std::to_string(3 * std::log2(3.0));
        d.push_back(hand);
        d.push_back(exact_report("minentropy_zero_state_vs_3log3", 3 * std::log2(3.0), chk.sum, 1e-9));
        // Slack trend on the fixed family.
        const double s2 = check_minentropy_sum(PureState(2).to_density(), 3).measured_slack;
        const double s4 = check_minentropy_sum(PureState(4).to_density(), 3).measured_slack;
        const double s6 = check_minentropy_sum(PureState(6).to_density(), 3).measured_slack;
        auto trend = exact_report("minentropy_slack_trend", std::max(s4 - s2, s6 - s4), 0.0, 1e-9);
        trend.note = "slack(2,4,6) = " + std::to_string(s2) + ", " + std::to_string(s4) + ", " +
                     std::to_string(s6);
        d.push_back(trend);
        return all_pass(d);
    });
}

CriterionResult criterion_pmax(std::uint64_t seed) {
    return guarded(3, "max-probability product bound up to n = 6", [&](Details& d) {
        SweepAccumulator acc;
        Rng rng(seed);
        for (int s = 0; s < 400; ++s) {
            Rng r = rng.derive(static_cast<std::uint64_t>(s));
            acc.add(check_pmax_product(random_reduced_state(4, 2, r)));
        }
        for (int s = 0; s < 100; ++s) {
            Rng r = rng.derive(1000 + static_cast<std::uint64_t>(s));
            acc.add(check_pmax_product(random_reduced_state(6, 2, r)));
        }
        d.push_back(acc.summary("pmax_product_sweep", seed));
        return all_pass(d);
    });
}

CriterionResult criterion_pa(std::uint64_t seed) {
    return guarded(4, "privacy amplification chain on 50+ ensembles, worked values", [&](Details& d) {
        auto reps = pa_sweep(seed);
        for (auto& r : reps) d.push_back(std::move(r));
        const DensityOp trivial(0, Eigen::MatrixXcd::Ones(1, 1));
        const auto worked1 =
            check_pa_bound(uniform_ensemble(4, [&](const BitString&) { return trivial; }));
        d.push_back(exact_report("pa_worked_uniform_lhs", std::abs(worked1.lhs - 1.0 / 32), 0.0, 1e-9));
        const auto worked2 = check_pa_bound(uniform_ensemble(4, [](const BitString& x) {
            return encode_bb84(x, BasisString(4, Basis::Plus)).to_density();
        }));
        d.push_back(exact_report("pa_worked_full_storage_lhs", std::abs(worked2.lhs - 0.5), 0.0, 1e-9));
        const auto worked3 = check_pa_bound(uniform_ensemble(4, [](const BitString& x) {
            BitString b(1);
            b.set(0, x[0]);
            return encode_bb84(b, BasisString(1, Basis::Times)).to_density();
        }));
        d.push_back(exact_report("pa_worked_one_qubit_lhs", worked3.lhs, 0.25, 1e-9));
        return all_pass(d);
    });
}

CriterionResult criterion_honest_correctness(std::uint64_t seed) {
    return guarded(5, "honest correctness: QOT / EPR-QOT exact, BB84-QOT within block bound",
                   [&](Details& d) {
                       for (const char* proto : {"qot", "epr_qot"}) {
                           auto batch = run_ot_batch(proto, 6, WeakModelParams{}, nullptr, "honest",
                                                     false, 5000, seed);
                           auto cond = exact_report(std::string(proto) + "_conditional_failures",
                                                    static_cast<double>(batch.received - batch.correct_given_a),
                                                    0.0, 0.0);
                           cond.trials = batch.received;
                           d.push_back(cond);
                           const double rate = batch.received / static_cast<double>(batch.trials);
                           d.push_back(mc_report(std::string(proto) + "_receive_rate",
                                                 std::abs(rate - 0.5), 0.0, batch.trials,
                                                 std::sqrt(0.25 / static_cast<double>(batch.trials)), seed));
                       }
                       const auto code = LinearCode::repetition(5);
                       const double phi = 0.02;
                       auto batch = run_ot_batch("bb84_qot", 200, WeakModelParams{phi, 0.0, 2},
                                                 &code, "honest", false, 500, seed + 7);
                       double p_blk = 0.0;
                       for (int k = 3; k <= 5; ++k) {
                           double c = 1.0;
                           for (int j = 0; j < k; ++j) c = c * (5 - j) / (j + 1);
                           p_blk += c * std::pow(phi, k) * std::pow(1 - phi, 5 - k);
                       }
                       const double bound = (200 / 5.0) * p_blk;
                       const double fail =
                           1.0 - batch.correct_given_a / std::max(1.0, static_cast<double>(batch.received));
                       d.push_back(mc_report("bb84_conditional_failure_rate", fail, bound,
                                             batch.received,
                                             std::sqrt(bound * (1 - bound) /
                                                       std::max(1.0, static_cast<double>(batch.received))),
                                             seed + 7));
                       return all_pass(d);
                   });
}

CriterionResult criterion_nonInteractivity(std::uint64_t seed) {
    return guarded(6, "receiver-privacy / hiding: one-way transcripts, d(A|view) = 0", [&](Details& d) {
        long bad = 0, total = 0;
        for (const char* strat : {"honest", "store_subset:q=0", "store_subset:q=2", "bell_xor"}) {
            for (const char* proto : {"qot", "epr_qot"}) {
                auto batch = run_ot_batch(proto, 4, WeakModelParams{}, nullptr, strat,
                                          std::string(strat) == "bell_xor", 50, seed, 50);
                for (const auto& tr : batch.kept_transcripts) {
                    ++total;
                    bad += tr.count_messages(Party::B, Party::A) != 0;
                    bad += tr.memory_bound_at > static_cast<int>(tr.messages.size()) - 1;
                }
            }
        }
        const auto code = LinearCode::trivial();
        auto bb = run_ot_batch("bb84_qot", 8, WeakModelParams{0.0, 0.1, 2}, &code, "honest", false,
                               50, seed, 50);
        for (const auto& tr : bb.kept_transcripts) {
            ++total;
            bad += tr.count_messages(Party::B, Party::A) != 0;
        }
        for (const char* proto : {"comm", "epr_comm", "comm_prime"}) {
            auto batch = run_comm_batch(proto, 6, WeakModelParams{0.05, 0.0, 2}, 0.05,
                                        "measure_all:0", 0, 0, 50, seed, 50);
            for (const auto& tr : batch.kept_transcripts) {
                ++total;
                bad += tr.count_messages(Party::C, Party::V, 0, tr.open_phase_from) != 0;
            }
        }
        auto rep = exact_report("one_way_transcripts", static_cast<double>(bad), 0.0, 0.0);
        rep.trials = total;
        d.push_back(rep);
        d.push_back(exact_report("receiver_privacy_distance", receiver_privacy_distance(4), 0.0, 0.0));
        return all_pass(d);
    });
}

CriterionResult criterion_bell_attack(std::uint64_t seed) {
    return guarded(7, "Bell XOR attack: certain on fixed-linear, PA-bounded on randomized f",
                   [&](Details& d) {
                       for (int n : {2, 4, 6}) {
                           auto batch = run_ot_batch("qot", n, WeakModelParams{}, nullptr, "bell_xor",
                                                     true, 1000, seed + static_cast<std::uint64_t>(n));
                           auto rep = exact_report("bell_xor_fixed_n" + std::to_string(n),
                                                   static_cast<double>(batch.guessed - batch.guess_right),
                                                   0.0, 0.0);
                           rep.trials = batch.guessed;
                           d.push_back(rep);
                       }
                       auto batch = run_ot_batch("qot", 4, WeakModelParams{}, nullptr, "bell_xor",
                                                 false, 3000, seed + 99);
                       const double rate = batch.guess_right / static_cast<double>(batch.guessed);
                       const double d_exact = exact_receiver_distance(bell_pairs_spec(all_ones(4), false));
                       d.push_back(mc_report("bell_xor_vs_random_f", rate, 0.5 + d_exact, batch.guessed,
                                             std::sqrt(0.25 / static_cast<double>(batch.guessed)),
                                             seed + 99));
                       d.back().note = "exact d = " + std::to_string(d_exact);
                       return all_pass(d);
                   });
}

CriterionResult criterion_binding(std::uint64_t seed) {
    return guarded(8, "binding: measure-all oracle, slack trend, COMM' honest accept", [&](Details& d) {
        Rng rng(seed);
        auto est8 = estimate_binding([] { return make_measure_all_committer(0); }, CommKind::Plain,
                                     8, WeakModelParams{}, 0.0, 10000, std::pow(0.75, 8), rng);
        d.push_back(est8.report);
        const double oracle = 1.0 + std::pow(0.75, 8);
        d.push_back(mc_report("binding_sum_matches_oracle_n8", std::abs(est8.sum - oracle), 0.0,
                              2 * est8.trials_per_bit, est8.sigma, seed));
        Rng rng2(seed + 1);
        auto est12 = estimate_binding([] { return make_measure_all_committer(0); }, CommKind::Plain,
                                      12, WeakModelParams{}, 0.0, 10000, std::pow(0.75, 12), rng2);
        d.push_back(est12.report);
        const double slack8 = est8.sum - 1.0, slack12 = est12.sum - 1.0;
        auto trend = mc_report("binding_slack_trend", slack12, slack8, 2 * est12.trials_per_bit,
                               std::sqrt(est8.sigma * est8.sigma + est12.sigma * est12.sigma), seed);
        trend.note = "slack n=8: " + std::to_string(slack8) + ", n=12: " + std::to_string(slack12);
        if (slack12 >= slack8) trend.status = CheckStatus::Fail;
        d.push_back(trend);

        auto honest = run_comm_batch("comm_prime", 400, WeakModelParams{0.05, 0.0, 2}, 0.05,
                                     "honest:0", 0, 0, 1000, seed + 2);
        const double accept = honest.accepts / static_cast<double>(honest.trials);
        auto rep = exact_report("comm_prime_honest_accept_deficit", 0.99 - accept, 0.0, 0.0);
        rep.trials = honest.trials;
        rep.note = "accept rate " + std::to_string(accept);
        d.push_back(rep);
        return all_pass(d);
    });
}

CriterionResult criterion_sender_privacy(std::uint64_t seed) {
    return guarded(9, "sender-privacy event construction, slack shrinking in n", [&](Details& d) {
        (void)seed;
        auto q0 = check_sender_privacy(store_subset_spec(6, 0, Basis::Plus), 0.0);
        d.push_back(q0.event_report);
        d.push_back(q0.distance_report);
        auto q2 = check_sender_privacy(store_subset_spec(6, 2, Basis::Plus), 2.0 / 6.0);
        d.push_back(q2.event_report);
        d.push_back(q2.distance_report);

        auto q0small = check_sender_privacy(store_subset_spec(4, 0, Basis::Plus), 0.0);
        auto trend0 = exact_report("privacy_slack_trend_q0",
                                   std::max(q0.event_slack_bound - q0small.event_slack_bound,
                                            q0.distance - q0small.distance),
                                   0.0, 1e-12);
        trend0.note = "event slack n=4: " + std::to_string(q0small.event_slack_bound) +
                      ", n=6: " + std::to_string(q0.event_slack_bound);
        d.push_back(trend0);
        auto q2small = check_sender_privacy(store_subset_spec(5, 2, Basis::Plus), 2.0 / 5.0);
        auto trend2 = exact_report("privacy_slack_trend_q2",
                                   q2.event_slack_bound - q2small.event_slack_bound, 0.0, 1e-12);
        trend2.note = "event slack n=5: " + std::to_string(q2small.event_slack_bound) +
                      ", n=6: " + std::to_string(q2.event_slack_bound);
        d.push_back(trend2);
        return all_pass(d);
    });
}

CriterionResult criterion_thresholds(std::uint64_t seed) {
    return guarded(10, "closed-form gamma thresholds", [&](Details& d) {
        (void)seed;
        d.push_back(exact_report("threshold_qot",
                                 std::abs(threshold_gamma(ProtocolKind::Qot, 0, 0).value - 0.5),
                                 0.0, 1e-9));
        d.push_back(exact_report(
            "threshold_bb84",
            std::abs(threshold_gamma(ProtocolKind::Bb84Qot, 0.01, 0.1).value - 0.1846), 0.0, 1e-4));
        d.push_back(exact_report(
            "threshold_comm_prime",
            std::abs(threshold_gamma(ProtocolKind::CommPrime, 0.01, 0.1).value - 0.2884), 0.0, 1e-4));
        return all_pass(d);
    });
}

CriterionResult criterion_purification(std::uint64_t seed) {
    return guarded(11, "purification equivalence across shipped strategies", [&](Details& d) {
        const long trials = 5000;
        // Honest receiver: receive rate and conditional correctness.
        auto plain = run_ot_batch("qot", 6, WeakModelParams{}, nullptr, "honest", false, trials, seed);
        auto epr = run_ot_batch("epr_qot", 6, WeakModelParams{}, nullptr, "honest", false, trials,
                                seed + 1);
        d.push_back(compare_proportions("twin_honest_receive_rate",
                                        plain.received / double(plain.trials), plain.trials,
                                        epr.received / double(epr.trials), epr.trials, seed));
        d.push_back(compare_proportions("twin_honest_correctness",
                                        plain.correct_given_a / std::max(1.0, double(plain.received)),
                                        plain.received,
                                        epr.correct_given_a / std::max(1.0, double(epr.received)),
                                        epr.received, seed));
        // Dishonest receivers: guess rates.
        for (const char* strat :
             {"store_subset:q=0", "store_subset:q=2,basis=x", "erasure:p=0.5", "bell_xor"}) {
            const bool fixed = std::string(strat) == "bell_xor";
            auto p = run_ot_batch("qot", 6, WeakModelParams{}, nullptr, strat, fixed, trials, seed + 2);
            auto e = run_ot_batch("epr_qot", 6, WeakModelParams{}, nullptr, strat, fixed, trials,
                                  seed + 3);
            d.push_back(compare_proportions(std::string("twin_guess_rate_") + strat,
                                            p.guess_right / double(p.guessed), p.guessed,
                                            e.guess_right / double(e.guessed), e.guessed, seed));
        }
        // Committers: acceptance statistics for both opened bits.
        for (const char* strat : {"honest:0", "measure_all:0", "bounded:q=2"}) {
            for (int open_bit = 0; open_bit < 2; ++open_bit) {
                auto p = run_comm_batch("comm", 6, WeakModelParams{}, 0.0, strat, 0, open_bit,
                                        trials, seed + 4);
                auto e = run_comm_batch("epr_comm", 6, WeakModelParams{}, 0.0, strat, 0, open_bit,
                                        trials, seed + 5);
                d.push_back(compare_proportions(std::string("twin_accept_") + strat + "_open" +
                                                    std::to_string(open_bit),
                                                p.accepts / double(p.trials), p.trials,
                                                e.accepts / double(e.trials), e.trials, seed));
            }
        }
        return all_pass(d);
    });
}

CriterionResult criterion_noisy_memory(std::uint64_t seed) {
    return guarded(12, "noisy-memory transfer: erasure at survival <= gamma", [&](Details& d) {
        const int n = 6;
        const double gamma = 2.0 / 6.0;
        auto bounded = check_sender_privacy(store_subset_spec(n, 2, Basis::Plus), gamma);
        const bool bounded_pass = bounded.event_report.passed() && bounded.distance_report.passed();
        d.push_back(bounded.event_report);

        // Every erasure pattern with at most gamma*n survivors passes too.
        long patterns = 0, pattern_failures = 0;
        for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
            if (std::popcount(mask) > 2) continue;
            std::vector<int> survivors;
            for (int i = 0; i < n; ++i)
                if ((mask >> i) & 1) survivors.push_back(i);
            auto res = check_sender_privacy(erasure_spec(n, survivors), gamma);
            ++patterns;
            if (!(res.event_report.passed() && res.distance_report.passed())) ++pattern_failures;
        }
        auto rep = exact_report("erasure_patterns_match_bounded",
                                static_cast<double>(pattern_failures), bounded_pass ? 0.0 : 1e300,
                                0.0);
        rep.trials = patterns;
        rep.note = std::to_string(patterns) + " patterns with survivors <= gamma n";
        d.push_back(rep);

        // Protocol-level rank check: S0 of the adversary state never exceeds
        // the survivor count.
        Rng rng(seed);
        long violations = 0;
        const long trials = 100;
        for (long t = 0; t < trials; ++t) {
            Rng trial = rng.derive(static_cast<std::uint64_t>(t));
            const PureState joint = make_epr_pairs(n);  // receiver halves odd
            CompressionSpec spec;
            spec.per_qubit.assign(2 * n, QubitDisposition{QubitDisposition::Kind::Keep, -1, false});
            std::vector<int> survivors;
            for (int i = 0; i < n; ++i) {
                if (trial.bernoulli(0.8))
                    spec.per_qubit[static_cast<std::size_t>(2 * i + 1)] =
                        QubitDisposition{QubitDisposition::Kind::MeasurePlus, -1, true};
                else
                    survivors.push_back(2 * i + 1);
            }
            auto out = apply_memory_bound(joint, spec, 2 * n, trial);
            if (survivors.empty()) continue;
            std::vector<int> kept_positions;
            for (std::size_t k = 0; k < out.kept.size(); ++k)
                if (out.kept[k] % 2 == 1) kept_positions.push_back(static_cast<int>(k));
            const auto rho = partial_trace(out.memory, kept_positions);
            if (renyi_entropies(rho).s0 > static_cast<double>(survivors.size()) + 1e-9) ++violations;
        }
        auto rank_rep = exact_report("erasure_rank_bound", static_cast<double>(violations), 0.0, 0.0);
        rank_rep.trials = trials;
        d.push_back(rank_rep);
        return all_pass(d);
    });
}

}  // namespace

std::vector<CriterionResult> run_acceptance(std::uint64_t seed, std::ostream* progress) {
    std::vector<CriterionResult> out;
    const std::vector<std::function<CriterionResult()>> criteria{
        [&] { return criterion_uncertainty_two(seed); },
        [&] { return criterion_mub_and_minentropy(seed + 10); },
        [&] { return criterion_pmax(seed + 20); },
        [&] { return criterion_pa(seed + 30); },
        [&] { return criterion_honest_correctness(seed + 40); },
        [&] { return criterion_nonInteractivity(seed + 50); },
        [&] { return criterion_bell_attack(seed + 60); },
        [&] { return criterion_binding(seed + 70); },
        [&] { return criterion_sender_privacy(seed + 80); },
        [&] { return criterion_thresholds(seed + 90); },
        [&] { return criterion_purification(seed + 100); },
        [&] { return criterion_noisy_memory(seed + 110); },
    };
    for (const auto& run : criteria) {
        out.push_back(run());
        if (progress) {
            *progress << (out.back().pass ? "PASS" : "FAIL") << " criterion " << out.back().id
                      << ": " << out.back().title << "\n";
            if (!out.back().pass)
                for (const auto& rep : out.back().details)
                    if (!rep.passed())
                        *progress << "     " << rep.name << ": lhs = " << rep.lhs
                                  << ", rhs = " << rep.rhs << " (" << rep.note << ")\n";
            progress->flush();
        }
    }
    return out;
}

namespace {

void write_report_files(const std::string& out_dir, const std::string& format, const json& config,
                        const std::vector<BoundReport>& reports,
                        const std::vector<Transcript>& transcripts) {
    if (out_dir.empty()) return;
    std::filesystem::create_directories(out_dir);
    if (format == "csv") {
        std::ofstream f(out_dir + "/report.csv");
        f << "# config: " << config.dump() << "\n";
        f << reports_to_csv(reports);
    } else {
        json j;
        j["config"] = config;
        j["reports"] = json::parse(reports_to_json(reports));
        std::ofstream f(out_dir + "/report.json");
        f << j.dump(2) << "\n";
    }
    if (!transcripts.empty()) {
        std::filesystem::create_directories(out_dir + "/transcripts");
        for (std::size_t i = 0; i < transcripts.size(); ++i) {
            char name[32];
            std::snprintf(name, sizeof(name), "%03zu.json", i);
            std::ofstream f(out_dir + "/transcripts/" + name);
            f << transcripts[i].dump(2) << "\n";
        }
    }
}

json config_json(const ExperimentConfig& c) {
    return json{{"protocol", c.protocol}, {"check", c.check},     {"n", c.n},
                {"gamma", c.gamma},       {"phi", c.phi},         {"eta", c.eta},
                {"epsilon", c.epsilon},   {"code", c.code},       {"strategy", c.strategy},
                {"trials", c.trials},     {"samples", c.samples}, {"seed", c.seed},
                {"fixed_xor", c.fixed_xor}, {"memory", c.memory}};
}

void validate_config(const ExperimentConfig& c) {
    if (c.n < 1) throw std::invalid_argument("n must be >= 1");
    if (c.trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (c.phi < 0 || c.phi >= 0.5) throw std::invalid_argument("phi must be in [0, 1/2)");
    if (c.eta < 0 || c.eta >= 1 - c.phi) throw std::invalid_argument("eta must be in [0, 1 - phi)");
    if (c.gamma < 0) throw std::invalid_argument("gamma must be >= 0");
    if (c.format != "json" && c.format != "csv") throw std::invalid_argument("format: json|csv");
    if (c.memory != "bounded" && c.memory != "erasure")
        throw std::invalid_argument(
            "memory: bounded|erasure (the depolarizing regime below 1 - gamma is out of scope)");
}

int exit_status(const std::vector<BoundReport>& reports) {
    for (const auto& r : reports)
        if (!r.passed()) return 3;
    return 0;
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg, std::ostream& out) {
    if (cfg.n_list.size() > 1) {
        // Sweep: one pass per n, reports tagged by the active value.
        int worst = 0;
        for (int n : cfg.n_list) {
            ExperimentConfig sub = cfg;
            sub.n = n;
            sub.n_list.clear();
            if (!sub.out_dir.empty()) sub.out_dir += "/n" + std::to_string(n);
            out << "-- n = " << n << "\n";
            worst = std::max(worst, run_experiment(sub, out));
        }
        return worst;
    }

    try {
        validate_config(cfg);
    } catch (const std::exception& ex) {
        out << "config error: " << ex.what() << "\n";
        return 2;
    }

    std::vector<BoundReport> reports;
    std::vector<Transcript> transcripts;
    try {
        if (!cfg.check.empty()) {
            if (cfg.check == "uncertainty") {
                const int n = std::min(cfg.n, 4);
                for (auto& r : uncertainty_sweep(n, cfg.samples, cfg.seed)) reports.push_back(r);
            } else if (cfg.check == "pa") {
                for (auto& r : pa_sweep(cfg.seed)) reports.push_back(r);
            } else if (cfg.check == "binding") {
                Rng rng(cfg.seed);
                const double slack =
                    cfg.strategy.rfind("measure_all", 0) == 0 ? std::pow(0.75, cfg.n) : 1.0;
                auto est = estimate_binding([&] { return committer_by_name(cfg.strategy); },
                                            CommKind::Plain, cfg.n, WeakModelParams{}, cfg.epsilon,
                                            cfg.trials, slack, rng);
                reports.push_back(est.report);
            } else if (cfg.check == "privacy") {
                const int q = MemoryBound{cfg.gamma}.q_for(cfg.n);
                auto res = check_sender_privacy(store_subset_spec(cfg.n, q, Basis::Plus), cfg.gamma);
                reports.push_back(res.event_report);
                reports.push_back(res.distance_report);
            } else if (cfg.check == "thresholds") {
                for (auto [kind, name] :
                     {std::pair{ProtocolKind::Qot, "qot"}, {ProtocolKind::Bb84Qot, "bb84_qot"},
                      {ProtocolKind::Comm, "comm"}, {ProtocolKind::CommPrime, "comm_prime"}}) {
                    const auto th = threshold_gamma(kind, cfg.phi, cfg.eta);
                    auto rep = exact_report(std::string("threshold_") + name, 0.0, th.value, 1e-12);
                    if (th.clamped) {
                        rep.status = CheckStatus::Hypothesis;
                        rep.note = "warning: formula nonpositive at these (phi, eta); clamped to 0";
                    }
                    reports.push_back(rep);
                }
            } else {
                out << "config error: unknown check '" << cfg.check << "'\n";
                return 2;
            }
        } else if (cfg.protocol == "qot" || cfg.protocol == "epr_qot" ||
                   cfg.protocol == "bb84_qot" || cfg.protocol == "bb84_epr_qot") {
            LinearCode code = LinearCode::trivial();
            const LinearCode* code_ptr = nullptr;
            WeakModelParams params{cfg.phi, cfg.eta, 2};
            if (cfg.protocol.rfind("bb84", 0) == 0) {
                code = cfg.code == "auto" ? select_code(cfg.n, cfg.phi, cfg.epsilon)
                                          : code_by_name(cfg.code);
                code_ptr = &code;
            }
            std::string strategy = cfg.strategy;
            if (cfg.memory == "erasure" && strategy.rfind("erasure", 0) != 0)
                strategy = "erasure:p=" + std::to_string(1.0 - cfg.gamma);
            auto batch = run_ot_batch(cfg.protocol, cfg.n, params, code_ptr, strategy,
                                      cfg.fixed_xor, cfg.trials, cfg.seed,
                                      cfg.dump_transcripts ? 20 : 0);
            transcripts = std::move(batch.kept_transcripts);
            if (batch.guessed > 0) {
                const double rate = batch.guess_right / static_cast<double>(batch.guessed);
                double rhs = 1.0;
                std::string note = "no exact bound computed for this strategy";
                if (cfg.fixed_xor) {
                    note = "fixed-linear mask variant: no privacy bound applies";
                } else if (cfg.protocol.rfind("bb84", 0) != 0 && cfg.n <= 7) {
                    if (cfg.strategy.rfind("store_subset", 0) == 0) {
                        auto recv = receiver_by_name(cfg.strategy, cfg.n);
                        const Basis rest = cfg.strategy.find("basis=x") != std::string::npos
                                               ? Basis::Times
                                               : Basis::Plus;
                        rhs = 0.5 + exact_receiver_distance(
                                        store_subset_spec(cfg.n, recv->memory_budget(cfg.n), rest));
                        note = "1/2 + exact d";
                    } else if (cfg.strategy.rfind("bell_xor", 0) == 0) {
                        rhs = 0.5 + exact_receiver_distance(bell_pairs_spec(all_ones(cfg.n), false));
                        note = "1/2 + exact d";
                    }
                }
                auto rep = mc_report("guess_rate", rate, rhs, batch.guessed,
                                     std::sqrt(0.25 / static_cast<double>(batch.guessed)), cfg.seed,
                                     1.0);
                rep.note = note;
                reports.push_back(rep);
            } else {
                const double cond =
                    batch.correct_given_a / std::max(1.0, static_cast<double>(batch.received));
                auto rep = mc_report("honest_conditional_success", 1.0 - cond, 0.0, batch.received,
                                     std::sqrt(0.25 / std::max(1.0, double(batch.received))), cfg.seed);
                rep.note = "Pr[b'=b | a=1] = " + std::to_string(cond);
                reports.push_back(rep);
                const double rate = batch.received / static_cast<double>(batch.trials);
                reports.push_back(mc_report("receive_rate_dev", std::abs(rate - 0.5), 0.0,
                                            batch.trials,
                                            std::sqrt(0.25 / static_cast<double>(batch.trials)),
                                            cfg.seed));
            }
        } else if (cfg.protocol == "comm" || cfg.protocol == "epr_comm" ||
                   cfg.protocol == "comm_prime") {
            WeakModelParams params{cfg.phi, cfg.eta, 2};
            const CommKind kind = cfg.protocol == "comm"
                                      ? CommKind::Plain
                                      : (cfg.protocol == "epr_comm" ? CommKind::Epr
                                                                    : CommKind::Tolerant);
            if (cfg.strategy.rfind("honest", 0) == 0) {
                auto batch = run_comm_batch(cfg.protocol, cfg.n, params, cfg.epsilon, cfg.strategy,
                                            0, 0, cfg.trials, cfg.seed,
                                            cfg.dump_transcripts ? 20 : 0);
                transcripts = std::move(batch.kept_transcripts);
                const double accept = batch.accepts / static_cast<double>(batch.trials);
                auto rep = mc_report("honest_accept_deficit", 1.0 - accept,
                                     cfg.protocol == "comm_prime" ? 0.01 : 0.0, batch.trials,
                                     std::sqrt(0.25 / static_cast<double>(batch.trials)), cfg.seed);
                rep.note = "accept rate " + std::to_string(accept);
                reports.push_back(rep);
            } else {
                Rng rng(cfg.seed);
                const double slack = cfg.strategy.rfind("measure_all", 0) == 0
                                         ? std::pow(0.75, cfg.n)
                                         : 1.0;
                auto est = estimate_binding([&] { return committer_by_name(cfg.strategy); }, kind,
                                            cfg.n, params, cfg.epsilon, cfg.trials, slack, rng);
                if (cfg.gamma >= threshold_gamma(kind == CommKind::Tolerant ? ProtocolKind::CommPrime
                                                                            : ProtocolKind::Comm,
                                                 cfg.phi, cfg.eta)
                                      .value) {
                    est.report.status = CheckStatus::Hypothesis;
                    est.report.note += "; gamma above the binding threshold, hypothesis-violating";
                }
                reports.push_back(est.report);
            }
        } else {
            out << "config error: unknown protocol '" << cfg.protocol << "'\n";
            return 2;
        }
    } catch (const std::invalid_argument& ex) {
        out << "config error: " << ex.what() << "\n";
        return 2;
    } catch (const std::runtime_error& ex) {
        out << "config error: " << ex.what() << "\n";
        return 2;
    }

    for (const auto& r : reports)
        out << to_string(r.status) << "  " << r.name << ": lhs = " << r.lhs << ", rhs = " << r.rhs
            << (r.note.empty() ? "" : "  [" + r.note + "]") << "\n";
    write_report_files(cfg.out_dir, cfg.format, config_json(cfg), reports, transcripts);
    return exit_status(reports);
}

int verify_bounds(const VerifyConfig& cfg, std::ostream& out) {
    // Targeted hypothesis checks when the caller pins parameters.
    if (cfg.gamma >= 0 && !cfg.protocol.empty()) {
        const ProtocolKind kind = cfg.protocol == "comm" || cfg.protocol == "epr_comm"
                                      ? ProtocolKind::Comm
                                      : (cfg.protocol == "comm_prime" ? ProtocolKind::CommPrime
                                         : cfg.protocol == "bb84_qot" ? ProtocolKind::Bb84Qot
                                                                      : ProtocolKind::Qot);
        const auto th = threshold_gamma(kind, std::max(0.0, cfg.phi), std::max(0.0, cfg.eta));
        auto rep = exact_report("gamma_vs_threshold", cfg.gamma, th.value, 1e-12);
        if (cfg.gamma >= th.value) {
            rep.status = CheckStatus::Hypothesis;
            rep.note = "gamma " + std::to_string(cfg.gamma) + " is at or above the threshold " +
                       std::to_string(th.value) + "; theorem makes no claim (not a failure)";
        }
        out << to_string(rep.status) << "  " << rep.name << ": " << rep.note << "\n";
        write_report_files(cfg.out_dir, cfg.format,
                           json{{"gamma", cfg.gamma}, {"protocol", cfg.protocol}}, {rep}, {});
        return 0;
    }
    if (!cfg.protocol.empty() && (cfg.phi >= 0 || cfg.eta >= 0)) {
        const ProtocolKind kind = cfg.protocol == "comm_prime" ? ProtocolKind::CommPrime
                                  : cfg.protocol == "bb84_qot" ? ProtocolKind::Bb84Qot
                                  : cfg.protocol.rfind("comm", 0) == 0 ? ProtocolKind::Comm
                                                                       : ProtocolKind::Qot;
        const auto th = threshold_gamma(kind, std::max(0.0, cfg.phi), std::max(0.0, cfg.eta));
        auto rep = exact_report("threshold_" + cfg.protocol, 0.0, th.value, 1e-12);
        if (th.clamped) {
            rep.status = CheckStatus::Hypothesis;
            rep.note = "warning: threshold formula nonpositive at these (phi, eta); clamped to 0";
        }
        out << to_string(rep.status) << "  threshold gamma(" << cfg.protocol
            << ") = " << th.value << (th.clamped ? "  [clamped, see note]" : "") << "\n";
        write_report_files(cfg.out_dir, cfg.format,
                           json{{"protocol", cfg.protocol}, {"phi", cfg.phi}, {"eta", cfg.eta}},
                           {rep}, {});
        return 0;
    }

    const auto results = run_acceptance(cfg.seed, &out);
    std::vector<BoundReport> flat;
    int failures = 0;
    for (const auto& c : results) {
        failures += !c.pass;
        for (const auto& r : c.details) flat.push_back(r);
    }
    out << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria FAILED")
        << " (" << results.size() << " total)\n";
    write_report_files(cfg.out_dir, cfg.format, json{{"seed", cfg.seed}}, flat, {});
    return failures == 0 ? 0 : 3;
}

}  // namespace bqs
