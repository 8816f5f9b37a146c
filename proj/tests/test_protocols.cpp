#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bqs/adversary.hpp"
#include "bqs/protocols.hpp"

using namespace bqs;

namespace {

struct OtStats {
    int trials = 0;
    int received = 0;        // a = 1
    int correct_given_a = 0; // b' = b among a = 1
};

template <typename RunFn>
OtStats ot_stats(RunFn&& run, int trials, std::uint64_t seed) {
    OtStats s;
    Rng master(seed);
    for (int t = 0; t < trials; ++t) {
        Rng rng = master.derive(static_cast<std::uint64_t>(t));
        const int b = t & 1;
        const Transcript tr = run(b, rng);
        ++s.trials;
        const int a = tr.outputs.at("a").get<int>();
        const int bp = tr.outputs.at("b_prime").get<int>();
        if (a == 1) {
            ++s.received;
            s.correct_given_a += (bp == b);
        }
    }
    return s;
}

}  // namespace

TEST_CASE("qot honest: conditional correctness exact, receive rate 1/2 (4 sigma)") {
    const int trials = 2000;
    auto stats = ot_stats(
        [](int b, Rng& rng) {
            HonestOtReceiver recv;
            return run_qot(b, QotConfig{6, std::nullopt, false}, recv, rng);
        },
        trials, 7);
    CHECK(stats.correct_given_a == stats.received);  // exactly 1, noiseless
    const double se = std::sqrt(0.25 / trials);
    CHECK(std::abs(stats.received / double(trials) - 0.5) <= 4 * se);
}

TEST_CASE("qot transcript structure: non-interactive, bound before announce, a=0 => b'=0") {
    Rng rng(99);
    for (int t = 0; t < 50; ++t) {
        Rng trial = rng.derive(static_cast<std::uint64_t>(t));
        HonestOtReceiver recv;
        const Transcript tr = run_qot(t & 1, QotConfig{4, std::nullopt, false}, recv, trial);
        CHECK(tr.count_messages(Party::B, Party::A) == 0);
        CHECK(tr.memory_bound_at >= 0);
        // The announce message must come at or after the bound marker.
        int announce_at = -1;
        for (std::size_t i = 0; i < tr.messages.size(); ++i)
            if (tr.messages[i].step == "announce") announce_at = static_cast<int>(i);
        REQUIRE(announce_at >= 0);
        CHECK(tr.memory_bound_at <= announce_at);
        if (tr.outputs.at("a").get<int>() == 0) CHECK(tr.outputs.at("b_prime").get<int>() == 0);
        CHECK(tr.retained_qubits == 0);
    }
}

TEST_CASE("qot matched basis by fiat: a=1 and b'=b whenever announce basis matches") {
    Rng rng(11);
    int matched = 0;
    for (int t = 0; t < 200; ++t) {
        Rng trial = rng.derive(static_cast<std::uint64_t>(t));
        FixedBasisReceiver recv(Basis::Times);
        const int b = t & 1;
        const Transcript tr = run_qot(b, QotConfig{5, std::nullopt, false}, recv, trial);
        if (tr.inputs.at("r").get<std::string>() == "x") {
            ++matched;
            CHECK(tr.outputs.at("a").get<int>() == 1);
            CHECK(tr.outputs.at("b_prime").get<int>() == b);
        } else {
            CHECK(tr.outputs.at("a").get<int>() == 0);
        }
    }
    CHECK(matched > 50);
}

TEST_CASE("qot malformed announce: honest receiver samples its outputs") {
    Rng rng(13);
    int a1 = 0, b1 = 0;
    const int trials = 400;
    for (int t = 0; t < trials; ++t) {
        Rng trial = rng.derive(static_cast<std::uint64_t>(t));
        HonestOtReceiver recv;
        const Transcript tr = run_qot(0, QotConfig{3, std::nullopt, true}, recv, trial);
        const int a = tr.outputs.at("a").get<int>();
        const int bp = tr.outputs.at("b_prime").get<int>();
        if (a == 0) CHECK(bp == 0);
        a1 += a;
        b1 += bp;
    }
    // a uniform; b' uniform on the received half.
    const double se_a = std::sqrt(0.25 / trials) * trials;
    const double se_b = std::sqrt(0.25 * 0.75 / trials) * trials;
    CHECK(std::abs(a1 - trials / 2.0) <= 4 * se_a);
    CHECK(std::abs(b1 - trials / 4.0) <= 4 * se_b);
}

TEST_CASE("epr-qot honest: correctness matches qot; n=1 matched outcomes agree") {
    const int trials = 1500;
    auto stats = ot_stats(
        [](int b, Rng& rng) {
            HonestOtReceiver recv;
            return run_epr_qot(b, QotConfig{4, std::nullopt, false}, recv, rng);
        },
        trials, 21);
    CHECK(stats.correct_given_a == stats.received);
    const double se = std::sqrt(0.25 / trials);
    CHECK(std::abs(stats.received / double(trials) - 0.5) <= 4 * se);

    // n=1: when bases match, receiver's bit equals the sender's measured x.
    Rng rng(22);
    for (int t = 0; t < 300; ++t) {
        Rng trial = rng.derive(static_cast<std::uint64_t>(t));
        HonestOtReceiver recv;
        const Transcript tr = run_epr_qot(0, QotConfig{1, std::nullopt, false}, recv, trial);
        const std::string r = tr.inputs.at("r").get<std::string>();
        const std::string rp(1, basis_char(recv.chosen_basis()));
        if (r == rp)
            CHECK(recv.measured_bits().to_string() == tr.inputs.at("x").get<std::string>());
    }
}

TEST_CASE("bb84-qot degenerate model phi=eta=0 behaves like qot on I") {
    const auto code = LinearCode::trivial();
    const int trials = 1200;
    auto stats = ot_stats(
        [&](int b, Rng& rng) {
            HonestOtReceiver recv;
            return run_bb84_qot(b, Bb84Config{8, WeakModelParams{0.0, 0.0, 2}, &code}, recv, rng);
        },
        trials, 31);
    CHECK(stats.correct_given_a == stats.received);
    const double se = std::sqrt(0.25 / trials);
    CHECK(std::abs(stats.received / double(trials) - 0.5) <= 4 * se);
}

TEST_CASE("bb84-qot n=1: the empty-index-set announce path works") {
    // With one index, I is empty whenever theta misses r; the announce then
    // carries an empty syndrome and hash and b' = e on a match.
    const auto code = LinearCode::hamming74();
    Rng rng(271);
    int empty_seen = 0;
    for (int t = 0; t < 60; ++t) {
        Rng trial = rng.derive(static_cast<std::uint64_t>(t));
        HonestOtReceiver recv;
        const int b = t & 1;
        const Transcript tr =
            run_bb84_qot(b, Bb84Config{1, WeakModelParams{0.0, 0.0, 2}, &code}, recv, trial);
        const auto& announce = tr.messages.back().payload;
        if (announce.at("I").get<std::vector<int>>().empty()) ++empty_seen;
        if (tr.outputs.at("a").get<int>() == 1)
            CHECK(tr.outputs.at("b_prime").get<int>() == b);
    }
    CHECK(empty_seen > 10);
}

TEST_CASE("bb84-qot with noise and rep5: honest failures bounded by block arithmetic") {
    const auto code = LinearCode::repetition(5);
    const double phi = 0.02;
    const int n = 200, trials = 150;
    // Per-block miscorrection = P[>= 3 flips in 5]; blocks <= n/5 worst case.
    double p_blk = 0.0;
    for (int k = 3; k <= 5; ++k) {
        double c = 1.0;
        for (int j = 0; j < k; ++j) c = c * (5 - j) / (j + 1);
        p_blk += c * std::pow(phi, k) * std::pow(1 - phi, 5 - k);
    }
    const double fail_bound = (n / 5.0) * p_blk;

    auto stats = ot_stats(
        [&](int b, Rng& rng) {
            HonestOtReceiver recv;
            return run_bb84_qot(b, Bb84Config{n, WeakModelParams{phi, 0.0, 2}, &code}, recv, rng);
        },
        trials, 41);
    REQUIRE(stats.received > 0);
    const double fail_rate = 1.0 - stats.correct_given_a / double(stats.received);
    const double se = std::sqrt(fail_bound * (1 - fail_bound) / stats.received + 1e-9);
    CHECK(fail_rate <= fail_bound + 4 * se + 0.02);
}

TEST_CASE("bb84-qot at n=400 with select_code: failures within the block bound") {
    const double phi = 0.02, eps = 0.05;
    const auto code = select_code(400, phi, eps);  // hamming7 qualifies at best rate
    const int n = 400, trials = 150;
    double p_blk = 0.0;
    for (int k = 2; k <= 7; ++k) {
        double c = 1.0;
        for (int j = 0; j < k; ++j) c = c * (7 - j) / (j + 1);
        p_blk += c * std::pow(phi, k) * std::pow(1 - phi, 7 - k);
    }
    const double fail_bound = (n / 7.0) * p_blk;  // worst-case block count

    auto stats = ot_stats(
        [&](int b, Rng& rng) {
            HonestOtReceiver recv;
            return run_bb84_qot(b, Bb84Config{n, WeakModelParams{phi, 0.0, 2}, &code}, recv, rng);
        },
        trials, 404);
    REQUIRE(stats.received > 0);
    const double fail_rate = 1.0 - stats.correct_given_a / double(stats.received);
    const double se = std::sqrt(fail_bound * (1 - fail_bound) / stats.received);
    CHECK(fail_rate <= fail_bound + 4 * se);
}

TEST_CASE("bb84-epr-qot: weak indices respect the I'(theta) bookkeeping") {
    const auto code = LinearCode::trivial();
    Rng rng(51);
    int weak_seen = 0;
    for (int t = 0; t < 120; ++t) {
        Rng trial = rng.derive(static_cast<std::uint64_t>(t));
        HonestOtReceiver recv;
        const Transcript tr = run_bb84_epr_qot(
            0, Bb84Config{10, WeakModelParams{0.0, 0.25, 2}, &code}, recv, trial);
        const auto wp = tr.inputs.at("weak_plus").get<std::vector<int>>();
        const auto wt = tr.inputs.at("weak_times").get<std::vector<int>>();
        weak_seen += static_cast<int>(wp.size() + wt.size());
        std::vector<int> index_set;
        for (const auto& m : tr.messages)
            if (m.step == "announce") index_set = m.payload.at("I").get<std::vector<int>>();
        const std::string r = tr.inputs.contains("r") ? tr.inputs.at("r").get<std::string>() : "";
        // Weak indices of the matching basis must be inside I, the others
        // outside (Fig. 4 step 4: I = J union I'_r, J from single-copy ones).
        const auto& announce = tr.messages.back().payload;
        const std::string rr = announce.at("r").get<std::string>();
        const auto& in_r = (rr == "+") ? wp : wt;
        const auto& out_r = (rr == "+") ? wt : wp;
        for (int i : in_r)
            CHECK(std::find(index_set.begin(), index_set.end(), i) != index_set.end());
        for (int i : out_r)
            CHECK(std::find(index_set.begin(), index_set.end(), i) == index_set.end());
        (void)r;
    }
    CHECK(weak_seen > 100);
}

TEST_CASE("memory bound enforcement is structural") {
    // A strategy that keeps everything while declaring budget 0 must trip the
    // runner's check.
    class Hoarder : public OtReceiver {
    public:
        std::string name() const override { return "hoarder"; }
        int memory_budget(int) const override { return 0; }
        void on_qubits(QuantumRegister&, const std::vector<int>&, Rng&) override {}
        void on_memory_bound(QuantumRegister&, const std::vector<int>&, Rng&) override {}
        ReceiverFinish on_announce_qot(const AnnounceQot&, QuantumRegister&,
                                       const std::vector<int>&, Rng&) override {
            return {};
        }
    };
    Rng rng(61);
    Hoarder h;
    CHECK_THROWS_AS(run_qot(0, QotConfig{4, std::nullopt, false}, h, rng), MemoryBoundViolation);
}

TEST_CASE("comm honest: accept always; commit phase sends nothing to V") {
    Rng rng(71);
    for (int t = 0; t < 100; ++t) {
        Rng trial = rng.derive(static_cast<std::uint64_t>(t));
        const int b = t & 1;
        HonestCommitter c(b);
        auto session = run_comm(b, 8, c, trial);
        CHECK(session.transcript().count_messages(Party::C, Party::V) == 0);
        CHECK(session.open(b, trial));
        CHECK(session.transcript().count_messages(Party::C, Party::V,
                                                  session.transcript().open_phase_from) == 1);
        CHECK(session.transcript().count_messages(Party::C, Party::V, 0,
                                                  session.transcript().open_phase_from) == 0);
    }
}

TEST_CASE("comm honest committer opening the wrong bit: accept rate (3/4)^n") {
    Rng rng(81);
    const int n = 8, trials = 3000;
    int accepts = 0;
    for (int t = 0; t < trials; ++t) {
        Rng trial = rng.derive(static_cast<std::uint64_t>(t));
        HonestCommitter c(0);
        auto session = run_comm(0, n, c, trial);
        accepts += session.open(1, trial);
    }
    const double want = std::pow(0.75, n);  // per index: checked w.p. 1/2, match w.p. 1/2
    const double se = std::sqrt(want * (1 - want) / trials);
    CHECK(std::abs(accepts / double(trials) - want) <= 4 * se);
}

TEST_CASE("epr-comm: honest accept, I-sampling rate 1/2, wrong-bit oracle matches comm") {
    Rng rng(91);
    const int n = 8;
    int checked_total = 0, trials_done = 0;
    for (int t = 0; t < 600; ++t) {
        Rng trial = rng.derive(static_cast<std::uint64_t>(t));
        HonestCommitter c(1);
        auto session = run_epr_comm(1, n, c, trial);
        CHECK(session.open(1, trial));
        checked_total += session.transcript().outputs.at("checked").get<int>();
        ++trials_done;
    }
    const double mean_checked = checked_total / double(trials_done);
    const double se = std::sqrt(n * 0.25 / trials_done);
    CHECK(std::abs(mean_checked - n / 2.0) <= 4 * se);

    int accepts = 0;
    const int trials = 3000;
    for (int t = 0; t < trials; ++t) {
        Rng trial = rng.derive(static_cast<std::uint64_t>(10000 + t));
        HonestCommitter c(0);
        auto session = run_epr_comm(0, n, c, trial);
        accepts += session.open(1, trial);
    }
    const double want = std::pow(0.75, n);
    const double se2 = std::sqrt(want * (1 - want) / trials);
    CHECK(std::abs(accepts / double(trials) - want) <= 4 * se2);
}

TEST_CASE("comm-prime: phi=0 reduces to comm; honest accept at phi=0.05") {
    Rng rng(101);
    // phi = 0: tolerant check with zero allowance = plain comm.
    for (int t = 0; t < 60; ++t) {
        Rng trial = rng.derive(static_cast<std::uint64_t>(t));
        HonestCommitter c(1);
        auto session = run_comm_prime(1, 12, WeakModelParams{0.0, 0.0, 2}, 0.01, c, trial);
        CHECK(session.open(1, trial));
    }
    // Noisy channel: honest accepts nearly always at n = 400.
    int accepts = 0;
    const int trials = 150;
    for (int t = 0; t < trials; ++t) {
        Rng trial = rng.derive(static_cast<std::uint64_t>(5000 + t));
        HonestCommitter c(0);
        auto session = run_comm_prime(0, 400, WeakModelParams{0.05, 0.0, 2}, 0.05, c, trial);
        accepts += session.open(0, trial);
    }
    CHECK(accepts >= static_cast<int>(0.97 * trials));
}

TEST_CASE("comm-prime: wrong-bit opening bounded by the binomial tail") {
    // Opening the other bit leaves per-checked-position success 1/2; the
    // verifier demands all but a (phi+eps)-fraction of ~n/2 positions,
    // so acceptance is bounded by P[Bin(m, 1/2) >= m - floor((phi+eps) m)].
    Rng rng(111);
    const int n = 100, trials = 2000;
    const double phi = 0.05, eps = 0.05;
    int accepts = 0;
    for (int t = 0; t < trials; ++t) {
        Rng trial = rng.derive(static_cast<std::uint64_t>(t));
        HonestCommitter c(0);
        auto session = run_comm_prime(0, n, WeakModelParams{phi, 0.0, 2}, eps, c, trial);
        accepts += session.open(1, trial);
    }
    // Tail at the typical m = n/2: need >= 45 of 50 fair coins.
    double tail = 0.0;
    const int m = n / 2;
    const int need = m - static_cast<int>((phi + eps) * m);
    for (int k = need; k <= m; ++k)
        tail += std::exp(std::lgamma(m + 1) - std::lgamma(k + 1) - std::lgamma(m - k + 1)) *
                std::pow(0.5, m);
    const double se = std::sqrt(std::max(tail, 1.0 / trials) / trials);
    CHECK(accepts / double(trials) <= 8 * tail + 4 * se);
}

TEST_CASE("deterministic replay: identical seeds give byte-identical transcripts") {
    const auto code = LinearCode::hamming74();
    auto run_one = [&](std::uint64_t seed) {
        Rng rng(seed);
        HonestOtReceiver recv;
        return run_bb84_qot(1, Bb84Config{16, WeakModelParams{0.05, 0.1, 2}, &code}, recv, rng)
            .dump();
    };
    CHECK(run_one(12345) == run_one(12345));
    CHECK(run_one(12345) != run_one(54321));
}
