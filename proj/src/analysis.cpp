#include "bqs/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <stdexcept>

namespace bqs {

namespace {

std::vector<int> iota_vec(int n) {
    std::vector<int> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = i;
    return v;
}

double popcount_parity(std::uint64_t v) { return static_cast<double>(std::popcount(v) & 1); }

}  // namespace

PureState random_pure_state(int qubits, Rng& rng) {
    Eigen::VectorXcd v(Eigen::Index(1) << qubits);
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = Cplx(rng.gaussian(), rng.gaussian());
    v /= v.norm();
    return PureState(qubits, std::move(v));
}

DensityOp random_reduced_state(int a_qubits, int b_qubits, Rng& rng) {
    const PureState joint = random_pure_state(a_qubits + b_qubits, rng);
    return partial_trace(joint, iota_vec(a_qubits));
}

BoundReport check_uncertainty_two(const DensityOp& rho_a, const std::vector<std::uint64_t>& l_plus,
                                  const std::vector<std::uint64_t>& l_times) {
    const int n = rho_a.qubits();
    const auto reg = iota_vec(n);
    const Eigen::VectorXd qp = outcome_distribution(rho_a, reg, BasisString(reg.size(), Basis::Plus));
    const Eigen::VectorXd qt = outcome_distribution(rho_a, reg, BasisString(reg.size(), Basis::Times));
    double lhs = 0;
    for (auto x : l_plus) lhs += qp(static_cast<Eigen::Index>(x));
    for (auto z : l_times) lhs += qt(static_cast<Eigen::Index>(z));
    const double cross = std::sqrt(std::pow(2.0, -n) * static_cast<double>(l_plus.size()) *
                                   static_cast<double>(l_times.size()));
    const double rhs = (1.0 + cross) * (1.0 + cross);
    auto rep = exact_report("uncertainty_two_bases", lhs, rhs, 1e-9, 2.0);
    if (rep.status == CheckStatus::Vacuous) rep.note = "bound non-informative (rhs >= 2)";
    return rep;
}

BoundReport check_uncertainty_mub(const DensityOp& rho_a,
                                  const std::vector<std::vector<std::uint64_t>>& sets) {
    const int n = rho_a.qubits();
    const auto mubs = mub_bases(n);
    const auto m = static_cast<int>(sets.size());
    if (m < 2 || m > 3) throw std::invalid_argument("check_uncertainty_mub: 2 or 3 sets");
    double lhs = 0;
    for (int i = 0; i < m; ++i) {
        const Eigen::VectorXd q = outcome_distribution(rho_a, mubs[static_cast<std::size_t>(i)]);
        for (auto x : sets[static_cast<std::size_t>(i)]) lhs += q(static_cast<Eigen::Index>(x));
    }
    double rhs = 1.0 - m * (m - 1) / 2.0;
    for (int j = 0; j < m; ++j)
        for (int k = j + 1; k < m; ++k) {
            const double cross =
                std::sqrt(std::pow(2.0, -n) * static_cast<double>(sets[static_cast<std::size_t>(j)].size()) *
                          static_cast<double>(sets[static_cast<std::size_t>(k)].size()));
            rhs += (1.0 + cross) * (1.0 + cross);
        }
    auto rep = exact_report("uncertainty_mub", lhs, rhs, 1e-9, static_cast<double>(m));
    if (rep.status == CheckStatus::Vacuous) rep.note = "bound non-informative (rhs >= N+1)";
    return rep;
}

MinEntropySumCheck check_minentropy_sum(const DensityOp& rho_a, int bases) {
    const int n = rho_a.qubits();
    if (bases < 2 || bases > 3) throw std::invalid_argument("check_minentropy_sum: 2 or 3 bases");
    const auto mubs = mub_bases(n);
    double sum = 0;
    for (int i = 0; i < bases; ++i)
        sum += min_entropy(ProbVector(outcome_distribution(rho_a, mubs[static_cast<std::size_t>(i)])));
    // Singleton sets in the MUB relation give sum(q_inf^i) <= 1 + pairs *
    // (2^{1-n/2} + 2^{-n}); the AM-GM step turns that into the slack below.
    const double pairs = bases * (bases - 1) / 2.0;
    const double slack_bound =
        std::log2(1.0 + pairs * (std::pow(2.0, 1.0 - 0.5 * n) + std::pow(2.0, -n)));
    const double measured_slack = std::log2(static_cast<double>(bases)) - sum / bases;
    MinEntropySumCheck out;
    out.sum = sum;
    out.measured_slack = measured_slack;
    out.slack_bound = slack_bound;
    out.report = exact_report("minentropy_sum_deficiency", bases * measured_slack,
                              bases * slack_bound, 1e-9);
    out.report.note = "sum of min-entropies " + std::to_string(sum) + " vs (N+1)log(N+1) = " +
                      std::to_string(bases * std::log2(static_cast<double>(bases)));
    return out;
}

BoundReport check_pmax_product(const DensityOp& rho_a) {
    const int n = rho_a.qubits();
    const auto reg = iota_vec(n);
    const double qp =
        outcome_distribution(rho_a, reg, BasisString(reg.size(), Basis::Plus)).maxCoeff();
    const double qt =
        outcome_distribution(rho_a, reg, BasisString(reg.size(), Basis::Times)).maxCoeff();
    const double c = std::pow(2.0, -0.5 * n);
    const double rhs = 0.25 * std::pow(1.0 + c, 4.0);
    return exact_report("pmax_product", qp * qt, rhs, 1e-9, 1.0);
}

SmallSets SmallSets::build(const Eigen::VectorXd& dist_plus, const Eigen::VectorXd& dist_times,
                           double gamma, double kappa) {
    SmallSets s;
    const auto dim = dist_plus.size();
    int n = 0;
    while ((Eigen::Index(1) << n) < dim) ++n;
    s.n = n;
    s.gamma = gamma;
    s.kappa = kappa;
    s.threshold = std::pow(2.0, -(gamma + kappa) * n);
    s.in_plus.assign(static_cast<std::size_t>(dim), 0);
    s.in_times.assign(static_cast<std::size_t>(dim), 0);
    for (Eigen::Index x = 0; x < dim; ++x) {
        if (dist_plus(x) <= s.threshold) {
            s.in_plus[static_cast<std::size_t>(x)] = 1;
            s.q_plus += dist_plus(x);
        } else {
            ++s.l_plus;
        }
        if (dist_times(x) <= s.threshold) {
            s.in_times[static_cast<std::size_t>(x)] = 1;
            s.q_times += dist_times(x);
        } else {
            ++s.l_times;
        }
    }
    return s;
}

SmallSetsCheck check_small_sets_mass(const DensityOp& rho_a, double gamma, double kappa) {
    const int n = rho_a.qubits();
    const auto reg = iota_vec(n);
    const Eigen::VectorXd qp = outcome_distribution(rho_a, reg, BasisString(reg.size(), Basis::Plus));
    const Eigen::VectorXd qt = outcome_distribution(rho_a, reg, BasisString(reg.size(), Basis::Times));
    SmallSetsCheck out;
    out.sets = SmallSets::build(qp, qt, gamma, kappa);
    // Rearranged two-basis relation with the measured complement sizes.
    const double cross = std::sqrt(std::pow(2.0, -n) * static_cast<double>(out.sets.l_plus) *
                                   static_cast<double>(out.sets.l_times));
    const double slack_bound = (1.0 + cross) * (1.0 + cross) - 1.0;
    const double slack = 1.0 - (out.sets.q_plus + out.sets.q_times);
    out.report = exact_report("small_sets_mass_slack", slack, slack_bound, 1e-9, 1.0);
    out.report.note = "q+ = " + std::to_string(out.sets.q_plus) +
                      ", qx = " + std::to_string(out.sets.q_times);
    return out;
}

namespace {

// 1/2 tr|m0 - m1| of two positive blocks with tr(m0 + m1) = 1; this equals
// the distance-from-uniform of the binary ensemble they encode.
double dfu_from_blocks(const Eigen::MatrixXcd& m0, const Eigen::MatrixXcd& m1) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m0 - m1, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace

PaCheck check_pa_bound(const CqEnsemble& ensemble) {
    ensemble.validate();
    const auto n = static_cast<int>(ensemble.entries.front().x.size());
    const int q = ensemble.side_qubits();
    const Eigen::Index d = ensemble.entries.front().rho.dim();

    // lhs: exact average over the whole family of the masked-bit distance.
    double lhs = 0;
    const std::uint64_t family = 1ULL << n;
    for (std::uint64_t rv = 0; rv < family; ++rv) {
        const BitString r = BitString::from_value(rv, static_cast<std::size_t>(n));
        Eigen::MatrixXcd m0 = Eigen::MatrixXcd::Zero(d, d), m1 = Eigen::MatrixXcd::Zero(d, d);
        for (const auto& entry : ensemble.entries)
            ((r.dot(entry.x) == 0) ? m0 : m1) += entry.p * entry.rho.matrix();
        lhs += dfu_from_blocks(m0, m1);
    }
    lhs /= static_cast<double>(family);

    // S2 of the cq state from its block spectrum; S0 of the mixture.
    double collision = 0;  // sum_x p_x^2 tr(rho_x^2)
    double pmax = 0;
    for (const auto& entry : ensemble.entries) {
        collision += entry.p * entry.p * (entry.rho.matrix() * entry.rho.matrix()).trace().real();
        pmax = std::max(pmax, entry.p);
    }
    const double s2_joint = -std::log2(collision);
    const double s0_mix = renyi_entropies(ensemble.average()).s0;
    const double h_inf = -std::log2(pmax);

    PaCheck out;
    out.lhs = lhs;
    out.rhs_s2s0 = 0.5 * std::pow(2.0, -0.5 * (s2_joint - s0_mix - 1.0));
    out.rhs_hinf = 0.5 * std::pow(2.0, -0.5 * (h_inf - q - 1.0));
    out.report = exact_report("pa_bound_s2_s0", out.lhs, out.rhs_s2s0, 1e-9, 0.5);
    out.report_weak = exact_report("pa_bound_hinf_q", out.lhs, out.rhs_hinf, 1e-9, 0.5);
    out.report_order = exact_report("pa_bound_ordering", out.rhs_s2s0, out.rhs_hinf, 1e-9);
    return out;
}

BoundReport check_ball_guess(const CqEnsemble& ensemble, const ProjectiveGuesser& guesser,
                             int radius) {
    ensemble.validate();
    const auto n = static_cast<int>(ensemble.entries.front().x.size());
    const int q = ensemble.side_qubits();
    if (static_cast<int>(guesser.bases.size()) != q)
        throw std::invalid_argument("check_ball_guess: guesser bases must cover the side register");
    const HammingBall ball(n, radius);

    double pmax = 0;
    double success = 0;
    const auto reg = iota_vec(q);
    for (const auto& entry : ensemble.entries) {
        pmax = std::max(pmax, entry.p);
        if (q == 0) {
            const BitString guess = guesser.decode(BitString{});
            success += entry.p * (ball.contains(entry.x, guess) ? 1.0 : 0.0);
            continue;
        }
        const Eigen::VectorXd dist = outcome_distribution(entry.rho, reg, guesser.bases);
        for (Eigen::Index o = 0; o < dist.size(); ++o) {
            if (dist(o) <= 0) continue;
            const BitString guess =
                guesser.decode(BitString::from_value(static_cast<std::uint64_t>(o),
                                                     static_cast<std::size_t>(q)));
            if (ball.contains(entry.x, guess)) success += entry.p * dist(o);
        }
    }
    const double h_inf = -std::log2(pmax);
    const double rhs = std::pow(2.0, -0.5 * (h_inf - q - 1.0) + ball.log2_size());
    auto rep = exact_report("ball_guess", success, rhs, 1e-9, 1.0);
    if (rep.status == CheckStatus::Vacuous) rep.note = "bound non-informative (rhs >= 1)";
    return rep;
}

// --- purified-protocol analysis ---

namespace {

struct WorkBranch {
    std::string visible;
    Eigen::VectorXcd amps;  // unnormalized; squared norm = branch probability
    int qubits;
};

// Project-and-drop one qubit (assumed already rotated into the measurement
// frame) at position `pos`, keeping the `bit` slice. No renormalization.
Eigen::VectorXcd slice_bit(const Eigen::VectorXcd& a, int m, int pos, int bit) {
    const int mk = m - 1;
    Eigen::VectorXcd out(Eigen::Index(1) << mk);
    const Eigen::Index lo_mask = (Eigen::Index(1) << (m - 1 - pos)) - 1;
    for (Eigen::Index j = 0; j < out.size(); ++j) {
        const Eigen::Index lo = j & lo_mask;
        const Eigen::Index hi = (j >> (m - 1 - pos)) << (m - pos);
        const Eigen::Index src = hi | (static_cast<Eigen::Index>(bit) << (m - 1 - pos)) | lo;
        out(j) = a(src);
    }
    return out;
}

}  // namespace

PurifiedAnalysis analyze_purified_qot(const CompressionSpec& spec) {
    spec.validate();
    const int n = spec.qubit_count();
    if (n < 1 || n > 10) throw std::invalid_argument("analyze_purified_qot: n in [1,10]");
    const int kept = spec.kept_count();

    // Layout: sender qubits 0..n-1, receiver qubits n..2n-1, pair i = (i, n+i).
    const int m0 = 2 * n;
    Eigen::VectorXcd init = Eigen::VectorXcd::Zero(Eigen::Index(1) << m0);
    const double amp = std::pow(2.0, -0.5 * n);
    for (std::uint64_t s = 0; s < (1ULL << n); ++s)
        init(static_cast<Eigen::Index>((s << n) | s)) = amp;

    // Current position of receiver qubit i as measurements drop qubits.
    std::vector<WorkBranch> work{{std::string{}, std::move(init), m0}};
    std::vector<int> pos(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pos[static_cast<std::size_t>(i)] = n + i;
    auto drop_pos = [&](int i) {
        const int p = pos[static_cast<std::size_t>(i)];
        pos[static_cast<std::size_t>(i)] = -1;
        for (int j = 0; j < n; ++j)
            if (pos[static_cast<std::size_t>(j)] > p) --pos[static_cast<std::size_t>(j)];
    };

    const Eigen::Matrix2cd h = hadamard();
    // Bell pairs first, then singles, matching apply_memory_bound's order.
    for (int i = 0; i < n; ++i) {
        const auto& d = spec.per_qubit[static_cast<std::size_t>(i)];
        if (d.kind != QubitDisposition::Kind::BellPair || d.partner < i) continue;
        std::vector<WorkBranch> next;
        for (auto& wb : work) {
            const int pa = pos[static_cast<std::size_t>(i)];
            const int pb = pos[static_cast<std::size_t>(d.partner)];
            Eigen::VectorXcd rotated = wb.amps;
            apply_cnot(rotated, wb.qubits, pa, pb);
            apply_single_qubit(rotated, wb.qubits, pa, h);
            for (int label = 0; label < 4; ++label) {
                // Drop the higher position first so the lower stays valid.
                const int hi_pos = std::max(pa, pb), lo_pos = std::min(pa, pb);
                const int hi_bit = hi_pos == pa ? (label >> 1) & 1 : label & 1;
                const int lo_bit = lo_pos == pa ? (label >> 1) & 1 : label & 1;
                Eigen::VectorXcd child = slice_bit(rotated, wb.qubits, hi_pos, hi_bit);
                child = slice_bit(child, wb.qubits - 1, lo_pos, lo_bit);
                if (child.squaredNorm() < 1e-15) continue;
                WorkBranch nb;
                nb.visible = wb.visible;
                if (!d.hidden)
                    nb.visible += "B" + std::to_string(i) + ":" + std::to_string(label) + ";";
                nb.amps = std::move(child);
                nb.qubits = wb.qubits - 2;
                next.push_back(std::move(nb));
            }
        }
        work = std::move(next);
        drop_pos(i);
        drop_pos(d.partner);
    }
    for (int i = 0; i < n; ++i) {
        const auto& d = spec.per_qubit[static_cast<std::size_t>(i)];
        if (d.kind != QubitDisposition::Kind::MeasurePlus &&
            d.kind != QubitDisposition::Kind::MeasureTimes)
            continue;
        std::vector<WorkBranch> next;
        for (auto& wb : work) {
            const int p = pos[static_cast<std::size_t>(i)];
            Eigen::VectorXcd rotated = wb.amps;
            if (d.kind == QubitDisposition::Kind::MeasureTimes)
                apply_single_qubit(rotated, wb.qubits, p, h);
            for (int bit = 0; bit < 2; ++bit) {
                Eigen::VectorXcd child = slice_bit(rotated, wb.qubits, p, bit);
                if (child.squaredNorm() < 1e-15) continue;
                WorkBranch nb;
                nb.visible = wb.visible;
                if (!d.hidden)
                    nb.visible += "m" + std::to_string(i) + ":" + std::to_string(bit) + ";";
                nb.amps = std::move(child);
                nb.qubits = wb.qubits - 1;
                next.push_back(std::move(nb));
            }
        }
        work = std::move(next);
        drop_pos(i);
    }

    // Remaining layout: sender 0..n-1, then the kept receiver qubits.
    const Eigen::Index block_dim = Eigen::Index(1) << kept;
    std::map<std::string, BranchEnsemble> agg;
    for (auto& wb : work) {
        auto& be = agg[wb.visible];
        for (int rb = 0; rb < 2; ++rb) {
            if (be.weights[static_cast<std::size_t>(rb)].size() == 0) {
                be.weights[static_cast<std::size_t>(rb)] = Eigen::VectorXd::Zero(Eigen::Index(1) << n);
                be.blocks[static_cast<std::size_t>(rb)].assign(
                    static_cast<std::size_t>(Eigen::Index(1) << n),
                    Eigen::MatrixXcd::Zero(block_dim, block_dim));
            }
            Eigen::VectorXcd a = wb.amps;
            if (rb == 1)
                for (int sq = 0; sq < n; ++sq) apply_single_qubit(a, wb.qubits, sq, h);
            for (Eigen::Index x = 0; x < (Eigen::Index(1) << n); ++x) {
                const Eigen::VectorXcd vx = a.segment(x * block_dim, block_dim);
                const double w = vx.squaredNorm();
                if (w <= 0) continue;
                be.weights[static_cast<std::size_t>(rb)](x) += w;
                be.blocks[static_cast<std::size_t>(rb)][static_cast<std::size_t>(x)].noalias() +=
                    vx * vx.adjoint();
            }
        }
    }

    PurifiedAnalysis out;
    out.n = n;
    out.kept = kept;
    for (auto& [key, be] : agg) {
        be.prob = be.weights[0].sum();
        out.branches.push_back(std::move(be));
    }
    return out;
}

namespace {

// d of the masked bit for one (branch, r) ensemble, averaged over the full
// hash family; `select` restricts the ensemble (the event conditioning).
double branch_family_distance(const BranchEnsemble& be, int rb, int n,
                              const std::vector<std::uint8_t>* select, double mass) {
    const std::uint64_t family = 1ULL << n;
    const Eigen::Index d = be.blocks[static_cast<std::size_t>(rb)].empty()
                               ? 1
                               : be.blocks[static_cast<std::size_t>(rb)][0].rows();
    double acc = 0;
    for (std::uint64_t rv = 0; rv < family; ++rv) {
        Eigen::MatrixXcd m0 = Eigen::MatrixXcd::Zero(d, d), m1 = Eigen::MatrixXcd::Zero(d, d);
        for (std::uint64_t x = 0; x < family; ++x) {
            if (select && !(*select)[static_cast<std::size_t>(x)]) continue;
            const double w = be.weights[static_cast<std::size_t>(rb)](static_cast<Eigen::Index>(x));
            if (w <= 0) continue;
            const auto& blk = be.blocks[static_cast<std::size_t>(rb)][static_cast<std::size_t>(x)];
            if (popcount_parity(rv & x) == 0)
                m0 += blk / mass;
            else
                m1 += blk / mass;
        }
        acc += dfu_from_blocks(m0, m1);
    }
    return acc / static_cast<double>(family);
}

}  // namespace

double exact_receiver_distance(const CompressionSpec& spec) {
    const auto analysis = analyze_purified_qot(spec);
    double d = 0;
    for (const auto& be : analysis.branches) {
        for (int rb = 0; rb < 2; ++rb)
            d += 0.5 * be.prob * branch_family_distance(be, rb, analysis.n, nullptr, be.prob);
    }
    return d;
}

SenderPrivacyResult check_sender_privacy(const CompressionSpec& spec, double gamma, double kappa) {
    const auto analysis = analyze_purified_qot(spec);
    const int n = analysis.n;
    const bool hypothesis_ok = gamma < 0.5;
    if (kappa <= 0) kappa = hypothesis_ok ? 0.5 * (0.5 - gamma) : 0.05;
    const double threshold = std::pow(2.0, -(gamma + kappa) * n);
    const double cutoff = std::pow(2.0, -0.5 * kappa * n);
    const int q = analysis.kept;

    SenderPrivacyResult out;
    out.n = n;
    out.q = q;
    out.gamma = gamma;
    out.kappa = kappa;

    double p_event = 0;
    double event_slack = 0;
    double dist_acc = 0;      // sum over included branches of P(branch & E) * d_branch
    double bound_acc = 0;     // same weighting for the amplification bound
    for (const auto& be : analysis.branches) {
        // Small sets per visible record, for both bases.
        std::array<std::vector<std::uint8_t>, 2> in_s;
        std::array<double, 2> mass{0, 0};
        std::array<std::uint64_t, 2> l_size{0, 0};
        std::array<double, 2> h_inf_cond{0, 0};
        for (int rb = 0; rb < 2; ++rb) {
            in_s[static_cast<std::size_t>(rb)].assign(std::size_t(1) << n, 0);
            double max_cond = 0;
            for (std::uint64_t x = 0; x < (1ULL << n); ++x) {
                const double qx =
                    be.weights[static_cast<std::size_t>(rb)](static_cast<Eigen::Index>(x)) / be.prob;
                if (qx <= threshold) {
                    in_s[static_cast<std::size_t>(rb)][static_cast<std::size_t>(x)] = 1;
                    mass[static_cast<std::size_t>(rb)] += qx;
                    max_cond = std::max(max_cond, qx);
                } else {
                    ++l_size[static_cast<std::size_t>(rb)];
                }
            }
            h_inf_cond[static_cast<std::size_t>(rb)] =
                mass[static_cast<std::size_t>(rb)] > 0
                    ? -std::log2(max_cond / mass[static_cast<std::size_t>(rb)])
                    : 0.0;
        }

        // Two-basis-relation slack for this record, from the measured complements.
        const double cross = std::sqrt(std::pow(2.0, -n) * static_cast<double>(l_size[0]) *
                                       static_cast<double>(l_size[1]));
        const double two_basis_slack = std::max(0.0, (1.0 + cross) * (1.0 + cross) - 1.0);

        const bool small_plus = mass[0] < cutoff;
        const bool small_times = mass[1] < cutoff;
        std::array<bool, 2> include{!small_plus, !small_times};
        if (small_plus && small_times) {
            // Degenerate at desk scale; drop the record from E.
            event_slack += 0.5 * be.prob;
            continue;
        }
        out.used_case_split = out.used_case_split || small_plus || small_times;

        for (int rb = 0; rb < 2; ++rb) {
            if (!include[static_cast<std::size_t>(rb)]) continue;
            const double p_branch = 0.5 * be.prob * mass[static_cast<std::size_t>(rb)];
            p_event += p_branch;
            if (p_branch <= 0) continue;
            const double d_branch =
                branch_family_distance(be, rb, n, &in_s[static_cast<std::size_t>(rb)],
                                       be.prob * mass[static_cast<std::size_t>(rb)]);
            dist_acc += p_branch * d_branch;
            const double pa_bound =
                0.5 * std::pow(2.0, -0.5 * (h_inf_cond[static_cast<std::size_t>(rb)] - q - 1.0));
            bound_acc += p_branch * pa_bound;
        }

        // P[E] slack certified by the uncertainty relation on this record.
        if (!small_plus && !small_times)
            event_slack += 0.5 * be.prob * two_basis_slack;
        else
            event_slack += 0.5 * be.prob * (two_basis_slack + cutoff);
    }

    out.p_event = p_event;
    out.event_slack_bound = event_slack;
    out.distance = p_event > 0 ? dist_acc / p_event : 0.0;
    out.distance_bound = p_event > 0 ? bound_acc / p_event : 0.0;
    out.event_report = exact_report("sender_privacy_event", 0.5 - p_event, event_slack, 1e-9, 0.5);
    out.event_report.note = "P[E] = " + std::to_string(p_event);
    out.distance_report =
        exact_report("sender_privacy_distance", out.distance, out.distance_bound, 1e-9, 0.5);
    if (!hypothesis_ok || p_event == 0.0) {
        // gamma >= 1/2 (or no candidate event): the theorem makes no claim.
        out.event_report.status = CheckStatus::Hypothesis;
        out.distance_report.status = CheckStatus::Hypothesis;
        out.event_report.note += "; gamma/kappa outside the theorem hypothesis";
        out.distance_report.note = "no certified event";
    }
    return out;
}

double receiver_privacy_distance(int n) {
    // The sender view in (EPR-)QOT carries no message from the receiver, and
    // A = [r' = r] with r' an independent uniform coin. The two conditional
    // view states are therefore the same object; compute the distance from
    // the literal block construction over a classical view register.
    (void)n;
    const DensityOp view = DensityOp::maximally_mixed(1);  // any fixed view state
    CqEnsemble e{{{BitString::from_value(1, 1), 0.5, view}, {BitString::from_value(0, 1), 0.5, view}}};
    return dist_from_uniform(e);
}

BindingEstimate estimate_binding(const std::function<std::unique_ptr<Committer>()>& factory,
                                 CommKind kind, int n, const WeakModelParams& params,
                                 double epsilon, long trials_per_bit, double analytic_slack,
                                 Rng& rng) {
    BindingEstimate out;
    out.trials_per_bit = trials_per_bit;
    std::array<long, 2> wins{0, 0};
    for (int b_hat = 0; b_hat < 2; ++b_hat) {
        for (long t = 0; t < trials_per_bit; ++t) {
            Rng trial = rng.derive(static_cast<std::uint64_t>(b_hat) * 0x10000000ULL +
                                   static_cast<std::uint64_t>(t));
            auto committer = factory();
            CommitSession session = [&]() {
                switch (kind) {
                    case CommKind::Plain: return run_comm(b_hat, n, *committer, trial);
                    case CommKind::Epr: return run_epr_comm(b_hat, n, *committer, trial);
                    case CommKind::Tolerant:
                        return run_comm_prime(b_hat, n, params, epsilon, *committer, trial);
                }
                throw std::logic_error("unreachable");
            }();
            wins[static_cast<std::size_t>(b_hat)] += session.open(b_hat, trial) ? 1 : 0;
        }
    }
    const auto tpb = static_cast<double>(trials_per_bit);
    out.p0 = wins[0] / tpb;
    out.p1 = wins[1] / tpb;
    out.sum = out.p0 + out.p1;
    out.sigma = std::sqrt(out.p0 * (1 - out.p0) / tpb + out.p1 * (1 - out.p1) / tpb);
    auto wilson = [&](double p) {
        const double z = 4.0, z2 = z * z;
        return z * std::sqrt(p * (1 - p) / tpb + z2 / (4 * tpb * tpb)) / (1 + z2 / tpb);
    };
    out.wilson0 = wilson(out.p0);
    out.wilson1 = wilson(out.p1);
    out.report = mc_report("binding_sum", out.sum, 1.0 + analytic_slack, 2 * trials_per_bit,
                           out.sigma, rng.seed(), 2.0);
    out.report.note = "p0 = " + std::to_string(out.p0) + " (+-" + std::to_string(out.wilson0) +
                      "), p1 = " + std::to_string(out.p1) + " (+-" + std::to_string(out.wilson1) + ")";
    return out;
}

GammaThreshold threshold_gamma(ProtocolKind kind, double phi, double eta) {
    if (phi < 0 || phi >= 0.5) throw std::invalid_argument("threshold_gamma: phi in [0, 1/2)");
    if (eta < 0 || eta >= 1) throw std::invalid_argument("threshold_gamma: eta in [0, 1)");
    double v = 0;
    switch (kind) {
        case ProtocolKind::Qot:
        case ProtocolKind::Comm: v = 0.5; break;
        case ProtocolKind::Bb84Qot: v = 0.25 * (1.0 - eta) - 0.5 * binary_entropy(phi); break;
        case ProtocolKind::CommPrime: v = 0.5 * (1.0 - eta) - 2.0 * binary_entropy(phi); break;
    }
    GammaThreshold out;
    out.clamped = v < 0;
    out.value = std::max(0.0, v);
    return out;
}

}  // namespace bqs
