#include "bqs/memmodel.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace bqs {

void WeakModelParams::validate() const {
    if (phi < 0.0 || phi >= 0.5) throw std::invalid_argument("WeakModelParams: phi must be in [0, 1/2)");
    if (eta < 0.0 || eta >= 1.0 - phi)
        throw std::invalid_argument("WeakModelParams: eta must be in [0, 1 - phi)");
    if (multiplicity < 2) throw std::invalid_argument("WeakModelParams: multiplicity must be >= 2");
}

Emission weak_source_transmit(int x, Basis theta, const WeakModelParams& params, Rng& rng) {
    params.validate();
    if (x != 0 && x != 1) throw std::invalid_argument("weak_source_transmit: bit must be 0 or 1");
    const bool weak = rng.bernoulli(params.eta);
    const int copies = weak ? params.multiplicity : 1;
    BitString bits(static_cast<std::size_t>(copies));
    BasisString bases(static_cast<std::size_t>(copies), theta);
    for (int c = 0; c < copies; ++c) bits.set(static_cast<std::size_t>(c), x);
    return Emission{encode_bb84(bits, bases), copies, weak};
}

int CompressionSpec::kept_count() const {
    int c = 0;
    for (const auto& d : per_qubit) c += (d.kind == QubitDisposition::Kind::Keep);
    return c;
}

void CompressionSpec::validate() const {
    const int n = qubit_count();
    for (int i = 0; i < n; ++i) {
        const auto& d = per_qubit[static_cast<std::size_t>(i)];
        if (d.kind != QubitDisposition::Kind::BellPair) continue;
        if (d.partner < 0 || d.partner >= n || d.partner == i)
            throw std::invalid_argument("CompressionSpec: bad Bell partner");
        const auto& pd = per_qubit[static_cast<std::size_t>(d.partner)];
        if (pd.kind != QubitDisposition::Kind::BellPair || pd.partner != i)
            throw std::invalid_argument("CompressionSpec: Bell partners must point at each other");
    }
}

CompressionOutcome apply_memory_bound(const PureState& full, const CompressionSpec& spec, int q,
                                      Rng& rng) {
    if (spec.qubit_count() != full.qubits())
        throw std::invalid_argument("apply_memory_bound: spec size mismatch");
    if (q < 0) throw std::invalid_argument("apply_memory_bound: q must be >= 0");
    spec.validate();
    if (spec.kept_count() > q)
        throw MemoryBoundViolation("compression keeps " + std::to_string(spec.kept_count()) +
                                   " qubits, budget is " + std::to_string(q));

    const int n = full.qubits();
    // Track current positions as qubits are dropped.
    std::vector<int> pos(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pos[static_cast<std::size_t>(i)] = i;
    auto drop = [&](int orig) {
        const int p = pos[static_cast<std::size_t>(orig)];
        pos[static_cast<std::size_t>(orig)] = -1;
        for (int i = 0; i < n; ++i)
            if (pos[static_cast<std::size_t>(i)] > p) --pos[static_cast<std::size_t>(i)];
    };

    PureState state = full;
    CompressionOutcome out;

    // Bell pairs first (executed on the lower index of each pair), then
    // single-qubit measurements, in index order.
    for (int i = 0; i < n; ++i) {
        const auto& d = spec.per_qubit[static_cast<std::size_t>(i)];
        if (d.kind != QubitDisposition::Kind::BellPair || d.partner < i) continue;
        auto res = bell_measure_and_drop(state, pos[static_cast<std::size_t>(i)],
                                         pos[static_cast<std::size_t>(d.partner)], rng);
        state = std::move(res.remaining);
        out.record.push_back({i, 'B', d.partner, static_cast<int>(res.outcome), d.hidden});
        drop(i);
        drop(d.partner);
    }
    for (int i = 0; i < n; ++i) {
        const auto& d = spec.per_qubit[static_cast<std::size_t>(i)];
        if (d.kind != QubitDisposition::Kind::MeasurePlus &&
            d.kind != QubitDisposition::Kind::MeasureTimes)
            continue;
        const Basis b = d.kind == QubitDisposition::Kind::MeasurePlus ? Basis::Plus : Basis::Times;
        const std::array<int, 1> idx{pos[static_cast<std::size_t>(i)]};
        BasisString bs;
        bs.push_back(b);
        auto res = measure_and_drop(state, idx, bs, rng);
        state = std::move(res.remaining);
        out.record.push_back({i, basis_char(b), -1, res.outcome[0], d.hidden});
        drop(i);
    }
    for (int i = 0; i < n; ++i)
        if (spec.per_qubit[static_cast<std::size_t>(i)].kind == QubitDisposition::Kind::Keep)
            out.kept.push_back(i);
    out.memory = std::move(state);
    return out;
}

namespace {

// Insert a maximally mixed qubit at position k of rho (inverse of tracing it out).
DensityOp insert_mixed_qubit(const DensityOp& rho, int k) {
    const int m = rho.qubits() + 1;
    const Eigen::Index d = Eigen::Index(1) << m;
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
    const int shift_hi = m - 1 - k;  // bits below position k
    auto split = [&](Eigen::Index idx, int& bit, Eigen::Index& rest) {
        const Eigen::Index lo = idx & ((Eigen::Index(1) << shift_hi) - 1);
        bit = static_cast<int>((idx >> shift_hi) & 1);
        rest = ((idx >> (shift_hi + 1)) << shift_hi) | lo;
    };
    for (Eigen::Index i = 0; i < d; ++i) {
        int bi;
        Eigen::Index ri;
        split(i, bi, ri);
        for (Eigen::Index j = 0; j < d; ++j) {
            int bj;
            Eigen::Index rj;
            split(j, bj, rj);
            if (bi != bj) continue;
            out(i, j) = 0.5 * rho.matrix()(ri, rj);
        }
    }
    return DensityOp(m, std::move(out));
}

}  // namespace

NoisyMemoryResult noisy_memory(const DensityOp& rho, NoiseKind kind, double p, Rng& rng) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("noisy_memory: p must be in [0,1]");
    const int n = rho.qubits();
    std::vector<int> affected;
    for (int i = 0; i < n; ++i)
        if (rng.bernoulli(p)) affected.push_back(i);

    if (kind == NoiseKind::Erasure) {
        std::vector<int> keep;
        for (int i = 0; i < n; ++i)
            if (std::find(affected.begin(), affected.end(), i) == affected.end()) keep.push_back(i);
        if (keep.empty()) {
            // Fully erased register: the trivial 0-qubit state.
            return {DensityOp(0, Eigen::MatrixXcd::Ones(1, 1)), affected, 0};
        }
        return {partial_trace(rho, keep), affected, static_cast<int>(keep.size())};
    }

    DensityOp out = rho;
    for (int k : affected) {
        if (n == 1) {
            out = DensityOp::maximally_mixed(1);
            continue;
        }
        std::vector<int> keep;
        for (int i = 0; i < n; ++i)
            if (i != k) keep.push_back(i);
        out = insert_mixed_qubit(partial_trace(out, keep), k);
    }
    return {out, affected, n - static_cast<int>(affected.size())};
}

}  // namespace bqs
