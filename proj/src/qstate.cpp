#include "bqs/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bqs {

namespace {

void check_qubit_count(int qubits) {
    if (qubits < 0 || qubits > kMaxQubits)
        throw std::invalid_argument("qubit count out of supported range");
}

void check_indices(int m, std::span<const int> indices) {
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] < 0 || indices[i] >= m)
            throw std::invalid_argument("qubit index out of range");
        for (std::size_t j = i + 1; j < indices.size(); ++j)
            if (indices[i] == indices[j]) throw std::invalid_argument("qubit indices must be distinct");
    }
}

// Bit of qubit q inside a global basis index (qubit 0 most significant).
inline int index_bit(std::uint64_t idx, int m, int q) {
    return static_cast<int>((idx >> (m - 1 - q)) & 1ULL);
}

// Gather the bits of `reg` out of a global index, big-endian in reg order.
inline std::uint64_t gather_bits(std::uint64_t idx, int m, std::span<const int> reg) {
    std::uint64_t o = 0;
    for (int q : reg) o = (o << 1) | static_cast<std::uint64_t>(index_bit(idx, m, q));
    return o;
}

// Sample an index from a probability vector using one uniform draw against
// the cumulative distribution.
Eigen::Index sample_from(const Eigen::VectorXd& probs, Rng& rng) {
    const double u = rng.uniform01();
    double acc = 0.0;
    Eigen::Index last_positive = 0;
    for (Eigen::Index i = 0; i < probs.size(); ++i) {
        if (probs(i) > 0.0) last_positive = i;
        acc += probs(i);
        if (u < acc) return i;
    }
    return last_positive;  // float residue fell off the end
}

Eigen::VectorXd marginal_probs(const Eigen::VectorXcd& amps, int m, std::span<const int> reg) {
    const auto k = static_cast<int>(reg.size());
    Eigen::VectorXd probs = Eigen::VectorXd::Zero(Eigen::Index(1) << k);
    for (Eigen::Index i = 0; i < amps.size(); ++i) {
        const double p = std::norm(amps(i));
        if (p == 0.0) continue;
        probs(static_cast<Eigen::Index>(gather_bits(static_cast<std::uint64_t>(i), m, reg))) += p;
    }
    return probs;
}

// Conjugate rho by a single-qubit unitary on `qubit`: rho -> (u rho u+).
void conjugate_by_single(Eigen::MatrixXcd& rho, int m, int qubit, const Eigen::Matrix2cd& u) {
    Eigen::VectorXcd col(rho.rows());
    for (Eigen::Index c = 0; c < rho.cols(); ++c) {
        col = rho.col(c);
        apply_single_qubit(col, m, qubit, u);
        rho.col(c) = col;
    }
    const Eigen::Matrix2cd uconj = u.conjugate();
    for (Eigen::Index r = 0; r < rho.rows(); ++r) {
        col = rho.row(r).transpose();
        apply_single_qubit(col, m, qubit, uconj);
        rho.row(r) = col.transpose();
    }
}

}  // namespace

PureState::PureState(int qubits) : qubits_(qubits) {
    check_qubit_count(qubits);
    amps_ = Eigen::VectorXcd::Zero(Eigen::Index(1) << qubits);
    amps_(0) = 1.0;
}

PureState::PureState(int qubits, Eigen::VectorXcd amps) : qubits_(qubits), amps_(std::move(amps)) {
    check_qubit_count(qubits);
    if (amps_.size() != (Eigen::Index(1) << qubits))
        throw std::invalid_argument("PureState: amplitude vector has wrong dimension");
    if (std::abs(amps_.squaredNorm() - 1.0) > kStateTol)
        throw std::invalid_argument("PureState: squared norm must be 1 within 1e-9");
}

PureState PureState::from_amplitudes(Eigen::VectorXcd amps) {
    const auto d = amps.size();
    if (d <= 0 || (d & (d - 1)) != 0)
        throw std::invalid_argument("PureState: dimension must be a power of two");
    int q = 0;
    while ((Eigen::Index(1) << q) < d) ++q;
    return PureState(q, std::move(amps));
}

PureState PureState::tensor(const PureState& other) const {
    check_qubit_count(qubits_ + other.qubits_);
    Eigen::VectorXcd out(dim() * other.dim());
    for (Eigen::Index i = 0; i < dim(); ++i)
        out.segment(i * other.dim(), other.dim()) = amps_(i) * other.amps_;
    return PureState(qubits_ + other.qubits_, std::move(out));
}

DensityOp PureState::to_density() const {
    return DensityOp(qubits_, amps_ * amps_.adjoint());
}

DensityOp::DensityOp(int qubits, Eigen::MatrixXcd m) : qubits_(qubits), m_(std::move(m)) {
    check_qubit_count(qubits);
    const Eigen::Index d = Eigen::Index(1) << qubits;
    if (m_.rows() != d || m_.cols() != d)
        throw std::invalid_argument("DensityOp: matrix has wrong dimension");
    if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > kStateTol)
        throw std::invalid_argument("DensityOp: matrix must be Hermitian within 1e-9");
    if (std::abs(m_.trace().real() - 1.0) > kStateTol || std::abs(m_.trace().imag()) > kStateTol)
        throw std::invalid_argument("DensityOp: trace must be 1 within 1e-9");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kStateTol)
        throw std::invalid_argument("DensityOp: matrix must be positive semidefinite");
}

DensityOp DensityOp::from_matrix(Eigen::MatrixXcd m) {
    const auto d = m.rows();
    if (d <= 0 || (d & (d - 1)) != 0 || m.cols() != d)
        throw std::invalid_argument("DensityOp: dimension must be a power of two");
    int q = 0;
    while ((Eigen::Index(1) << q) < d) ++q;
    return DensityOp(q, std::move(m));
}

DensityOp DensityOp::maximally_mixed(int qubits) {
    check_qubit_count(qubits);
    const Eigen::Index d = Eigen::Index(1) << qubits;
    return DensityOp(qubits, Eigen::MatrixXcd::Identity(d, d) / static_cast<double>(d));
}

DensityOp DensityOp::tensor(const DensityOp& other) const {
    const Eigen::Index da = dim(), db = other.dim();
    Eigen::MatrixXcd out(da * db, da * db);
    for (Eigen::Index i = 0; i < da; ++i)
        for (Eigen::Index j = 0; j < da; ++j)
            out.block(i * db, j * db, db, db) = m_(i, j) * other.m_;
    return DensityOp(qubits_ + other.qubits_, std::move(out));
}

void apply_single_qubit(Eigen::VectorXcd& amps, int m, int qubit, const Eigen::Matrix2cd& u) {
    const Eigen::Index stride = Eigen::Index(1) << (m - 1 - qubit);
    const Eigen::Index dim = amps.size();
    for (Eigen::Index base = 0; base < dim; base += 2 * stride) {
        for (Eigen::Index off = 0; off < stride; ++off) {
            const Eigen::Index i0 = base + off;
            const Eigen::Index i1 = i0 + stride;
            const Cplx a0 = amps(i0), a1 = amps(i1);
            amps(i0) = u(0, 0) * a0 + u(0, 1) * a1;
            amps(i1) = u(1, 0) * a0 + u(1, 1) * a1;
        }
    }
}

void apply_cnot(Eigen::VectorXcd& amps, int m, int control, int target) {
    const std::uint64_t cmask = 1ULL << (m - 1 - control);
    const std::uint64_t tmask = 1ULL << (m - 1 - target);
    const auto dim = static_cast<std::uint64_t>(amps.size());
    for (std::uint64_t i = 0; i < dim; ++i) {
        if ((i & cmask) && !(i & tmask))
            std::swap(amps(static_cast<Eigen::Index>(i)), amps(static_cast<Eigen::Index>(i | tmask)));
    }
}

Eigen::Matrix2cd hadamard() {
    Eigen::Matrix2cd h;
    const double s = 1.0 / std::sqrt(2.0);
    h << s, s, s, -s;
    return h;
}

PureState encode_bb84(const BitString& x, const BasisString& theta) {
    if (x.size() != theta.size()) throw std::invalid_argument("encode_bb84: length mismatch");
    if (x.size() == 0) throw std::invalid_argument("encode_bb84: empty input");
    const int n = static_cast<int>(x.size());
    check_qubit_count(n);
    const double s = 1.0 / std::sqrt(2.0);
    // Single-qubit amplitude factors (value given the index bit).
    auto factor = [&](int i, int bit) -> double {
        if (theta[static_cast<std::size_t>(i)] == Basis::Plus) return bit == x[static_cast<std::size_t>(i)] ? 1.0 : 0.0;
        // |0>_x = (|0>+|1>)/sqrt2, |1>_x = (|0>-|1>)/sqrt2
        return (x[static_cast<std::size_t>(i)] == 1 && bit == 1) ? -s : s;
    };
    Eigen::VectorXcd amps(Eigen::Index(1) << n);
    for (std::uint64_t idx = 0; idx < (1ULL << n); ++idx) {
        double a = 1.0;
        for (int i = 0; i < n && a != 0.0; ++i) a *= factor(i, index_bit(idx, n, i));
        amps(static_cast<Eigen::Index>(idx)) = a;
    }
    return PureState(n, std::move(amps));
}

PureState make_epr_pairs(int n) {
    if (n < 1) throw std::invalid_argument("make_epr_pairs: n must be >= 1");
    const int m = 2 * n;
    check_qubit_count(m);
    const double a = std::pow(2.0, -0.5 * n);
    Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(Eigen::Index(1) << m);
    for (std::uint64_t idx = 0; idx < (1ULL << m); ++idx) {
        bool diag = true;
        for (int i = 0; i < n; ++i) {
            if (index_bit(idx, m, 2 * i) != index_bit(idx, m, 2 * i + 1)) {
                diag = false;
                break;
            }
        }
        if (diag) amps(static_cast<Eigen::Index>(idx)) = a;
    }
    return PureState(m, std::move(amps));
}

MeasureResult measure_qubits(const PureState& state, std::span<const int> indices,
                             const BasisString& bases, Rng& rng) {
    const int m = state.qubits();
    check_indices(m, indices);
    if (bases.size() != indices.size())
        throw std::invalid_argument("measure_qubits: basis length must match index count");
    Eigen::VectorXcd a = state.amplitudes();
    const Eigen::Matrix2cd h = hadamard();
    for (std::size_t j = 0; j < indices.size(); ++j)
        if (bases[j] == Basis::Times) apply_single_qubit(a, m, indices[j], h);

    const Eigen::VectorXd probs = marginal_probs(a, m, indices);
    const Eigen::Index o = sample_from(probs, rng);
    const double mass = probs(o);

    for (Eigen::Index i = 0; i < a.size(); ++i)
        if (gather_bits(static_cast<std::uint64_t>(i), m, indices) != static_cast<std::uint64_t>(o))
            a(i) = 0.0;
    a /= std::sqrt(mass);

    for (std::size_t j = 0; j < indices.size(); ++j)
        if (bases[j] == Basis::Times) apply_single_qubit(a, m, indices[j], h);

    return MeasureResult{BitString::from_value(static_cast<std::uint64_t>(o), indices.size()),
                         PureState(m, std::move(a))};
}

MeasureDropResult measure_and_drop(const PureState& state, std::span<const int> indices,
                                   const BasisString& bases, Rng& rng) {
    const int m = state.qubits();
    check_indices(m, indices);
    if (bases.size() != indices.size())
        throw std::invalid_argument("measure_and_drop: basis length must match index count");
    if (indices.size() == 0) return {BitString(), state};
    Eigen::VectorXcd a = state.amplitudes();
    const Eigen::Matrix2cd h = hadamard();
    for (std::size_t j = 0; j < indices.size(); ++j)
        if (bases[j] == Basis::Times) apply_single_qubit(a, m, indices[j], h);

    const Eigen::VectorXd probs = marginal_probs(a, m, indices);
    const auto o = static_cast<std::uint64_t>(sample_from(probs, rng));
    const double mass = probs(static_cast<Eigen::Index>(o));

    // Keep the branch consistent with outcome o and strip the measured qubits.
    const int mk = m - static_cast<int>(indices.size());
    std::vector<int> rest;
    rest.reserve(static_cast<std::size_t>(mk));
    for (int q = 0; q < m; ++q)
        if (std::find(indices.begin(), indices.end(), q) == indices.end()) rest.push_back(q);
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(Eigen::Index(1) << mk);
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a(i) == Cplx(0.0, 0.0)) continue;
        if (gather_bits(static_cast<std::uint64_t>(i), m, indices) != o) continue;
        out(static_cast<Eigen::Index>(gather_bits(static_cast<std::uint64_t>(i), m, rest))) = a(i);
    }
    out /= std::sqrt(mass);
    return {BitString::from_value(o, indices.size()), PureState(mk, std::move(out))};
}

Eigen::VectorXd outcome_distribution(const PureState& state, std::span<const int> reg,
                                     const BasisString& bases) {
    const int m = state.qubits();
    check_indices(m, reg);
    if (bases.size() != reg.size())
        throw std::invalid_argument("outcome_distribution: basis length must match register");
    Eigen::VectorXcd a = state.amplitudes();
    const Eigen::Matrix2cd h = hadamard();
    for (std::size_t j = 0; j < reg.size(); ++j)
        if (bases[j] == Basis::Times) apply_single_qubit(a, m, reg[j], h);
    return marginal_probs(a, m, reg);
}

Eigen::VectorXd outcome_distribution(const DensityOp& rho, std::span<const int> reg,
                                     const BasisString& bases) {
    const int m = rho.qubits();
    check_indices(m, reg);
    if (bases.size() != reg.size())
        throw std::invalid_argument("outcome_distribution: basis length must match register");
    Eigen::MatrixXcd r = rho.matrix();
    const Eigen::Matrix2cd h = hadamard();
    for (std::size_t j = 0; j < reg.size(); ++j)
        if (bases[j] == Basis::Times) conjugate_by_single(r, m, reg[j], h);
    const auto k = static_cast<int>(reg.size());
    Eigen::VectorXd probs = Eigen::VectorXd::Zero(Eigen::Index(1) << k);
    for (Eigen::Index i = 0; i < r.rows(); ++i)
        probs(static_cast<Eigen::Index>(gather_bits(static_cast<std::uint64_t>(i), m, reg))) +=
            r(i, i).real();
    return probs;
}

const char* bell_label(BellOutcome o) {
    switch (o) {
        case BellOutcome::PhiPlus: return "Phi+";
        case BellOutcome::PsiPlus: return "Psi+";
        case BellOutcome::PhiMinus: return "Phi-";
        case BellOutcome::PsiMinus: return "Psi-";
    }
    return "?";
}

int bell_xor_prediction(BellOutcome o, Basis r) {
    switch (o) {
        case BellOutcome::PhiPlus: return 0;
        case BellOutcome::PsiPlus: return r == Basis::Plus ? 1 : 0;
        case BellOutcome::PhiMinus: return r == Basis::Plus ? 0 : 1;
        case BellOutcome::PsiMinus: return 1;
    }
    return 0;
}

namespace {

// (H (x) I) . CNOT maps Phi+,Psi+,Phi-,Psi- to |00>,|01>,|10>,|11>.
void bell_rotate(Eigen::VectorXcd& a, int m, int qa, int qb) {
    apply_cnot(a, m, qa, qb);
    apply_single_qubit(a, m, qa, hadamard());
}

void bell_unrotate(Eigen::VectorXcd& a, int m, int qa, int qb) {
    apply_single_qubit(a, m, qa, hadamard());
    apply_cnot(a, m, qa, qb);
}

}  // namespace

BellResult bell_measure(const PureState& state, int qubit_a, int qubit_b, Rng& rng) {
    const int m = state.qubits();
    const std::array<int, 2> pair{qubit_a, qubit_b};
    check_indices(m, pair);
    Eigen::VectorXcd a = state.amplitudes();
    bell_rotate(a, m, qubit_a, qubit_b);
    const Eigen::VectorXd probs = marginal_probs(a, m, pair);
    const Eigen::Index o = sample_from(probs, rng);
    for (Eigen::Index i = 0; i < a.size(); ++i)
        if (gather_bits(static_cast<std::uint64_t>(i), m, pair) != static_cast<std::uint64_t>(o))
            a(i) = 0.0;
    a /= std::sqrt(probs(o));
    bell_unrotate(a, m, qubit_a, qubit_b);
    return {static_cast<BellOutcome>(o), PureState(m, std::move(a))};
}

BellDropResult bell_measure_and_drop(const PureState& state, int qubit_a, int qubit_b, Rng& rng) {
    const int m = state.qubits();
    const std::array<int, 2> pair{qubit_a, qubit_b};
    check_indices(m, pair);
    Eigen::VectorXcd a = state.amplitudes();
    bell_rotate(a, m, qubit_a, qubit_b);
    const Eigen::VectorXd probs = marginal_probs(a, m, pair);
    const auto o = static_cast<std::uint64_t>(sample_from(probs, rng));
    const int mk = m - 2;
    std::vector<int> rest;
    rest.reserve(static_cast<std::size_t>(mk));
    for (int q = 0; q < m; ++q)
        if (q != qubit_a && q != qubit_b) rest.push_back(q);
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(Eigen::Index(1) << mk);
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a(i) == Cplx(0.0, 0.0)) continue;
        if (gather_bits(static_cast<std::uint64_t>(i), m, pair) != o) continue;
        out(static_cast<Eigen::Index>(gather_bits(static_cast<std::uint64_t>(i), m, rest))) = a(i);
    }
    out /= std::sqrt(probs(static_cast<Eigen::Index>(o)));
    return {static_cast<BellOutcome>(o), PureState(mk, std::move(out))};
}

namespace {

DensityOp partial_trace_impl(const Eigen::VectorXcd* psi, const Eigen::MatrixXcd* rho, int m,
                             std::span<const int> keep) {
    check_indices(m, keep);
    if (keep.empty()) throw std::invalid_argument("partial_trace: keep set must be nonempty");
    std::vector<int> env;
    for (int q = 0; q < m; ++q)
        if (std::find(keep.begin(), keep.end(), q) == keep.end()) env.push_back(q);
    const int k = static_cast<int>(keep.size());
    const int e = static_cast<int>(env.size());
    const Eigen::Index dk = Eigen::Index(1) << k;
    const Eigen::Index de = Eigen::Index(1) << e;

    // Scatter tables: bits of the sub-index placed at their global positions.
    std::vector<std::uint64_t> gk(static_cast<std::size_t>(dk), 0), ge(static_cast<std::size_t>(de), 0);
    for (Eigen::Index ik = 0; ik < dk; ++ik)
        for (int j = 0; j < k; ++j)
            if ((ik >> (k - 1 - j)) & 1) gk[static_cast<std::size_t>(ik)] |= 1ULL << (m - 1 - keep[static_cast<std::size_t>(j)]);
    for (Eigen::Index ie = 0; ie < de; ++ie)
        for (int j = 0; j < e; ++j)
            if ((ie >> (e - 1 - j)) & 1) ge[static_cast<std::size_t>(ie)] |= 1ULL << (m - 1 - env[static_cast<std::size_t>(j)]);

    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dk, dk);
    if (psi) {
        for (Eigen::Index ie = 0; ie < de; ++ie) {
            Eigen::VectorXcd v(dk);
            for (Eigen::Index ik = 0; ik < dk; ++ik)
                v(ik) = (*psi)(static_cast<Eigen::Index>(gk[static_cast<std::size_t>(ik)] | ge[static_cast<std::size_t>(ie)]));
            out.noalias() += v * v.adjoint();
        }
    } else {
        for (Eigen::Index ie = 0; ie < de; ++ie)
            for (Eigen::Index ik = 0; ik < dk; ++ik)
                for (Eigen::Index jk = 0; jk < dk; ++jk)
                    out(ik, jk) += (*rho)(static_cast<Eigen::Index>(gk[static_cast<std::size_t>(ik)] | ge[static_cast<std::size_t>(ie)]),
                                          static_cast<Eigen::Index>(gk[static_cast<std::size_t>(jk)] | ge[static_cast<std::size_t>(ie)]));
    }
    // Clean up round-off so the DensityOp invariants hold exactly enough.
    out = (out + out.adjoint().eval()) / 2.0;
    return DensityOp(k, std::move(out));
}

}  // namespace

DensityOp partial_trace(const PureState& state, std::span<const int> keep) {
    return partial_trace_impl(&state.amplitudes(), nullptr, state.qubits(), keep);
}

DensityOp partial_trace(const DensityOp& rho, std::span<const int> keep) {
    return partial_trace_impl(nullptr, &rho.matrix(), rho.qubits(), keep);
}

Eigen::VectorXcd MubBasis::vector(std::uint64_t k) const {
    const Eigen::Matrix2cd udag = rotation.adjoint();
    Eigen::VectorXcd v = Eigen::VectorXcd::Ones(1);
    for (int j = 0; j < qubits; ++j) {
        const int bit = static_cast<int>((k >> (qubits - 1 - j)) & 1ULL);
        Eigen::VectorXcd next(v.size() * 2);
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            next(2 * i) = v(i) * udag(0, bit);
            next(2 * i + 1) = v(i) * udag(1, bit);
        }
        v = std::move(next);
    }
    return v;
}

std::array<MubBasis, 3> mub_bases(int m) {
    if (m < 1) throw std::invalid_argument("mub_bases: m must be >= 1");
    check_qubit_count(m);
    const double s = 1.0 / std::sqrt(2.0);
    Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
    Eigen::Matrix2cd h = hadamard();
    // Circular (sigma_y eigen) basis: |y0> = (|0>+i|1>)/sqrt2, |y1> = (|0>-i|1>)/sqrt2.
    Eigen::Matrix2cd y;
    y << Cplx(s, 0), Cplx(0, -s), Cplx(s, 0), Cplx(0, s);
    return {MubBasis{0, id, m}, MubBasis{1, h, m}, MubBasis{2, y, m}};
}

Eigen::VectorXd outcome_distribution(const PureState& state, const MubBasis& basis) {
    if (basis.qubits != state.qubits())
        throw std::invalid_argument("outcome_distribution: MUB register size mismatch");
    Eigen::VectorXcd a = state.amplitudes();
    for (int q = 0; q < state.qubits(); ++q) apply_single_qubit(a, state.qubits(), q, basis.rotation);
    Eigen::VectorXd probs(a.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) probs(i) = std::norm(a(i));
    return probs;
}

Eigen::VectorXd outcome_distribution(const DensityOp& rho, const MubBasis& basis) {
    if (basis.qubits != rho.qubits())
        throw std::invalid_argument("outcome_distribution: MUB register size mismatch");
    Eigen::MatrixXcd r = rho.matrix();
    for (int q = 0; q < rho.qubits(); ++q) conjugate_by_single(r, rho.qubits(), q, basis.rotation);
    return r.diagonal().real();
}

}  // namespace bqs
