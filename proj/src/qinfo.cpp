#include "bqs/qinfo.hpp"

#include <cmath>
#include <stdexcept>

namespace bqs {

ProbVector::ProbVector(Eigen::VectorXd v) : p(std::move(v)) {
    if (p.size() == 0) throw std::invalid_argument("ProbVector: empty");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (p(i) < -kStateTol) throw std::invalid_argument("ProbVector: negative entry");
        sum += p(i);
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("ProbVector: entries must sum to 1");
}

double min_entropy(const ProbVector& q) {
    return -std::log2(q.p.maxCoeff());
}

RenyiPair renyi_entropies(const DensityOp& rho) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.matrix(), Eigen::EigenvaluesOnly);
    const Eigen::VectorXd ev = es.eigenvalues();
    int rank = 0;
    double sum_sq = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) > 1e-9) {
            ++rank;
            sum_sq += ev(i) * ev(i);
        }
    }
    if (rank == 0) throw std::invalid_argument("renyi_entropies: zero operator");
    return {std::log2(static_cast<double>(rank)), -std::log2(sum_sq)};
}

namespace {

double trace_norm_half(const Eigen::MatrixXcd& diff) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(diff, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace

double trace_distance(const DensityOp& rho, const DensityOp& sigma) {
    if (rho.dim() != sigma.dim())
        throw std::invalid_argument("trace_distance: dimension mismatch");
    return trace_norm_half(rho.matrix() - sigma.matrix());
}

void CqEnsemble::validate() const {
    if (entries.empty()) throw std::invalid_argument("CqEnsemble: empty");
    double sum = 0.0;
    const Eigen::Index d = entries.front().rho.dim();
    for (const auto& e : entries) {
        if (e.p < -kStateTol) throw std::invalid_argument("CqEnsemble: negative probability");
        if (e.rho.dim() != d) throw std::invalid_argument("CqEnsemble: mixed side-info dimensions");
        sum += e.p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("CqEnsemble: probabilities must sum to 1");
}

int CqEnsemble::side_qubits() const {
    return entries.front().rho.qubits();
}

DensityOp CqEnsemble::average() const {
    validate();
    const Eigen::Index d = entries.front().rho.dim();
    Eigen::MatrixXcd avg = Eigen::MatrixXcd::Zero(d, d);
    for (const auto& e : entries) avg += e.p * e.rho.matrix();
    avg = (avg + avg.adjoint().eval()) / 2.0;
    return DensityOp(entries.front().rho.qubits(), std::move(avg));
}

double dist_from_uniform(const CqEnsemble& e) {
    e.validate();
    const Eigen::Index d = e.entries.front().rho.dim();
    Eigen::MatrixXcd block0 = Eigen::MatrixXcd::Zero(d, d);
    Eigen::MatrixXcd block1 = Eigen::MatrixXcd::Zero(d, d);
    for (const auto& entry : e.entries) {
        if (entry.x.size() != 1) throw std::invalid_argument("dist_from_uniform: X must be binary");
        (entry.x[0] == 0 ? block0 : block1) += entry.p * entry.rho.matrix();
    }
    const Eigen::MatrixXcd avg_half = 0.5 * (block0 + block1);
    return trace_norm_half(block0 - avg_half) + trace_norm_half(block1 - avg_half);
}

double binary_entropy(double p) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("binary_entropy: p out of [0,1]");
    if (p == 0.0 || p == 1.0) return 0.0;
    return -(p * std::log2(p) + (1.0 - p) * std::log2(1.0 - p));
}

HammingBall::HammingBall(int n, int radius) : n_(n), radius_(radius), size_(0) {
    if (n < 1 || n > 63) throw std::invalid_argument("HammingBall: n out of range");
    if (radius < 0 || radius > n) throw std::invalid_argument("HammingBall: radius out of range");
    std::uint64_t c = 1;  // C(n, 0)
    for (int k = 0; k <= radius; ++k) {
        layer_.push_back(c);
        size_ += c;
        // C(n,k+1) = C(n,k)*(n-k)/(k+1); widen the product so n=63 cannot overflow.
        const auto wide = static_cast<unsigned __int128>(c) * static_cast<unsigned __int128>(n - k);
        c = static_cast<std::uint64_t>(wide / static_cast<unsigned __int128>(k + 1));
    }
}

double HammingBall::log2_size() const { return std::log2(static_cast<double>(size_)); }

bool HammingBall::contains(const BitString& center, const BitString& x) const {
    if (static_cast<int>(center.size()) != n_ || static_cast<int>(x.size()) != n_)
        throw std::invalid_argument("HammingBall::contains: length mismatch");
    return center.hamming_distance(x) <= static_cast<std::size_t>(radius_);
}

BitString HammingBall::sample(const BitString& center, Rng& rng) const {
    if (static_cast<int>(center.size()) != n_)
        throw std::invalid_argument("HammingBall::sample: length mismatch");
    // Pick the weight layer proportionally, then a uniform k-subset of flips.
    std::uint64_t u = rng.below(size_);
    int k = 0;
    while (u >= layer_[static_cast<std::size_t>(k)]) {
        u -= layer_[static_cast<std::size_t>(k)];
        ++k;
    }
    std::vector<int> positions(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) positions[static_cast<std::size_t>(i)] = i;
    BitString out = center;
    for (int j = 0; j < k; ++j) {
        const auto pick = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(n_ - j)));
        std::swap(positions[static_cast<std::size_t>(j)], positions[static_cast<std::size_t>(j) + pick]);
        const auto pos = static_cast<std::size_t>(positions[static_cast<std::size_t>(j)]);
        out.set(pos, 1 - out[pos]);
    }
    return out;
}

}  // namespace bqs
