#pragma once

// Classical and quantum information measures: min-entropy, Renyi entropies
// S0/S2, trace distance, distance-from-uniform of a bit given quantum side
// information, binary entropy, and Hamming-ball combinatorics.

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "bqs/bitstring.hpp"
#include "bqs/qstate.hpp"

namespace bqs {

// Probability vector; any support size, validated nonnegative and summing to
// 1 within 1e-9.
struct ProbVector {
    Eigen::VectorXd p;
    explicit ProbVector(Eigen::VectorXd v);
};

// H_inf(X) = -log2 max_x P(x).
double min_entropy(const ProbVector& q);

struct RenyiPair {
    double s0;  // log2 rank (eigenvalues above 1e-9)
    double s2;  // -log2 sum lambda_i^2
};
RenyiPair renyi_entropies(const DensityOp& rho);

// delta(rho, sigma) = 1/2 tr|rho - sigma|, via eigendecomposition of the
// Hermitian difference.
double trace_distance(const DensityOp& rho, const DensityOp& sigma);

// Classical-quantum ensemble: X = x with probability p, side information
// rho_x. All rho_x on the same number of qubits.
struct CqEntry {
    BitString x;
    double p;
    DensityOp rho;
};
struct CqEnsemble {
    std::vector<CqEntry> entries;

    void validate() const;          // probs >= 0, sum 1 within 1e-9, equal dims
    int side_qubits() const;
    DensityOp average() const;      // [rho] = sum p_x rho_x
};

// d(X | rho) = delta([{X} (x) rho], [{unif}] (x) [rho]) for a binary X.
double dist_from_uniform(const CqEnsemble& e);

double binary_entropy(double p);

// Hamming ball of given radius around any center in {0,1}^n.
class HammingBall {
public:
    HammingBall(int n, int radius);

    int n() const { return n_; }
    int radius() const { return radius_; }
    std::uint64_t size() const { return size_; }
    double log2_size() const;

    bool contains(const BitString& center, const BitString& x) const;
    BitString sample(const BitString& center, Rng& rng) const;  // uniform over the ball

private:
    int n_, radius_;
    std::uint64_t size_;
    std::vector<std::uint64_t> layer_;  // C(n, k) for k = 0..radius
};

}  // namespace bqs
