#pragma once

// Exact statevector simulation of small qubit registers: BB84 conjugate
// coding, EPR pairs, projective measurements in the +, x and Bell bases,
// partial trace, outcome distributions, and the three Pauli MUBs.
//
// Qubit ordering is big-endian throughout the project: for an m-qubit state,
// basis-vector index i spells the bits of qubits 0..m-1 with qubit 0 as the
// most significant bit. This convention is fixed here once and used
// everywhere.

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "bqs/bitstring.hpp"
#include "bqs/rng.hpp"

namespace bqs {

inline constexpr double kStateTol = 1e-9;
inline constexpr int kMaxQubits = 20;  // 2^20 amplitudes; plenty for desk scale

using Cplx = std::complex<double>;

class DensityOp;

class PureState {
public:
    PureState() : qubits_(0), amps_(Eigen::VectorXcd::Ones(1)) {}
    // |0...0> on `qubits` qubits.
    explicit PureState(int qubits);
    PureState(int qubits, Eigen::VectorXcd amps);  // validates dimension and norm
    static PureState from_amplitudes(Eigen::VectorXcd amps);

    int qubits() const { return qubits_; }
    Eigen::Index dim() const { return amps_.size(); }
    const Eigen::VectorXcd& amplitudes() const { return amps_; }
    Cplx amp(std::uint64_t index) const { return amps_(static_cast<Eigen::Index>(index)); }

    PureState tensor(const PureState& other) const;
    DensityOp to_density() const;

private:
    int qubits_;
    Eigen::VectorXcd amps_;
};

class DensityOp {
public:
    DensityOp(int qubits, Eigen::MatrixXcd m);  // validates Hermitian/PSD/trace within 1e-9
    static DensityOp from_matrix(Eigen::MatrixXcd m);
    static DensityOp maximally_mixed(int qubits);

    int qubits() const { return qubits_; }
    Eigen::Index dim() const { return m_.rows(); }
    const Eigen::MatrixXcd& matrix() const { return m_; }

    DensityOp tensor(const DensityOp& other) const;

private:
    int qubits_;
    Eigen::MatrixXcd m_;
};

// --- gates (in place, on raw amplitude vectors) ---

void apply_single_qubit(Eigen::VectorXcd& amps, int m, int qubit, const Eigen::Matrix2cd& u);
void apply_cnot(Eigen::VectorXcd& amps, int m, int control, int target);
Eigen::Matrix2cd hadamard();

// --- BB84 / EPR preparation ---

// Conjugate coding: tensor product of |x_i> in basis theta_i.
PureState encode_bb84(const BitString& x, const BasisString& theta);

// n EPR pairs |Omega> = (|00>+|11>)/sqrt(2), pair i on qubits (2i, 2i+1).
PureState make_epr_pairs(int n);

// --- measurement ---

struct MeasureResult {
    BitString outcome;  // outcome[j] is the bit observed on indices[j]
    PureState post;     // renormalized projection, same register size
};

// Projective measurement of the listed qubits in per-qubit +/x bases, sampled
// from the Born rule with a single uniform draw against the cumulative
// distribution.
MeasureResult measure_qubits(const PureState& state, std::span<const int> indices,
                             const BasisString& bases, Rng& rng);

// Same measurement, but the measured qubits are removed from the register
// (projection onto a full product outcome always factorizes them out).
struct MeasureDropResult {
    BitString outcome;
    PureState remaining;
};
MeasureDropResult measure_and_drop(const PureState& state, std::span<const int> indices,
                                   const BasisString& bases, Rng& rng);

// Outcome distribution over {0,1}^|reg| when `reg` is measured in the given
// bases; entry index is big-endian in the order of `reg`.
Eigen::VectorXd outcome_distribution(const PureState& state, std::span<const int> reg,
                                     const BasisString& bases);
Eigen::VectorXd outcome_distribution(const DensityOp& rho, std::span<const int> reg,
                                     const BasisString& bases);

// --- Bell measurement ---

enum class BellOutcome : std::uint8_t { PhiPlus = 0, PsiPlus = 1, PhiMinus = 2, PsiMinus = 3 };

const char* bell_label(BellOutcome o);

// The xor of the two bits observed when the collapsed Bell state is measured
// in basis r on both qubits:
//   Phi+ -> 0 in +, 0 in x;   Psi+ -> 1 in +, 0 in x;
//   Phi- -> 0 in +, 1 in x;   Psi- -> 1 in +, 1 in x.
int bell_xor_prediction(BellOutcome o, Basis r);

struct BellResult {
    BellOutcome outcome;
    PureState post;  // collapsed onto the observed Bell vector on that pair
};
BellResult bell_measure(const PureState& state, int qubit_a, int qubit_b, Rng& rng);

struct BellDropResult {
    BellOutcome outcome;
    PureState remaining;
};
BellDropResult bell_measure_and_drop(const PureState& state, int qubit_a, int qubit_b, Rng& rng);

// --- partial trace ---

DensityOp partial_trace(const PureState& state, std::span<const int> keep);
DensityOp partial_trace(const DensityOp& rho, std::span<const int> keep);

// --- mutually unbiased bases ---

// One of the three single-qubit Pauli eigenbases, extended as a tensor power.
// `rotation` maps basis vectors to computational ones -- measuring in this
// basis is: apply `rotation` to every qubit, then measure computationally.
struct MubBasis {
    int label;                   // 0: computational (+^m), 1: diagonal (x^m), 2: circular
    Eigen::Matrix2cd rotation;
    int qubits;

    Eigen::VectorXcd vector(std::uint64_t k) const;  // k-th basis vector of the tensor power
};

std::array<MubBasis, 3> mub_bases(int m);

Eigen::VectorXd outcome_distribution(const PureState& state, const MubBasis& basis);
Eigen::VectorXd outcome_distribution(const DensityOp& rho, const MubBasis& basis);

}  // namespace bqs
