#pragma once

// Numerical verification of the security bounds: the two-basis and MUB
// uncertainty relations, min-entropy sums, privacy amplification, Hamming-
// ball guessing, the sender-privacy event construction, binding sums, and
// the closed-form gamma thresholds.
//
// Exact checkers work on explicit distributions and block matrices (desk
// scale, n <= 6, q <= 4); Monte-Carlo estimators report 4-sigma intervals.

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "bqs/memmodel.hpp"
#include "bqs/protocols.hpp"
#include "bqs/qinfo.hpp"
#include "bqs/report.hpp"

namespace bqs {

// --- random states (seeded; used by the sweeps) ---

PureState random_pure_state(int qubits, Rng& rng);
// Reduced state of register A from a random pure state on A (x) B.
DensityOp random_reduced_state(int a_qubits, int b_qubits, Rng& rng);

// --- uncertainty relations ---

// Q+(L+) + Qx(Lx) <= (1 + sqrt(2^-n |L+||Lx|))^2, exact distributions.
BoundReport check_uncertainty_two(const DensityOp& rho_a, const std::vector<std::uint64_t>& l_plus,
                                  const std::vector<std::uint64_t>& l_times);

// MUB generalization over sets.size() pairwise unbiased bases (at most 3).
BoundReport check_uncertainty_mub(const DensityOp& rho_a,
                                  const std::vector<std::vector<std::uint64_t>>& sets);

// Sum of min-entropies over the first `bases` MUBs vs (N+1)(log(N+1) - slack).
struct MinEntropySumCheck {
    double sum;            // measured sum of min-entropies
    double measured_slack; // log(N+1) - sum/(N+1)
    double slack_bound;    // finite-n certified slack from the MUB relation
    BoundReport report;    // deficiency <= (N+1) * slack_bound
};
MinEntropySumCheck check_minentropy_sum(const DensityOp& rho_a, int bases);

// q_inf^+ * q_inf^x <= (1/4)(1 + 2^{-n/2})^4.
BoundReport check_pmax_product(const DensityOp& rho_a);

// --- small probability sets ---

struct SmallSets {
    int n = 0;
    double gamma = 0, kappa = 0, threshold = 0;
    std::vector<std::uint8_t> in_plus, in_times;
    double q_plus = 0, q_times = 0;       // masses of S+ and Sx
    std::uint64_t l_plus = 0, l_times = 0;  // complement sizes |L|

    static SmallSets build(const Eigen::VectorXd& dist_plus, const Eigen::VectorXd& dist_times,
                           double gamma, double kappa);
};

struct SmallSetsCheck {
    SmallSets sets;
    BoundReport report;  // 1 - (q+ + qx) <= rearranged two-basis slack at the measured |L|
};
SmallSetsCheck check_small_sets_mass(const DensityOp& rho_a, double gamma, double kappa);

// --- privacy amplification ---

struct PaCheck {
    double lhs;       // exact d([F(X) | {F} (x) rho])
    double rhs_s2s0;  // (1/2) 2^{-(S2 - S0 - 1)/2}
    double rhs_hinf;  // (1/2) 2^{-(H_inf - q - 1)/2}
    BoundReport report;        // lhs <= rhs_s2s0
    BoundReport report_weak;   // lhs <= rhs_hinf
    BoundReport report_order;  // rhs_s2s0 <= rhs_hinf
};
// Ensemble entries carry n-bit strings X = x with side information rho_x.
PaCheck check_pa_bound(const CqEnsemble& ensemble);

// --- Hamming-ball guessing ---

// Measure the side-information qubits in fixed bases, then map the outcome
// to an n-bit guess.
struct ProjectiveGuesser {
    BasisString bases;
    std::function<BitString(const BitString& outcome)> decode;
};
// Exact P[guess lands within `radius` of X] vs 2^{-(H_inf - q - 1)/2 + log ball}.
BoundReport check_ball_guess(const CqEnsemble& ensemble, const ProjectiveGuesser& guesser,
                             int radius);

// --- exact purified-protocol analysis ---

// Conditional data at the memory bound of the purified (EPR-)QOT: for each
// visible classical record y, the unnormalized classical-quantum blocks of
// the sender's measurement outcome X against the receiver's kept qubits,
// for both announced bases.
struct BranchEnsemble {
    double prob = 0;                                       // P(y)
    std::array<Eigen::VectorXd, 2> weights;                // [r][x] = Q^r(x|y) P(y)
    std::array<std::vector<Eigen::MatrixXcd>, 2> blocks;   // kept-qubit blocks, tr = weight
};
struct PurifiedAnalysis {
    int n = 0;
    int kept = 0;
    std::vector<BranchEnsemble> branches;
};
PurifiedAnalysis analyze_purified_qot(const CompressionSpec& spec);

// d(B | receiver view) of the real (random-f) protocol, exact.
double exact_receiver_distance(const CompressionSpec& spec);

// Sender-privacy event construction following the gamma < 1/2 proof: per
// visible record, E = {X in S^r} with the small-mass case split; reports
// P[E] against its certified slack and the conditioned distance against the
// amplification bound at the measured min-entropies.
struct SenderPrivacyResult {
    int n = 0, q = 0;
    double gamma = 0, kappa = 0;
    double p_event = 0;
    double event_slack_bound = 0;  // pass iff p_event >= 1/2 - this
    double distance = 0;
    double distance_bound = 0;
    bool used_case_split = false;
    BoundReport event_report, distance_report;
};
SenderPrivacyResult check_sender_privacy(const CompressionSpec& spec, double gamma,
                                         double kappa = -1.0);

// Receiver-privacy distance d(A | sender view): the view carries no
// receiver-to-sender message, so A = [r' = r] stays an independent coin.
// Computed from the literal block construction; 0 exactly.
double receiver_privacy_distance(int n);

// --- binding ---

struct BindingEstimate {
    double p0 = 0, p1 = 0, sum = 0;
    double sigma = 0;        // std error of the sum
    double wilson0 = 0, wilson1 = 0;  // 4-sigma Wilson half-widths
    long trials_per_bit = 0;
    BoundReport report;  // sum <= 1 + analytic_slack (+4 sigma)
};
BindingEstimate estimate_binding(const std::function<std::unique_ptr<Committer>()>& factory,
                                 CommKind kind, int n, const WeakModelParams& params,
                                 double epsilon, long trials_per_bit, double analytic_slack,
                                 Rng& rng);

// --- thresholds ---

enum class ProtocolKind { Qot, Bb84Qot, Comm, CommPrime };

struct GammaThreshold {
    double value = 0;
    bool clamped = false;  // formula went nonpositive; clamped to 0 with warning
};
GammaThreshold threshold_gamma(ProtocolKind kind, double phi, double eta);

}  // namespace bqs
