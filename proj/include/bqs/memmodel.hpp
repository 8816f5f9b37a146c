#pragma once

// Physical-model machinery: the (phi,eta)-weak quantum source, the
// bounded-quantum-storage compression step, and the noisy-memory
// generalizations (erasure / depolarizing).

#include <optional>
#include <vector>

#include "bqs/bitstring.hpp"
#include "bqs/qstate.hpp"
#include "bqs/rng.hpp"

namespace bqs {

struct WeakModelParams {
    double phi = 0.0;     // channel flip probability, 0 <= phi < 1/2
    double eta = 0.0;     // multi-copy emission probability, 0 <= eta < 1 - phi
    int multiplicity = 2; // copies emitted on a weak event

    void validate() const;
};

struct MemoryBound {
    double gamma = 0.0;
    int q_for(int n) const { return static_cast<int>(gamma * n); }  // floor(gamma n)
};

// One source emission: a single qubit, or `multiplicity` identical copies on
// a weak event.
struct Emission {
    PureState state;  // product of `copies` qubits, all |x>_theta
    int copies = 1;
    bool weak = false;
};

Emission weak_source_transmit(int x, Basis theta, const WeakModelParams& params, Rng& rng);

// How the adversary disposes of each qubit when the memory bound applies.
// Measurement outcomes marked hidden are recorded but not available to the
// adversary (used to model erasure as trace-out plus a classical flag).
struct QubitDisposition {
    enum class Kind { Keep, MeasurePlus, MeasureTimes, BellPair };
    Kind kind = Kind::MeasurePlus;
    int partner = -1;  // BellPair only: index of the paired qubit (listed once, on the lower index)
    bool hidden = false;
};

struct CompressionSpec {
    std::vector<QubitDisposition> per_qubit;

    int qubit_count() const { return static_cast<int>(per_qubit.size()); }
    int kept_count() const;
    void validate() const;  // pairs consistent, partners distinct
};

struct MeasurementEntry {
    int qubit = -1;
    char kind = '+';  // '+', 'x', or 'B'
    int partner = -1;
    int outcome = -1;  // bit, or BellOutcome as int for kind 'B'
    bool hidden = false;
};

struct CompressionOutcome {
    std::vector<MeasurementEntry> record;  // y, in measurement order
    std::vector<int> kept;                 // original qubit positions kept
    PureState memory;                      // register M on the kept qubits
};

class MemoryBoundViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Measures every non-kept qubit per the spec and returns the classical record
// together with the untouched kept register. Throws MemoryBoundViolation if
// the spec keeps more than q qubits.
CompressionOutcome apply_memory_bound(const PureState& full, const CompressionSpec& spec, int q,
                                      Rng& rng);

// --- noisy memory (erasure / depolarizing) ---

enum class NoiseKind { Erasure, Depolarizing };

struct NoisyMemoryResult {
    DensityOp rho;              // erasure: reduced to survivors; depolarizing: same size
    std::vector<int> affected;  // erased / replaced qubit positions
    int survivors = 0;
};

NoisyMemoryResult noisy_memory(const DensityOp& rho, NoiseKind kind, double p, Rng& rng);

}  // namespace bqs
