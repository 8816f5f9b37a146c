#pragma once

// Register of named qubits managed as independent tensor factors. Product
// structure is tracked so that protocol runs touching hundreds of qubits stay
// cheap as long as nobody entangles them: honest parties measure on arrival
// and never grow a factor beyond a handful of qubits. Operations that span
// factors merge them first; measured qubits are projected out and retired.

#include <optional>
#include <span>
#include <vector>

#include "bqs/qstate.hpp"

namespace bqs {

class QuantumRegister {
public:
    QuantumRegister() = default;

    // Adds the qubits of `st` as one new tensor factor; returns their ids.
    std::vector<int> add_group(PureState st);
    int add_qubit(PureState single_qubit);  // convenience for 1-qubit groups

    int size() const { return static_cast<int>(slots_.size()); }
    bool is_active(int id) const;
    int active_count() const;
    int active_count(std::span<const int> ids) const;

    // Measures the listed active qubits in per-qubit bases; outcomes are
    // recorded and the qubits retire from their factors.
    BitString measure(std::span<const int> ids, const BasisString& bases, Rng& rng);
    int measure_one(int id, Basis b, Rng& rng);

    // Joint Bell measurement of two active qubits; both retire.
    BellOutcome bell_measure(int id_a, int id_b, Rng& rng);

    int measured_bit(int id) const;                       // recorded outcome
    std::optional<BellOutcome> bell_outcome(int id) const;

    // Snapshot of the merged factor(s) containing `ids`: the joint pure state
    // and, for each of its qubits, the register id, with `ids` first in the
    // requested order.
    struct Snapshot {
        PureState state;
        std::vector<int> ids;
    };
    Snapshot snapshot(std::span<const int> ids) const;

    // Reduced state of the listed active qubits (partial trace over the rest
    // of their factors).
    DensityOp reduced_density(std::span<const int> ids) const;

private:
    struct Group {
        PureState state;
        std::vector<int> members;  // register ids in qubit order
    };
    struct Slot {
        int group = -1;  // -1 once measured
        int outcome = -1;
        std::optional<BellOutcome> bell;
    };

    int position_in_group(int id) const;
    int merge(int ga, int gb);  // returns surviving group index
    void retire(int id, int outcome, std::optional<BellOutcome> bell);
    void check_active(int id) const;

    std::vector<Group> groups_;
    std::vector<Slot> slots_;
};

}  // namespace bqs
