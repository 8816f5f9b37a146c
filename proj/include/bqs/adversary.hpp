#pragma once

// Library of concrete dishonest strategies: bounded-storage OT receivers
// (store-a-subset, the Bell-measurement XOR attack, erasure memory) and
// bounded committers. Each storing strategy can export the compression
// descriptor it executes at the memory bound, which is what the exact
// analysis checkers consume.

#include <functional>
#include <memory>
#include <string>

#include "bqs/protocols.hpp"

namespace bqs {

// --- compression descriptors (shared with the analysis module) ---

// Keep the first q qubits, measure the rest in `rest_basis`.
CompressionSpec store_subset_spec(int n, int q, Basis rest_basis);
// Bell-measure consecutive pairs over the support of a fixed linear
// descriptor; other qubits are measured in +. An odd support leaves one
// qubit: kept when store_leftover, else measured in a basis chosen at random
// per run (handled by the strategy, not the spec).
CompressionSpec bell_pairs_spec(const BitString& descriptor, bool store_leftover);
// Keep `survivors`; every other qubit is erased (measured in +, outcome
// hidden from the strategy).
CompressionSpec erasure_spec(int n, const std::vector<int>& survivors);

// --- OT receiver strategies ---

// Member of R_gamma: keeps `q` qubits chosen by keep-first, measures the rest
// in a fixed basis at the bound; on announce, measures kept qubits in the
// announced basis and guesses b through f.
std::unique_ptr<OtReceiver> make_store_subset_receiver(int q, Basis rest_basis = Basis::Plus);

// The Bell-measurement XOR attack against the fixed-linear-function variant.
// Works for any fixed linear descriptor; with q=0 and odd support the
// leftover qubit is measured in a random basis and the attack degrades.
std::unique_ptr<OtReceiver> make_bell_xor_receiver(const BitString& fixed_descriptor,
                                                   bool store_leftover = false);

// Keeps everything until the bound, then loses each qubit to erasure with
// probability p (trace-out plus a flag; outcomes hidden from the guess rule).
std::unique_ptr<OtReceiver> make_erasure_receiver(double p, int declared_budget);

// --- committer strategies ---

// Measures everything in {+,x}_[c] at commit time; opens c honestly and
// 1 - c by echoing its measured string.
std::unique_ptr<Committer> make_measure_all_committer(int c);

// Member of C_gamma: keeps the first q qubits unmeasured until the opening,
// measures the rest in `rest_basis` at commit time; at open(b) measures the
// kept qubits in [b] and fills the rest from its record.
std::unique_ptr<Committer> make_bounded_committer(int q, Basis rest_basis = Basis::Plus);

// Unbounded committer: keeps all n qubits, measures them in [b] at the open
// request (breaks binding; hypothesis-violating reference point).
std::unique_ptr<Committer> make_unbounded_committer();

// --- registry (experiment config names) ---

// "honest", "store_subset:q=2,basis=+", "bell_xor", "bell_xor:store=1",
// "erasure:p=0.8,q=6"
std::unique_ptr<OtReceiver> receiver_by_name(const std::string& spec, int n);
// "honest:0", "measure_all:0", "bounded:q=2,basis=+", "unbounded"
std::unique_ptr<Committer> committer_by_name(const std::string& spec);

}  // namespace bqs
