#pragma once

// State machines for the six protocols: QOT and EPR-QOT, BB84-QOT and its
// EPR twin, COMM / EPR-COMM, and the noise-tolerant COMM'. Parties are
// pluggable strategies driven through hooks, so the protocol code never
// branches on honesty; honest parties are just strategies with zero memory
// budget that measure on arrival. The quantum wire hands register handles
// between parties; classical messages are recorded in a Transcript.

#include <json.hpp>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bqs/coding.hpp"
#include "bqs/hashing.hpp"
#include "bqs/memmodel.hpp"
#include "bqs/register.hpp"

namespace bqs {

enum class Party { A, B, C, V };
const char* party_name(Party p);

struct Message {
    std::string step;
    Party from;
    Party to;
    nlohmann::json payload;
};

struct Transcript {
    std::string protocol;
    int n = 0;
    std::uint64_t seed = 0;
    nlohmann::json inputs;
    std::vector<Message> messages;
    int memory_bound_at = -1;   // bound applied before messages[memory_bound_at]
    int memory_budget = -1;
    int retained_qubits = -1;
    int open_phase_from = -1;   // commitments: first open-phase message index
    nlohmann::json outputs;
    std::optional<bool> accepted;

    int count_messages(Party from, Party to, int lo = 0, int hi = -1) const;
    nlohmann::json to_json() const;
    std::string dump(int indent = -1) const;
};

struct OtOutputs {
    int a = 0;
    int b_prime = 0;
};

// --- receiver strategies ---

struct AnnounceQot {
    Basis r = Basis::Plus;
    HashFn f;
    int e = 0;
    bool malformed = false;  // dishonest-sender garbage; honest B samples outputs at random
};

struct AnnounceBb84 {
    Basis r = Basis::Plus;
    std::vector<int> index_set;  // I
    BitString syn;
    HashFn f;  // over |I| bits
    int e = 0;
    const LinearCode* code = nullptr;
    bool malformed = false;
};

struct ReceiverFinish {
    OtOutputs outputs;
    std::optional<int> guess;  // dishonest strategies: guess for b
    std::string note;
};

class OtReceiver {
public:
    virtual ~OtReceiver() = default;
    virtual std::string name() const = 0;
    virtual int memory_budget(int n) const = 0;

    virtual void on_qubits(QuantumRegister& reg, const std::vector<int>& qubits, Rng& rng) = 0;
    // BB84 wire: qubits grouped per index (weak emissions deliver several).
    virtual void on_qubits_indexed(QuantumRegister& reg,
                                   const std::vector<std::vector<int>>& per_index, Rng& rng);
    virtual void on_memory_bound(QuantumRegister& reg, const std::vector<int>& qubits,
                                 Rng& rng) = 0;
    virtual ReceiverFinish on_announce_qot(const AnnounceQot& ann, QuantumRegister& reg,
                                           const std::vector<int>& qubits, Rng& rng) = 0;
    virtual ReceiverFinish on_announce_bb84(const AnnounceBb84& ann, QuantumRegister& reg,
                                            const std::vector<std::vector<int>>& per_index,
                                            Rng& rng);
};

class HonestOtReceiver : public OtReceiver {
public:
    std::string name() const override { return "honest"; }
    int memory_budget(int) const override { return 0; }
    void on_qubits(QuantumRegister& reg, const std::vector<int>& qubits, Rng& rng) override;
    void on_qubits_indexed(QuantumRegister& reg, const std::vector<std::vector<int>>& per_index,
                           Rng& rng) override;
    void on_memory_bound(QuantumRegister&, const std::vector<int>&, Rng&) override {}
    ReceiverFinish on_announce_qot(const AnnounceQot& ann, QuantumRegister& reg,
                                   const std::vector<int>& qubits, Rng& rng) override;
    ReceiverFinish on_announce_bb84(const AnnounceBb84& ann, QuantumRegister& reg,
                                    const std::vector<std::vector<int>>& per_index,
                                    Rng& rng) override;

    Basis chosen_basis() const { return r_prime_; }
    const BitString& measured_bits() const { return x_prime_; }

protected:
    std::optional<Basis> forced_basis_;  // test rigs: pin r' instead of sampling

private:
    Basis r_prime_ = Basis::Plus;
    BitString x_prime_;
};

// Honest receiver that measures in a caller-fixed basis (matched-basis runs).
class FixedBasisReceiver : public HonestOtReceiver {
public:
    explicit FixedBasisReceiver(Basis r) { forced_basis_ = r; }
    std::string name() const override { return "fixed_basis"; }
};

// --- committer strategies ---

class Committer {
public:
    virtual ~Committer() = default;
    virtual std::string name() const = 0;
    virtual int memory_budget(int n) const = 0;
    virtual void on_qubits(QuantumRegister& reg, const std::vector<std::vector<int>>& per_index,
                           Rng& rng) = 0;
    virtual void on_memory_bound(QuantumRegister& reg, const std::vector<int>& qubits,
                                 Rng& rng) = 0;
    virtual BitString on_open_request(int b, QuantumRegister& reg, Rng& rng) = 0;
};

class HonestCommitter : public Committer {
public:
    explicit HonestCommitter(int b) : b_(b) {}
    std::string name() const override { return "honest"; }
    int memory_budget(int) const override { return 0; }
    void on_qubits(QuantumRegister& reg, const std::vector<std::vector<int>>& per_index,
                   Rng& rng) override;
    void on_memory_bound(QuantumRegister&, const std::vector<int>&, Rng&) override {}
    BitString on_open_request(int b, QuantumRegister& reg, Rng& rng) override;

private:
    int b_;
    BitString x_prime_;
};

// --- oblivious transfer runners ---

struct QotConfig {
    int n = 0;
    // XOR-variant switch: mask with a FIXED linear function instead of a
    // fresh uniform one (the insecure deterministic-PA variant).
    std::optional<BitString> fixed_hash;
    bool malformed_announce = false;
};

Transcript run_qot(int b, const QotConfig& cfg, OtReceiver& receiver, Rng& rng);
Transcript run_epr_qot(int b, const QotConfig& cfg, OtReceiver& receiver, Rng& rng);

struct Bb84Config {
    int n = 0;
    WeakModelParams params;
    const LinearCode* code = nullptr;
};

Transcript run_bb84_qot(int b, const Bb84Config& cfg, OtReceiver& receiver, Rng& rng);
Transcript run_bb84_epr_qot(int b, const Bb84Config& cfg, OtReceiver& receiver, Rng& rng);

// --- commitment runners ---

enum class CommKind { Plain, Epr, Tolerant };

class CommitSession {
public:
    // Runs the open phase: memory bound, committer's string, verification.
    bool open(int b_hat, Rng& rng);
    // Verification only, with a caller-supplied opening (no committer call).
    bool verify_open(int b_hat, const BitString& x_hat, Rng& rng);

    const Transcript& transcript() const { return transcript_; }
    bool opened() const { return opened_; }

private:
    static CommitSession start(CommKind kind, int b, int n, const WeakModelParams& params,
                               double epsilon, Committer& committer, Rng& rng,
                               const char* protocol_name);
    friend CommitSession run_comm(int b, int n, Committer& committer, Rng& rng);
    friend CommitSession run_epr_comm(int b, int n, Committer& committer, Rng& rng);
    friend CommitSession run_comm_prime(int b, int n, const WeakModelParams& params, double epsilon,
                                        Committer& committer, Rng& rng);

    bool check(int b_hat, const BitString& x_hat, Rng& rng);

    CommKind kind_ = CommKind::Plain;
    int n_ = 0;
    double phi_ = 0.0, epsilon_ = 0.0;
    Committer* committer_ = nullptr;
    QuantumRegister reg_;
    std::vector<int> committer_qubits_;
    std::vector<int> verifier_qubits_;  // EPR variant
    BitString x_;                       // plain/tolerant variants
    BasisString r_;
    Transcript transcript_;
    bool opened_ = false;
};

CommitSession run_comm(int b, int n, Committer& committer, Rng& rng);
CommitSession run_epr_comm(int b, int n, Committer& committer, Rng& rng);
CommitSession run_comm_prime(int b, int n, const WeakModelParams& params, double epsilon,
                             Committer& committer, Rng& rng);

}  // namespace bqs
