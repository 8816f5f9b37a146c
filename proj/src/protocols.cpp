#include "bqs/protocols.hpp"

#include <algorithm>
#include <stdexcept>

namespace bqs {

const char* party_name(Party p) {
    switch (p) {
        case Party::A: return "A";
        case Party::B: return "B";
        case Party::C: return "C";
        case Party::V: return "V";
    }
    return "?";
}

int Transcript::count_messages(Party from, Party to, int lo, int hi) const {
    if (hi < 0) hi = static_cast<int>(messages.size());
    int c = 0;
    for (int i = lo; i < hi; ++i) {
        const auto& m = messages[static_cast<std::size_t>(i)];
        c += (m.from == from && m.to == to);
    }
    return c;
}

nlohmann::json Transcript::to_json() const {
    nlohmann::json msgs = nlohmann::json::array();
    for (const auto& m : messages)
        msgs.push_back({{"step", m.step},
                        {"from", party_name(m.from)},
                        {"to", party_name(m.to)},
                        {"payload", m.payload}});
    return nlohmann::json{{"protocol", protocol},
                          {"n", n},
                          {"seed", seed},
                          {"inputs", inputs},
                          {"messages", msgs},
                          {"memory_bound_at", memory_bound_at},
                          {"memory_budget", memory_budget},
                          {"retained_qubits", retained_qubits},
                          {"open_phase_from", open_phase_from},
                          {"outputs", outputs},
                          {"accepted", accepted ? nlohmann::json(*accepted) : nlohmann::json()}};
}

std::string Transcript::dump(int indent) const { return to_json().dump(indent); }

void OtReceiver::on_qubits_indexed(QuantumRegister& reg,
                                   const std::vector<std::vector<int>>& per_index, Rng& rng) {
    std::vector<int> flat;
    for (const auto& group : per_index) flat.insert(flat.end(), group.begin(), group.end());
    on_qubits(reg, flat, rng);
}

ReceiverFinish OtReceiver::on_announce_bb84(const AnnounceBb84&, QuantumRegister&,
                                            const std::vector<std::vector<int>>&, Rng&) {
    throw std::logic_error(name() + " does not handle the BB84 announce");
}

// --- honest receiver ---

void HonestOtReceiver::on_qubits(QuantumRegister& reg, const std::vector<int>& qubits, Rng& rng) {
    r_prime_ = forced_basis_ ? *forced_basis_ : basis_from_bit(rng.bit());
    x_prime_ = reg.measure(qubits, BasisString(qubits.size(), r_prime_), rng);
}

void HonestOtReceiver::on_qubits_indexed(QuantumRegister& reg,
                                         const std::vector<std::vector<int>>& per_index, Rng& rng) {
    r_prime_ = forced_basis_ ? *forced_basis_ : basis_from_bit(rng.bit());
    x_prime_ = BitString(per_index.size());
    for (std::size_t i = 0; i < per_index.size(); ++i) {
        // Measure every arriving qubit; the first copy is the reading for
        // index i.
        const auto& ids = per_index[i];
        const BitString bits = reg.measure(ids, BasisString(ids.size(), r_prime_), rng);
        x_prime_.set(i, bits[0]);
    }
}

ReceiverFinish HonestOtReceiver::on_announce_qot(const AnnounceQot& ann, QuantumRegister&,
                                                 const std::vector<int>&, Rng& rng) {
    ReceiverFinish fin;
    if (ann.malformed) {
        // Dishonest sender sent garbage: absorb instead of aborting. a is
        // sampled uniformly; b' is sampled only on a=1 so a=0 => b'=0 stays
        // a transcript invariant.
        const int a = rng.bit();
        fin.outputs = {a, a ? rng.bit() : 0};
        fin.note = "malformed announce; outputs sampled";
        return fin;
    }
    if (r_prime_ == ann.r)
        fin.outputs = {1, ann.e ^ ann.f.eval(x_prime_)};
    else
        fin.outputs = {0, 0};
    return fin;
}

ReceiverFinish HonestOtReceiver::on_announce_bb84(const AnnounceBb84& ann, QuantumRegister&,
                                                  const std::vector<std::vector<int>>&, Rng& rng) {
    ReceiverFinish fin;
    if (ann.malformed) {
        const int a = rng.bit();
        fin.outputs = {a, a ? rng.bit() : 0};
        fin.note = "malformed announce; outputs sampled";
        return fin;
    }
    if (r_prime_ != ann.r) {
        fin.outputs = {0, 0};
        return fin;
    }
    const BitString x_prime_I = x_prime_.restricted(ann.index_set);
    const auto recovered = ann.code->reconcile(x_prime_I, ann.syn);
    if (!recovered) {
        fin.outputs = {0, 0};
        fin.note = "decode-failure";
        return fin;
    }
    fin.outputs = {1, ann.e ^ ann.f.eval(*recovered)};
    return fin;
}

// --- honest committer ---

void HonestCommitter::on_qubits(QuantumRegister& reg, const std::vector<std::vector<int>>& per_index,
                                Rng& rng) {
    x_prime_ = BitString(per_index.size());
    for (std::size_t i = 0; i < per_index.size(); ++i) {
        const auto& ids = per_index[i];
        const BitString bits = reg.measure(ids, BasisString(ids.size(), basis_from_bit(b_)), rng);
        x_prime_.set(i, bits[0]);
    }
}

BitString HonestCommitter::on_open_request(int, QuantumRegister&, Rng&) { return x_prime_; }

// --- shared runner pieces ---

namespace {

void apply_receiver_bound(Transcript& t, QuantumRegister& reg, OtReceiver& receiver,
                          const std::vector<int>& qubits, int n, Rng& rng) {
    const int q = receiver.memory_budget(n);
    receiver.on_memory_bound(reg, qubits, rng);
    const int active = reg.active_count(qubits);
    if (active > q)
        throw MemoryBoundViolation("receiver retains " + std::to_string(active) +
                                   " qubits past the bound, budget " + std::to_string(q));
    t.memory_bound_at = static_cast<int>(t.messages.size());
    t.memory_budget = q;
    t.retained_qubits = active;
}

void finish_ot_transcript(Transcript& t, const ReceiverFinish& fin) {
    if (fin.outputs.a == 0 && fin.outputs.b_prime != 0)
        throw std::logic_error("receiver outputs violate a=0 => b'=0");
    t.outputs = nlohmann::json{{"a", fin.outputs.a}, {"b_prime", fin.outputs.b_prime}};
    if (fin.guess) t.outputs["guess"] = *fin.guess;
    if (!fin.note.empty()) t.outputs["note"] = fin.note;
}

nlohmann::json announce_payload(Basis r, const HashFn& f, int e) {
    return nlohmann::json{{"r", std::string(1, basis_char(r))}, {"f", f.descriptor_hex()}, {"e", e}};
}

PureState noisy_epr_pair(double phi, Rng& rng) {
    PureState pair = make_epr_pairs(1);
    // Bit-flip noise on the transmitted half, symmetric between the two
    // conjugate bases: X flips the + reading, Z flips the x reading, each
    // independently with probability phi. Whichever basis the halves are
    // eventually read in, the outcome flips with probability phi.
    const bool fx = rng.bernoulli(phi);
    const bool fz = rng.bernoulli(phi);
    if (!fx && !fz) return pair;
    Eigen::VectorXcd a = pair.amplitudes();
    if (fx) {
        Eigen::Matrix2cd x;
        x << 0, 1, 1, 0;
        apply_single_qubit(a, 2, 1, x);
    }
    if (fz) {
        Eigen::Matrix2cd z;
        z << 1, 0, 0, -1;
        apply_single_qubit(a, 2, 1, z);
    }
    return PureState(2, std::move(a));
}

HashFn make_hash(int len, Rng& rng) {
    if (len == 0) return HashFn{0, BitString{}};
    return sample_hash(len, rng);
}

// One source emission (single or weak multi-copy) pushed through the
// phi-channel: each copy flips in its encoding basis independently.
std::vector<int> deliver_emission(QuantumRegister& reg, int x, Basis theta,
                                  const WeakModelParams& params, Rng& rng) {
    const Emission em = weak_source_transmit(x, theta, params, rng);
    std::vector<int> ids;
    ids.reserve(static_cast<std::size_t>(em.copies));
    for (int c = 0; c < em.copies; ++c) {
        const int bit_sent = x ^ (rng.bernoulli(params.phi) ? 1 : 0);
        BitString xb(1);
        xb.set(0, bit_sent);
        ids.push_back(reg.add_qubit(encode_bb84(xb, BasisString(1, theta))));
    }
    return ids;
}

}  // namespace

Transcript run_qot(int b, const QotConfig& cfg, OtReceiver& receiver, Rng& rng) {
    if (cfg.n < 1) throw std::invalid_argument("run_qot: n must be >= 1");
    if (b != 0 && b != 1) throw std::invalid_argument("run_qot: b must be a bit");
    if (cfg.fixed_hash && static_cast<int>(cfg.fixed_hash->size()) != cfg.n)
        throw std::invalid_argument("run_qot: fixed descriptor length mismatch");

    Transcript t;
    t.protocol = "qot";
    t.n = cfg.n;
    t.seed = rng.seed();
    t.inputs = nlohmann::json{{"b", b}};
    if (cfg.fixed_hash) t.inputs["fixed_hash"] = cfg.fixed_hash->to_hex();

    QuantumRegister reg;
    const BitString x = BitString::random(static_cast<std::size_t>(cfg.n), rng);
    const Basis r = basis_from_bit(rng.bit());
    t.inputs["x"] = x.to_string();
    t.inputs["r"] = std::string(1, basis_char(r));

    std::vector<int> qubits;
    for (int i = 0; i < cfg.n; ++i) {
        BitString xb(1);
        xb.set(0, x[static_cast<std::size_t>(i)]);
        qubits.push_back(reg.add_qubit(encode_bb84(xb, BasisString(1, r))));
    }
    t.messages.push_back({"qubits", Party::A, Party::B, {{"count", cfg.n}}});

    receiver.on_qubits(reg, qubits, rng);
    apply_receiver_bound(t, reg, receiver, qubits, cfg.n, rng);

    const HashFn f = cfg.fixed_hash ? hash_from_descriptor(*cfg.fixed_hash) : make_hash(cfg.n, rng);
    const int e = b ^ f.eval(x);
    t.messages.push_back({"announce", Party::A, Party::B, announce_payload(r, f, e)});

    const ReceiverFinish fin =
        receiver.on_announce_qot(AnnounceQot{r, f, e, cfg.malformed_announce}, reg, qubits, rng);
    finish_ot_transcript(t, fin);
    return t;
}

Transcript run_epr_qot(int b, const QotConfig& cfg, OtReceiver& receiver, Rng& rng) {
    if (cfg.n < 1) throw std::invalid_argument("run_epr_qot: n must be >= 1");
    if (b != 0 && b != 1) throw std::invalid_argument("run_epr_qot: b must be a bit");
    if (cfg.fixed_hash && static_cast<int>(cfg.fixed_hash->size()) != cfg.n)
        throw std::invalid_argument("run_epr_qot: fixed descriptor length mismatch");

    Transcript t;
    t.protocol = "epr-qot";
    t.n = cfg.n;
    t.seed = rng.seed();
    t.inputs = nlohmann::json{{"b", b}};
    if (cfg.fixed_hash) t.inputs["fixed_hash"] = cfg.fixed_hash->to_hex();

    QuantumRegister reg;
    std::vector<int> sender_halves, receiver_halves;
    for (int i = 0; i < cfg.n; ++i) {
        auto ids = reg.add_group(make_epr_pairs(1));
        sender_halves.push_back(ids[0]);
        receiver_halves.push_back(ids[1]);
    }
    t.messages.push_back({"qubits", Party::A, Party::B, {{"count", cfg.n}}});

    receiver.on_qubits(reg, receiver_halves, rng);
    apply_receiver_bound(t, reg, receiver, receiver_halves, cfg.n, rng);

    // Step 4: the sender now measures all kept halves in r.
    const Basis r = basis_from_bit(rng.bit());
    const BitString x = reg.measure(sender_halves, BasisString(sender_halves.size(), r), rng);
    t.inputs["x"] = x.to_string();
    t.inputs["r"] = std::string(1, basis_char(r));

    const HashFn f = cfg.fixed_hash ? hash_from_descriptor(*cfg.fixed_hash) : make_hash(cfg.n, rng);
    const int e = b ^ f.eval(x);
    t.messages.push_back({"announce", Party::A, Party::B, announce_payload(r, f, e)});

    const ReceiverFinish fin =
        receiver.on_announce_qot(AnnounceQot{r, f, e, cfg.malformed_announce}, reg, receiver_halves, rng);
    finish_ot_transcript(t, fin);
    return t;
}

Transcript run_bb84_qot(int b, const Bb84Config& cfg, OtReceiver& receiver, Rng& rng) {
    if (cfg.n < 1) throw std::invalid_argument("run_bb84_qot: n must be >= 1");
    if (b != 0 && b != 1) throw std::invalid_argument("run_bb84_qot: b must be a bit");
    if (!cfg.code) throw std::invalid_argument("run_bb84_qot: code required");
    cfg.params.validate();

    Transcript t;
    t.protocol = "bb84-qot";
    t.n = cfg.n;
    t.seed = rng.seed();
    t.inputs = nlohmann::json{{"b", b}, {"phi", cfg.params.phi}, {"eta", cfg.params.eta},
                              {"code", cfg.code->name()}};

    QuantumRegister reg;
    const BitString x = BitString::random(static_cast<std::size_t>(cfg.n), rng);
    const BasisString theta = BasisString::random(static_cast<std::size_t>(cfg.n), rng);
    t.inputs["x"] = x.to_string();
    t.inputs["theta"] = theta.to_string();

    int sent = 0;
    std::vector<std::vector<int>> per_index(static_cast<std::size_t>(cfg.n));
    for (int i = 0; i < cfg.n; ++i) {
        per_index[static_cast<std::size_t>(i)] =
            deliver_emission(reg, x[static_cast<std::size_t>(i)],
                             theta[static_cast<std::size_t>(i)], cfg.params, rng);
        sent += static_cast<int>(per_index[static_cast<std::size_t>(i)].size());
    }
    t.messages.push_back({"qubits", Party::A, Party::B, {{"count", sent}}});

    receiver.on_qubits_indexed(reg, per_index, rng);
    std::vector<int> flat;
    for (const auto& g : per_index) flat.insert(flat.end(), g.begin(), g.end());
    apply_receiver_bound(t, reg, receiver, flat, cfg.n, rng);

    // Step 4: r, I = {i : theta_i = [r]}, syndrome, hash, mask.
    const Basis r = basis_from_bit(rng.bit());
    std::vector<int> index_set;
    for (int i = 0; i < cfg.n; ++i)
        if (theta[static_cast<std::size_t>(i)] == r) index_set.push_back(i);
    const BitString x_I = x.restricted(index_set);
    const BitString syn = cfg.code->syndrome(x_I);
    const HashFn f = make_hash(static_cast<int>(index_set.size()), rng);
    const int e = b ^ f.eval(x_I);

    nlohmann::json payload = announce_payload(r, f, e);
    payload["I"] = index_set;
    payload["syn"] = syn.to_string();
    t.messages.push_back({"announce", Party::A, Party::B, std::move(payload)});

    const ReceiverFinish fin = receiver.on_announce_bb84(
        AnnounceBb84{r, index_set, syn, f, e, cfg.code, false}, reg, per_index, rng);
    finish_ot_transcript(t, fin);
    return t;
}

Transcript run_bb84_epr_qot(int b, const Bb84Config& cfg, OtReceiver& receiver, Rng& rng) {
    if (cfg.n < 1) throw std::invalid_argument("run_bb84_epr_qot: n must be >= 1");
    if (b != 0 && b != 1) throw std::invalid_argument("run_bb84_epr_qot: b must be a bit");
    if (!cfg.code) throw std::invalid_argument("run_bb84_epr_qot: code required");
    cfg.params.validate();

    Transcript t;
    t.protocol = "bb84-epr-qot";
    t.n = cfg.n;
    t.seed = rng.seed();
    t.inputs = nlohmann::json{{"b", b}, {"phi", cfg.params.phi}, {"eta", cfg.params.eta},
                              {"code", cfg.code->name()}};

    // The sender simulates the weak source: with probability eta index i is
    // emitted as classical multi-copies in a random basis and lands in
    // I'_theta; otherwise an EPR half flies (so the channel runs in the
    // (phi, 0)-weak model from the receiver's point of view).
    QuantumRegister reg;
    std::vector<int> sender_halves(static_cast<std::size_t>(cfg.n), -1);
    std::vector<std::vector<int>> per_index(static_cast<std::size_t>(cfg.n));
    std::vector<int> weak_value(static_cast<std::size_t>(cfg.n), -1);
    std::vector<int> weak_basis(static_cast<std::size_t>(cfg.n), -1);  // I'_+ / I'_x bookkeeping
    int sent = 0;
    for (int i = 0; i < cfg.n; ++i) {
        const bool weak = rng.bernoulli(cfg.params.eta);
        if (weak) {
            const Basis theta_i = basis_from_bit(rng.bit());
            const int x_i = rng.bit();
            weak_value[static_cast<std::size_t>(i)] = x_i;
            weak_basis[static_cast<std::size_t>(i)] = basis_to_bit(theta_i);
            for (int c = 0; c < cfg.params.multiplicity; ++c) {
                const int bit_sent = x_i ^ (rng.bernoulli(cfg.params.phi) ? 1 : 0);
                BitString xb(1);
                xb.set(0, bit_sent);
                per_index[static_cast<std::size_t>(i)].push_back(
                    reg.add_qubit(encode_bb84(xb, BasisString(1, theta_i))));
                ++sent;
            }
        } else {
            auto ids = reg.add_group(noisy_epr_pair(cfg.params.phi, rng));
            sender_halves[static_cast<std::size_t>(i)] = ids[0];
            per_index[static_cast<std::size_t>(i)].push_back(ids[1]);
            ++sent;
        }
    }
    {
        nlohmann::json wp = nlohmann::json::array(), wt = nlohmann::json::array();
        for (int i = 0; i < cfg.n; ++i) {
            if (weak_value[static_cast<std::size_t>(i)] < 0) continue;
            (weak_basis[static_cast<std::size_t>(i)] == 0 ? wp : wt).push_back(i);
        }
        t.inputs["weak_plus"] = std::move(wp);
        t.inputs["weak_times"] = std::move(wt);
    }
    t.messages.push_back({"qubits", Party::A, Party::B, {{"count", sent}}});

    receiver.on_qubits_indexed(reg, per_index, rng);
    std::vector<int> flat;
    for (const auto& g : per_index) flat.insert(flat.end(), g.begin(), g.end());
    apply_receiver_bound(t, reg, receiver, flat, cfg.n, rng);

    // Step 4: J is a random subset of the single-copy indices (each with
    // probability 1/2), I = J union I'_r; measure kept halves over J in r.
    const Basis r = basis_from_bit(rng.bit());
    std::vector<int> index_set;
    BitString x_I;
    for (int i = 0; i < cfg.n; ++i) {
        if (weak_value[static_cast<std::size_t>(i)] >= 0) {
            if (weak_basis[static_cast<std::size_t>(i)] == basis_to_bit(r)) {
                index_set.push_back(i);
                x_I.push_back(weak_value[static_cast<std::size_t>(i)]);
            }
            continue;
        }
        if (rng.bit()) {  // i in J
            index_set.push_back(i);
            x_I.push_back(reg.measure_one(sender_halves[static_cast<std::size_t>(i)], r, rng));
        }
    }
    const BitString syn = cfg.code->syndrome(x_I);
    const HashFn f = make_hash(static_cast<int>(index_set.size()), rng);
    const int e = b ^ f.eval(x_I);

    nlohmann::json payload = announce_payload(r, f, e);
    payload["I"] = index_set;
    payload["syn"] = syn.to_string();
    t.messages.push_back({"announce", Party::A, Party::B, std::move(payload)});

    const ReceiverFinish fin = receiver.on_announce_bb84(
        AnnounceBb84{r, index_set, syn, f, e, cfg.code, false}, reg, per_index, rng);
    finish_ot_transcript(t, fin);
    return t;
}

// --- commitments ---

CommitSession CommitSession::start(CommKind kind, int b, int n, const WeakModelParams& params,
                                   double epsilon, Committer& committer, Rng& rng,
                                   const char* protocol_name) {
    if (n < 1) throw std::invalid_argument("commitment: n must be >= 1");
    if (b != 0 && b != 1) throw std::invalid_argument("commitment: b must be a bit");
    params.validate();

    CommitSession s;
    s.kind_ = kind;
    s.n_ = n;
    s.phi_ = params.phi;
    s.epsilon_ = epsilon;
    s.committer_ = &committer;
    s.transcript_.protocol = protocol_name;
    s.transcript_.n = n;
    s.transcript_.seed = rng.seed();
    s.transcript_.inputs = nlohmann::json{{"b", b}};

    std::vector<std::vector<int>> per_index(static_cast<std::size_t>(n));
    int sent = 0;
    if (kind == CommKind::Epr) {
        for (int i = 0; i < n; ++i) {
            auto ids = s.reg_.add_group(make_epr_pairs(1));
            s.verifier_qubits_.push_back(ids[0]);
            per_index[static_cast<std::size_t>(i)].push_back(ids[1]);
            s.committer_qubits_.push_back(ids[1]);
            ++sent;
        }
    } else {
        s.x_ = BitString::random(static_cast<std::size_t>(n), rng);
        s.r_ = BasisString::random(static_cast<std::size_t>(n), rng);
        const WeakModelParams source = kind == CommKind::Tolerant ? params : WeakModelParams{};
        for (int i = 0; i < n; ++i) {
            per_index[static_cast<std::size_t>(i)] =
                deliver_emission(s.reg_, s.x_[static_cast<std::size_t>(i)],
                                 s.r_[static_cast<std::size_t>(i)], source, rng);
            for (int id : per_index[static_cast<std::size_t>(i)]) s.committer_qubits_.push_back(id);
            sent += static_cast<int>(per_index[static_cast<std::size_t>(i)].size());
        }
    }
    s.transcript_.messages.push_back({"qubits", Party::V, Party::C, {{"count", sent}}});

    committer.on_qubits(s.reg_, per_index, rng);
    return s;
}

CommitSession run_comm(int b, int n, Committer& committer, Rng& rng) {
    return CommitSession::start(CommKind::Plain, b, n, WeakModelParams{}, 0.0, committer, rng,
                                "comm");
}

CommitSession run_epr_comm(int b, int n, Committer& committer, Rng& rng) {
    return CommitSession::start(CommKind::Epr, b, n, WeakModelParams{}, 0.0, committer, rng,
                                "epr-comm");
}

CommitSession run_comm_prime(int b, int n, const WeakModelParams& params, double epsilon,
                             Committer& committer, Rng& rng) {
    if (epsilon <= 0.0) throw std::invalid_argument("run_comm_prime: epsilon must be positive");
    return CommitSession::start(CommKind::Tolerant, b, n, params, epsilon, committer, rng,
                                "comm-prime");
}

bool CommitSession::open(int b_hat, Rng& rng) {
    if (opened_) throw std::logic_error("CommitSession: already opened");
    if (b_hat != 0 && b_hat != 1) throw std::invalid_argument("open: bit required");

    // Definition of the committer class: the memory bound applies at the
    // start of the opening phase.
    committer_->on_memory_bound(reg_, committer_qubits_, rng);
    const int q = committer_->memory_budget(n_);
    const int active = reg_.active_count(committer_qubits_);
    if (active > q)
        throw MemoryBoundViolation("committer retains " + std::to_string(active) +
                                   " qubits at opening, budget " + std::to_string(q));
    transcript_.memory_bound_at = static_cast<int>(transcript_.messages.size());
    transcript_.memory_budget = q;
    transcript_.retained_qubits = active;
    transcript_.open_phase_from = static_cast<int>(transcript_.messages.size());

    const BitString x_hat = committer_->on_open_request(b_hat, reg_, rng);
    transcript_.messages.push_back(
        {"open", Party::C, Party::V, {{"b", b_hat}, {"x_prime", x_hat.to_string()}}});

    const bool accept = check(b_hat, x_hat, rng);
    transcript_.accepted = accept;
    transcript_.outputs["b_opened"] = b_hat;
    transcript_.outputs["accepted"] = accept;
    opened_ = true;
    return accept;
}

bool CommitSession::verify_open(int b_hat, const BitString& x_hat, Rng& rng) {
    if (opened_) throw std::logic_error("CommitSession: already opened");
    transcript_.open_phase_from = static_cast<int>(transcript_.messages.size());
    transcript_.messages.push_back(
        {"open", Party::C, Party::V, {{"b", b_hat}, {"x_prime", x_hat.to_string()}}});
    const bool accept = check(b_hat, x_hat, rng);
    transcript_.accepted = accept;
    transcript_.outputs["b_opened"] = b_hat;
    transcript_.outputs["accepted"] = accept;
    opened_ = true;
    return accept;
}

bool CommitSession::check(int b_hat, const BitString& x_hat, Rng& rng) {
    if (static_cast<int>(x_hat.size()) != n_) return false;
    const Basis check_basis = basis_from_bit(b_hat);

    int checked = 0, mismatches = 0;
    if (kind_ == CommKind::Epr) {
        // Step 5: measure all kept halves in [b_hat], pick a random subset I
        // (every index independently with probability 1/2), compare there.
        const BitString x =
            reg_.measure(verifier_qubits_, BasisString(verifier_qubits_.size(), check_basis), rng);
        for (int i = 0; i < n_; ++i) {
            if (!rng.bit()) continue;  // i not in I
            ++checked;
            mismatches += (x[static_cast<std::size_t>(i)] != x_hat[static_cast<std::size_t>(i)]);
        }
        transcript_.outputs["checked"] = checked;
        transcript_.outputs["mismatches"] = mismatches;
        return mismatches == 0;
    }

    for (int i = 0; i < n_; ++i) {
        if (r_[static_cast<std::size_t>(i)] != check_basis) continue;
        ++checked;
        mismatches += (x_[static_cast<std::size_t>(i)] != x_hat[static_cast<std::size_t>(i)]);
    }
    transcript_.outputs["checked"] = checked;
    transcript_.outputs["mismatches"] = mismatches;
    if (kind_ == CommKind::Plain) return mismatches == 0;
    // Tolerant variant: accept all but a (phi + epsilon)-fraction.
    const int allowed = static_cast<int>((phi_ + epsilon_) * checked);
    return mismatches <= allowed;
}

}  // namespace bqs
