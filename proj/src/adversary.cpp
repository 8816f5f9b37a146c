#include "bqs/adversary.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace bqs {

CompressionSpec store_subset_spec(int n, int q, Basis rest_basis) {
    if (q < 0 || q > n) throw std::invalid_argument("store_subset_spec: bad q");
    CompressionSpec spec;
    const auto rest = rest_basis == Basis::Plus ? QubitDisposition::Kind::MeasurePlus
                                                : QubitDisposition::Kind::MeasureTimes;
    spec.per_qubit.assign(static_cast<std::size_t>(n), QubitDisposition{rest, -1, false});
    for (int i = 0; i < q; ++i)
        spec.per_qubit[static_cast<std::size_t>(i)] = {QubitDisposition::Kind::Keep, -1, false};
    return spec;
}

CompressionSpec bell_pairs_spec(const BitString& descriptor, bool store_leftover) {
    const int n = static_cast<int>(descriptor.size());
    CompressionSpec spec;
    spec.per_qubit.assign(static_cast<std::size_t>(n),
                          QubitDisposition{QubitDisposition::Kind::MeasurePlus, -1, false});
    std::vector<int> support;
    for (int i = 0; i < n; ++i)
        if (descriptor[static_cast<std::size_t>(i)]) support.push_back(i);
    for (std::size_t k = 0; k + 1 < support.size(); k += 2) {
        const int a = support[k], b = support[k + 1];
        spec.per_qubit[static_cast<std::size_t>(a)] = {QubitDisposition::Kind::BellPair, b, false};
        spec.per_qubit[static_cast<std::size_t>(b)] = {QubitDisposition::Kind::BellPair, a, false};
    }
    if (support.size() % 2 == 1) {
        const int last = support.back();
        if (store_leftover)
            spec.per_qubit[static_cast<std::size_t>(last)] = {QubitDisposition::Kind::Keep, -1, false};
        // else: the strategy measures it in a per-run random basis; the static
        // descriptor keeps the default +.
    }
    return spec;
}

CompressionSpec erasure_spec(int n, const std::vector<int>& survivors) {
    CompressionSpec spec;
    spec.per_qubit.assign(static_cast<std::size_t>(n),
                          QubitDisposition{QubitDisposition::Kind::MeasurePlus, -1, true});
    for (int s : survivors) {
        if (s < 0 || s >= n) throw std::invalid_argument("erasure_spec: survivor out of range");
        spec.per_qubit[static_cast<std::size_t>(s)] = {QubitDisposition::Kind::Keep, -1, false};
    }
    return spec;
}

namespace {

// Completion rule shared by the storing strategies: a bit measured in basis
// `basis` is exact when the announced basis matches, a coin flip otherwise.
int completed_bit(int outcome, Basis basis, Basis announced, Rng& rng) {
    return basis == announced ? outcome : rng.bit();
}

class StoreSubsetReceiver : public OtReceiver {
public:
    StoreSubsetReceiver(int q, Basis rest) : q_(q), rest_(rest) {}

    std::string name() const override { return "store_subset"; }
    int memory_budget(int) const override { return q_; }

    void on_qubits(QuantumRegister&, const std::vector<int>&, Rng&) override {}

    void on_memory_bound(QuantumRegister& reg, const std::vector<int>& qubits, Rng& rng) override {
        int kept = 0;
        for (int id : qubits) {
            if (kept < q_) {
                kept_.push_back(id);
                ++kept;
                continue;
            }
            record_[id] = reg.measure_one(id, rest_, rng);
        }
    }

    ReceiverFinish on_announce_qot(const AnnounceQot& ann, QuantumRegister& reg,
                                   const std::vector<int>& qubits, Rng& rng) override {
        const BitString x_hat = guess_string(ann.r, reg, qubits, rng);
        ReceiverFinish fin;
        fin.guess = ann.e ^ ann.f.eval(x_hat);
        return fin;
    }

    ReceiverFinish on_announce_bb84(const AnnounceBb84& ann, QuantumRegister& reg,
                                    const std::vector<std::vector<int>>& per_index,
                                    Rng& rng) override {
        // Estimate per index from the first copy, then let the announced
        // syndrome correct the estimate where it can.
        BitString full(per_index.size());
        for (std::size_t i = 0; i < per_index.size(); ++i)
            full.set(i, estimate_qubit(per_index[i][0], ann.r, reg, rng));
        BitString x_hat = full.restricted(ann.index_set);
        if (const auto fixed = ann.code->reconcile(x_hat, ann.syn)) x_hat = *fixed;
        ReceiverFinish fin;
        fin.guess = ann.e ^ ann.f.eval(x_hat);
        return fin;
    }

private:
    int estimate_qubit(int id, Basis announced, QuantumRegister& reg, Rng& rng) {
        if (std::find(kept_.begin(), kept_.end(), id) != kept_.end())
            return reg.measure_one(id, announced, rng);
        return completed_bit(record_.at(id), rest_, announced, rng);
    }

    BitString guess_string(Basis announced, QuantumRegister& reg, const std::vector<int>& qubits,
                           Rng& rng) {
        BitString x_hat(qubits.size());
        for (std::size_t j = 0; j < qubits.size(); ++j)
            x_hat.set(j, estimate_qubit(qubits[j], announced, reg, rng));
        return x_hat;
    }

    int q_;
    Basis rest_;
    std::vector<int> kept_;
    std::map<int, int> record_;
};

class BellXorReceiver : public OtReceiver {
public:
    BellXorReceiver(BitString descriptor, bool store_leftover)
        : descriptor_(std::move(descriptor)), store_leftover_(store_leftover) {}

    std::string name() const override { return "bell_xor"; }
    int memory_budget(int) const override {
        const auto support = static_cast<int>(descriptor_.hamming_weight());
        return (store_leftover_ && support % 2 == 1) ? 1 : 0;
    }

    void on_qubits(QuantumRegister&, const std::vector<int>&, Rng&) override {}

    void on_memory_bound(QuantumRegister& reg, const std::vector<int>& qubits, Rng& rng) override {
        std::vector<int> support;
        for (std::size_t i = 0; i < descriptor_.size(); ++i)
            if (descriptor_[i]) support.push_back(static_cast<int>(i));
        for (std::size_t k = 0; k + 1 < support.size(); k += 2) {
            const int ia = support[k], ib = support[k + 1];
            pairs_.push_back({ia, ib,
                              reg.bell_measure(qubits[static_cast<std::size_t>(ia)],
                                               qubits[static_cast<std::size_t>(ib)], rng)});
        }
        if (support.size() % 2 == 1) {
            leftover_index_ = support.back();
            if (store_leftover_) {
                leftover_qubit_ = qubits[static_cast<std::size_t>(leftover_index_)];
            } else {
                leftover_basis_ = basis_from_bit(rng.bit());
                leftover_outcome_ = reg.measure_one(qubits[static_cast<std::size_t>(leftover_index_)],
                                                    *leftover_basis_, rng);
            }
        }
        // Qubits outside the support are dead weight: measure them in + so
        // nothing is stored.
        for (std::size_t i = 0; i < descriptor_.size(); ++i) {
            if (descriptor_[i]) continue;
            offsupport_[static_cast<int>(i)] =
                reg.measure_one(qubits[i], Basis::Plus, rng);
        }
    }

    ReceiverFinish on_announce_qot(const AnnounceQot& ann, QuantumRegister& reg,
                                   const std::vector<int>& qubits, Rng& rng) override {
        // Parity of f(x) reconstructed pair by pair: a pair contributes its
        // Bell xor when f covers both ends, nothing when it covers neither,
        // and a coin when it covers exactly one.
        int parity = 0;
        for (const auto& p : pairs_) {
            const int fa = ann.f.r[static_cast<std::size_t>(p.a)];
            const int fb = ann.f.r[static_cast<std::size_t>(p.b)];
            if (fa && fb)
                parity ^= bell_xor_prediction(p.outcome, ann.r);
            else if (fa != fb)
                parity ^= rng.bit();
        }
        if (leftover_index_ >= 0 && ann.f.r[static_cast<std::size_t>(leftover_index_)]) {
            if (leftover_qubit_ >= 0)
                parity ^= reg.measure_one(leftover_qubit_, ann.r, rng);
            else
                parity ^= completed_bit(leftover_outcome_, *leftover_basis_, ann.r, rng);
        }
        for (const auto& [idx, outcome] : offsupport_)
            if (ann.f.r[static_cast<std::size_t>(idx)])
                parity ^= completed_bit(outcome, Basis::Plus, ann.r, rng);
        (void)qubits;
        ReceiverFinish fin;
        fin.guess = ann.e ^ parity;
        return fin;
    }

private:
    struct PairRecord {
        int a, b;
        BellOutcome outcome;
    };

    BitString descriptor_;
    bool store_leftover_;
    std::vector<PairRecord> pairs_;
    std::map<int, int> offsupport_;
    int leftover_index_ = -1;
    int leftover_qubit_ = -1;
    std::optional<Basis> leftover_basis_;
    int leftover_outcome_ = 0;
};

class ErasureReceiver : public OtReceiver {
public:
    ErasureReceiver(double p, int declared_budget) : p_(p), budget_(declared_budget) {}

    std::string name() const override { return "erasure"; }
    int memory_budget(int n) const override { return budget_ < 0 ? n : budget_; }

    void on_qubits(QuantumRegister&, const std::vector<int>&, Rng&) override {}

    void on_memory_bound(QuantumRegister& reg, const std::vector<int>& qubits, Rng& rng) override {
        for (int id : qubits) {
            if (rng.bernoulli(p_)) {
                // Erasure: trace-out realized as a +-measurement whose outcome
                // the strategy never sees; only the flag is kept.
                (void)reg.measure_one(id, Basis::Plus, rng);
                erased_.push_back(id);
            } else {
                survivors_.push_back(id);
            }
        }
    }

    ReceiverFinish on_announce_qot(const AnnounceQot& ann, QuantumRegister& reg,
                                   const std::vector<int>& qubits, Rng& rng) override {
        BitString x_hat(qubits.size());
        for (std::size_t j = 0; j < qubits.size(); ++j) {
            const int id = qubits[j];
            if (std::find(survivors_.begin(), survivors_.end(), id) != survivors_.end())
                x_hat.set(j, reg.measure_one(id, ann.r, rng));
            else
                x_hat.set(j, rng.bit());  // erased: flag only, no outcome
        }
        ReceiverFinish fin;
        fin.guess = ann.e ^ ann.f.eval(x_hat);
        return fin;
    }

    const std::vector<int>& survivors() const { return survivors_; }

private:
    double p_;
    int budget_;
    std::vector<int> erased_, survivors_;
};

class MeasureAllCommitter : public Committer {
public:
    explicit MeasureAllCommitter(int c) : c_(c) {}
    std::string name() const override { return "measure_all"; }
    int memory_budget(int) const override { return 0; }

    void on_qubits(QuantumRegister& reg, const std::vector<std::vector<int>>& per_index,
                   Rng& rng) override {
        x_record_ = BitString(per_index.size());
        for (std::size_t i = 0; i < per_index.size(); ++i) {
            const auto& ids = per_index[i];
            const BitString bits = reg.measure(ids, BasisString(ids.size(), basis_from_bit(c_)), rng);
            x_record_.set(i, bits[0]);
        }
    }
    void on_memory_bound(QuantumRegister&, const std::vector<int>&, Rng&) override {}
    BitString on_open_request(int, QuantumRegister&, Rng&) override { return x_record_; }

private:
    int c_;
    BitString x_record_;
};

class BoundedCommitter : public Committer {
public:
    BoundedCommitter(int q, Basis rest) : q_(q), rest_(rest) {}
    std::string name() const override { return "bounded"; }
    int memory_budget(int) const override { return q_; }

    void on_qubits(QuantumRegister&, const std::vector<std::vector<int>>& per_index, Rng&) override {
        first_copy_.clear();
        for (const auto& ids : per_index) first_copy_.push_back(ids[0]);
    }

    void on_memory_bound(QuantumRegister& reg, const std::vector<int>& qubits, Rng& rng) override {
        int kept = 0;
        for (int id : first_copy_) {
            if (kept < q_) {
                kept_.push_back(id);
                ++kept;
                continue;
            }
            record_[id] = reg.measure_one(id, rest_, rng);
        }
        // Stray weak copies were never in first_copy_; measure them off too.
        for (int id : qubits)
            if (reg.is_active(id) && std::find(kept_.begin(), kept_.end(), id) == kept_.end())
                (void)reg.measure_one(id, rest_, rng);
    }

    BitString on_open_request(int b, QuantumRegister& reg, Rng& rng) override {
        BitString out(first_copy_.size());
        for (std::size_t i = 0; i < first_copy_.size(); ++i) {
            const int id = first_copy_[i];
            if (std::find(kept_.begin(), kept_.end(), id) != kept_.end())
                out.set(i, reg.measure_one(id, basis_from_bit(b), rng));
            else
                out.set(i, record_.at(id));
        }
        return out;
    }

private:
    int q_;
    Basis rest_;
    std::vector<int> first_copy_, kept_;
    std::map<int, int> record_;
};

class UnboundedCommitter : public Committer {
public:
    std::string name() const override { return "unbounded"; }
    int memory_budget(int n) const override { return n; }
    void on_qubits(QuantumRegister&, const std::vector<std::vector<int>>& per_index, Rng&) override {
        first_copy_.clear();
        for (const auto& ids : per_index) first_copy_.push_back(ids[0]);
    }
    void on_memory_bound(QuantumRegister&, const std::vector<int>&, Rng&) override {}
    BitString on_open_request(int b, QuantumRegister& reg, Rng& rng) override {
        BitString out(first_copy_.size());
        for (std::size_t i = 0; i < first_copy_.size(); ++i)
            out.set(i, reg.measure_one(first_copy_[i], basis_from_bit(b), rng));
        return out;
    }

private:
    std::vector<int> first_copy_;
};

// name[:k=v,...] or name:<positional>
struct ParsedSpec {
    std::string name;
    std::map<std::string, std::string> kv;
    std::string positional;
};

ParsedSpec parse_spec(const std::string& s) {
    ParsedSpec out;
    const auto colon = s.find(':');
    out.name = s.substr(0, colon);
    if (colon == std::string::npos) return out;
    std::stringstream ss(s.substr(colon + 1));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos)
            out.positional = tok;
        else
            out.kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    return out;
}

Basis parse_basis(const std::string& s) {
    if (s == "+") return Basis::Plus;
    if (s == "x" || s == "X") return Basis::Times;
    throw std::runtime_error("unknown basis: " + s);
}

}  // namespace

std::unique_ptr<OtReceiver> make_store_subset_receiver(int q, Basis rest_basis) {
    return std::make_unique<StoreSubsetReceiver>(q, rest_basis);
}

std::unique_ptr<OtReceiver> make_bell_xor_receiver(const BitString& fixed_descriptor,
                                                   bool store_leftover) {
    return std::make_unique<BellXorReceiver>(fixed_descriptor, store_leftover);
}

std::unique_ptr<OtReceiver> make_erasure_receiver(double p, int declared_budget) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("make_erasure_receiver: p in [0,1]");
    return std::make_unique<ErasureReceiver>(p, declared_budget);
}

std::unique_ptr<Committer> make_measure_all_committer(int c) {
    if (c != 0 && c != 1) throw std::invalid_argument("make_measure_all_committer: bit required");
    return std::make_unique<MeasureAllCommitter>(c);
}

std::unique_ptr<Committer> make_bounded_committer(int q, Basis rest_basis) {
    if (q < 0) throw std::invalid_argument("make_bounded_committer: q >= 0");
    return std::make_unique<BoundedCommitter>(q, rest_basis);
}

std::unique_ptr<Committer> make_unbounded_committer() {
    return std::make_unique<UnboundedCommitter>();
}

std::unique_ptr<OtReceiver> receiver_by_name(const std::string& spec, int n) {
    const auto p = parse_spec(spec);
    if (p.name == "honest") return std::make_unique<HonestOtReceiver>();
    if (p.name == "store_subset") {
        const int q = p.kv.count("q") ? std::stoi(p.kv.at("q"))
                                      : (p.positional.empty() ? 0 : std::stoi(p.positional));
        const Basis rest = p.kv.count("basis") ? parse_basis(p.kv.at("basis")) : Basis::Plus;
        return make_store_subset_receiver(q, rest);
    }
    if (p.name == "bell_xor") {
        BitString descriptor(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) descriptor.set(static_cast<std::size_t>(i), 1);
        if (p.kv.count("f")) descriptor = BitString::from_string(p.kv.at("f"));
        const bool store = p.kv.count("store") && p.kv.at("store") == "1";
        return make_bell_xor_receiver(descriptor, store);
    }
    if (p.name == "erasure") {
        const double prob = p.kv.count("p") ? std::stod(p.kv.at("p")) : 0.5;
        const int budget = p.kv.count("q") ? std::stoi(p.kv.at("q")) : -1;
        return make_erasure_receiver(prob, budget);
    }
    throw std::runtime_error("unknown receiver strategy: " + spec);
}

std::unique_ptr<Committer> committer_by_name(const std::string& spec) {
    const auto p = parse_spec(spec);
    auto bit_of = [&](int fallback) {
        if (p.kv.count("b")) return std::stoi(p.kv.at("b"));
        if (!p.positional.empty()) return std::stoi(p.positional);
        return fallback;
    };
    if (p.name == "honest") return std::make_unique<HonestCommitter>(bit_of(0));
    if (p.name == "measure_all") return make_measure_all_committer(bit_of(0));
    if (p.name == "bounded") {
        const int q = p.kv.count("q") ? std::stoi(p.kv.at("q"))
                                      : (p.positional.empty() ? 0 : std::stoi(p.positional));
        const Basis rest = p.kv.count("basis") ? parse_basis(p.kv.at("basis")) : Basis::Plus;
        return make_bounded_committer(q, rest);
    }
    if (p.name == "unbounded") return make_unbounded_committer();
    throw std::runtime_error("unknown committer strategy: " + spec);
}

}  // namespace bqs
