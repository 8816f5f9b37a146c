#include "bqs/register.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace bqs {

std::vector<int> QuantumRegister::add_group(PureState st) {
    const int q = st.qubits();
    if (q == 0) throw std::invalid_argument("QuantumRegister: cannot add an empty group");
    const int gi = static_cast<int>(groups_.size());
    Group g{std::move(st), {}};
    std::vector<int> ids;
    ids.reserve(static_cast<std::size_t>(q));
    for (int j = 0; j < q; ++j) {
        const int id = static_cast<int>(slots_.size());
        slots_.push_back(Slot{gi, -1, std::nullopt});
        g.members.push_back(id);
        ids.push_back(id);
    }
    groups_.push_back(std::move(g));
    return ids;
}

int QuantumRegister::add_qubit(PureState single_qubit) {
    if (single_qubit.qubits() != 1)
        throw std::invalid_argument("QuantumRegister::add_qubit: expected a 1-qubit state");
    return add_group(std::move(single_qubit))[0];
}

bool QuantumRegister::is_active(int id) const {
    if (id < 0 || id >= size()) throw std::invalid_argument("QuantumRegister: id out of range");
    return slots_[static_cast<std::size_t>(id)].group >= 0;
}

int QuantumRegister::active_count() const {
    int c = 0;
    for (const auto& s : slots_) c += (s.group >= 0);
    return c;
}

int QuantumRegister::active_count(std::span<const int> ids) const {
    int c = 0;
    for (int id : ids) c += is_active(id);
    return c;
}

void QuantumRegister::check_active(int id) const {
    if (!is_active(id)) throw std::invalid_argument("QuantumRegister: qubit already measured");
}

int QuantumRegister::position_in_group(int id) const {
    const auto& g = groups_[static_cast<std::size_t>(slots_[static_cast<std::size_t>(id)].group)];
    const auto it = std::find(g.members.begin(), g.members.end(), id);
    return static_cast<int>(it - g.members.begin());
}

int QuantumRegister::merge(int ga, int gb) {
    if (ga == gb) return ga;
    Group& a = groups_[static_cast<std::size_t>(ga)];
    Group& b = groups_[static_cast<std::size_t>(gb)];
    a.state = a.state.tensor(b.state);
    for (int id : b.members) {
        slots_[static_cast<std::size_t>(id)].group = ga;
        a.members.push_back(id);
    }
    b.members.clear();
    b.state = PureState();
    return ga;
}

void QuantumRegister::retire(int id, int outcome, std::optional<BellOutcome> bell) {
    auto& slot = slots_[static_cast<std::size_t>(id)];
    auto& g = groups_[static_cast<std::size_t>(slot.group)];
    g.members.erase(std::find(g.members.begin(), g.members.end(), id));
    slot.group = -1;
    slot.outcome = outcome;
    slot.bell = bell;
}

BitString QuantumRegister::measure(std::span<const int> ids, const BasisString& bases, Rng& rng) {
    if (bases.size() != ids.size())
        throw std::invalid_argument("QuantumRegister::measure: basis/id length mismatch");
    BitString out(ids.size());
    // Group the requested qubits by factor and measure factor by factor, in
    // the order factors first appear in `ids` (deterministic given the rng).
    std::vector<int> order;
    for (int id : ids) {
        check_active(id);
        const int gi = slots_[static_cast<std::size_t>(id)].group;
        if (std::find(order.begin(), order.end(), gi) == order.end()) order.push_back(gi);
    }
    for (int gi : order) {
        std::vector<int> local_pos;
        std::vector<std::size_t> out_slots;
        BasisString local_bases;
        for (std::size_t j = 0; j < ids.size(); ++j) {
            if (slots_[static_cast<std::size_t>(ids[j])].group != gi) continue;
            local_pos.push_back(position_in_group(ids[j]));
            local_bases.push_back(bases[j]);
            out_slots.push_back(j);
        }
        Group& g = groups_[static_cast<std::size_t>(gi)];
        auto res = measure_and_drop(g.state, local_pos, local_bases, rng);
        for (std::size_t j = 0; j < out_slots.size(); ++j) {
            out.set(out_slots[j], res.outcome[j]);
            retire(ids[out_slots[j]], res.outcome[j], std::nullopt);
        }
        if (res.remaining.qubits() == 0)
            g = Group{PureState(), {}};
        else
            g.state = std::move(res.remaining);
    }
    return out;
}

int QuantumRegister::measure_one(int id, Basis b, Rng& rng) {
    const std::array<int, 1> ids{id};
    BasisString bs;
    bs.push_back(b);
    return measure(ids, bs, rng)[0];
}

BellOutcome QuantumRegister::bell_measure(int id_a, int id_b, Rng& rng) {
    check_active(id_a);
    check_active(id_b);
    if (id_a == id_b) throw std::invalid_argument("bell_measure: need two distinct qubits");
    const int gi = merge(slots_[static_cast<std::size_t>(id_a)].group,
                         slots_[static_cast<std::size_t>(id_b)].group);
    Group& g = groups_[static_cast<std::size_t>(gi)];
    const int pa = position_in_group(id_a);
    const int pb = position_in_group(id_b);
    auto res = bell_measure_and_drop(g.state, pa, pb, rng);
    retire(id_a, -1, res.outcome);
    retire(id_b, -1, res.outcome);
    if (res.remaining.qubits() == 0)
        g = Group{PureState(), {}};
    else
        g.state = std::move(res.remaining);
    return res.outcome;
}

int QuantumRegister::measured_bit(int id) const {
    if (is_active(id)) throw std::invalid_argument("QuantumRegister: qubit not measured yet");
    const auto& slot = slots_[static_cast<std::size_t>(id)];
    if (slot.bell) throw std::invalid_argument("QuantumRegister: qubit was Bell-measured");
    return slot.outcome;
}

std::optional<BellOutcome> QuantumRegister::bell_outcome(int id) const {
    if (id < 0 || id >= size()) throw std::invalid_argument("QuantumRegister: id out of range");
    return slots_[static_cast<std::size_t>(id)].bell;
}

QuantumRegister::Snapshot QuantumRegister::snapshot(std::span<const int> ids) const {
    std::vector<int> group_order;
    for (int id : ids) {
        check_active(id);
        const int gi = slots_[static_cast<std::size_t>(id)].group;
        if (std::find(group_order.begin(), group_order.end(), gi) == group_order.end())
            group_order.push_back(gi);
    }
    if (group_order.empty()) throw std::invalid_argument("snapshot: no qubits given");
    PureState st = groups_[static_cast<std::size_t>(group_order[0])].state;
    std::vector<int> members = groups_[static_cast<std::size_t>(group_order[0])].members;
    for (std::size_t k = 1; k < group_order.size(); ++k) {
        const Group& g = groups_[static_cast<std::size_t>(group_order[k])];
        st = st.tensor(g.state);
        members.insert(members.end(), g.members.begin(), g.members.end());
    }
    // Reorder so `ids` come first, in the requested order.
    std::vector<int> perm;  // positions in `members`
    for (int id : ids)
        perm.push_back(static_cast<int>(std::find(members.begin(), members.end(), id) - members.begin()));
    for (std::size_t p = 0; p < members.size(); ++p)
        if (std::find(ids.begin(), ids.end(), members[p]) == ids.end())
            perm.push_back(static_cast<int>(p));
    const int m = st.qubits();
    Eigen::VectorXcd out(st.dim());
    for (Eigen::Index i = 0; i < st.dim(); ++i) {
        std::uint64_t j = 0;
        for (int b = 0; b < m; ++b) {
            const int src = perm[static_cast<std::size_t>(b)];
            j |= static_cast<std::uint64_t>((i >> (m - 1 - src)) & 1) << (m - 1 - b);
        }
        out(static_cast<Eigen::Index>(j)) = st.amplitudes()(i);
    }
    std::vector<int> ordered_ids;
    ordered_ids.reserve(members.size());
    for (int b = 0; b < m; ++b) ordered_ids.push_back(members[static_cast<std::size_t>(perm[static_cast<std::size_t>(b)])]);
    return Snapshot{PureState(m, std::move(out)), std::move(ordered_ids)};
}

DensityOp QuantumRegister::reduced_density(std::span<const int> ids) const {
    const Snapshot snap = snapshot(ids);
    std::vector<int> keep(ids.size());
    for (std::size_t j = 0; j < ids.size(); ++j) keep[j] = static_cast<int>(j);
    return partial_trace(snap.state, keep);
}

}  // namespace bqs
