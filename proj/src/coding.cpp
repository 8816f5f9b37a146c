#include "bqs/coding.hpp"

#include <bit>
#include <stdexcept>

namespace bqs {

namespace {

std::uint32_t block_bits(const BitString& x, int offset, int len) {
    std::uint32_t v = 0;
    for (int i = 0; i < len; ++i)
        v |= static_cast<std::uint32_t>(x[static_cast<std::size_t>(offset + i)]) << i;
    return v;
}

}  // namespace

LinearCode LinearCode::repetition(int r) {
    if (r < 3 || r % 2 == 0) throw std::invalid_argument("repetition: odd length >= 3 required");
    if (r > 15) throw std::invalid_argument("repetition: length above supported table size");
    LinearCode c;
    c.name_ = "rep" + std::to_string(r);
    c.block_len_ = r;
    c.block_dim_ = 1;
    c.t_ = (r - 1) / 2;
    for (int i = 1; i < r; ++i)
        c.h_rows_.push_back(1u | (1u << i));  // x_0 + x_i = 0
    c.build_table();
    return c;
}

LinearCode LinearCode::hamming74() {
    LinearCode c;
    c.name_ = "hamming7";
    c.block_len_ = 7;
    c.block_dim_ = 4;
    c.t_ = 1;
    // Row j of H has bit i set iff bit j of (i+1) is set: the syndrome of a
    // single error at position i is the binary representation of i+1.
    for (int j = 0; j < 3; ++j) {
        std::uint32_t row = 0;
        for (int i = 0; i < 7; ++i)
            if (((i + 1) >> j) & 1) row |= 1u << i;
        c.h_rows_.push_back(row);
    }
    c.build_table();
    return c;
}

LinearCode LinearCode::trivial() {
    LinearCode c;
    c.name_ = "trivial";
    c.block_len_ = 1;
    c.block_dim_ = 1;
    c.t_ = 0;
    c.build_table();
    return c;
}

void LinearCode::build_table() {
    const int s = static_cast<int>(h_rows_.size());
    coset_leader_.assign(std::size_t(1) << s, -1);
    auto syn_of = [&](std::uint32_t e) {
        std::uint32_t v = 0;
        for (int j = 0; j < s; ++j) v |= static_cast<std::uint32_t>(std::popcount(e & h_rows_[static_cast<std::size_t>(j)]) & 1) << j;
        return v;
    };
    // Fill by increasing weight up to t; the minimum distance guarantees
    // uniqueness there. Heavier patterns stay unmapped and signal failure.
    coset_leader_[syn_of(0)] = 0;
    for (int w = 1; w <= t_; ++w) {
        for (std::uint32_t e = 0; e < (1u << block_len_); ++e) {
            if (std::popcount(e) != w) continue;
            const std::uint32_t syn = syn_of(e);
            if (coset_leader_[syn] == -1) coset_leader_[syn] = static_cast<std::int32_t>(e);
        }
    }
}

double LinearCode::radius_fraction() const {
    return static_cast<double>(t_) / static_cast<double>(block_len_);
}

double LinearCode::rate() const {
    return static_cast<double>(block_dim_) / static_cast<double>(block_len_);
}

int LinearCode::syndrome_length(int l) const {
    if (l < 0) throw std::invalid_argument("syndrome_length: negative length");
    const int blocks = l / block_len_;
    const int rem = l % block_len_;
    return blocks * static_cast<int>(h_rows_.size()) + rem * (h_rows_.empty() ? 0 : 1);
}

double LinearCode::syndrome_rate(int l) const {
    return l == 0 ? 0.0 : static_cast<double>(syndrome_length(l)) / static_cast<double>(l);
}

BitString LinearCode::syndrome(const BitString& x) const {
    const int l = static_cast<int>(x.size());
    const int s = static_cast<int>(h_rows_.size());
    BitString out;
    const int blocks = l / block_len_;
    for (int b = 0; b < blocks; ++b) {
        const std::uint32_t blk = block_bits(x, b * block_len_, block_len_);
        for (int j = 0; j < s; ++j)
            out.push_back(std::popcount(blk & h_rows_[static_cast<std::size_t>(j)]) & 1);
    }
    if (s > 0)
        for (int i = blocks * block_len_; i < l; ++i) out.push_back(x[static_cast<std::size_t>(i)]);
    return out;
}

std::optional<BitString> LinearCode::reconcile(const BitString& x_noisy, const BitString& syn) const {
    const int l = static_cast<int>(x_noisy.size());
    if (static_cast<int>(syn.size()) != syndrome_length(l))
        throw std::invalid_argument("reconcile: syndrome length mismatch");
    const int s = static_cast<int>(h_rows_.size());
    BitString out = x_noisy;
    const int blocks = l / block_len_;
    for (int b = 0; b < blocks; ++b) {
        const std::uint32_t blk = block_bits(x_noisy, b * block_len_, block_len_);
        std::uint32_t blk_syn = 0;
        for (int j = 0; j < s; ++j)
            blk_syn |= static_cast<std::uint32_t>(std::popcount(blk & h_rows_[static_cast<std::size_t>(j)]) & 1) << j;
        const std::uint32_t target = block_bits(syn, b * s, s);
        const std::uint32_t diff = blk_syn ^ target;
        const std::int32_t leader = coset_leader_[diff];
        if (leader < 0) return std::nullopt;  // decode failure, signalled
        for (int i = 0; i < block_len_; ++i)
            if ((static_cast<std::uint32_t>(leader) >> i) & 1) {
                const auto pos = static_cast<std::size_t>(b * block_len_ + i);
                out.set(pos, 1 - out[pos]);
            }
    }
    if (s > 0) {
        // Remainder positions travel verbatim in the syndrome.
        int syn_pos = blocks * s;
        for (int i = blocks * block_len_; i < l; ++i)
            out.set(static_cast<std::size_t>(i), syn[static_cast<std::size_t>(syn_pos++)]);
    }
    return out;
}

BitString bsc(const BitString& x, double phi, Rng& rng) {
    if (phi < 0.0 || phi >= 0.5) throw std::invalid_argument("bsc: phi must be in [0, 1/2)");
    BitString out = x;
    for (std::size_t i = 0; i < out.size(); ++i)
        if (rng.bernoulli(phi)) out.set(i, 1 - out[i]);
    return out;
}

LinearCode select_code(int l_target, double phi, double eps) {
    if (phi < 0.0 || phi >= 0.5) throw std::invalid_argument("select_code: phi must be in [0, 1/2)");
    if (eps < 0.0) throw std::invalid_argument("select_code: eps must be >= 0");
    if (l_target < 1) throw std::invalid_argument("select_code: target length must be >= 1");
    if (phi == 0.0) return LinearCode::trivial();
    const double need = phi + eps;
    LinearCode best = LinearCode::trivial();
    bool found = false;
    for (const auto& c : {LinearCode::hamming74(), LinearCode::repetition(3),
                          LinearCode::repetition(5), LinearCode::repetition(7)}) {
        if (c.radius_fraction() < need) continue;
        if (!found || c.rate() > best.rate()) {
            best = c;
            found = true;
        }
    }
    if (!found)
        throw std::runtime_error("select_code: no supported base code covers phi + eps = " +
                                 std::to_string(need));
    return best;
}

LinearCode code_by_name(const std::string& name) {
    if (name == "trivial") return LinearCode::trivial();
    if (name == "hamming7") return LinearCode::hamming74();
    if (name == "rep3") return LinearCode::repetition(3);
    if (name == "rep5") return LinearCode::repetition(5);
    if (name == "rep7") return LinearCode::repetition(7);
    throw std::runtime_error("unknown code: " + name);
}

}  // namespace bqs
