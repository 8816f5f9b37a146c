#pragma once

// Classical bit strings x in {0,1}^n and conjugate-basis strings over {+, x}.

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bqs/rng.hpp"

namespace bqs {

class BitString {
public:
    BitString() = default;
    explicit BitString(std::size_t n) : bits_(n, 0) {}

    static BitString zeros(std::size_t n) { return BitString(n); }
    static BitString from_bits(std::initializer_list<int> bits);
    static BitString from_string(std::string_view s);  // e.g. "0101"
    // Big-endian packing: bit 0 of the string is the most significant bit of v.
    static BitString from_value(std::uint64_t v, std::size_t n);
    static BitString random(std::size_t n, Rng& rng);

    std::size_t size() const { return bits_.size(); }
    bool empty() const { return bits_.empty(); }
    int operator[](std::size_t i) const { return bits_[i]; }
    void set(std::size_t i, int v);
    void push_back(int v);

    // x|_I : restriction to an ordered index list.
    BitString restricted(std::span<const int> indices) const;

    BitString operator^(const BitString& other) const;
    bool operator==(const BitString& other) const = default;

    std::size_t hamming_weight() const;
    std::size_t hamming_distance(const BitString& other) const;

    // GF(2) inner product  x . y  (parity of the bitwise AND).
    int dot(const BitString& other) const;

    std::uint64_t to_value() const;  // requires size() <= 64
    std::string to_string() const;
    std::string to_hex() const;  // big-endian nibbles, ceil(n/4) digits

private:
    std::vector<std::uint8_t> bits_;
};

enum class Basis : std::uint8_t { Plus = 0, Times = 1 };

// {+, x}_[b] : basis selected by a bit, 0 -> +, 1 -> x.
inline Basis basis_from_bit(int b) { return b ? Basis::Times : Basis::Plus; }
inline int basis_to_bit(Basis b) { return b == Basis::Times ? 1 : 0; }
inline char basis_char(Basis b) { return b == Basis::Times ? 'x' : '+'; }

class BasisString {
public:
    BasisString() = default;
    explicit BasisString(std::size_t n, Basis fill = Basis::Plus) : bases_(n, fill) {}

    static BasisString all(Basis b, std::size_t n) { return BasisString(n, b); }
    static BasisString from_string(std::string_view s);  // e.g. "+x+"
    static BasisString from_bits(const BitString& bits);
    static BasisString random(std::size_t n, Rng& rng);

    std::size_t size() const { return bases_.size(); }
    Basis operator[](std::size_t i) const { return bases_[i]; }
    void set(std::size_t i, Basis b) { bases_[i] = b; }
    void push_back(Basis b) { bases_.push_back(b); }

    BasisString restricted(std::span<const int> indices) const;

    bool operator==(const BasisString& other) const = default;
    std::string to_string() const;

private:
    std::vector<Basis> bases_;
};

}  // namespace bqs
