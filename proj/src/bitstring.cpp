#include "bqs/bitstring.hpp"

#include <stdexcept>

namespace bqs {

BitString BitString::from_bits(std::initializer_list<int> bits) {
    BitString s;
    s.bits_.reserve(bits.size());
    for (int b : bits) s.push_back(b);
    return s;
}

BitString BitString::from_string(std::string_view s) {
    BitString out;
    out.bits_.reserve(s.size());
    for (char c : s) {
        if (c != '0' && c != '1') throw std::invalid_argument("BitString: expected '0'/'1'");
        out.bits_.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    return out;
}

BitString BitString::from_value(std::uint64_t v, std::size_t n) {
    if (n > 64) throw std::invalid_argument("BitString::from_value: n > 64");
    BitString out(n);
    for (std::size_t i = 0; i < n; ++i)
        out.bits_[i] = static_cast<std::uint8_t>((v >> (n - 1 - i)) & 1ULL);
    return out;
}

BitString BitString::random(std::size_t n, Rng& rng) {
    BitString out(n);
    for (std::size_t i = 0; i < n; ++i) out.bits_[i] = static_cast<std::uint8_t>(rng.bit());
    return out;
}

void BitString::set(std::size_t i, int v) {
    if (v != 0 && v != 1) throw std::invalid_argument("BitString::set: bit must be 0 or 1");
    bits_[i] = static_cast<std::uint8_t>(v);
}

void BitString::push_back(int v) {
    if (v != 0 && v != 1) throw std::invalid_argument("BitString::push_back: bit must be 0 or 1");
    bits_.push_back(static_cast<std::uint8_t>(v));
}

BitString BitString::restricted(std::span<const int> indices) const {
    BitString out;
    out.bits_.reserve(indices.size());
    for (int i : indices) {
        if (i < 0 || static_cast<std::size_t>(i) >= size())
            throw std::invalid_argument("BitString::restricted: index out of range");
        out.bits_.push_back(bits_[static_cast<std::size_t>(i)]);
    }
    return out;
}

BitString BitString::operator^(const BitString& other) const {
    if (size() != other.size()) throw std::invalid_argument("BitString: length mismatch in xor");
    BitString out(size());
    for (std::size_t i = 0; i < size(); ++i) out.bits_[i] = bits_[i] ^ other.bits_[i];
    return out;
}

std::size_t BitString::hamming_weight() const {
    std::size_t w = 0;
    for (auto b : bits_) w += b;
    return w;
}

std::size_t BitString::hamming_distance(const BitString& other) const {
    if (size() != other.size()) throw std::invalid_argument("BitString: length mismatch in distance");
    std::size_t d = 0;
    for (std::size_t i = 0; i < size(); ++i) d += (bits_[i] != other.bits_[i]);
    return d;
}

int BitString::dot(const BitString& other) const {
    if (size() != other.size()) throw std::invalid_argument("BitString: length mismatch in dot");
    int acc = 0;
    for (std::size_t i = 0; i < size(); ++i) acc ^= (bits_[i] & other.bits_[i]);
    return acc;
}

std::uint64_t BitString::to_value() const {
    if (size() > 64) throw std::invalid_argument("BitString::to_value: too long");
    std::uint64_t v = 0;
    for (auto b : bits_) v = (v << 1) | b;
    return v;
}

std::string BitString::to_string() const {
    std::string s;
    s.reserve(size());
    for (auto b : bits_) s.push_back(static_cast<char>('0' + b));
    return s;
}

std::string BitString::to_hex() const {
    static const char* digits = "0123456789abcdef";
    std::string s;
    const std::size_t n = size();
    if (n == 0) return s;
    const std::size_t ndigits = (n + 3) / 4;
    s.reserve(ndigits);
    // Pad on the left so the last nibble ends at the last bit.
    std::size_t pos = 0;
    std::size_t first = n % 4 == 0 ? 4 : n % 4;
    for (std::size_t d = 0; d < ndigits; ++d) {
        std::size_t take = d == 0 ? first : 4;
        int v = 0;
        for (std::size_t j = 0; j < take; ++j) v = (v << 1) | bits_[pos++];
        s.push_back(digits[v]);
    }
    return s;
}

BasisString BasisString::from_string(std::string_view s) {
    BasisString out;
    for (char c : s) {
        if (c == '+')
            out.push_back(Basis::Plus);
        else if (c == 'x' || c == 'X')
            out.push_back(Basis::Times);
        else
            throw std::invalid_argument("BasisString: expected '+' or 'x'");
    }
    return out;
}

BasisString BasisString::from_bits(const BitString& bits) {
    BasisString out;
    for (std::size_t i = 0; i < bits.size(); ++i) out.push_back(basis_from_bit(bits[i]));
    return out;
}

BasisString BasisString::random(std::size_t n, Rng& rng) {
    BasisString out(n);
    for (std::size_t i = 0; i < n; ++i) out.set(i, basis_from_bit(rng.bit()));
    return out;
}

BasisString BasisString::restricted(std::span<const int> indices) const {
    BasisString out;
    for (int i : indices) {
        if (i < 0 || static_cast<std::size_t>(i) >= size())
            throw std::invalid_argument("BasisString::restricted: index out of range");
        out.push_back(bases_[static_cast<std::size_t>(i)]);
    }
    return out;
}

std::string BasisString::to_string() const {
    std::string s;
    s.reserve(size());
    for (auto b : bases_) s.push_back(basis_char(b));
    return s;
}

}  // namespace bqs
