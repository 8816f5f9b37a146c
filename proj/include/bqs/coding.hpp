#pragma once

// Linear error-correcting codes for information reconciliation: syndrome
// computation and bounded-distance decoding over concatenated desk-scale base
// blocks (repetition-r, Hamming(7,4)), plus the binary symmetric channel.
//
// A message of arbitrary length is split into full base blocks; leftover
// positions are carried verbatim in the syndrome (their reconciliation is
// exact, at full rate cost, and the achieved syndrome rate is reported rather
// than hidden).

#include <optional>
#include <string>
#include <vector>

#include "bqs/bitstring.hpp"
#include "bqs/rng.hpp"

namespace bqs {

class LinearCode {
public:
    static LinearCode repetition(int r);  // odd r >= 3, corrects (r-1)/2
    static LinearCode hamming74();        // corrects 1 per block of 7
    static LinearCode trivial();          // no syndrome, no correction (phi = 0)

    const std::string& name() const { return name_; }
    int block_length() const { return block_len_; }
    int block_dim() const { return block_dim_; }
    int correction_radius() const { return t_; }
    double radius_fraction() const;  // t / block_length
    double rate() const;             // block_dim / block_length

    int syndrome_length(int l) const;
    double syndrome_rate(int l) const;  // s / l

    // H x per block, blocks concatenated, remainder verbatim.
    BitString syndrome(const BitString& x) const;

    // The unique x with syndrome(x) = syn within distance t per block of
    // x_noisy, or nullopt on decode failure.
    std::optional<BitString> reconcile(const BitString& x_noisy, const BitString& syn) const;

private:
    LinearCode() = default;
    void build_table();

    std::string name_;
    int block_len_ = 1;
    int block_dim_ = 1;
    int t_ = 0;
    std::vector<std::uint32_t> h_rows_;        // parity-check rows as bit masks (bit 0 = position 0)
    std::vector<std::int32_t> coset_leader_;   // syndrome -> error mask, -1 if beyond radius
};

// Flip each bit independently with probability phi (0 <= phi < 1/2).
BitString bsc(const BitString& x, double phi, Rng& rng);

// Picks the highest-rate base code whose per-block correction radius covers
// phi + eps; throws std::runtime_error when no supported code is adequate.
LinearCode select_code(int l_target, double phi, double eps);

LinearCode code_by_name(const std::string& name);  // "trivial", "hamming7", "rep3", "rep5", "rep7"

}  // namespace bqs
