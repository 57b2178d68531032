#ifndef QBC_CODES_HPP
#define QBC_CODES_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qbc/rng.hpp"
#include "qbc/types.hpp"

namespace qbc::codes {

// Binary linear (n,k,d) codes at exhaustive-verification scale: rows fit a
// 32-bit mask and the 2^k codewords are enumerated directly.
inline constexpr int kMaxLength = 32;
inline constexpr int kMaxDimension = 20;

/// Generator-matrix form of a binary linear code. Row i of G is the mask
/// rows[i]; bit j of a word is (mask >> (n-1-j)) & 1, matching BitString
/// order.
struct LinearCode {
  int n = 0;
  int k = 0;
  std::vector<std::uint32_t> rows;
  std::optional<int> d;  // verified minimum distance, set when known
};

/// Rank of G over GF(2).
int rank_gf2(const LinearCode& code);

/// Minimum Hamming weight over all 2^k − 1 nonzero codewords.
int min_distance(const LinearCode& code);

/// Rejection-sample a random code with rank k and verified distance ≥ min_d.
/// Throws if no code is found within max_attempts draws.
LinearCode generate_code(int n, int k, int min_d, RngStream& rng,
                         int max_attempts = 100000);

/// c = m·G over GF(2).
BitString encode_message(const LinearCode& code, const BitString& m);

/// Membership in the row space of G.
bool is_codeword(const LinearCode& code, const BitString& c);

/// Parity of the bitwise AND of two equal-length strings.
int dot_parity(const BitString& c, const BitString& r);

/// s_i = dot_parity(row i of G, r): the message-space functional whose value
/// at m is the parity of m·G against r.
BitString parity_vector(const LinearCode& code, const BitString& r);

/// Uniformly random codeword c with dot_parity(c, r) = target. Throws when
/// no codeword attains the parity (r orthogonal to the code, target = 1).
BitString sample_codeword_with_parity(const LinearCode& code, const BitString& r,
                                      int target, RngStream& rng);

/// Text form: header "n k", then k rows of 0/1 characters.
std::string to_text(const LinearCode& code);
LinearCode from_text(const std::string& text);

// Mask helpers shared with the protocol engines.
std::uint32_t mask_from_bits(const BitString& bits);
BitString bits_from_mask(std::uint32_t mask, int nbits);

}  // namespace qbc::codes

#endif
