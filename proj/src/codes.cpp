#include "qbc/codes.hpp"

#include <bit>
#include <sstream>
#include <stdexcept>

namespace qbc::codes {

namespace {

void check_params(int n, int k) {
  if (n < 1 || n > kMaxLength)
    throw std::invalid_argument("code length must lie in [1, " +
                                std::to_string(kMaxLength) + "]");
  if (k < 1 || k > n || k > kMaxDimension)
    throw std::invalid_argument("code dimension must lie in [1, min(n, " +
                                std::to_string(kMaxDimension) + ")]");
}

// Row-echelon rows with pivot positions, for rank and membership tests.
std::vector<std::uint32_t> echelon(std::vector<std::uint32_t> rows) {
  std::vector<std::uint32_t> basis;
  for (std::uint32_t row : rows) {
    for (std::uint32_t b : basis) {
      const std::uint32_t lead = std::uint32_t{1} << (31 - std::countl_zero(b));
      if (row & lead) row ^= b;
    }
    if (row) basis.push_back(row);
  }
  return basis;
}

}  // namespace

std::uint32_t mask_from_bits(const BitString& bits) {
  std::uint32_t m = 0;
  for (std::uint8_t b : bits) m = (m << 1) | (b & 1u);
  return m;
}

BitString bits_from_mask(std::uint32_t mask, int nbits) {
  BitString out(static_cast<std::size_t>(nbits));
  for (int i = 0; i < nbits; ++i)
    out[static_cast<std::size_t>(i)] =
        static_cast<std::uint8_t>((mask >> (nbits - 1 - i)) & 1u);
  return out;
}

int rank_gf2(const LinearCode& code) {
  return static_cast<int>(echelon(code.rows).size());
}

int min_distance(const LinearCode& code) {
  check_params(code.n, code.k);
  // Gray-code walk over all nonzero messages, one row XOR per step.
  std::uint32_t word = 0;
  std::uint32_t gray = 0;
  int best = code.n + 1;
  const std::uint32_t total = std::uint32_t{1} << code.k;
  for (std::uint32_t m = 1; m < total; ++m) {
    const std::uint32_t next_gray = m ^ (m >> 1);
    const int flipped = std::countr_zero(gray ^ next_gray);
    gray = next_gray;
    word ^= code.rows[static_cast<std::size_t>(flipped)];
    const int w = std::popcount(word);
    if (w < best) best = w;
  }
  return best;
}

LinearCode generate_code(int n, int k, int min_d, RngStream& rng, int max_attempts) {
  check_params(n, k);
  if (min_d < 1) throw std::invalid_argument("minimum distance bound must be ≥ 1");
  const std::uint32_t row_mask =
      n == 32 ? ~std::uint32_t{0} : (std::uint32_t{1} << n) - 1;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    LinearCode code;
    code.n = n;
    code.k = k;
    code.rows.resize(static_cast<std::size_t>(k));
    for (auto& row : code.rows)
      row = static_cast<std::uint32_t>(rng.u64()) & row_mask;
    if (rank_gf2(code) != k) continue;
    const int d = min_distance(code);
    if (d < min_d) continue;
    code.d = d;
    return code;
  }
  throw std::runtime_error("no (" + std::to_string(n) + "," + std::to_string(k) +
                           ",d≥" + std::to_string(min_d) + ") code found in " +
                           std::to_string(max_attempts) + " attempts");
}

BitString encode_message(const LinearCode& code, const BitString& m) {
  if (static_cast<int>(m.size()) != code.k)
    throw std::invalid_argument("message length must equal code dimension");
  std::uint32_t word = 0;
  for (int i = 0; i < code.k; ++i)
    if (m[static_cast<std::size_t>(i)]) word ^= code.rows[static_cast<std::size_t>(i)];
  return bits_from_mask(word, code.n);
}

bool is_codeword(const LinearCode& code, const BitString& c) {
  if (static_cast<int>(c.size()) != code.n)
    throw std::invalid_argument("word length must equal code length");
  std::uint32_t word = mask_from_bits(c);
  for (std::uint32_t b : echelon(code.rows)) {
    const std::uint32_t lead = std::uint32_t{1} << (31 - std::countl_zero(b));
    if (word & lead) word ^= b;
  }
  return word == 0;
}

int dot_parity(const BitString& c, const BitString& r) {
  if (c.size() != r.size())
    throw std::invalid_argument("dot_parity requires equal lengths");
  int acc = 0;
  for (std::size_t i = 0; i < c.size(); ++i) acc ^= (c[i] & r[i] & 1u);
  return acc;
}

BitString parity_vector(const LinearCode& code, const BitString& r) {
  if (static_cast<int>(r.size()) != code.n)
    throw std::invalid_argument("r length must equal code length");
  BitString s(static_cast<std::size_t>(code.k));
  for (int i = 0; i < code.k; ++i)
    s[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(
        dot_parity(bits_from_mask(code.rows[static_cast<std::size_t>(i)], code.n), r));
  return s;
}

BitString sample_codeword_with_parity(const LinearCode& code, const BitString& r,
                                      int target, RngStream& rng) {
  if (mask_from_bits(r) == 0) throw std::invalid_argument("r must be non-zero");
  const BitString s = parity_vector(code, r);
  int pivot = -1;
  for (int i = 0; i < code.k; ++i)
    if (s[static_cast<std::size_t>(i)]) {
      pivot = i;
      break;
    }
  if (pivot < 0) {
    if (target != 0)
      throw std::runtime_error(
          "r is orthogonal to the code: no codeword has odd parity against it");
    BitString m(static_cast<std::size_t>(code.k));
    for (auto& b : m) b = static_cast<std::uint8_t>(rng.bit());
    return encode_message(code, m);
  }
  // Free bits everywhere except the pivot, which absorbs the parity target.
  BitString m(static_cast<std::size_t>(code.k));
  int acc = 0;
  for (int i = 0; i < code.k; ++i) {
    if (i == pivot) continue;
    m[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(rng.bit());
    acc ^= m[static_cast<std::size_t>(i)] & s[static_cast<std::size_t>(i)];
  }
  m[static_cast<std::size_t>(pivot)] = static_cast<std::uint8_t>(acc ^ target);
  return encode_message(code, m);
}

std::string to_text(const LinearCode& code) {
  std::ostringstream out;
  out << code.n << ' ' << code.k << '\n';
  for (std::uint32_t row : code.rows) {
    for (int j = 0; j < code.n; ++j) out << ((row >> (code.n - 1 - j)) & 1u);
    out << '\n';
  }
  return out.str();
}

LinearCode from_text(const std::string& text) {
  std::istringstream in(text);
  LinearCode code;
  if (!(in >> code.n >> code.k)) throw std::invalid_argument("bad code header");
  check_params(code.n, code.k);
  code.rows.resize(static_cast<std::size_t>(code.k));
  for (auto& row : code.rows) {
    std::string line;
    if (!(in >> line) || static_cast<int>(line.size()) != code.n)
      throw std::invalid_argument("bad code row");
    row = 0;
    for (char ch : line) {
      if (ch != '0' && ch != '1') throw std::invalid_argument("bad code row");
      row = (row << 1) | static_cast<std::uint32_t>(ch - '0');
    }
  }
  return code;
}

}  // namespace qbc::codes
