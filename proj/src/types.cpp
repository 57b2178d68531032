#include "qbc/types.hpp"

namespace qbc {

namespace {
constexpr char kHexDigits[] = "0123456789abcdef";

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  throw std::invalid_argument("bad hex digit");
}
}  // namespace

std::string bits_to_hex(const BitString& bits) {
  std::string out = std::to_string(bits.size());
  out += ':';
  int nibble = 0, filled = 0;
  for (std::uint8_t b : bits) {
    nibble = (nibble << 1) | (b & 1);
    if (++filled == 4) {
      out += kHexDigits[nibble];
      nibble = 0;
      filled = 0;
    }
  }
  if (filled > 0) out += kHexDigits[nibble << (4 - filled)];
  return out;
}

BitString bits_from_hex(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("missing bit count");
  const std::size_t nbits = std::stoul(text.substr(0, colon));
  BitString out;
  out.reserve(nbits);
  for (std::size_t i = colon + 1; i < text.size() && out.size() < nbits; ++i) {
    const int v = hex_value(text[i]);
    for (int shift = 3; shift >= 0 && out.size() < nbits; --shift)
      out.push_back(static_cast<std::uint8_t>((v >> shift) & 1));
  }
  if (out.size() != nbits) throw std::invalid_argument("truncated hex payload");
  return out;
}

}  // namespace qbc
