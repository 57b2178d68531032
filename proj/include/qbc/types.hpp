#ifndef QBC_TYPES_HPP
#define QBC_TYPES_HPP

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qbc {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using Dim = Eigen::Index;
using DimList = std::vector<Dim>;

/// A classical bit string, one byte per bit, values 0 or 1.
using BitString = std::vector<std::uint8_t>;

// Size ceilings for dense objects. Matrices (density operators, unitaries)
// are capped much lower than state vectors: an n-subsystem pure state is
// linear in the total dimension while its operators are quadratic.
inline constexpr Dim kMaxStateDim = Dim{1} << 26;
inline constexpr Dim kMaxMatrixDim = 4096;

// Shared numerical tolerances.
inline constexpr double kNormTol = 1e-10;
inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kOrthoTol = 1e-9;
inline constexpr double kUnitaryTol = 1e-9;
inline constexpr double kSchmidtTruncTol = 1e-12;

/// Thrown when an input exceeds a hard size cap. The CLI maps this to its
/// own exit code, distinct from configuration errors.
class CapViolation : public std::runtime_error {
 public:
  explicit CapViolation(const std::string& what) : std::runtime_error(what) {}
};

inline Dim product_dim(const DimList& dims) {
  Dim p = 1;
  for (Dim d : dims) p *= d;
  return p;
}

inline void validate_state_dim(Dim dim) {
  if (dim > kMaxStateDim)
    throw CapViolation("state dimension " + std::to_string(dim) +
                       " exceeds cap " + std::to_string(kMaxStateDim));
}

inline void validate_matrix_dim(Dim dim) {
  if (dim > kMaxMatrixDim)
    throw CapViolation("matrix dimension " + std::to_string(dim) +
                       " exceeds cap " + std::to_string(kMaxMatrixDim));
}

// Bit-string helpers. Bit 0 of a BitString is the most significant digit of
// the equivalent integer, so bits_from_index(6, 3) == {1,1,0}.

inline BitString bits_from_index(std::uint64_t value, int nbits) {
  BitString out(static_cast<std::size_t>(nbits));
  for (int i = 0; i < nbits; ++i)
    out[static_cast<std::size_t>(i)] =
        static_cast<std::uint8_t>((value >> (nbits - 1 - i)) & 1u);
  return out;
}

inline std::uint64_t index_from_bits(const BitString& bits) {
  std::uint64_t v = 0;
  for (std::uint8_t b : bits) v = (v << 1) | (b & 1u);
  return v;
}

/// Hex rendering used by transcript logs: "<nbits>:<hex>", bit 0 first.
std::string bits_to_hex(const BitString& bits);
BitString bits_from_hex(const std::string& text);

}  // namespace qbc

#endif
