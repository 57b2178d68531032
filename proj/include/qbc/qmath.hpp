#ifndef QBC_QMATH_HPP
#define QBC_QMATH_HPP

#include <utility>
#include <vector>

#include "qbc/rng.hpp"
#include "qbc/types.hpp"

namespace qbc {

/// Normalized pure state on a composite space with an explicit
/// subsystem-dimension list. Subsystem 0 is the slowest (leftmost) index.
class StateVector {
 public:
  StateVector(Vec amplitudes, DimList dims);

  static StateVector basis(const DimList& dims, Dim index);

  const Vec& amplitudes() const { return amps_; }
  const DimList& dims() const { return dims_; }
  Dim dim() const { return amps_.size(); }
  int subsystem_count() const { return static_cast<int>(dims_.size()); }

 private:
  Vec amps_;
  DimList dims_;
};

/// Hermitian, positive-semidefinite, unit-trace operator.
class DensityMatrix {
 public:
  explicit DensityMatrix(Mat entries);

  const Mat& matrix() const { return m_; }
  Dim dim() const { return m_.rows(); }

 private:
  Mat m_;
};

/// Square matrix with U†U = 1 within tolerance.
class UnitaryOp {
 public:
  explicit UnitaryOp(Mat entries);

  static UnitaryOp identity(Dim dim);

  const Mat& matrix() const { return m_; }
  Dim dim() const { return m_.rows(); }

 private:
  Mat m_;
};

/// Schmidt data of a bipartite pure state: descending coefficients √λ_i and
/// paired orthonormal bases stored as matrix columns.
struct SchmidtForm {
  RVec coeffs;      // √λ_i, descending, truncated below kSchmidtTruncTol
  Mat basis_a;      // p × r
  Mat basis_b;      // q × r
  DimList dims_a;
  DimList dims_b;

  SchmidtForm(RVec coeffs, Mat basis_a, Mat basis_b, DimList dims_a, DimList dims_b);

  Dim rank() const { return coeffs.size(); }
};

enum class Side { A, B };

// --- operations --------------------------------------------------------------

/// Kronecker product of states; left factor is the slow index.
StateVector tensor(const StateVector& a, const StateVector& b);

/// Trace out the complement of `keep` (strictly increasing subsystem indices).
DensityMatrix partial_trace(const DensityMatrix& rho, const DimList& dims,
                            const std::vector<int>& keep);

/// Reduced state of |psi><psi| on `keep`, computed without forming the
/// full projector.
DensityMatrix reduced_density(const StateVector& psi, const std::vector<int>& keep);

/// Schmidt decomposition across the bipartition [0,cut) | [cut,n), by SVD
/// of the reshaped amplitude matrix.
SchmidtForm schmidt_decompose(const StateVector& phi, int cut);

/// Σ √λ_i |a_i⟩⊗|b_i⟩ as a state.
StateVector reconstruct(const SchmidtForm& form);

/// Uhlmann fidelity Tr √(√ρ0 ρ1 √ρ0) — the amplitude ("square-root")
/// convention, not its square. Equals the maximal overlap between
/// purifications of the two states.
double fidelity(const DensityMatrix& rho0, const DensityMatrix& rho1);

/// Pure state on dims {d, d} whose partial trace over the appended ancilla
/// (subsystem 1) equals rho.
StateVector purify(const DensityMatrix& rho);

/// For two purifications of the same B-side reduced matrix, the A-local
/// unitary with (U ⊗ 1)|psi⟩ = |psi'⟩. Rejects inputs whose B-side reduced
/// matrices differ beyond 1e-8; such pairs need the maximally-parallel
/// alignment machinery instead.
UnitaryOp relating_unitary(const StateVector& psi, const StateVector& psi_prime,
                           int cut);

/// Apply u to the A factor [0,cut) or the B factor [cut,n).
StateVector apply_local(const UnitaryOp& u, const StateVector& psi, int cut,
                        Side side);

/// Reorder subsystems; perm[new_position] = old_subsystem.
StateVector permute_subsystems(const StateVector& psi, const std::vector<int>& perm);

/// Projective measurement of `targets` in the computational basis. Returns
/// the joint outcome (mixed-radix over targets, ascending order) and the
/// collapsed state.
std::pair<Dim, StateVector> measure_computational(const StateVector& psi,
                                                  const std::vector<int>& targets,
                                                  RngStream& rng);

// --- helpers -----------------------------------------------------------------

DensityMatrix projector(const StateVector& psi);

/// Amplitudes reshaped across a cut: M(a, b) = amps[a·q + b] with
/// p = prod dims[0,cut), q = prod dims[cut,n). cut may be 0 or n.
Mat bipartite_matrix(const StateVector& psi, int cut);

cplx overlap(const StateVector& a, const StateVector& b);  // ⟨a|b⟩

/// min over phases of ‖a − e^{iθ} b‖.
double phase_aligned_distance(const StateVector& a, const StateVector& b);

StateVector random_state(const DimList& dims, RngStream& rng);

/// Haar-distributed unitary (QR of a Ginibre matrix with phase fixing).
UnitaryOp random_unitary(Dim dim, RngStream& rng);

DensityMatrix random_density(Dim dim, RngStream& rng);

/// Dense (op ⊗ 1) acting on `targets` within `dims`.
UnitaryOp embed_unitary(const DimList& dims, const std::vector<int>& targets,
                        const UnitaryOp& op);

Mat matrix_sqrt_psd(const Mat& m);

}  // namespace qbc

#endif
