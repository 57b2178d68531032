#ifndef QBC_ENCODE_HPP
#define QBC_ENCODE_HPP

#include <utility>

#include "qbc/qmath.hpp"
#include "qbc/rng.hpp"
#include "qbc/types.hpp"

namespace qbc::encode {

/// Measurement/preparation basis for polarization qubits:
/// rectilinear = {0°, 90°}, diagonal = {45°, 135°}.
enum class Basis { Rectilinear, Diagonal };

inline Basis basis_from_bit(int b) { return b ? Basis::Diagonal : Basis::Rectilinear; }

/// Channel noise level ε, interpreted as the probability that an honest
/// matched-basis measurement misreads the encoded bit.
struct NoiseModel {
  double epsilon = 0.0;

  explicit NoiseModel(double eps);
};

/// Qubit carrying classical bit c in basis b:
/// b=0: c=0 → |0⟩ (0°), c=1 → |1⟩ (90°);
/// b=1: c=0 → |+⟩ (45°), c=1 → |−⟩ (135°).
StateVector encode_bit(int c, int b);

/// Basis eigenstate for outcome `bit`.
StateVector basis_state(Basis basis, int bit);

/// Born-rule measurement of a single qubit. The post state is the basis
/// eigenstate of the sampled outcome.
std::pair<int, StateVector> measure(const StateVector& qubit, Basis basis,
                                    RngStream& rng);
std::pair<int, StateVector> measure(const DensityMatrix& qubit, Basis basis,
                                    RngStream& rng);

/// One sampled trajectory of the calibrated depolarizing channel: a Pauli
/// drawn with weights {1 − 3ε/2, ε/2, ε/2, ε/2}. Averaged over the stream
/// this equals apply_noise_exact; the matched-basis flip probability is ε.
DensityMatrix apply_noise(const DensityMatrix& qubit, const NoiseModel& model,
                          RngStream& rng);
StateVector apply_noise_sampled(const StateVector& qubit, const NoiseModel& model,
                                RngStream& rng);

/// The channel itself: ρ → (1 − 2ε) ρ + 2ε·1/2.
DensityMatrix apply_noise_exact(const DensityMatrix& qubit, const NoiseModel& model);

}  // namespace qbc::encode

#endif
