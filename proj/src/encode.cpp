#include "qbc/encode.hpp"

#include <cmath>
#include <stdexcept>

namespace qbc::encode {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

Vec qubit_amps(cplx a0, cplx a1) {
  Vec v(2);
  v[0] = a0;
  v[1] = a1;
  return v;
}

Mat pauli(int which) {
  Mat m = Mat::Zero(2, 2);
  switch (which) {
    case 1:  // X
      m(0, 1) = 1.0;
      m(1, 0) = 1.0;
      break;
    case 2:  // Y
      m(0, 1) = cplx{0.0, -1.0};
      m(1, 0) = cplx{0.0, 1.0};
      break;
    case 3:  // Z
      m(0, 0) = 1.0;
      m(1, 1) = -1.0;
      break;
    default:
      m = Mat::Identity(2, 2);
  }
  return m;
}

void check_qubit(Dim dim) {
  if (dim != 2) throw std::invalid_argument("expected a single-qubit input");
}

}  // namespace

NoiseModel::NoiseModel(double eps) : epsilon(eps) {
  if (!(eps >= 0.0 && eps < 0.5))
    throw std::invalid_argument("noise level must lie in [0, 0.5)");
}

StateVector basis_state(Basis basis, int bit) {
  if (basis == Basis::Rectilinear)
    return StateVector(qubit_amps(bit ? 0.0 : 1.0, bit ? 1.0 : 0.0), {2});
  return StateVector(qubit_amps(kInvSqrt2, bit ? -kInvSqrt2 : kInvSqrt2), {2});
}

StateVector encode_bit(int c, int b) {
  if ((c & ~1) || (b & ~1)) throw std::invalid_argument("bits must be 0 or 1");
  return basis_state(basis_from_bit(b), c);
}

std::pair<int, StateVector> measure(const StateVector& qubit, Basis basis,
                                    RngStream& rng) {
  check_qubit(qubit.dim());
  const StateVector e0 = basis_state(basis, 0);
  const double p0 = std::norm(overlap(e0, qubit));
  const int outcome = rng.uniform() < p0 ? 0 : 1;
  return {outcome, basis_state(basis, outcome)};
}

std::pair<int, StateVector> measure(const DensityMatrix& qubit, Basis basis,
                                    RngStream& rng) {
  check_qubit(qubit.dim());
  const StateVector e0 = basis_state(basis, 0);
  const double p0 =
      (e0.amplitudes().adjoint() * qubit.matrix() * e0.amplitudes())(0).real();
  const int outcome = rng.uniform() < p0 ? 0 : 1;
  return {outcome, basis_state(basis, outcome)};
}

DensityMatrix apply_noise(const DensityMatrix& qubit, const NoiseModel& model,
                          RngStream& rng) {
  check_qubit(qubit.dim());
  const double p = 2.0 * model.epsilon;  // depolarizing strength for flip rate ε
  const double u = rng.uniform();
  int which = 0;
  if (u >= 1.0 - 0.75 * p) {
    const double slice = (u - (1.0 - 0.75 * p)) / (p / 4.0);
    which = 1 + std::min(2, static_cast<int>(slice));
  }
  if (which == 0) return qubit;
  const Mat k = pauli(which);
  return DensityMatrix(k * qubit.matrix() * k.adjoint());
}

StateVector apply_noise_sampled(const StateVector& qubit, const NoiseModel& model,
                                RngStream& rng) {
  check_qubit(qubit.dim());
  const double p = 2.0 * model.epsilon;
  const double u = rng.uniform();
  int which = 0;
  if (u >= 1.0 - 0.75 * p) {
    const double slice = (u - (1.0 - 0.75 * p)) / (p / 4.0);
    which = 1 + std::min(2, static_cast<int>(slice));
  }
  if (which == 0) return qubit;
  Vec amps = pauli(which) * qubit.amplitudes();
  return StateVector(std::move(amps), qubit.dims());
}

DensityMatrix apply_noise_exact(const DensityMatrix& qubit, const NoiseModel& model) {
  check_qubit(qubit.dim());
  const double p = 2.0 * model.epsilon;
  Mat out = (1.0 - p) * qubit.matrix() + (p / 2.0) * Mat::Identity(2, 2);
  return DensityMatrix(std::move(out));
}

}  // namespace qbc::encode
