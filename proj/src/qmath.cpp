#include "qbc/qmath.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "qbc/kernels.hpp"

namespace qbc {

namespace {

void check_dims_positive(const DimList& dims) {
  if (dims.empty()) throw std::invalid_argument("dimension list must be non-empty");
  for (Dim d : dims)
    if (d < 1) throw std::invalid_argument("subsystem dimensions must be positive");
}

std::vector<int> range_vec(int lo, int hi) {
  std::vector<int> v(static_cast<std::size_t>(hi - lo));
  std::iota(v.begin(), v.end(), lo);
  return v;
}

}  // namespace

Mat bipartite_matrix(const StateVector& psi, int cut) {
  const auto& dims = psi.dims();
  if (cut < 0 || cut > psi.subsystem_count())
    throw std::invalid_argument("cut out of range");
  Dim p = 1, q = 1;
  for (int s = 0; s < cut; ++s) p *= dims[static_cast<std::size_t>(s)];
  for (int s = cut; s < psi.subsystem_count(); ++s) q *= dims[static_cast<std::size_t>(s)];
  using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  return Eigen::Map<const RowMat>(psi.amplitudes().data(), p, q);
}

// --- types --------------------------------------------------------------------

StateVector::StateVector(Vec amplitudes, DimList dims)
    : amps_(std::move(amplitudes)), dims_(std::move(dims)) {
  check_dims_positive(dims_);
  const Dim total = product_dim(dims_);
  validate_state_dim(total);
  if (total != amps_.size())
    throw std::invalid_argument("product of dims must equal amplitude count");
  if (std::abs(amps_.norm() - 1.0) > kNormTol)
    throw std::invalid_argument("state vector is not normalized");
}

StateVector StateVector::basis(const DimList& dims, Dim index) {
  check_dims_positive(dims);
  const Dim total = product_dim(dims);
  validate_state_dim(total);
  if (index < 0 || index >= total) throw std::invalid_argument("basis index out of range");
  Vec amps = Vec::Zero(total);
  amps[index] = 1.0;
  return StateVector(std::move(amps), dims);
}

DensityMatrix::DensityMatrix(Mat entries) : m_(std::move(entries)) {
  if (m_.rows() != m_.cols()) throw std::invalid_argument("density matrix must be square");
  validate_matrix_dim(m_.rows());
  if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol)
    throw std::invalid_argument("density matrix is not Hermitian");
  if (std::abs(m_.trace().real() - 1.0) > kHermitianTol ||
      std::abs(m_.trace().imag()) > kHermitianTol)
    throw std::invalid_argument("density matrix trace is not 1");
  Eigen::SelfAdjointEigenSolver<Mat> es(m_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kPsdTol)
    throw std::invalid_argument("density matrix has a negative eigenvalue");
}

UnitaryOp::UnitaryOp(Mat entries) : m_(std::move(entries)) {
  if (m_.rows() != m_.cols()) throw std::invalid_argument("unitary must be square");
  validate_matrix_dim(m_.rows());
  const Mat gram = m_.adjoint() * m_;
  if ((gram - Mat::Identity(m_.rows(), m_.cols())).cwiseAbs().maxCoeff() > kUnitaryTol)
    throw std::invalid_argument("matrix is not unitary");
}

UnitaryOp UnitaryOp::identity(Dim dim) { return UnitaryOp(Mat::Identity(dim, dim)); }

SchmidtForm::SchmidtForm(RVec coeffs_in, Mat a, Mat b, DimList da, DimList db)
    : coeffs(std::move(coeffs_in)),
      basis_a(std::move(a)),
      basis_b(std::move(b)),
      dims_a(std::move(da)),
      dims_b(std::move(db)) {
  const Dim r = coeffs.size();
  if (basis_a.cols() != r || basis_b.cols() != r)
    throw std::invalid_argument("basis column count must equal coefficient count");
  if (r > std::min(basis_a.rows(), basis_b.rows()))
    throw std::invalid_argument("Schmidt rank exceeds factor dimension");
  for (Dim i = 1; i < r; ++i)
    if (coeffs[i] > coeffs[i - 1] + 1e-12)
      throw std::invalid_argument("Schmidt coefficients must be descending");
  if (std::abs(coeffs.squaredNorm() - 1.0) > 1e-9)
    throw std::invalid_argument("Schmidt coefficients must satisfy Σλ = 1");
  for (const Mat* basis : {&basis_a, &basis_b}) {
    const Mat gram = basis->adjoint() * (*basis);
    if ((gram - Mat::Identity(r, r)).cwiseAbs().maxCoeff() > kOrthoTol)
      throw std::invalid_argument("Schmidt basis is not orthonormal");
  }
}

// --- operations ---------------------------------------------------------------

StateVector tensor(const StateVector& a, const StateVector& b) {
  validate_state_dim(a.dim() * b.dim());
  DimList dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  return StateVector(kernels::tensor_product(a.amplitudes(), b.amplitudes()),
                     std::move(dims));
}

DensityMatrix partial_trace(const DensityMatrix& rho, const DimList& dims,
                            const std::vector<int>& keep) {
  if (product_dim(dims) != rho.dim())
    throw std::invalid_argument("dims do not match density matrix dimension");
  if (keep.empty()) throw std::invalid_argument("keep set must be non-empty");
  return DensityMatrix(kernels::partial_trace(rho.matrix(), dims, keep));
}

DensityMatrix reduced_density(const StateVector& psi, const std::vector<int>& keep) {
  if (keep.empty()) throw std::invalid_argument("keep set must be non-empty");
  Dim kd = 1;
  for (int s : keep) {
    if (s < 0 || s >= psi.subsystem_count())
      throw std::invalid_argument("subsystem index out of range");
    kd *= psi.dims()[static_cast<std::size_t>(s)];
  }
  validate_matrix_dim(kd);
  return DensityMatrix(kernels::reduced_density(psi.amplitudes(), psi.dims(), keep));
}

SchmidtForm schmidt_decompose(const StateVector& phi, int cut) {
  if (cut <= 0 || cut >= phi.subsystem_count())
    throw std::invalid_argument("cut must split the dimension list in two");
  const Mat m = bipartite_matrix(phi, cut);
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);

  const RVec& sv = svd.singularValues();
  Dim r = 0;
  while (r < sv.size() && sv[r] > kSchmidtTruncTol) ++r;
  if (r == 0) throw std::logic_error("state has no Schmidt coefficients above cutoff");

  RVec coeffs = sv.head(r);
  coeffs /= coeffs.norm();  // re-normalize after truncation
  DimList da(phi.dims().begin(), phi.dims().begin() + cut);
  DimList db(phi.dims().begin() + cut, phi.dims().end());
  return SchmidtForm(std::move(coeffs), svd.matrixU().leftCols(r),
                     svd.matrixV().conjugate().leftCols(r), std::move(da),
                     std::move(db));
}

StateVector reconstruct(const SchmidtForm& form) {
  const Mat m = form.basis_a * form.coeffs.asDiagonal() * form.basis_b.transpose();
  using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  RowMat rm = m;
  Vec amps = Eigen::Map<const Vec>(rm.data(), rm.size());
  DimList dims = form.dims_a;
  dims.insert(dims.end(), form.dims_b.begin(), form.dims_b.end());
  return StateVector(std::move(amps), std::move(dims));
}

Mat matrix_sqrt_psd(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.adjoint()));
  RVec lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
}

double fidelity(const DensityMatrix& rho0, const DensityMatrix& rho1) {
  if (rho0.dim() != rho1.dim())
    throw std::invalid_argument("fidelity requires equal dimensions");
  const Mat s0 = matrix_sqrt_psd(rho0.matrix());
  const Mat inner = s0 * rho1.matrix() * s0;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (inner + inner.adjoint()),
                                        Eigen::EigenvaluesOnly);
  double f = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return std::clamp(f, 0.0, 1.0);
}

StateVector purify(const DensityMatrix& rho) {
  const Dim d = rho.dim();
  validate_state_dim(d * d);
  Eigen::SelfAdjointEigenSolver<Mat> es(rho.matrix());
  const RVec lam = es.eigenvalues().cwiseMax(0.0);
  Vec amps = Vec::Zero(d * d);
  // |Ψ⟩ = Σ_k √λ_k |v_k⟩ ⊗ |k⟩, ancilla appended as subsystem 1.
  for (Dim k = 0; k < d; ++k) {
    const double c = std::sqrt(lam[k]);
    if (c == 0.0) continue;
    for (Dim i = 0; i < d; ++i) amps[i * d + k] += c * es.eigenvectors()(i, k);
  }
  amps /= amps.norm();
  return StateVector(std::move(amps), DimList{d, d});
}

UnitaryOp relating_unitary(const StateVector& psi, const StateVector& psi_prime,
                           int cut) {
  if (psi.dims() != psi_prime.dims())
    throw std::invalid_argument("states must share a dimension list");
  const Mat m = bipartite_matrix(psi, cut);
  const Mat mp = bipartite_matrix(psi_prime, cut);
  validate_matrix_dim(m.rows());

  // Same B-side reduced matrix ⟺ equal Gram matrices of the reshaped states.
  const Mat gram_diff = m.adjoint() * m - mp.adjoint() * mp;
  if (gram_diff.cwiseAbs().maxCoeff() > 1e-8)
    throw std::invalid_argument(
        "B-side reduced matrices differ; the states are not purifications of "
        "the same density matrix");

  // Unitary polar factor of M' M†: U M = M' exactly when the Grams agree.
  const Mat cross = mp * m.adjoint();
  Eigen::JacobiSVD<Mat> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  UnitaryOp u(svd.matrixU() * svd.matrixV().adjoint());

  const StateVector mapped = apply_local(u, psi, cut, Side::A);
  if (phase_aligned_distance(mapped, psi_prime) > 1e-8)
    throw std::logic_error("relating unitary failed verification");
  return u;
}

StateVector apply_local(const UnitaryOp& u, const StateVector& psi, int cut,
                        Side side) {
  if (cut < 0 || cut > psi.subsystem_count())
    throw std::invalid_argument("cut out of range");
  const std::vector<int> targets = side == Side::A
                                       ? range_vec(0, cut)
                                       : range_vec(cut, psi.subsystem_count());
  Dim td = 1;
  for (int s : targets) td *= psi.dims()[static_cast<std::size_t>(s)];
  if (td != u.dim())
    throw std::invalid_argument("unitary dimension does not match the chosen factor");
  return StateVector(
      kernels::apply_on_targets(psi.amplitudes(), psi.dims(), targets, u.matrix()),
      psi.dims());
}

StateVector permute_subsystems(const StateVector& psi, const std::vector<int>& perm) {
  DimList dims(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i)
    dims[i] = psi.dims()[static_cast<std::size_t>(perm[i])];
  return StateVector(kernels::permute(psi.amplitudes(), psi.dims(), perm),
                     std::move(dims));
}

std::pair<Dim, StateVector> measure_computational(const StateVector& psi,
                                                  const std::vector<int>& targets,
                                                  RngStream& rng) {
  const auto tables = kernels::subset_tables(psi.dims(), targets);
  const Vec& amps = psi.amplitudes();

  std::vector<double> prob(static_cast<std::size_t>(tables.chosen_dim), 0.0);
  for (Dim o = 0; o < tables.chosen_dim; ++o) {
    double acc = 0.0;
    for (Dim e = 0; e < tables.env_dim; ++e)
      acc += std::norm(amps[tables.chosen_off[static_cast<std::size_t>(o)] +
                            tables.env_off[static_cast<std::size_t>(e)]]);
    prob[static_cast<std::size_t>(o)] = acc;
  }

  // If rounding leaves the cumulative sum a hair under u, fall back to the
  // last outcome with any weight rather than a zero-probability one.
  const double u = rng.uniform();
  double cum = 0.0;
  Dim outcome = -1;
  for (Dim o = 0; o < tables.chosen_dim; ++o) {
    if (prob[static_cast<std::size_t>(o)] <= 0.0) continue;
    outcome = o;
    cum += prob[static_cast<std::size_t>(o)];
    if (u < cum) break;
  }
  if (outcome < 0) throw std::logic_error("state carries no measurable weight");

  Vec post = Vec::Zero(amps.size());
  for (Dim e = 0; e < tables.env_dim; ++e) {
    const Dim idx = tables.chosen_off[static_cast<std::size_t>(outcome)] +
                    tables.env_off[static_cast<std::size_t>(e)];
    post[idx] = amps[idx];
  }
  const double norm = post.norm();
  if (norm == 0.0) throw std::logic_error("measurement collapsed to the zero vector");
  post /= norm;
  return {outcome, StateVector(std::move(post), psi.dims())};
}

// --- helpers ------------------------------------------------------------------

DensityMatrix projector(const StateVector& psi) {
  validate_matrix_dim(psi.dim());
  return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint());
}

cplx overlap(const StateVector& a, const StateVector& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("overlap requires equal dimensions");
  return a.amplitudes().dot(b.amplitudes());  // Eigen dot conjugates the left side
}

double phase_aligned_distance(const StateVector& a, const StateVector& b) {
  const cplx ov = overlap(b, a);
  cplx phase{1.0, 0.0};
  if (std::abs(ov) > 0.0) phase = ov / std::abs(ov);
  return (a.amplitudes() - phase * b.amplitudes()).norm();
}

StateVector random_state(const DimList& dims, RngStream& rng) {
  check_dims_positive(dims);
  const Dim total = product_dim(dims);
  validate_state_dim(total);
  Vec amps(total);
  for (Dim i = 0; i < total; ++i) amps[i] = cplx{rng.gaussian(), rng.gaussian()};
  amps /= amps.norm();
  return StateVector(std::move(amps), dims);
}

UnitaryOp random_unitary(Dim dim, RngStream& rng) {
  validate_matrix_dim(dim);
  Mat g(dim, dim);
  for (Dim i = 0; i < dim; ++i)
    for (Dim j = 0; j < dim; ++j) g(i, j) = cplx{rng.gaussian(), rng.gaussian()};
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Dim j = 0; j < dim; ++j) {
    const cplx d = r(j, j);
    q.col(j) *= std::abs(d) > 0.0 ? d / std::abs(d) : cplx{1.0, 0.0};
  }
  return UnitaryOp(std::move(q));
}

DensityMatrix random_density(Dim dim, RngStream& rng) {
  validate_matrix_dim(dim);
  Mat g(dim, dim);
  for (Dim i = 0; i < dim; ++i)
    for (Dim j = 0; j < dim; ++j) g(i, j) = cplx{rng.gaussian(), rng.gaussian()};
  Mat rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix(std::move(rho));
}

UnitaryOp embed_unitary(const DimList& dims, const std::vector<int>& targets,
                        const UnitaryOp& op) {
  validate_matrix_dim(product_dim(dims));
  return UnitaryOp(kernels::embed_on_targets(dims, targets, op.matrix()));
}

}  // namespace qbc
