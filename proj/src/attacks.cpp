#include "qbc/attacks.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "qbc/kernels.hpp"

namespace qbc::attacks {

namespace {

std::vector<int> range_vec(int lo, int hi) {
  std::vector<int> v(static_cast<std::size_t>(hi - lo));
  std::iota(v.begin(), v.end(), lo);
  return v;
}

// Extend p×r orthonormal columns to a p×p unitary; the given columns are
// kept verbatim.
Mat complete_unitary(const Mat& cols) {
  const Dim p = cols.rows(), r = cols.cols();
  if (r == p) return cols;
  Mat u(p, p);
  u.leftCols(r) = cols;
  Dim filled = r;
  for (Dim cand = 0; cand < p && filled < p; ++cand) {
    Vec v = Vec::Zero(p);
    v[cand] = 1.0;
    for (int pass = 0; pass < 2; ++pass)  // twice for numerical orthogonality
      for (Dim j = 0; j < filled; ++j) v -= u.col(j).dot(v) * u.col(j);
    const double norm = v.norm();
    if (norm > 1e-6) {
      u.col(filled) = v / norm;
      ++filled;
    }
  }
  if (filled < p) throw std::logic_error("unitary completion failed");
  return u;
}

double reduced_matrix_deviation(const StateVector& final0, const StateVector& final1,
                                int cut) {
  const Mat m0 = bipartite_matrix(final0, cut);
  const Mat m1 = bipartite_matrix(final1, cut);
  // Equal Gram matrices ⟺ equal B-side reduced matrices.
  return (m0.adjoint() * m0 - m1.adjoint() * m1).cwiseAbs().maxCoeff();
}

double fidelity_of_bob_views(const StateVector& final0, const StateVector& final1,
                             int cut) {
  const int n = final0.subsystem_count();
  if (cut >= n) return 1.0;  // Bob holds nothing
  const auto keep = range_vec(cut, n);
  return fidelity(reduced_density(final0, keep), reduced_density(final1, keep));
}

}  // namespace

std::string AttackReport::to_kv() const {
  std::ostringstream out;
  out << std::setprecision(12);
  out << "fidelity=" << fidelity << '\n'
      << "delta=" << delta << '\n'
      << "achieved_overlap=" << achieved_overlap << '\n'
      << "acceptance_probability=" << acceptance_probability << '\n'
      << "detection_probability=" << detection_probability << '\n'
      << "u_dim=" << u_dim << '\n';
  return out.str();
}

UnitaryOp ideal_cheat_unitary(const StateVector& final0, const StateVector& final1,
                              int cut) {
  if (final0.dims() != final1.dims())
    throw std::invalid_argument("final states must share a dimension list");
  if (reduced_matrix_deviation(final0, final1, cut) > 1e-8)
    throw std::invalid_argument(
        "Bob's reduced matrices differ: not the ideal case; use "
        "optimal_cheat_unitary");

  const Mat m0 = bipartite_matrix(final0, cut);
  const Mat m1 = bipartite_matrix(final1, cut);
  const Dim p = m0.rows();
  validate_matrix_dim(p);

  if (p == 1) {
    // Alice holds nothing; equal reduced matrices mean the finals already
    // agree up to a phase, which is all U can supply.
    cplx ov = final0.amplitudes().dot(final1.amplitudes());
    if (std::abs(ov) > 0.0) ov /= std::abs(ov); else ov = 1.0;
    Mat u(1, 1);
    u(0, 0) = ov;
    return UnitaryOp(std::move(u));
  }

  Eigen::JacobiSVD<Mat> svd0(m0, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::JacobiSVD<Mat> svd1(m1, Eigen::ComputeThinU | Eigen::ComputeThinV);

  Dim r0 = 0, r1 = 0;
  while (r0 < svd0.singularValues().size() &&
         svd0.singularValues()[r0] > kSchmidtTruncTol)
    ++r0;
  while (r1 < svd1.singularValues().size() &&
         svd1.singularValues()[r1] > kSchmidtTruncTol)
    ++r1;
  if (r0 != r1)
    throw std::invalid_argument("Schmidt spectra of the finals do not match");
  const Dim r = r0;

  // B-side Schmidt vectors are the conjugated right singular vectors.
  const Mat basis_a0 = svd0.matrixU().leftCols(r);
  const Mat basis_a1 = svd1.matrixU().leftCols(r);
  const Mat basis_b0 = svd0.matrixV().conjugate().leftCols(r);
  const Mat basis_b1 = svd1.matrixV().conjugate().leftCols(r);

  // Pair the two Schmidt bases eigenvalue block by eigenvalue block: within
  // a block the overlap matrix W of the shared B eigenbasis is unitary, and
  // the A-side images are |ã_i⟩ = Σ_j W_ij |e'_j⟩.
  Mat images(p, r);
  Dim lo = 0;
  while (lo < r) {
    Dim hi = lo + 1;
    const double lam_lo = svd0.singularValues()[lo] * svd0.singularValues()[lo];
    while (hi < r) {
      const double lam_hi = svd0.singularValues()[hi] * svd0.singularValues()[hi];
      if (lam_lo - lam_hi > 1e-8) break;
      ++hi;
    }
    const Dim g = hi - lo;
    const Mat w = basis_b0.middleCols(lo, g).adjoint() * basis_b1.middleCols(lo, g);
    if ((w.adjoint() * w - Mat::Identity(g, g)).cwiseAbs().maxCoeff() > 1e-6)
      throw std::invalid_argument(
          "shared B eigenbasis blocks do not span the same subspace");
    images.middleCols(lo, g) = basis_a1.middleCols(lo, g) * w.transpose();
    lo = hi;
  }

  const Mat u = complete_unitary(images) * complete_unitary(basis_a0).adjoint();
  UnitaryOp result(u);

  const StateVector mapped = apply_local(result, final0, cut, Side::A);
  if (phase_aligned_distance(mapped, final1) > 1e-8)
    throw std::logic_error("ideal cheat unitary failed verification");
  return result;
}

std::pair<UnitaryOp, AttackReport> optimal_cheat_unitary(const StateVector& final0,
                                                         const StateVector& final1,
                                                         int cut) {
  if (final0.dims() != final1.dims())
    throw std::invalid_argument("final states must share a dimension list");
  const Mat m0 = bipartite_matrix(final0, cut);
  const Mat m1 = bipartite_matrix(final1, cut);
  validate_matrix_dim(m0.rows());

  // |⟨1_final|(U ⊗ 1)|0_final⟩| = |Tr(U M0 M1†)|, maximized by the adjoint
  // of the unitary polar factor of the cross matrix G = M0 M1†. The maximum
  // is the nuclear norm of G, which equals F(ρ^B_0, ρ^B_1).
  const Mat cross = m0 * m1.adjoint();
  Eigen::JacobiSVD<Mat> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  UnitaryOp u(svd.matrixV() * svd.matrixU().adjoint());

  const StateVector rotated = apply_local(u, final0, cut, Side::A);
  const double achieved = std::abs(overlap(final1, rotated));

  AttackReport report;
  report.fidelity = fidelity_of_bob_views(final0, final1, cut);
  report.delta = 1.0 - report.fidelity;
  report.achieved_overlap = achieved;
  report.acceptance_probability = achieved * achieved;
  report.detection_probability = 1.0 - report.acceptance_probability;
  report.u_dim = u.dim();
  return {std::move(u), std::move(report)};
}

AttackReport run_commitment_attack(const protocols::UnitaryScript& script) {
  const auto run0 = protocols::script_execute(script, 0);
  const auto run1 = protocols::script_execute(script, 1);

  // Bipartition at the end of the commit phase: Alice's registers against
  // everything else, with the channel counted on Bob's side.
  std::vector<int> perm;
  for (int r = 0; r < script.register_count(); ++r)
    if (run0.owners[static_cast<std::size_t>(r)] == protocols::Owner::Alice)
      perm.push_back(r);
  const int cut = static_cast<int>(perm.size());
  for (int r = 0; r < script.register_count(); ++r)
    if (run0.owners[static_cast<std::size_t>(r)] != protocols::Owner::Alice)
      perm.push_back(r);

  const StateVector psi0 = permute_subsystems(run0.state, perm);
  const StateVector psi1 = permute_subsystems(run1.state, perm);
  auto [u, report] = optimal_cheat_unitary(psi0, psi1, cut);

  // Rotate, return to the script's register order, and face the verifier.
  const StateVector rotated = apply_local(u, psi0, cut, Side::A);
  std::vector<int> inverse(perm.size());
  for (int i = 0; i < static_cast<int>(perm.size()); ++i)
    inverse[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = i;
  const StateVector attacked = permute_subsystems(rotated, inverse);

  report.acceptance_probability = protocols::script_verify(attacked, script, 1);
  report.detection_probability = 1.0 - report.acceptance_probability;
  return report;
}

// --- BCJL delayed-choice attack -----------------------------------------------

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Amplitudes of the four BB84 states, enc[c][b][z].
const double kEncAmp[2][2][2] = {
    {{1.0, 0.0}, {kInvSqrt2, kInvSqrt2}},
    {{0.0, 1.0}, {kInvSqrt2, -kInvSqrt2}},
};

StateVector build_epr_state(const codes::LinearCode& code, const BitString& s,
                            int parity) {
  const int n = code.n, k = code.k;
  const Dim msg_dim = Dim{1} << k;
  const Dim basis_dim = Dim{1} << n;
  const Dim photon_dim = Dim{1} << n;

  DimList dims{msg_dim, basis_dim};
  dims.insert(dims.end(), static_cast<std::size_t>(n), Dim{2});

  Vec amps = Vec::Zero(msg_dim * basis_dim * photon_dim);
  for (Dim m = 0; m < msg_dim; ++m) {
    const BitString msg = bits_from_index(static_cast<std::uint64_t>(m), k);
    int par = 0;
    for (int i = 0; i < k; ++i) par ^= msg[static_cast<std::size_t>(i)] & s[static_cast<std::size_t>(i)];
    if (par != parity) continue;
    const BitString cw = codes::encode_message(code, msg);
    for (Dim b = 0; b < basis_dim; ++b) {
      const BitString bs = bits_from_index(static_cast<std::uint64_t>(b), n);
      // Product state of the n photons, photon 0 slowest.
      std::vector<double> prod{1.0};
      for (int i = 0; i < n; ++i) {
        const auto& e = kEncAmp[cw[static_cast<std::size_t>(i)]][bs[static_cast<std::size_t>(i)]];
        std::vector<double> next(prod.size() * 2);
        for (std::size_t idx = 0; idx < prod.size(); ++idx) {
          next[2 * idx] = prod[idx] * e[0];
          next[2 * idx + 1] = prod[idx] * e[1];
        }
        prod = std::move(next);
      }
      const Dim base = (m * basis_dim + b) * photon_dim;
      for (Dim z = 0; z < photon_dim; ++z)
        amps[base + z] = prod[static_cast<std::size_t>(z)];
    }
  }
  amps /= amps.norm();
  return StateVector(std::move(amps), std::move(dims));
}

}  // namespace

BcjlEprAttack bcjl_epr_attack(const protocols::BcjlParams& params, const BitString& r,
                              RngStream& rng) {
  if (params.n > 10 || params.k > 6)
    throw CapViolation("joint-state BCJL simulation is capped at n ≤ 10, k ≤ 6 (got n=" +
                       std::to_string(params.n) + ", k=" + std::to_string(params.k) + ")");
  if ((Dim{1} << (params.n + params.k)) > kMaxMatrixDim)
    throw CapViolation("Alice-side rotation would exceed the dense matrix cap " +
                       std::to_string(kMaxMatrixDim));
  if (static_cast<int>(r.size()) != params.n)
    throw std::invalid_argument("r length must equal n");
  if (codes::mask_from_bits(r) == 0)
    throw std::invalid_argument("r must be non-zero");

  RngStream bob = rng.derive(1);
  codes::LinearCode code =
      codes::generate_code(params.n, params.k, params.required_distance(), bob);

  const BitString s = codes::parity_vector(code, r);
  if (codes::mask_from_bits(s) == 0)
    throw std::invalid_argument(
        "r is orthogonal to the code: no codeword carries odd parity");

  StateVector committed = build_epr_state(code, s, 0);
  StateVector honest_target = build_epr_state(code, s, 1);
  auto [u, report] = optimal_cheat_unitary(committed, honest_target, 2);
  return BcjlEprAttack{params,          std::move(code), r,
                       std::move(committed),             std::move(honest_target),
                       std::move(u),    std::move(report)};
}

BcjlEprAttack bcjl_epr_attack(const protocols::BcjlParams& params, RngStream& rng) {
  // Peek at Bob's code (derive is pure, the same code is drawn again below)
  // so the cheating Alice can pick an r whose odd parity class is populated.
  RngStream bob = rng.derive(1);
  const codes::LinearCode code =
      codes::generate_code(params.n, params.k, params.required_distance(), bob);
  RngStream alice = rng.derive(2);
  BitString r;
  do {
    r.resize(static_cast<std::size_t>(params.n));
    for (auto& bit : r) bit = static_cast<std::uint8_t>(alice.bit());
  } while (codes::mask_from_bits(r) == 0 ||
           codes::mask_from_bits(codes::parity_vector(code, r)) == 0);
  return bcjl_epr_attack(params, r, rng);
}

bool bcjl_epr_open_trial(const BcjlEprAttack& attack, int open_bit, RngStream& rng) {
  if (open_bit != 0 && open_bit != 1)
    throw std::invalid_argument("opened bit must be 0 or 1");
  const int n = attack.params.n;
  const int k = attack.params.k;

  StateVector state = attack.committed;
  if (open_bit == 1) state = apply_local(attack.cheat, state, 2, Side::A);

  // Alice measures her registers and announces the collapsed (c, b, bit).
  const auto [alice_outcome, collapsed] = measure_computational(state, {0, 1}, rng);
  state = collapsed;
  const Dim basis_dim = Dim{1} << n;
  const BitString msg =
      bits_from_index(static_cast<std::uint64_t>(alice_outcome / basis_dim), k);
  const BitString b =
      bits_from_index(static_cast<std::uint64_t>(alice_outcome % basis_dim), n);
  const BitString c = codes::encode_message(attack.code, msg);

  // Bob finally measures the delayed photons in random bases b'.
  Mat hadamard(2, 2);
  hadamard << kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2;
  const UnitaryOp h(hadamard);
  BitString b_prime(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    b_prime[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(rng.bit());
    if (b_prime[static_cast<std::size_t>(i)]) {
      const std::vector<int> target{2 + i};
      state = StateVector(kernels::apply_on_targets(state.amplitudes(), state.dims(),
                                                    target, h.matrix()),
                          state.dims());
    }
  }
  const auto [photon_outcome, after] =
      measure_computational(state, range_vec(2, 2 + n), rng);
  const BitString measured = bits_from_index(static_cast<std::uint64_t>(photon_outcome), n);

  // Bob's three Step-7 tests.
  if (!codes::is_codeword(attack.code, c)) return false;
  if (codes::dot_parity(c, attack.r) != open_bit) return false;
  int matched = 0, errors = 0;
  for (int i = 0; i < n; ++i) {
    if (b[static_cast<std::size_t>(i)] != b_prime[static_cast<std::size_t>(i)]) continue;
    ++matched;
    if (measured[static_cast<std::size_t>(i)] != c[static_cast<std::size_t>(i)]) ++errors;
  }
  return protocols::bcjl_error_test(errors, matched,
                                    attack.params.threshold_factor *
                                        attack.params.epsilon);
}

// --- two-party iterate-over-y attack ---------------------------------------------

namespace {

// Projective readout of one register of an eigenstate: finds the certain
// outcome, collapses, and checks the collapse changed nothing (within
// 1e-10). Throws if the register is not an eigenstate.
std::pair<int, StateVector> eigenstate_readout(const StateVector& psi, int target) {
  const std::vector<int> targets{target};
  const auto tables = kernels::subset_tables(psi.dims(), targets);
  int best = 0;
  double best_p = -1.0;
  for (Dim o = 0; o < tables.chosen_dim; ++o) {
    double p = 0.0;
    for (Dim e = 0; e < tables.env_dim; ++e)
      p += std::norm(psi.amplitudes()[tables.chosen_off[static_cast<std::size_t>(o)] +
                                      tables.env_off[static_cast<std::size_t>(e)]]);
    if (p > best_p) {
      best_p = p;
      best = static_cast<int>(o);
    }
  }
  if (best_p < 1.0 - 1e-10)
    throw std::logic_error("output register is not an eigenstate of f");

  Vec post = Vec::Zero(psi.dim());
  for (Dim e = 0; e < tables.env_dim; ++e) {
    const Dim idx = tables.chosen_off[static_cast<std::size_t>(best)] +
                    tables.env_off[static_cast<std::size_t>(e)];
    post[idx] = psi.amplitudes()[idx];
  }
  post /= post.norm();
  StateVector collapsed(std::move(post), psi.dims());
  if (phase_aligned_distance(collapsed, psi) > 1e-10)
    throw std::logic_error("measurement disturbed an eigenstate");
  return {best, std::move(collapsed)};
}

}  // namespace

std::vector<std::pair<int, int>> two_party_attack(const protocols::FunctionTable& f,
                                                  int x, int y_start) {
  if (y_start < 0 || y_start >= f.y_domain)
    throw std::invalid_argument("y_start out of domain");

  std::vector<StateVector> honest;
  honest.reserve(static_cast<std::size_t>(f.y_domain));
  for (int y = 0; y < f.y_domain; ++y)
    honest.push_back(protocols::two_party_protocol(f, x, y));

  // Precondition of the theorem: Alice's view is independent of y.
  const DensityMatrix rho_a0 = reduced_density(honest[0], {0});
  for (int y = 1; y < f.y_domain; ++y) {
    const DensityMatrix rho_a = reduced_density(honest[static_cast<std::size_t>(y)], {0});
    if ((rho_a.matrix() - rho_a0.matrix()).cwiseAbs().maxCoeff() > 1e-8)
      throw std::invalid_argument(
          "Alice's reduced state depends on y: attack precondition fails");
  }

  std::vector<int> order{y_start};
  for (int y = 0; y < f.y_domain; ++y)
    if (y != y_start) order.push_back(y);

  // Bob-local operations act on registers 1 (input) and 2 (output); permute
  // them to the front so the relating unitary is a Side::A factor there.
  const std::vector<int> to_bob_first{1, 2, 0};
  const std::vector<int> back{2, 0, 1};

  std::vector<std::pair<int, int>> results;
  StateVector current = honest[static_cast<std::size_t>(y_start)];
  for (std::size_t j = 0; j < order.size(); ++j) {
    const int y = order[j];
    auto [value, collapsed] = eigenstate_readout(current, 2);
    current = std::move(collapsed);
    results.emplace_back(y, value);
    if (j + 1 == order.size()) break;

    const int y_next = order[j + 1];
    const StateVector cur_b = permute_subsystems(current, to_bob_first);
    const StateVector tgt_b =
        permute_subsystems(honest[static_cast<std::size_t>(y_next)], to_bob_first);
    const UnitaryOp v = relating_unitary(cur_b, tgt_b, 2);
    current = permute_subsystems(apply_local(v, cur_b, 2, Side::A), back);
  }
  return results;
}

}  // namespace qbc::attacks
