#ifndef QBC_ATTACKS_HPP
#define QBC_ATTACKS_HPP

#include <string>
#include <utility>
#include <vector>

#include "qbc/protocols.hpp"
#include "qbc/qmath.hpp"
#include "qbc/rng.hpp"
#include "qbc/types.hpp"

namespace qbc::attacks {

/// Outcome of a purification attack. achieved_overlap never exceeds the
/// fidelity of Bob's two reduced matrices; the optimal attack attains it.
struct AttackReport {
  double fidelity = 0.0;
  double delta = 0.0;  // 1 − fidelity
  double achieved_overlap = 0.0;
  double acceptance_probability = 0.0;  // overlap², projector verification
  double detection_probability = 0.0;   // 1 − acceptance
  Dim u_dim = 0;

  /// Flat key=value record, one field per line.
  std::string to_kv() const;
};

/// Ideal-case cheat: Bob's reduced matrices for the two bits must already
/// coincide (within 1e-8). Synthesizes the Alice-local U mapping
/// |0_final⟩ to |1_final⟩ by pairing the Schmidt bases of the two finals
/// through their shared B eigenbasis, eigenvalue block by eigenvalue
/// block. Rejects unequal reduced matrices; use optimal_cheat_unitary
/// for those.
UnitaryOp ideal_cheat_unitary(const StateVector& final0, const StateVector& final1,
                              int cut);

/// General cheat: the Alice-local U maximizing |⟨1_final|(U ⊗ 1)|0_final⟩|,
/// from the polar structure of the cross matrix between the two reshaped
/// states. The maximum equals F(ρ^B_0, ρ^B_1).
std::pair<UnitaryOp, AttackReport> optimal_cheat_unitary(const StateVector& final0,
                                                         const StateVector& final1,
                                                         int cut);

/// Full strategy against a commitment script: commit with b = 0, decide 1
/// at opening, rotate with the optimal Alice-local unitary, and submit to
/// projective verification for claimed bit 1.
AttackReport run_commitment_attack(const protocols::UnitaryScript& script);

/// Delayed-choice BCJL attack state and its synthesized rotation. Instead
/// of committing, Alice keeps codeword and basis registers entangled with
/// the photons; opening either bit is a local rotation away.
struct BcjlEprAttack {
  protocols::BcjlParams params;
  codes::LinearCode code;
  BitString r;
  StateVector committed;      // parity-0 superposition, built at commit time
  StateVector honest_target;  // parity-1 superposition
  UnitaryOp cheat;            // Alice-local rotation toward the target
  AttackReport report;
};

BcjlEprAttack bcjl_epr_attack(const protocols::BcjlParams& params, const BitString& r,
                              RngStream& rng);
BcjlEprAttack bcjl_epr_attack(const protocols::BcjlParams& params, RngStream& rng);

/// One opening of the attacked transcript: Alice measures her registers and
/// announces (c, b, bit); Bob measures the delayed photons in random bases
/// and applies the three Step-7 tests. Returns whether all three pass.
bool bcjl_epr_open_trial(const BcjlEprAttack& attack, int open_bit, RngStream& rng);

/// Bob's iterate-over-y attack on a one-sided two-party computation:
/// measure f(x, y_j) without disturbance, rotate y_j → y_{j+1} with a
/// Bob-local unitary, repeat. Returns (y, f(x,y)) for every y, starting at
/// y_start. Refuses if Alice's reduced state depends on y.
std::vector<std::pair<int, int>> two_party_attack(const protocols::FunctionTable& f,
                                                  int x, int y_start);

}  // namespace qbc::attacks

#endif
