#ifndef QBC_PROTOCOLS_HPP
#define QBC_PROTOCOLS_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qbc/codes.hpp"
#include "qbc/encode.hpp"
#include "qbc/qmath.hpp"
#include "qbc/rng.hpp"
#include "qbc/types.hpp"

namespace qbc::protocols {

enum class Party { Alice, Bob };
enum class Owner { Alice, Bob, Channel };

std::string to_string(Party p);
std::string to_string(Owner o);

// --- transcript ----------------------------------------------------------------

enum class Phase { Commit, Opened, Verified, Rejected };

std::string to_string(Phase p);

struct Message {
  Phase phase;
  std::string party;
  std::string label;
  BitString payload;
};

/// Ordered record of a commitment run. Phase transitions are monotone:
/// Commit → Opened → (Verified | Rejected); any out-of-order call throws.
class ProtocolTranscript {
 public:
  Phase phase() const { return phase_; }
  const std::vector<Message>& messages() const { return messages_; }

  void record(const std::string& party, const std::string& label, BitString payload);
  void open();
  void finish(bool accepted);

  void attach_state(StateVector state, std::vector<Owner> owners);
  const std::optional<StateVector>& state() const { return state_; }
  const std::vector<Owner>& owners() const { return owners_; }

  /// Line-oriented text log: "<phase> <party> <label> <nbits>:<hex>".
  std::string to_text() const;

 private:
  Phase phase_ = Phase::Commit;
  std::vector<Message> messages_;
  std::optional<StateVector> state_;
  std::vector<Owner> owners_;
};

// --- classical toy scheme --------------------------------------------------------

/// Fixed public bijection on 16-bit words standing in for a one-way
/// function. Deliberately invertible by exhaustive search.
std::uint16_t toy_mixing16(std::uint16_t x);

using MixingFn = std::function<std::uint16_t(std::uint16_t)>;

/// Commit to `bit`: draw x with parity(x) = bit, publish y = f(x).
/// Returns the transcript and Alice's secret x.
std::pair<ProtocolTranscript, std::uint16_t> classical_commit(
    int bit, RngStream& rng, const MixingFn& f = toy_mixing16);

/// Open with the revealed x. Verified iff f(x) equals the committed y; the
/// recovered bit is parity(x). Requires the transcript to be in the opened
/// phase. Returns {verified, recovered_bit}.
std::pair<bool, int> classical_verify(ProtocolTranscript& transcript,
                                      std::uint16_t x,
                                      const MixingFn& f = toy_mixing16);

/// Exhaustive preimage search over the 16-bit domain: recovers the
/// committed bit from the commit-phase transcript alone.
int classical_break(const ProtocolTranscript& transcript,
                    const MixingFn& f = toy_mixing16);

// --- general unitary-script commitment -------------------------------------------

struct Transfer {
  int reg;
  Owner to;
};

/// One round: `party` applies `u` to its own registers plus the channel
/// (ascending register order, first register slowest), then hands off the
/// listed registers. A party may transfer its own registers or pick up
/// channel registers, never the other party's.
struct ScriptStep {
  Party party;
  UnitaryOp u;
  std::vector<Transfer> transfers;
};

/// A complete commit-phase program: bit-dependent initial states for
/// Alice's registers, Bob's fixed |v⟩, and a fixed finite step list.
class UnitaryScript {
 public:
  UnitaryScript(StateVector initial_a0, StateVector initial_a1,
                StateVector initial_b, std::vector<ScriptStep> steps);

  const StateVector& initial_a(int bit) const { return bit ? a1_ : a0_; }
  const StateVector& initial_b() const { return b_; }
  const std::vector<ScriptStep>& steps() const { return steps_; }

  int register_count() const { return static_cast<int>(register_dims_.size()); }
  const DimList& register_dims() const { return register_dims_; }
  Dim total_dim() const { return product_dim(register_dims_); }

  /// Ownership after every step has run.
  const std::vector<Owner>& final_owners() const { return final_owners_; }

 private:
  StateVector a0_, a1_, b_;
  std::vector<ScriptStep> steps_;
  DimList register_dims_;
  std::vector<Owner> final_owners_;
};

struct ScriptRun {
  StateVector state;
  std::vector<Owner> owners;
  ProtocolTranscript transcript;
};

/// Execute the commit phase for `bit`: U(|b⟩_A ⊗ |v⟩_B) with the ownership
/// ledger tracking every transfer.
ScriptRun script_execute(const UnitaryScript& script, int bit);

/// The single compiled unitary equal to the composition of all steps.
/// Limited to total dimension kMaxMatrixDim.
UnitaryOp script_compile(const UnitaryScript& script);

/// Projective verification against the honest final state for the claimed
/// bit: |⟨claimed_final|final⟩|².
double script_verify(const StateVector& final_state, const UnitaryScript& script,
                     int claimed_bit);

// Script factories used by the harness and tests.

/// Single-qubit BB84-style commitment: Alice keeps the basis record
/// entangled and sends one photon encoding the bit.
UnitaryScript make_bb84_commit_script();

/// One-parameter family from concealing (theta = 0, identical messages) to
/// revealing (theta = π/2, orthogonal messages). Fidelity of Bob's reduced
/// states is |cos theta|.
UnitaryScript make_interpolating_script(double theta);

/// Random script on a_qubits + b_qubits with one Alice round (random
/// unitary, one qubit sent) and one Bob round; the two initial states are
/// independent random states, so Bob's reduced matrices differ.
UnitaryScript make_random_script(int a_qubits, int b_qubits, RngStream& rng);

/// Random script constructed so that Bob's reduced matrices for the two
/// bits coincide exactly: the finals are related by an Alice-local unitary.
UnitaryScript make_concealing_script(int kept_qubits, int sent_qubits,
                                     RngStream& rng);

// --- BCJL ------------------------------------------------------------------------

struct BcjlParams {
  int n = 25;
  int k = 13;
  double epsilon = 0.0;
  double threshold_factor = 1.4;

  /// Smallest verified distance honoring d/n > 10ε.
  int required_distance() const;
};

struct BcjlOutcome {
  ProtocolTranscript transcript;
  codes::LinearCode code;
  BitString r, c, b, b_prime, measured;
  int opened_bit = 0;
  bool codeword_ok = false;
  bool error_rate_ok = false;
  bool parity_ok = false;
  int matched = 0;
  int errors = 0;
  bool accepted = false;
};

/// Steps 1–7 with per-qubit product-state simulation. A dishonest Alice
/// commits honestly but claims the flipped bit at opening.
BcjlOutcome bcjl_run(const BcjlParams& params, int committed_bit, bool alice_honest,
                     RngStream& rng);

/// Accept iff errors ≤ threshold·matched (the Step-7 error test). Stated
/// with ≤ so that noiseless runs pass at threshold 0.
bool bcjl_error_test(int errors, int matched, double threshold);

/// Bob's exact pre-opening views ρ^B_0, ρ^B_1: the uniform mixtures of
/// encoded codewords with the two parities, averaged over Alice's basis
/// string. Dimension 2^n.
std::pair<DensityMatrix, DensityMatrix> bcjl_reduced_pair(const codes::LinearCode& code,
                                                          const BitString& r);

/// Concealment figure 1 − F(ρ^B_0, ρ^B_1) for a code drawn at the given
/// parameters; returns {fidelity, eta}.
std::pair<double, double> bcjl_concealment(const BcjlParams& params, const BitString& r,
                                           RngStream& rng);

// --- one-sided two-party computation ----------------------------------------------

/// Finite function table f(x, y) with domains capped at 8.
struct FunctionTable {
  int x_domain = 0;
  int y_domain = 0;
  int range = 0;  // values lie in [0, range)
  std::vector<int> values;

  FunctionTable(int xs, int ys, int out_range, std::vector<int> vals);

  static FunctionTable constant(int xs, int ys, int value);
  static FunctionTable equality(int domain);  // f(x,y) = δ_xy
  static FunctionTable random(int xs, int ys, int out_range, RngStream& rng);

  int at(int x, int y) const;
};

/// Honest run on basis inputs. Final state on dims {X, Y, range}:
/// subsystem 0 is Alice's input register, 1–2 are Bob's input and output.
/// Bob's output register ends in an eigenstate of f(x,y) and Alice's
/// reduced state is independent of y.
StateVector two_party_protocol(const FunctionTable& f, int x, int y);

}  // namespace qbc::protocols

#endif
