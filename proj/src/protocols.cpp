#include "qbc/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qbc/kernels.hpp"

namespace qbc::protocols {

std::string to_string(Party p) { return p == Party::Alice ? "alice" : "bob"; }

std::string to_string(Owner o) {
  switch (o) {
    case Owner::Alice: return "alice";
    case Owner::Bob: return "bob";
    default: return "channel";
  }
}

std::string to_string(Phase p) {
  switch (p) {
    case Phase::Commit: return "commit";
    case Phase::Opened: return "opened";
    case Phase::Verified: return "verified";
    default: return "rejected";
  }
}

// --- transcript ----------------------------------------------------------------

void ProtocolTranscript::record(const std::string& party, const std::string& label,
                                BitString payload) {
  if (phase_ == Phase::Verified || phase_ == Phase::Rejected)
    throw std::logic_error("transcript is closed");
  messages_.push_back({phase_, party, label, std::move(payload)});
}

void ProtocolTranscript::open() {
  if (phase_ != Phase::Commit)
    throw std::logic_error("transcript can only be opened from the commit phase");
  phase_ = Phase::Opened;
}

void ProtocolTranscript::finish(bool accepted) {
  if (phase_ != Phase::Opened)
    throw std::logic_error("transcript can only finish from the opened phase");
  phase_ = accepted ? Phase::Verified : Phase::Rejected;
}

void ProtocolTranscript::attach_state(StateVector state, std::vector<Owner> owners) {
  if (owners.size() != state.dims().size())
    throw std::invalid_argument("ledger must cover every subsystem exactly once");
  state_ = std::move(state);
  owners_ = std::move(owners);
}

std::string ProtocolTranscript::to_text() const {
  std::ostringstream out;
  for (const auto& m : messages_)
    out << to_string(m.phase) << ' ' << m.party << ' ' << m.label << ' '
        << bits_to_hex(m.payload) << '\n';
  out << to_string(phase_) << " - end -\n";
  return out.str();
}

// --- classical toy scheme --------------------------------------------------------

std::uint16_t toy_mixing16(std::uint16_t x) {
  // Three rounds of odd-multiply, xor-shift, rotate. Bijective on 16 bits.
  for (int round = 0; round < 3; ++round) {
    x = static_cast<std::uint16_t>(x * 0x2b0d);
    x ^= static_cast<std::uint16_t>(x >> 7);
    x = static_cast<std::uint16_t>((x << 5) | (x >> 11));
    x = static_cast<std::uint16_t>(x + 0x9e37);
  }
  return x;
}

std::pair<ProtocolTranscript, std::uint16_t> classical_commit(int bit, RngStream& rng,
                                                              const MixingFn& f) {
  if (bit != 0 && bit != 1) throw std::invalid_argument("bit must be 0 or 1");
  const std::uint16_t x = static_cast<std::uint16_t>(
      (rng.u64() & 0xfffe) | static_cast<std::uint64_t>(bit));
  const std::uint16_t y = f(x);
  ProtocolTranscript t;
  t.record("alice", "y", bits_from_index(y, 16));
  return {std::move(t), x};
}

std::pair<bool, int> classical_verify(ProtocolTranscript& transcript, std::uint16_t x,
                                      const MixingFn& f) {
  if (transcript.phase() != Phase::Opened)
    throw std::logic_error("transcript must be in the opened phase");
  std::uint16_t y = 0;
  bool found = false;
  for (const auto& m : transcript.messages())
    if (m.label == "y") {
      y = static_cast<std::uint16_t>(index_from_bits(m.payload));
      found = true;
    }
  if (!found) throw std::invalid_argument("transcript carries no commitment");
  transcript.record("alice", "x", bits_from_index(x, 16));
  const bool ok = f(x) == y;
  transcript.finish(ok);
  return {ok, static_cast<int>(x & 1u)};
}

int classical_break(const ProtocolTranscript& transcript, const MixingFn& f) {
  std::uint16_t y = 0;
  bool found = false;
  for (const auto& m : transcript.messages())
    if (m.label == "y" && m.phase == Phase::Commit) {
      y = static_cast<std::uint16_t>(index_from_bits(m.payload));
      found = true;
    }
  if (!found) throw std::invalid_argument("transcript carries no commitment");
  for (std::uint32_t x = 0; x <= 0xffff; ++x)
    if (f(static_cast<std::uint16_t>(x)) == y) return static_cast<int>(x & 1u);
  throw std::logic_error("no preimage found; f is not a 16-bit bijection");
}

// --- unitary scripts --------------------------------------------------------------

namespace {

std::vector<int> step_targets(const std::vector<Owner>& owners, Party party) {
  const Owner self = party == Party::Alice ? Owner::Alice : Owner::Bob;
  std::vector<int> targets;
  for (int r = 0; r < static_cast<int>(owners.size()); ++r)
    if (owners[static_cast<std::size_t>(r)] == self ||
        owners[static_cast<std::size_t>(r)] == Owner::Channel)
      targets.push_back(r);
  return targets;
}

Dim targets_dim(const DimList& dims, const std::vector<int>& targets) {
  Dim d = 1;
  for (int t : targets) d *= dims[static_cast<std::size_t>(t)];
  return d;
}

// Walk the step list validating ownership and unitary shapes; returns the
// final ownership ledger.
std::vector<Owner> validate_script(const DimList& dims, int a_regs,
                                   const std::vector<ScriptStep>& steps) {
  std::vector<Owner> owners(dims.size(), Owner::Bob);
  for (int r = 0; r < a_regs; ++r) owners[static_cast<std::size_t>(r)] = Owner::Alice;

  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& step = steps[i];
    const auto targets = step_targets(owners, step.party);
    if (step.u.dim() != targets_dim(dims, targets))
      throw std::invalid_argument(
          "step " + std::to_string(i) +
          ": unitary dimension does not match the party's registers plus channel");
    const Owner self = step.party == Party::Alice ? Owner::Alice : Owner::Bob;
    const Owner other = step.party == Party::Alice ? Owner::Bob : Owner::Alice;
    std::vector<bool> moved(dims.size(), false);
    for (const auto& tr : step.transfers) {
      if (tr.reg < 0 || tr.reg >= static_cast<int>(dims.size()))
        throw std::invalid_argument("step " + std::to_string(i) +
                                    ": transfer register out of range");
      if (moved[static_cast<std::size_t>(tr.reg)])
        throw std::invalid_argument("step " + std::to_string(i) +
                                    ": register transferred twice");
      const Owner cur = owners[static_cast<std::size_t>(tr.reg)];
      if (cur == other)
        throw std::invalid_argument("step " + std::to_string(i) +
                                    ": cannot transfer the other party's register");
      if (cur != self && cur != Owner::Channel)
        throw std::invalid_argument("step " + std::to_string(i) +
                                    ": transfer of an unowned register");
      owners[static_cast<std::size_t>(tr.reg)] = tr.to;
      moved[static_cast<std::size_t>(tr.reg)] = true;
    }
  }
  return owners;
}

}  // namespace

UnitaryScript::UnitaryScript(StateVector initial_a0, StateVector initial_a1,
                             StateVector initial_b, std::vector<ScriptStep> steps)
    : a0_(std::move(initial_a0)),
      a1_(std::move(initial_a1)),
      b_(std::move(initial_b)),
      steps_(std::move(steps)) {
  if (a0_.dims() != a1_.dims())
    throw std::invalid_argument("the two initial Alice states must share a register layout");
  register_dims_ = a0_.dims();
  register_dims_.insert(register_dims_.end(), b_.dims().begin(), b_.dims().end());
  final_owners_ =
      validate_script(register_dims_, static_cast<int>(a0_.dims().size()), steps_);
}

ScriptRun script_execute(const UnitaryScript& script, int bit) {
  if (bit != 0 && bit != 1) throw std::invalid_argument("bit must be 0 or 1");
  const int a_regs = static_cast<int>(script.initial_a(bit).dims().size());
  std::vector<Owner> owners(script.register_dims().size(), Owner::Bob);
  for (int r = 0; r < a_regs; ++r) owners[static_cast<std::size_t>(r)] = Owner::Alice;

  ProtocolTranscript transcript;
  StateVector state = tensor(script.initial_a(bit), script.initial_b());

  int step_no = 0;
  for (const auto& step : script.steps()) {
    const auto targets = step_targets(owners, step.party);
    state = StateVector(kernels::apply_on_targets(state.amplitudes(),
                                                  state.dims(), targets,
                                                  step.u.matrix()),
                        state.dims());
    transcript.record(to_string(step.party), "step" + std::to_string(step_no),
                      BitString{});
    for (const auto& tr : step.transfers) {
      owners[static_cast<std::size_t>(tr.reg)] = tr.to;
      transcript.record(to_string(step.party),
                        "transfer->" + to_string(tr.to),
                        bits_from_index(static_cast<std::uint64_t>(tr.reg), 8));
    }
    ++step_no;
  }
  transcript.attach_state(state, owners);
  return {std::move(state), std::move(owners), std::move(transcript)};
}

UnitaryOp script_compile(const UnitaryScript& script) {
  validate_matrix_dim(script.total_dim());
  const DimList& dims = script.register_dims();
  const int a_regs = static_cast<int>(script.initial_a(0).dims().size());
  std::vector<Owner> owners(dims.size(), Owner::Bob);
  for (int r = 0; r < a_regs; ++r) owners[static_cast<std::size_t>(r)] = Owner::Alice;

  Mat compiled = Mat::Identity(script.total_dim(), script.total_dim());
  for (const auto& step : script.steps()) {
    const auto targets = step_targets(owners, step.party);
    compiled = kernels::embed_on_targets(dims, targets, step.u.matrix()) * compiled;
    for (const auto& tr : step.transfers)
      owners[static_cast<std::size_t>(tr.reg)] = tr.to;
  }
  return UnitaryOp(std::move(compiled));
}

double script_verify(const StateVector& final_state, const UnitaryScript& script,
                     int claimed_bit) {
  const StateVector honest = script_execute(script, claimed_bit).state;
  const double p = std::norm(overlap(honest, final_state));
  return std::min(p, 1.0);
}

// --- script factories --------------------------------------------------------------

namespace {

StateVector scalar_state() { return StateVector(Vec::Ones(1), DimList{1}); }

StateVector superpose(const StateVector& u, const StateVector& v) {
  Vec amps = (u.amplitudes() + v.amplitudes());
  amps /= amps.norm();
  return StateVector(std::move(amps), u.dims());
}

}  // namespace

UnitaryScript make_bb84_commit_script() {
  // Alice: record qubit ⊗ photon, (|0⟩|enc(b,0)⟩ + |1⟩|enc(b,1)⟩)/√2.
  const StateVector zero = StateVector::basis({2}, 0);
  const StateVector one = StateVector::basis({2}, 1);
  auto initial = [&](int bit) {
    return superpose(tensor(zero, encode::encode_bit(bit, 0)),
                     tensor(one, encode::encode_bit(bit, 1)));
  };
  std::vector<ScriptStep> steps;
  steps.push_back({Party::Alice, UnitaryOp::identity(4), {{1, Owner::Bob}}});
  return UnitaryScript(initial(0), initial(1), scalar_state(), std::move(steps));
}

UnitaryScript make_interpolating_script(double theta) {
  Vec message(2);
  message[0] = std::cos(theta);
  message[1] = std::sin(theta);
  const StateVector anc = StateVector::basis({2}, 0);
  const StateVector a0 = tensor(anc, StateVector::basis({2}, 0));
  const StateVector a1 = tensor(anc, StateVector(message, {2}));
  std::vector<ScriptStep> steps;
  steps.push_back({Party::Alice, UnitaryOp::identity(4), {{1, Owner::Bob}}});
  return UnitaryScript(a0, a1, scalar_state(), std::move(steps));
}

UnitaryScript make_random_script(int a_qubits, int b_qubits, RngStream& rng) {
  if (a_qubits < 1 || b_qubits < 1)
    throw std::invalid_argument("need at least one qubit per party");
  const DimList a_dims(static_cast<std::size_t>(a_qubits), 2);
  const DimList b_dims(static_cast<std::size_t>(b_qubits), 2);
  RngStream r = rng.derive(0x5c717);

  const StateVector a0 = random_state(a_dims, r);
  const StateVector a1 = random_state(a_dims, r);
  const StateVector bv = random_state(b_dims, r);

  std::vector<ScriptStep> steps;
  // Alice mixes her registers and sends the last one.
  steps.push_back({Party::Alice, random_unitary(Dim{1} << a_qubits, r),
                   {{a_qubits - 1, Owner::Bob}}});
  // Bob mixes everything he now holds.
  steps.push_back({Party::Bob, random_unitary(Dim{1} << (b_qubits + 1), r), {}});
  // Alice stirs what she kept.
  if (a_qubits >= 2)
    steps.push_back({Party::Alice, random_unitary(Dim{1} << (a_qubits - 1), r), {}});
  return UnitaryScript(a0, a1, bv, std::move(steps));
}

UnitaryScript make_concealing_script(int kept_qubits, int sent_qubits, RngStream& rng) {
  if (kept_qubits < 1 || sent_qubits < 1)
    throw std::invalid_argument("need at least one kept and one sent qubit");
  const int a_qubits = kept_qubits + sent_qubits;
  const DimList a_dims(static_cast<std::size_t>(a_qubits), 2);
  RngStream r = rng.derive(0xc0cea1);

  const Dim ad = Dim{1} << a_qubits;
  const Dim kd = Dim{1} << kept_qubits;
  const Dim sd = Dim{1} << sent_qubits;

  const UnitaryOp w = random_unitary(ad, r);
  const UnitaryOp v = random_unitary(kd, r);
  const StateVector a0 = random_state(a_dims, r);

  // a1 = W† (V ⊗ 1_S) W a0, so the finals differ by the Alice-local V only
  // and Bob's reduced matrices for the two bits coincide exactly.
  Mat v_full = Mat::Zero(ad, ad);
  for (Dim i = 0; i < kd; ++i)
    for (Dim j = 0; j < kd; ++j)
      for (Dim s = 0; s < sd; ++s) v_full(i * sd + s, j * sd + s) = v.matrix()(i, j);
  Vec a1_amps = w.matrix().adjoint() * (v_full * (w.matrix() * a0.amplitudes()));
  a1_amps /= a1_amps.norm();
  const StateVector a1(std::move(a1_amps), a_dims);

  std::vector<ScriptStep> steps;
  std::vector<Transfer> sends;
  for (int s = 0; s < sent_qubits; ++s) sends.push_back({kept_qubits + s, Owner::Bob});
  steps.push_back({Party::Alice, w, std::move(sends)});
  steps.push_back({Party::Bob, random_unitary(Dim{1} << (sent_qubits + 1), r), {}});
  return UnitaryScript(a0, a1, random_state({2}, r), std::move(steps));
}

// --- BCJL ----------------------------------------------------------------------

int BcjlParams::required_distance() const {
  const double bound = 10.0 * epsilon * n;
  return std::max(1, static_cast<int>(std::floor(bound)) + 1);
}

bool bcjl_error_test(int errors, int matched, double threshold) {
  return errors <= threshold * matched + 1e-9;
}

BcjlOutcome bcjl_run(const BcjlParams& params, int committed_bit, bool alice_honest,
                     RngStream& rng) {
  if (committed_bit != 0 && committed_bit != 1)
    throw std::invalid_argument("committed bit must be 0 or 1");
  const encode::NoiseModel noise(params.epsilon);
  RngStream bob = rng.derive(1);
  RngStream alice = rng.derive(2);
  RngStream channel = rng.derive(3);

  BcjlOutcome out;
  // Step 1: Bob draws the code and announces G.
  out.code = codes::generate_code(params.n, params.k, params.required_distance(), bob);
  BitString g_bits;
  for (auto row : out.code.rows) {
    const BitString rb = codes::bits_from_mask(row, params.n);
    g_bits.insert(g_bits.end(), rb.begin(), rb.end());
  }
  out.transcript.record("bob", "G", g_bits);

  // Step 2: Alice announces a non-zero r. At desk scale a random r is
  // orthogonal to the whole code with probability 2^-k, which would leave
  // the odd parity class empty; she redraws until the class is populated.
  do {
    out.r.resize(static_cast<std::size_t>(params.n));
    for (auto& bit : out.r) bit = static_cast<std::uint8_t>(alice.bit());
  } while (codes::mask_from_bits(out.r) == 0 ||
           codes::mask_from_bits(codes::parity_vector(out.code, out.r)) == 0);
  out.transcript.record("alice", "r", out.r);

  // Step 3: codeword with the committed parity.
  out.c = codes::sample_codeword_with_parity(out.code, out.r, committed_bit, alice);

  // Step 4: random basis string b, photons through the noisy channel.
  out.b.resize(static_cast<std::size_t>(params.n));
  for (auto& bit : out.b) bit = static_cast<std::uint8_t>(alice.bit());

  // Step 5: Bob measures in random bases b'.
  out.b_prime.resize(static_cast<std::size_t>(params.n));
  for (auto& bit : out.b_prime) bit = static_cast<std::uint8_t>(bob.bit());

  out.measured.resize(static_cast<std::size_t>(params.n));
  for (int i = 0; i < params.n; ++i) {
    StateVector photon = encode::encode_bit(out.c[static_cast<std::size_t>(i)],
                                            out.b[static_cast<std::size_t>(i)]);
    photon = encode::apply_noise_sampled(photon, noise, channel);
    const auto [bit, post] = encode::measure(
        photon, encode::basis_from_bit(out.b_prime[static_cast<std::size_t>(i)]), bob);
    out.measured[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(bit);
  }

  // Step 6: opening.
  out.transcript.open();
  out.opened_bit = alice_honest ? committed_bit : 1 - committed_bit;
  out.transcript.record("alice", "c", out.c);
  out.transcript.record("alice", "b", out.b);
  out.transcript.record("alice", "bit",
                        BitString{static_cast<std::uint8_t>(out.opened_bit)});

  // Step 7: the three tests.
  out.codeword_ok = codes::is_codeword(out.code, out.c);
  out.matched = 0;
  out.errors = 0;
  for (int i = 0; i < params.n; ++i) {
    if (out.b[static_cast<std::size_t>(i)] != out.b_prime[static_cast<std::size_t>(i)])
      continue;
    ++out.matched;
    if (out.measured[static_cast<std::size_t>(i)] != out.c[static_cast<std::size_t>(i)])
      ++out.errors;
  }
  out.error_rate_ok = bcjl_error_test(out.errors, out.matched,
                                      params.threshold_factor * params.epsilon);
  out.parity_ok = codes::dot_parity(out.c, out.r) == out.opened_bit;
  out.accepted = out.codeword_ok && out.error_rate_ok && out.parity_ok;
  out.transcript.finish(out.accepted);
  return out;
}

namespace {

// Single-qubit views of an encoded bit averaged over the basis choice:
// ρ(0) = (|0⟩⟨0| + |+⟩⟨+|)/2, ρ(1) = (|1⟩⟨1| + |−⟩⟨−|)/2.
Mat averaged_encoding(int c) {
  const Vec rect = encode::encode_bit(c, 0).amplitudes();
  const Vec diag = encode::encode_bit(c, 1).amplitudes();
  return 0.5 * (rect * rect.adjoint() + diag * diag.adjoint());
}

}  // namespace

std::pair<DensityMatrix, DensityMatrix> bcjl_reduced_pair(const codes::LinearCode& code,
                                                          const BitString& r) {
  if (code.n > 10)
    throw CapViolation("exact BCJL views are capped at n ≤ 10 (got n = " +
                       std::to_string(code.n) + ")");
  if (codes::mask_from_bits(r) == 0) throw std::invalid_argument("r must be non-zero");
  const BitString s = codes::parity_vector(code, r);
  if (codes::mask_from_bits(s) == 0)
    throw std::invalid_argument(
        "r is orthogonal to the code: the odd-parity view is empty");

  const Dim dim = Dim{1} << code.n;
  Mat sum0 = Mat::Zero(dim, dim), sum1 = Mat::Zero(dim, dim);
  long count0 = 0, count1 = 0;
  const Mat rho_bit[2] = {averaged_encoding(0), averaged_encoding(1)};

  for (std::uint32_t m = 0; m < (std::uint32_t{1} << code.k); ++m) {
    const BitString msg = codes::bits_from_mask(m, code.k);
    const BitString cw = codes::encode_message(code, msg);
    // Photon 0 is the slowest index; build the product from the last photon up.
    Mat acc = Mat::Ones(1, 1);
    for (int i = code.n - 1; i >= 0; --i) {
      const Mat& q = rho_bit[cw[static_cast<std::size_t>(i)]];
      Mat next(acc.rows() * 2, acc.cols() * 2);
      next.topLeftCorner(acc.rows(), acc.cols()) = q(0, 0) * acc;
      next.topRightCorner(acc.rows(), acc.cols()) = q(0, 1) * acc;
      next.bottomLeftCorner(acc.rows(), acc.cols()) = q(1, 0) * acc;
      next.bottomRightCorner(acc.rows(), acc.cols()) = q(1, 1) * acc;
      acc = std::move(next);
    }
    if (codes::dot_parity(cw, r) == 0) {
      sum0 += acc;
      ++count0;
    } else {
      sum1 += acc;
      ++count1;
    }
  }
  return {DensityMatrix(sum0 / static_cast<double>(count0)),
          DensityMatrix(sum1 / static_cast<double>(count1))};
}

std::pair<double, double> bcjl_concealment(const BcjlParams& params, const BitString& r,
                                           RngStream& rng) {
  RngStream bob = rng.derive(1);
  const auto code =
      codes::generate_code(params.n, params.k, params.required_distance(), bob);
  const auto [rho0, rho1] = bcjl_reduced_pair(code, r);
  const double f = fidelity(rho0, rho1);
  return {f, 1.0 - f};
}

// --- one-sided two-party computation ----------------------------------------------

FunctionTable::FunctionTable(int xs, int ys, int out_range, std::vector<int> vals)
    : x_domain(xs), y_domain(ys), range(out_range), values(std::move(vals)) {
  if (xs < 1 || xs > 8 || ys < 1 || ys > 8)
    throw std::invalid_argument("two-party domains are capped at 8");
  if (range < 1) throw std::invalid_argument("range must be positive");
  if (values.size() != static_cast<std::size_t>(xs) * static_cast<std::size_t>(ys))
    throw std::invalid_argument("table size must be x_domain × y_domain");
  for (int v : values)
    if (v < 0 || v >= range) throw std::invalid_argument("table value out of range");
}

FunctionTable FunctionTable::constant(int xs, int ys, int value) {
  return FunctionTable(xs, ys, value + 1,
                       std::vector<int>(static_cast<std::size_t>(xs * ys), value));
}

FunctionTable FunctionTable::equality(int domain) {
  std::vector<int> vals(static_cast<std::size_t>(domain * domain), 0);
  for (int x = 0; x < domain; ++x) vals[static_cast<std::size_t>(x * domain + x)] = 1;
  return FunctionTable(domain, domain, 2, std::move(vals));
}

FunctionTable FunctionTable::random(int xs, int ys, int out_range, RngStream& rng) {
  std::vector<int> vals(static_cast<std::size_t>(xs * ys));
  for (auto& v : vals) v = static_cast<int>(rng.below(static_cast<std::uint64_t>(out_range)));
  return FunctionTable(xs, ys, out_range, std::move(vals));
}

int FunctionTable::at(int x, int y) const {
  if (x < 0 || x >= x_domain || y < 0 || y >= y_domain)
    throw std::invalid_argument("function table input out of domain");
  return values[static_cast<std::size_t>(x * y_domain + y)];
}

StateVector two_party_protocol(const FunctionTable& f, int x, int y) {
  // |x⟩_A |y⟩_B |0⟩_B through |x,y,z⟩ → |x,y,z ⊞ f(x,y)⟩ is |x,y,f(x,y)⟩.
  const Dim idx =
      (static_cast<Dim>(x) * f.y_domain + y) * f.range + f.at(x, y);
  return StateVector::basis({f.x_domain, f.y_domain, f.range}, idx);
}

}  // namespace qbc::protocols
