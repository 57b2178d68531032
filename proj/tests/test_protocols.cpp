#include <doctest.h>

#include <chrono>
#include <cmath>

#include "qbc/attacks.hpp"
#include "qbc/protocols.hpp"
#include "qbc/qmath.hpp"
#include "qbc/rng.hpp"
#include "support/oracles.hpp"

using namespace qbc;
using namespace qbc::protocols;

// --- classical toy scheme -----------------------------------------------------

TEST_CASE("committed parity matches the bit") {
  RngStream rng(100);
  for (int i = 0; i < 20; ++i) {
    RngStream even = rng.derive(2 * i);
    const auto [t0, x0] = classical_commit(0, even);
    CHECK((x0 & 1) == 0);
    RngStream odd = rng.derive(2 * i + 1);
    const auto [t1, x1] = classical_commit(1, odd);
    CHECK((x1 & 1) == 1);
  }
}

TEST_CASE("commitments are deterministic under a fixed seed") {
  RngStream a(42), b(42);
  const auto [ta, xa] = classical_commit(1, a);
  const auto [tb, xb] = classical_commit(1, b);
  CHECK(xa == xb);
  CHECK(ta.to_text() == tb.to_text());
}

TEST_CASE("honest opening verifies and recovers the bit") {
  RngStream rng(42);
  auto [t, x] = classical_commit(1, rng);
  t.open();
  const auto [ok, bit] = classical_verify(t, x);
  CHECK(ok);
  CHECK(bit == 1);
  CHECK(t.phase() == Phase::Verified);
}

TEST_CASE("a wrong preimage is rejected") {
  RngStream rng(43);
  auto [t, x] = classical_commit(0, rng);
  t.open();
  const auto [ok, bit] = classical_verify(t, static_cast<std::uint16_t>(x ^ 0x8));
  CHECK_FALSE(ok);
  CHECK(t.phase() == Phase::Rejected);
}

TEST_CASE("frozen transcript text for seed 42") {
  RngStream rng(42);
  auto [t, x] = classical_commit(1, rng);
  t.open();
  classical_verify(t, x);
  CHECK(x == 13761);
  CHECK(t.to_text() ==
        "commit alice y 16:7a45\n"
        "opened alice x 16:35c1\n"
        "verified - end -\n");
}

TEST_CASE("exhaustive search breaks the commitment before opening") {
  RngStream rng(4242);
  const auto start = std::chrono::steady_clock::now();
  for (int bit = 0; bit < 2; ++bit) {
    for (int i = 0; i < 8; ++i) {
      RngStream stream = rng.derive(8 * bit + i);
      const auto [t, x] = classical_commit(bit, stream);
      CHECK(t.phase() == Phase::Commit);  // nothing opened yet
      CHECK(classical_break(t) == bit);
    }
  }
  const auto elapsed = std::chrono::steady_clock::now() - start;
  CHECK(std::chrono::duration<double>(elapsed).count() < 1.0);
}

TEST_CASE("toy mixing function is a 16-bit bijection") {
  std::vector<bool> seen(65536, false);
  for (std::uint32_t x = 0; x <= 0xffff; ++x) {
    const std::uint16_t y = toy_mixing16(static_cast<std::uint16_t>(x));
    CHECK_FALSE(seen[y]);
    seen[y] = true;
  }
}

// --- transcript phases ----------------------------------------------------------

TEST_CASE("phase transitions are monotone") {
  ProtocolTranscript t;
  t.record("alice", "m", BitString{1});
  t.open();
  CHECK_THROWS_AS(t.open(), std::logic_error);
  t.finish(true);
  CHECK_THROWS_AS(t.finish(true), std::logic_error);
  CHECK_THROWS_AS(t.record("alice", "late", BitString{}), std::logic_error);

  ProtocolTranscript u;
  CHECK_THROWS_AS(u.finish(false), std::logic_error);
}

TEST_CASE("the ledger must cover every subsystem") {
  ProtocolTranscript t;
  const StateVector s = StateVector::basis({2, 2}, 0);
  CHECK_THROWS_AS(t.attach_state(s, {Owner::Alice}), std::invalid_argument);
  CHECK_NOTHROW(t.attach_state(s, {Owner::Alice, Owner::Bob}));
}

// --- unitary scripts -------------------------------------------------------------

TEST_CASE("an empty script leaves the initial state unchanged") {
  RngStream rng(7);
  const StateVector a0 = random_state({2}, rng);
  const StateVector a1 = random_state({2}, rng);
  const StateVector bv = random_state({2}, rng);
  const UnitaryScript script(a0, a1, bv, {});
  const auto run = script_execute(script, 0);
  CHECK(phase_aligned_distance(run.state, tensor(a0, bv)) < 1e-12);
}

TEST_CASE("an Alice-local step leaves Bob's reduced state fixed") {
  RngStream rng(8);
  const StateVector a0 = random_state({2, 2}, rng);
  const StateVector a1 = random_state({2, 2}, rng);
  const StateVector bv = random_state({2}, rng);
  std::vector<ScriptStep> steps;
  steps.push_back({Party::Alice, random_unitary(4, rng), {}});
  const UnitaryScript script(a0, a1, bv, std::move(steps));

  const auto run = script_execute(script, 0);
  const Mat rho_b = reduced_density(run.state, {2}).matrix();
  const Mat v = bv.amplitudes() * bv.amplitudes().adjoint();
  CHECK((rho_b - v).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Bob's view is fixed by every Alice-local prefix of a script") {
  RngStream rng(88);
  const StateVector a0 = random_state({2, 2}, rng);
  const StateVector a1 = random_state({2, 2}, rng);
  const StateVector bv = random_state({2, 2}, rng);
  const Mat expected = reduced_density(tensor(a0, bv), {2, 3}).matrix();

  std::vector<ScriptStep> steps;
  for (int i = 0; i < 4; ++i) steps.push_back({Party::Alice, random_unitary(4, rng), {}});

  for (std::size_t prefix = 1; prefix <= steps.size(); ++prefix) {
    const UnitaryScript script(
        a0, a1, bv, std::vector<ScriptStep>(steps.begin(), steps.begin() + prefix));
    const auto run = script_execute(script, 0);
    const Mat rho_b = reduced_density(run.state, {2, 3}).matrix();
    CHECK((rho_b - expected).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("step-by-step execution equals the compiled unitary") {
  RngStream rng(9);
  const auto script = make_random_script(2, 1, rng);
  const UnitaryOp compiled = script_compile(script);
  for (int bit = 0; bit < 2; ++bit) {
    const StateVector stepwise = script_execute(script, bit).state;
    const Vec direct =
        compiled.matrix() *
        tensor(script.initial_a(bit), script.initial_b()).amplitudes();
    CHECK((stepwise.amplitudes() - direct).norm() < 1e-12);
  }
}

TEST_CASE("scripts reject acting on or transferring the other party's registers") {
  RngStream rng(10);
  const StateVector a0 = random_state({2}, rng);
  const StateVector a1 = random_state({2}, rng);
  const StateVector bv = random_state({2}, rng);

  // Alice cannot hand over Bob's register.
  std::vector<ScriptStep> steal;
  steal.push_back({Party::Alice, UnitaryOp::identity(2), {{1, Owner::Alice}}});
  CHECK_THROWS_AS(UnitaryScript(a0, a1, bv, steal), std::invalid_argument);

  // A step unitary must cover exactly the party's registers plus channel.
  std::vector<ScriptStep> wrong_dim;
  wrong_dim.push_back({Party::Alice, UnitaryOp::identity(4), {}});
  CHECK_THROWS_AS(UnitaryScript(a0, a1, bv, wrong_dim), std::invalid_argument);

  // Transferring a register twice in a step is malformed.
  std::vector<ScriptStep> twice;
  twice.push_back({Party::Alice, UnitaryOp::identity(2),
                   {{0, Owner::Channel}, {0, Owner::Bob}}});
  CHECK_THROWS_AS(UnitaryScript(a0, a1, bv, twice), std::invalid_argument);
}

TEST_CASE("ownership ledger tracks sends and pickups") {
  RngStream rng(11);
  const StateVector a0 = random_state({2, 2}, rng);
  const StateVector a1 = random_state({2, 2}, rng);
  const StateVector bv = random_state({2}, rng);
  const UnitaryOp w = random_unitary(4, rng);
  std::vector<ScriptStep> steps;
  steps.push_back({Party::Alice, UnitaryOp::identity(4), {{1, Owner::Channel}}});
  // Bob acts on the channel register together with his own, then absorbs it.
  steps.push_back({Party::Bob, w, {{1, Owner::Bob}}});
  const UnitaryScript script(a0, a1, bv, std::move(steps));
  CHECK(script.final_owners() ==
        std::vector<Owner>{Owner::Alice, Owner::Bob, Owner::Bob});

  // Executing the pickup script equals applying w on subsystems {1, 2}.
  const auto run = script_execute(script, 0);
  const StateVector direct = apply_local(w, tensor(a0, bv), 1, Side::B);
  CHECK(phase_aligned_distance(run.state, direct) < 1e-12);
}

TEST_CASE("projective verification accepts honesty and rejects orthogonality") {
  const auto script = make_interpolating_script(1.5707963267948966);  // π/2
  const auto run0 = script_execute(script, 0);
  CHECK(script_verify(run0.state, script, 0) == doctest::Approx(1.0).epsilon(1e-12));
  // θ = π/2 sends orthogonal messages for the two bits.
  CHECK(script_verify(run0.state, script, 1) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("frozen script transcript") {
  const auto script = make_bb84_commit_script();
  const auto run = script_execute(script, 0);
  CHECK(run.transcript.to_text() ==
        "commit alice step0 0:\n"
        "commit alice transfer->bob 8:01\n"
        "commit - end -\n");
  CHECK(run.owners == std::vector<Owner>{Owner::Alice, Owner::Bob, Owner::Bob});
}

// --- BCJL ------------------------------------------------------------------------

TEST_CASE("required distance honors d/n > 10ε") {
  CHECK(BcjlParams{20, 10, 0.0, 1.4}.required_distance() == 1);
  CHECK(BcjlParams{20, 3, 0.05, 1.4}.required_distance() == 11);
  CHECK(BcjlParams{25, 13, 0.01, 1.4}.required_distance() == 3);
}

TEST_CASE("error test boundary behavior") {
  CHECK(bcjl_error_test(0, 0, 0.0));        // noiseless, nothing matched
  CHECK(bcjl_error_test(0, 10, 0.0));       // noiseless, no errors
  CHECK_FALSE(bcjl_error_test(1, 10, 0.0)); // any error fails at ε = 0
  CHECK(bcjl_error_test(1, 20, 0.07));      // 1 ≤ 1.4
  CHECK_FALSE(bcjl_error_test(2, 20, 0.07));
}

TEST_CASE("noiseless honest runs always verify") {
  const BcjlParams params{12, 6, 0.0, 1.4};
  RngStream rng(1000);
  for (int trial = 0; trial < 50; ++trial) {
    RngStream stream = rng.derive(trial);
    const auto out = bcjl_run(params, trial & 1, true, stream);
    CHECK(out.accepted);
    CHECK(out.codeword_ok);
    CHECK(out.error_rate_ok);
    CHECK(out.parity_ok);
    CHECK(out.errors == 0);
    CHECK(out.transcript.phase() == Phase::Verified);
  }
}

TEST_CASE("claiming the flipped bit fails exactly the parity test") {
  const BcjlParams params{12, 6, 0.0, 1.4};
  RngStream rng(1001);
  const auto out = bcjl_run(params, 0, false, rng);
  CHECK_FALSE(out.accepted);
  CHECK(out.codeword_ok);
  CHECK(out.error_rate_ok);
  CHECK_FALSE(out.parity_ok);
  CHECK(out.transcript.phase() == Phase::Rejected);
}

TEST_CASE("bcjl_run is reproducible under a fixed seed") {
  const BcjlParams params{10, 4, 0.02, 1.4};
  RngStream a(77), b(77);
  const auto ra = bcjl_run(params, 1, true, a);
  const auto rb = bcjl_run(params, 1, true, b);
  CHECK(ra.transcript.to_text() == rb.transcript.to_text());
  CHECK(ra.measured == rb.measured);
  CHECK(ra.accepted == rb.accepted);
}

TEST_CASE("noisy acceptance rate matches the binomial-tail oracle") {
  const BcjlParams params{20, 3, 0.05, 1.4};
  RngStream rng(1002);
  const int trials = 300;
  int accepted = 0;
  for (int trial = 0; trial < trials; ++trial) {
    RngStream stream = rng.derive(trial);
    accepted += bcjl_run(params, trial & 1, true, stream).accepted;
  }

  const double predicted = oracles::binomial_accept_probability(20, 0.05, 1.4);
  const double rate = accepted / static_cast<double>(trials);
  const double sigma = std::sqrt(predicted * (1.0 - predicted) / trials);
  CHECK(std::abs(rate - predicted) < 4 * sigma);
}

TEST_CASE("infeasible code parameters fail with the triple named") {
  const BcjlParams params{20, 10, 0.05, 1.4};  // needs d ≥ 11 at rate 1/2
  RngStream rng(1003);
  CHECK_THROWS_WITH_AS(bcjl_run(params, 0, true, rng),
                       doctest::Contains("(20,10,d≥11)"), std::runtime_error);
}

TEST_CASE("concealment fidelity is high at small scale and η is reported") {
  const BcjlParams params{6, 3, 0.0, 1.4};
  RngStream rng(1004);
  const BitString r{1, 0, 1, 0, 1, 0};
  const auto [fid, eta] = bcjl_concealment(params, r, rng);
  CHECK(fid > 0.0);
  CHECK(fid <= 1.0);
  CHECK(eta == doctest::Approx(1.0 - fid));
  MESSAGE("BCJL concealment at (6,3): F = ", fid, ", eta = ", eta);
}

TEST_CASE("exact views reject an r orthogonal to the code") {
  codes::LinearCode code;
  code.n = 2;
  code.k = 1;
  code.rows = {0b11};
  CHECK_THROWS_AS(bcjl_reduced_pair(code, BitString{1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(bcjl_reduced_pair(code, BitString{0, 0}), std::invalid_argument);
}

// --- one-sided two-party computation ------------------------------------------------

TEST_CASE("constant functions leave Bob's output register at |0⟩") {
  const auto f = FunctionTable::constant(4, 4, 0);
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 4; ++y) {
      const StateVector out = two_party_protocol(f, x, y);
      // Output register is subsystem 2; outcome must be 0 with certainty.
      const Mat rho = reduced_density(out, {2}).matrix();
      CHECK(rho(0, 0).real() == doctest::Approx(1.0));
    }
}

TEST_CASE("the equality indicator fires exactly on the diagonal") {
  const auto f = FunctionTable::equality(4);
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 4; ++y) {
      const StateVector out = two_party_protocol(f, x, y);
      const Mat rho = reduced_density(out, {2}).matrix();
      const int expect = x == y ? 1 : 0;
      CHECK(rho(expect, expect).real() == doctest::Approx(1.0));
    }
}

TEST_CASE("Alice's reduced state is independent of y") {
  RngStream rng(2000);
  const auto f = FunctionTable::random(5, 7, 3, rng);
  for (int x = 0; x < 5; ++x) {
    const Mat base = reduced_density(two_party_protocol(f, x, 0), {0}).matrix();
    for (int y = 1; y < 7; ++y) {
      const Mat rho = reduced_density(two_party_protocol(f, x, y), {0}).matrix();
      CHECK((rho - base).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("function tables validate domains and values") {
  CHECK_THROWS_AS(FunctionTable(9, 4, 2, std::vector<int>(36, 0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(FunctionTable(2, 2, 2, std::vector<int>{0, 1, 2, 0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(FunctionTable(2, 2, 2, std::vector<int>{0, 1}),
                  std::invalid_argument);
  const auto f = FunctionTable::equality(3);
  CHECK_THROWS_AS(f.at(3, 0), std::invalid_argument);
}
