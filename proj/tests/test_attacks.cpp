#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "qbc/attacks.hpp"
#include "qbc/protocols.hpp"
#include "qbc/qmath.hpp"
#include "qbc/rng.hpp"
#include "support/oracles.hpp"

using namespace qbc;
using namespace qbc::attacks;
using qbc::protocols::BcjlParams;
using qbc::protocols::Owner;
using qbc::protocols::Party;
using qbc::protocols::ScriptStep;
using qbc::protocols::UnitaryScript;

namespace {

// Final states of a script, permuted so Alice's end-of-commit registers
// come first; returns (psi0, psi1, cut).
struct FinalPair {
  StateVector psi0;
  StateVector psi1;
  int cut;
};

FinalPair final_pair(const UnitaryScript& script) {
  const auto run0 = protocols::script_execute(script, 0);
  const auto run1 = protocols::script_execute(script, 1);
  std::vector<int> perm;
  for (int r = 0; r < script.register_count(); ++r)
    if (run0.owners[static_cast<std::size_t>(r)] == Owner::Alice) perm.push_back(r);
  const int cut = static_cast<int>(perm.size());
  for (int r = 0; r < script.register_count(); ++r)
    if (run0.owners[static_cast<std::size_t>(r)] != Owner::Alice) perm.push_back(r);
  return {permute_subsystems(run0.state, perm), permute_subsystems(run1.state, perm),
          cut};
}

}  // namespace

// --- ideal cheat ---------------------------------------------------------------

TEST_CASE("identical finals need only the identity") {
  RngStream rng(1);
  const StateVector psi = random_state({4, 3}, rng);
  const UnitaryOp u = ideal_cheat_unitary(psi, psi, 1);
  CHECK(phase_aligned_distance(apply_local(u, psi, 1, Side::A), psi) < 1e-10);
}

TEST_CASE("a scheme that transmits nothing is perfectly flippable") {
  // Alice keeps everything; Bob's state is bit-independent.
  RngStream rng(2);
  const StateVector a0 = random_state({2, 2}, rng);
  const StateVector a1 = random_state({2, 2}, rng);
  const StateVector bv = random_state({2}, rng);
  const StateVector final0 = tensor(a0, bv);
  const StateVector final1 = tensor(a1, bv);

  const UnitaryOp u = ideal_cheat_unitary(final0, final1, 2);
  CHECK(phase_aligned_distance(apply_local(u, final0, 2, Side::A), final1) < 1e-8);
  CHECK(std::abs(overlap(final1, apply_local(u, final0, 2, Side::A))) >
        1.0 - 1e-10);
}

TEST_CASE("constructed concealing scripts are flipped exactly") {
  RngStream rng(3);
  for (int trial = 0; trial < 15; ++trial) {
    RngStream stream = rng.derive(trial);
    const auto script = protocols::make_concealing_script(1 + trial % 2,
                                                          1 + (trial / 2) % 2, stream);
    const auto [psi0, psi1, cut] = final_pair(script);
    const UnitaryOp u = ideal_cheat_unitary(psi0, psi1, cut);
    const StateVector mapped = apply_local(u, psi0, cut, Side::A);
    CHECK(std::abs(overlap(psi1, mapped)) > 1.0 - 1e-8);
  }
}

TEST_CASE("degenerate Schmidt spectra are handled block by block") {
  // Alice keeps one half of a maximally entangled pair: λ = (1/2, 1/2).
  RngStream rng(4);
  Vec bell = Vec::Zero(4);
  bell[0] = bell[3] = 1.0 / std::sqrt(2.0);
  const StateVector a0(bell, {2, 2});
  // a1: the same entangled pair rotated by a kept-side unitary.
  const UnitaryOp v = random_unitary(2, rng);
  StateVector a1 = a0;
  {
    const Mat full = Mat::Identity(4, 4);
    (void)full;
    a1 = apply_local(v, a0, 1, Side::A);
  }
  std::vector<ScriptStep> steps;
  steps.push_back({Party::Alice, UnitaryOp::identity(4), {{1, Owner::Bob}}});
  const UnitaryScript script(a0, a1, StateVector::basis({2}, 0), std::move(steps));

  const auto [psi0, psi1, cut] = final_pair(script);
  REQUIRE(cut == 1);
  const UnitaryOp u = ideal_cheat_unitary(psi0, psi1, cut);
  CHECK(std::abs(overlap(psi1, apply_local(u, psi0, cut, Side::A))) > 1.0 - 1e-8);
}

TEST_CASE("unequal reduced matrices are rejected and redirected") {
  RngStream rng(5);
  const StateVector psi0 = random_state({3, 3}, rng);
  const StateVector psi1 = random_state({3, 3}, rng);
  CHECK_THROWS_WITH_AS(ideal_cheat_unitary(psi0, psi1, 1),
                       doctest::Contains("optimal_cheat_unitary"),
                       std::invalid_argument);
}

// --- optimal cheat ---------------------------------------------------------------

TEST_CASE("equal reduced matrices give overlap 1") {
  RngStream rng(6);
  const auto script = protocols::make_concealing_script(2, 1, rng);
  const auto [psi0, psi1, cut] = final_pair(script);
  const auto [u, report] = optimal_cheat_unitary(psi0, psi1, cut);
  CHECK(report.fidelity == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(report.achieved_overlap == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(report.delta == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("a fully revealing scheme cannot be flipped") {
  // Alice sends |b⟩ outright.
  const StateVector a0 = StateVector::basis({2}, 0);
  const StateVector a1 = StateVector::basis({2}, 1);
  std::vector<ScriptStep> steps;
  steps.push_back({Party::Alice, UnitaryOp::identity(2), {{0, Owner::Bob}}});
  const UnitaryScript script(a0, a1, StateVector::basis({2}, 0), std::move(steps));

  const auto report = run_commitment_attack(script);
  CHECK(report.fidelity == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(report.achieved_overlap == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(report.detection_probability == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("BB84-style single-qubit commitment: overlap equals fidelity") {
  const auto script = protocols::make_bb84_commit_script();
  const auto [psi0, psi1, cut] = final_pair(script);
  const auto [u, report] = optimal_cheat_unitary(psi0, psi1, cut);

  // Independent route: fidelity of Bob's reduced matrices.
  const DensityMatrix rho0 = reduced_density(psi0, {1, 2});
  const DensityMatrix rho1 = reduced_density(psi1, {1, 2});
  const double f = fidelity(rho0, rho1);
  CHECK(std::abs(report.achieved_overlap - f) < 1e-8);
  CHECK(report.fidelity == doctest::Approx(f).epsilon(1e-12));
}

TEST_CASE("the overlap never exceeds the fidelity") {
  RngStream rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    RngStream stream = rng.derive(trial);
    const StateVector psi0 = random_state({4, 4}, stream);
    const StateVector psi1 = random_state({4, 4}, stream);
    const auto [u, report] = optimal_cheat_unitary(psi0, psi1, 1);
    CHECK(report.achieved_overlap <= report.fidelity + 1e-8);
    CHECK(std::abs(report.achieved_overlap - report.fidelity) < 1e-8);
    CHECK(report.acceptance_probability ==
          doctest::Approx(report.achieved_overlap * report.achieved_overlap));
    CHECK(report.delta == doctest::Approx(1.0 - report.fidelity));
  }
}

TEST_CASE("the cheat acts locally: Bob's view is unchanged before opening") {
  RngStream rng(8);
  const StateVector psi0 = random_state({4, 8}, rng);
  const StateVector psi1 = random_state({4, 8}, rng);
  const auto [u, report] = optimal_cheat_unitary(psi0, psi1, 1);
  const StateVector rotated = apply_local(u, psi0, 1, Side::A);
  const Mat before = reduced_density(psi0, {1}).matrix();
  const Mat after = reduced_density(rotated, {1}).matrix();
  CHECK((before - after).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("attack report serializes to key=value lines") {
  AttackReport r;
  r.fidelity = 0.5;
  r.delta = 0.5;
  r.achieved_overlap = 0.5;
  r.acceptance_probability = 0.25;
  r.detection_probability = 0.75;
  r.u_dim = 4;
  const std::string kv = r.to_kv();
  CHECK(kv.find("fidelity=0.5\n") != std::string::npos);
  CHECK(kv.find("acceptance_probability=0.25\n") != std::string::npos);
  CHECK(kv.find("u_dim=4\n") != std::string::npos);
}

// --- full commitment attack --------------------------------------------------------

TEST_CASE("a concealing script is attacked with certain acceptance") {
  RngStream rng(9);
  const auto script = protocols::make_concealing_script(2, 1, rng);
  const auto report = run_commitment_attack(script);
  CHECK(report.acceptance_probability > 1.0 - 1e-8);
}

TEST_CASE("random 3-qubit scripts: acceptance equals fidelity squared") {
  RngStream rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    RngStream stream = rng.derive(trial);
    const auto script = protocols::make_random_script(2, 1, stream);
    const auto report = run_commitment_attack(script);
    CHECK(std::abs(report.achieved_overlap - report.fidelity) < 1e-6);
    CHECK(std::abs(report.acceptance_probability -
                   report.fidelity * report.fidelity) < 1e-6);
  }
}

TEST_CASE("detection shrinks as the scheme becomes more concealing") {
  std::vector<double> fidelities, detections;
  for (int p = 0; p <= 8; ++p) {
    const double theta = (3.14159265358979 / 2.0) * p / 8.0;
    const auto report =
        run_commitment_attack(protocols::make_interpolating_script(theta));
    fidelities.push_back(report.fidelity);
    detections.push_back(report.detection_probability);
    CHECK(report.fidelity == doctest::Approx(std::cos(theta)).epsilon(1e-8));
  }
  for (std::size_t i = 1; i < fidelities.size(); ++i) {
    // θ ascending → fidelity descending → detection ascending.
    CHECK(fidelities[i] <= fidelities[i - 1] + 1e-12);
    CHECK(detections[i] >= detections[i - 1] - 1e-12);
  }
}

// --- BCJL delayed-choice attack -----------------------------------------------------

TEST_CASE("the EPR attack overlap equals the fidelity of Bob's exact views") {
  const BcjlParams params{3, 2, 0.0, 1.4};
  RngStream rng(1);
  const BitString r{1, 1, 1};
  const auto attack = bcjl_epr_attack(params, r, rng);

  // Joint-state route.
  const DensityMatrix joint0 = reduced_density(attack.committed, {2, 3, 4});
  const DensityMatrix joint1 = reduced_density(attack.honest_target, {2, 3, 4});

  // Independent product-form construction of the same views.
  const auto [prod0, prod1] = protocols::bcjl_reduced_pair(attack.code, r);
  CHECK((joint0.matrix() - prod0.matrix()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((joint1.matrix() - prod1.matrix()).cwiseAbs().maxCoeff() < 1e-12);

  const double f = fidelity(prod0, prod1);
  CHECK(std::abs(attack.report.achieved_overlap - f) < 1e-8);
  CHECK(std::abs(attack.report.acceptance_probability - f * f) < 1e-8);
}

TEST_CASE("EPR attack validates r") {
  const BcjlParams params{3, 2, 0.0, 1.4};
  RngStream rng(12);
  CHECK_THROWS_AS(bcjl_epr_attack(params, BitString{0, 0, 0}, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(bcjl_epr_attack(params, BitString{1, 1}, rng),
                  std::invalid_argument);
}

TEST_CASE("EPR attack names its caps") {
  RngStream rng(13);
  CHECK_THROWS_WITH_AS(bcjl_epr_attack(BcjlParams{11, 2, 0.0, 1.4}, rng),
                       doctest::Contains("n ≤ 10"), CapViolation);
  CHECK_THROWS_WITH_AS(bcjl_epr_attack(BcjlParams{7, 6, 0.0, 1.4}, rng),
                       doctest::Contains("matrix cap"), CapViolation);
}

TEST_CASE("opening the committed bit always passes at ε = 0") {
  const BcjlParams params{4, 2, 0.0, 1.4};
  RngStream rng(14);
  const auto attack = bcjl_epr_attack(params, rng);
  for (int t = 0; t < 200; ++t) {
    RngStream stream = rng.derive(t);
    CHECK(bcjl_epr_open_trial(attack, 0, stream));
  }
}

TEST_CASE("opening the flipped bit passes at least as often as the projector accepts") {
  // Bob's three Step-7 tests are weaker than the honest-state projector, so
  // the Monte Carlo rate dominates acceptance_probability = F².
  const BcjlParams params{4, 3, 0.0, 1.4};
  RngStream rng(15);
  const auto attack = bcjl_epr_attack(params, rng);
  const int trials = 1500;
  int passed = 0;
  for (int t = 0; t < trials; ++t) {
    RngStream stream = rng.derive(t);
    passed += bcjl_epr_open_trial(attack, 1, stream);
  }
  const double rate = passed / static_cast<double>(trials);
  const double p = attack.report.acceptance_probability;
  const double sigma = std::sqrt(std::max(p * (1 - p), 1e-6) / trials);
  CHECK(rate >= p - 4 * sigma);
  MESSAGE("EPR open(1): projector acceptance = ", p, ", three-test rate = ", rate);
}

// --- two-party attack -----------------------------------------------------------------

TEST_CASE("the equality table leaks Alice's input completely") {
  const auto f = protocols::FunctionTable::equality(8);
  for (int x = 0; x < 8; ++x) {
    const auto row = two_party_attack(f, x, 0);
    REQUIRE(row.size() == 8);
    for (const auto& [y, value] : row) CHECK(value == (y == x ? 1 : 0));
  }
}

TEST_CASE("constant functions leak nothing") {
  const auto f = protocols::FunctionTable::constant(4, 4, 0);
  for (int x = 0; x < 4; ++x) {
    const auto row = two_party_attack(f, x, 2);
    for (const auto& [y, value] : row) CHECK(value == 0);
  }
}

TEST_CASE("random tables are recovered row by row") {
  RngStream rng(16);
  const auto f = protocols::FunctionTable::random(4, 4, 3, rng);
  for (int x = 0; x < 4; ++x) {
    auto row = two_party_attack(f, x, 1);
    std::sort(row.begin(), row.end());
    for (int y = 0; y < 4; ++y) {
      CHECK(row[static_cast<std::size_t>(y)].first == y);
      CHECK(row[static_cast<std::size_t>(y)].second == f.at(x, y));
    }
  }
}

TEST_CASE("the attack starts from any y and visits every value once") {
  const auto f = protocols::FunctionTable::equality(5);
  const auto row = two_party_attack(f, 2, 4);
  CHECK(row.front().first == 4);
  std::vector<bool> seen(5, false);
  for (const auto& [y, value] : row) {
    CHECK_FALSE(seen[static_cast<std::size_t>(y)]);
    seen[static_cast<std::size_t>(y)] = true;
  }
}
