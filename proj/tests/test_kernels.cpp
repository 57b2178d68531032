#include <doctest.h>

#include "qbc/kernels.hpp"
#include "qbc/qmath.hpp"
#include "qbc/rng.hpp"
#include "support/oracles.hpp"

using namespace qbc;

namespace {

Vec random_amps(Dim n, RngStream& rng) {
  Vec v(n);
  for (Dim i = 0; i < n; ++i) v[i] = cplx{rng.gaussian(), rng.gaussian()};
  return v / v.norm();
}

}  // namespace

TEST_CASE("subset tables enumerate mixed-radix offsets") {
  const DimList dims{2, 3, 2};
  const std::vector<int> chosen{0, 2};
  const auto t = kernels::subset_tables(dims, chosen);
  CHECK(t.chosen_dim == 4);
  CHECK(t.env_dim == 3);
  // strides: {6, 2, 1}; chosen offsets over (s0, s2): 0,1,6,7; env over s1: 0,2,4
  CHECK(t.chosen_off == std::vector<Dim>{0, 1, 6, 7});
  CHECK(t.env_off == std::vector<Dim>{0, 2, 4});
}

TEST_CASE("subset tables reject bad subsets") {
  const DimList dims{2, 2};
  CHECK_THROWS(kernels::subset_tables(dims, std::vector<int>{1, 0}));
  CHECK_THROWS(kernels::subset_tables(dims, std::vector<int>{0, 0}));
  CHECK_THROWS(kernels::subset_tables(dims, std::vector<int>{2}));
}

TEST_CASE("serial and OpenMP kernel variants are bit-identical") {
  RngStream rng(20240611);
  const DimList dims{2, 3, 2, 2, 3};
  const Vec psi = random_amps(product_dim(dims), rng);

  SUBCASE("tensor product") {
    const Vec b = random_amps(5, rng);
    const Vec s = kernels::tensor_product_serial(psi, b);
    const Vec p = kernels::tensor_product_omp(psi, b);
    CHECK(s == p);
  }
  SUBCASE("apply on targets") {
    const UnitaryOp u = random_unitary(6, rng);
    const std::vector<int> targets{1, 3};
    const Vec s = kernels::apply_on_targets_serial(psi, dims, targets, u.matrix());
    const Vec p = kernels::apply_on_targets_omp(psi, dims, targets, u.matrix());
    CHECK(s == p);
  }
  SUBCASE("reduced density") {
    const std::vector<int> keep{0, 4};
    const Mat s = kernels::reduced_density_serial(psi, dims, keep);
    const Mat p = kernels::reduced_density_omp(psi, dims, keep);
    CHECK(s == p);
  }
  SUBCASE("partial trace") {
    const Mat rho = psi * psi.adjoint();
    const std::vector<int> keep{1, 2};
    const Mat s = kernels::partial_trace_serial(rho, dims, keep);
    const Mat p = kernels::partial_trace_omp(rho, dims, keep);
    CHECK(s == p);
  }
  SUBCASE("permute") {
    const std::vector<int> perm{4, 2, 0, 1, 3};
    const Vec s = kernels::permute_serial(psi, dims, perm);
    const Vec p = kernels::permute_omp(psi, dims, perm);
    CHECK(s == p);
  }
}

TEST_CASE("apply_on_targets agrees with the dense embedding") {
  RngStream rng(7);
  const DimList dims{2, 2, 3};
  const Vec psi = random_amps(12, rng);
  const UnitaryOp u = random_unitary(6, rng);
  const std::vector<int> targets{1, 2};

  const Vec fast = kernels::apply_on_targets(psi, dims, targets, u.matrix());
  const Mat dense = kernels::embed_on_targets(dims, targets, u.matrix());
  const Vec slow = dense * psi;
  CHECK((fast - slow).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("reduced_density matches partial_trace of the projector") {
  RngStream rng(11);
  const DimList dims{3, 2, 2};
  const Vec psi = random_amps(12, rng);
  const Mat rho = psi * psi.adjoint();
  const std::vector<int> keep{0, 2};

  const Mat a = kernels::reduced_density(psi, dims, keep);
  const Mat b = kernels::partial_trace(rho, dims, keep);
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("permute round-trips through its inverse") {
  RngStream rng(13);
  const DimList dims{2, 3, 4};
  const Vec psi = random_amps(24, rng);
  const std::vector<int> perm{2, 0, 1};
  const DimList permuted_dims{4, 2, 3};
  std::vector<int> inverse(3);
  for (int i = 0; i < 3; ++i) inverse[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = i;

  const Vec once = kernels::permute(psi, dims, perm);
  const Vec back = kernels::permute(once, permuted_dims, inverse);
  CHECK((back - psi).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("permute moves amplitudes where expected") {
  // |01⟩ on dims {2,2} → swap → |10⟩.
  Vec psi = Vec::Zero(4);
  psi[1] = 1.0;
  const DimList dims{2, 2};
  const Vec swapped = kernels::permute(psi, dims, std::vector<int>{1, 0});
  CHECK(swapped[2] == cplx{1.0, 0.0});
}
