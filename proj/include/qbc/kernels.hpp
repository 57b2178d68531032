#ifndef QBC_KERNELS_HPP
#define QBC_KERNELS_HPP

#include <span>

#include "qbc/types.hpp"

namespace qbc::kernels {

// Dense multi-subsystem kernels. Every kernel comes in two variants:
//
//   *_serial  — reference implementation, plain loops;
//   *_omp     — OpenMP variant that distributes whole output elements
//               across threads.
//
// Each output element is produced by the same self-contained inner loop in
// both variants, so the two are bit-identical for any thread count; the
// test suite asserts exact equality. The unsuffixed name dispatches on
// problem size.
//
// Index conventions: subsystem 0 is the slowest index (the left tensor
// factor). An operator acting on a target list refers to targets in
// ascending subsystem order, first target slowest.

/// Flat-index contribution tables for a subset of subsystems and its
/// complement: flat = chosen_off[i] + env_off[e].
struct SubsetTables {
  Dim chosen_dim = 1;
  Dim env_dim = 1;
  std::vector<Dim> chosen_off;
  std::vector<Dim> env_off;
};

SubsetTables subset_tables(std::span<const Dim> dims, std::span<const int> chosen);

Vec tensor_product_serial(const Vec& a, const Vec& b);
Vec tensor_product_omp(const Vec& a, const Vec& b);
Vec tensor_product(const Vec& a, const Vec& b);

/// (op ⊗ 1_env) |psi>, with op addressing `targets`.
Vec apply_on_targets_serial(const Vec& psi, std::span<const Dim> dims,
                            std::span<const int> targets, const Mat& op);
Vec apply_on_targets_omp(const Vec& psi, std::span<const Dim> dims,
                         std::span<const int> targets, const Mat& op);
Vec apply_on_targets(const Vec& psi, std::span<const Dim> dims,
                     std::span<const int> targets, const Mat& op);

/// Reduced density matrix of |psi><psi| on the kept subsystems, formed
/// without materialising the full projector.
Mat reduced_density_serial(const Vec& psi, std::span<const Dim> dims,
                           std::span<const int> keep);
Mat reduced_density_omp(const Vec& psi, std::span<const Dim> dims,
                        std::span<const int> keep);
Mat reduced_density(const Vec& psi, std::span<const Dim> dims,
                    std::span<const int> keep);

Mat partial_trace_serial(const Mat& rho, std::span<const Dim> dims,
                         std::span<const int> keep);
Mat partial_trace_omp(const Mat& rho, std::span<const Dim> dims,
                      std::span<const int> keep);
Mat partial_trace(const Mat& rho, std::span<const Dim> dims,
                  std::span<const int> keep);

/// Reorder subsystems; perm[new_position] = old_subsystem.
Vec permute_serial(const Vec& psi, std::span<const Dim> dims,
                   std::span<const int> perm);
Vec permute_omp(const Vec& psi, std::span<const Dim> dims,
                std::span<const int> perm);
Vec permute(const Vec& psi, std::span<const Dim> dims,
            std::span<const int> perm);

/// Dense matrix of (op ⊗ 1_env) in the full space.
Mat embed_on_targets(std::span<const Dim> dims, std::span<const int> targets,
                     const Mat& op);

}  // namespace qbc::kernels

#endif
