#include "qbc/kernels.hpp"

#include <algorithm>
#include <stdexcept>

namespace qbc::kernels {

namespace {

// Work threshold below which the dispatchers stay serial.
constexpr Dim kParallelWork = Dim{1} << 15;

void check_subset(std::span<const Dim> dims, std::span<const int> chosen) {
  int prev = -1;
  for (int s : chosen) {
    if (s <= prev)
      throw std::invalid_argument("subsystem subset must be strictly increasing");
    if (s < 0 || static_cast<std::size_t>(s) >= dims.size())
      throw std::invalid_argument("subsystem index out of range");
    prev = s;
  }
}

}  // namespace

SubsetTables subset_tables(std::span<const Dim> dims, std::span<const int> chosen) {
  check_subset(dims, chosen);
  const int n = static_cast<int>(dims.size());
  std::vector<Dim> stride(static_cast<std::size_t>(n), 1);
  for (int s = n - 2; s >= 0; --s)
    stride[static_cast<std::size_t>(s)] =
        stride[static_cast<std::size_t>(s + 1)] * dims[static_cast<std::size_t>(s + 1)];

  SubsetTables t;
  t.chosen_off = {0};
  t.env_off = {0};
  std::size_t ci = 0;
  for (int s = 0; s < n; ++s) {
    const bool in_chosen = ci < chosen.size() && chosen[ci] == s;
    auto& offsets = in_chosen ? t.chosen_off : t.env_off;
    auto& total = in_chosen ? t.chosen_dim : t.env_dim;
    const Dim d = dims[static_cast<std::size_t>(s)];
    std::vector<Dim> next;
    next.reserve(offsets.size() * static_cast<std::size_t>(d));
    for (Dim base : offsets)
      for (Dim v = 0; v < d; ++v)
        next.push_back(base + v * stride[static_cast<std::size_t>(s)]);
    offsets = std::move(next);
    total *= d;
    if (in_chosen) ++ci;
  }
  return t;
}

// --- tensor product ---------------------------------------------------------

namespace {
template <bool Parallel>
Vec tensor_product_impl(const Vec& a, const Vec& b) {
  const Dim da = a.size(), db = b.size();
  Vec out(da * db);
#pragma omp parallel for if (Parallel)
  for (Dim i = 0; i < da; ++i) {
    const cplx ai = a[i];
    for (Dim j = 0; j < db; ++j) out[i * db + j] = ai * b[j];
  }
  return out;
}
}  // namespace

Vec tensor_product_serial(const Vec& a, const Vec& b) {
  return tensor_product_impl<false>(a, b);
}
Vec tensor_product_omp(const Vec& a, const Vec& b) {
  return tensor_product_impl<true>(a, b);
}
Vec tensor_product(const Vec& a, const Vec& b) {
  return a.size() * b.size() >= kParallelWork ? tensor_product_omp(a, b)
                                              : tensor_product_serial(a, b);
}

// --- apply operator on a target subset --------------------------------------

namespace {
template <bool Parallel>
Vec apply_on_targets_impl(const Vec& psi, std::span<const Dim> dims,
                          std::span<const int> targets, const Mat& op) {
  const SubsetTables t = subset_tables(dims, targets);
  if (op.rows() != op.cols() || op.rows() != t.chosen_dim)
    throw std::invalid_argument("operator dimension does not match targets");
  if (psi.size() != t.chosen_dim * t.env_dim)
    throw std::invalid_argument("state length does not match dims");

  const Dim T = t.chosen_dim, E = t.env_dim;
  Vec out(psi.size());
#pragma omp parallel if (Parallel)
  {
    Vec x(T), y(T);
#pragma omp for
    for (Dim e = 0; e < E; ++e) {
      const Dim base = t.env_off[static_cast<std::size_t>(e)];
      for (Dim i = 0; i < T; ++i)
        x[i] = psi[t.chosen_off[static_cast<std::size_t>(i)] + base];
      y.noalias() = op * x;
      for (Dim i = 0; i < T; ++i)
        out[t.chosen_off[static_cast<std::size_t>(i)] + base] = y[i];
    }
  }
  return out;
}
}  // namespace

Vec apply_on_targets_serial(const Vec& psi, std::span<const Dim> dims,
                            std::span<const int> targets, const Mat& op) {
  return apply_on_targets_impl<false>(psi, dims, targets, op);
}
Vec apply_on_targets_omp(const Vec& psi, std::span<const Dim> dims,
                         std::span<const int> targets, const Mat& op) {
  return apply_on_targets_impl<true>(psi, dims, targets, op);
}
Vec apply_on_targets(const Vec& psi, std::span<const Dim> dims,
                     std::span<const int> targets, const Mat& op) {
  const Dim work = psi.size() * op.rows();
  return work >= kParallelWork ? apply_on_targets_omp(psi, dims, targets, op)
                               : apply_on_targets_serial(psi, dims, targets, op);
}

// --- reduced density matrix from a pure state -------------------------------

namespace {
template <bool Parallel>
Mat reduced_density_impl(const Vec& psi, std::span<const Dim> dims,
                         std::span<const int> keep) {
  const SubsetTables t = subset_tables(dims, keep);
  if (psi.size() != t.chosen_dim * t.env_dim)
    throw std::invalid_argument("state length does not match dims");

  const Dim K = t.chosen_dim, E = t.env_dim;
  Mat out(K, K);
#pragma omp parallel for if (Parallel)
  for (Dim i = 0; i < K; ++i) {
    const Dim oi = t.chosen_off[static_cast<std::size_t>(i)];
    for (Dim j = 0; j <= i; ++j) {
      const Dim oj = t.chosen_off[static_cast<std::size_t>(j)];
      cplx acc{0.0, 0.0};
      for (Dim e = 0; e < E; ++e) {
        const Dim oe = t.env_off[static_cast<std::size_t>(e)];
        acc += psi[oi + oe] * std::conj(psi[oj + oe]);
      }
      out(i, j) = acc;
      if (i != j) out(j, i) = std::conj(acc);
    }
  }
  return out;
}
}  // namespace

Mat reduced_density_serial(const Vec& psi, std::span<const Dim> dims,
                           std::span<const int> keep) {
  return reduced_density_impl<false>(psi, dims, keep);
}
Mat reduced_density_omp(const Vec& psi, std::span<const Dim> dims,
                        std::span<const int> keep) {
  return reduced_density_impl<true>(psi, dims, keep);
}
Mat reduced_density(const Vec& psi, std::span<const Dim> dims,
                    std::span<const int> keep) {
  const SubsetTables t = subset_tables(dims, keep);
  const Dim work = t.chosen_dim * t.chosen_dim * t.env_dim;
  return work >= kParallelWork ? reduced_density_omp(psi, dims, keep)
                               : reduced_density_serial(psi, dims, keep);
}

// --- partial trace of a density matrix --------------------------------------

namespace {
template <bool Parallel>
Mat partial_trace_impl(const Mat& rho, std::span<const Dim> dims,
                       std::span<const int> keep) {
  const SubsetTables t = subset_tables(dims, keep);
  if (rho.rows() != rho.cols() || rho.rows() != t.chosen_dim * t.env_dim)
    throw std::invalid_argument("matrix dimension does not match dims");

  const Dim K = t.chosen_dim, E = t.env_dim;
  Mat out(K, K);
#pragma omp parallel for if (Parallel)
  for (Dim i = 0; i < K; ++i) {
    const Dim oi = t.chosen_off[static_cast<std::size_t>(i)];
    for (Dim j = 0; j < K; ++j) {
      const Dim oj = t.chosen_off[static_cast<std::size_t>(j)];
      cplx acc{0.0, 0.0};
      for (Dim e = 0; e < E; ++e) {
        const Dim oe = t.env_off[static_cast<std::size_t>(e)];
        acc += rho(oi + oe, oj + oe);
      }
      out(i, j) = acc;
    }
  }
  return out;
}
}  // namespace

Mat partial_trace_serial(const Mat& rho, std::span<const Dim> dims,
                         std::span<const int> keep) {
  return partial_trace_impl<false>(rho, dims, keep);
}
Mat partial_trace_omp(const Mat& rho, std::span<const Dim> dims,
                      std::span<const int> keep) {
  return partial_trace_impl<true>(rho, dims, keep);
}
Mat partial_trace(const Mat& rho, std::span<const Dim> dims,
                  std::span<const int> keep) {
  const SubsetTables t = subset_tables(dims, keep);
  const Dim work = t.chosen_dim * t.chosen_dim * t.env_dim;
  return work >= kParallelWork ? partial_trace_omp(rho, dims, keep)
                               : partial_trace_serial(rho, dims, keep);
}

// --- subsystem permutation ---------------------------------------------------

namespace {
template <bool Parallel>
Vec permute_impl(const Vec& psi, std::span<const Dim> dims,
                 std::span<const int> perm) {
  const int n = static_cast<int>(dims.size());
  if (static_cast<int>(perm.size()) != n)
    throw std::invalid_argument("permutation length does not match dims");
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (int p : perm) {
    if (p < 0 || p >= n || seen[static_cast<std::size_t>(p)])
      throw std::invalid_argument("invalid subsystem permutation");
    seen[static_cast<std::size_t>(p)] = true;
  }

  std::vector<Dim> old_stride(static_cast<std::size_t>(n), 1);
  for (int s = n - 2; s >= 0; --s)
    old_stride[static_cast<std::size_t>(s)] =
        old_stride[static_cast<std::size_t>(s + 1)] * dims[static_cast<std::size_t>(s + 1)];

  // new_dims[i] = dims[perm[i]]; decode output index, re-encode with old strides.
  std::vector<Dim> new_dim(static_cast<std::size_t>(n));
  std::vector<Dim> src_stride(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    new_dim[static_cast<std::size_t>(i)] = dims[static_cast<std::size_t>(perm[i])];
    src_stride[static_cast<std::size_t>(i)] = old_stride[static_cast<std::size_t>(perm[i])];
  }

  const Dim total = psi.size();
  Vec out(total);
#pragma omp parallel for if (Parallel)
  for (Dim idx = 0; idx < total; ++idx) {
    Dim rest = idx, src = 0;
    for (int i = n - 1; i >= 0; --i) {
      const Dim d = new_dim[static_cast<std::size_t>(i)];
      src += (rest % d) * src_stride[static_cast<std::size_t>(i)];
      rest /= d;
    }
    out[idx] = psi[src];
  }
  return out;
}
}  // namespace

Vec permute_serial(const Vec& psi, std::span<const Dim> dims,
                   std::span<const int> perm) {
  return permute_impl<false>(psi, dims, perm);
}
Vec permute_omp(const Vec& psi, std::span<const Dim> dims,
                std::span<const int> perm) {
  return permute_impl<true>(psi, dims, perm);
}
Vec permute(const Vec& psi, std::span<const Dim> dims,
            std::span<const int> perm) {
  return psi.size() >= kParallelWork ? permute_omp(psi, dims, perm)
                                     : permute_serial(psi, dims, perm);
}

// --- dense embedding ---------------------------------------------------------

Mat embed_on_targets(std::span<const Dim> dims, std::span<const int> targets,
                     const Mat& op) {
  const SubsetTables t = subset_tables(dims, targets);
  if (op.rows() != op.cols() || op.rows() != t.chosen_dim)
    throw std::invalid_argument("operator dimension does not match targets");
  const Dim total = t.chosen_dim * t.env_dim;
  Mat out = Mat::Zero(total, total);
  for (Dim i = 0; i < t.chosen_dim; ++i)
    for (Dim j = 0; j < t.chosen_dim; ++j) {
      const cplx v = op(i, j);
      if (v == cplx{0.0, 0.0}) continue;
      for (Dim e = 0; e < t.env_dim; ++e) {
        const Dim oe = t.env_off[static_cast<std::size_t>(e)];
        out(t.chosen_off[static_cast<std::size_t>(i)] + oe,
            t.chosen_off[static_cast<std::size_t>(j)] + oe) = v;
      }
    }
  return out;
}

}  // namespace qbc::kernels
