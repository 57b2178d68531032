#include "support/oracles.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace qbc::oracles {

Mat naive_partial_trace(const Mat& rho, const DimList& dims,
                        const std::vector<int>& keep) {
  const int n = static_cast<int>(dims.size());
  std::vector<bool> kept(static_cast<std::size_t>(n), false);
  for (int s : keep) kept[static_cast<std::size_t>(s)] = true;

  Dim keep_dim = 1, env_dim = 1;
  for (int s = 0; s < n; ++s)
    (kept[static_cast<std::size_t>(s)] ? keep_dim : env_dim) *=
        dims[static_cast<std::size_t>(s)];

  // Build a full index from (kept digits, env digits), most significant first.
  auto flat_index = [&](Dim kv, Dim ev) {
    std::vector<Dim> digit(static_cast<std::size_t>(n));
    for (int s = n - 1; s >= 0; --s) {
      const Dim d = dims[static_cast<std::size_t>(s)];
      if (kept[static_cast<std::size_t>(s)]) {
        digit[static_cast<std::size_t>(s)] = kv % d;
        kv /= d;
      } else {
        digit[static_cast<std::size_t>(s)] = ev % d;
        ev /= d;
      }
    }
    Dim idx = 0;
    for (int s = 0; s < n; ++s)
      idx = idx * dims[static_cast<std::size_t>(s)] + digit[static_cast<std::size_t>(s)];
    return idx;
  };

  Mat out = Mat::Zero(keep_dim, keep_dim);
  for (Dim i = 0; i < keep_dim; ++i)
    for (Dim j = 0; j < keep_dim; ++j)
      for (Dim e = 0; e < env_dim; ++e)
        out(i, j) += rho(flat_index(i, e), flat_index(j, e));
  return out;
}

namespace {

// Modified Gram-Schmidt, run twice; keeps the search retraction independent
// of the library's decomposition code.
Mat gram_schmidt(Mat m) {
  const Dim d = m.cols();
  for (int pass = 0; pass < 2; ++pass)
    for (Dim j = 0; j < d; ++j) {
      for (Dim i = 0; i < j; ++i) m.col(j) -= m.col(i).dot(m.col(j)) * m.col(i);
      const double norm = m.col(j).norm();
      if (norm < 1e-12) throw std::runtime_error("degenerate retraction");
      m.col(j) /= norm;
    }
  return m;
}

// Fixed purification of rho as a system × ancilla amplitude matrix.
Mat purification_matrix(const Mat& rho) {
  Eigen::SelfAdjointEigenSolver<Mat> es(rho);
  const RVec lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * lam.asDiagonal();
}

}  // namespace

double purification_search_fidelity(const Mat& rho0, const Mat& rho1, RngStream& rng,
                                    int restarts, int iterations) {
  const Dim d = rho0.rows();
  const Mat g = purification_matrix(rho0).adjoint() * purification_matrix(rho1);

  // overlap(U) = |Σ_{k,k'} U(k,k') G(k,k')|; ascend along the projection of
  // the Euclidean gradient onto the tangent space of U(d), with a
  // Gram-Schmidt retraction and backtracking steps.
  auto value = [&](const Mat& u) {
    return std::abs((g.array() * u.array()).sum());
  };

  double best = 0.0;
  for (int restart = 0; restart < restarts; ++restart) {
    Mat u(d, d);
    for (Dim i = 0; i < d; ++i)
      for (Dim j = 0; j < d; ++j) u(i, j) = cplx{rng.gaussian(), rng.gaussian()};
    u = gram_schmidt(std::move(u));

    double step = 0.5;
    double cur = value(u);
    for (int it = 0; it < iterations && step > 1e-13; ++it) {
      const cplx h = (g.array() * u.array()).sum();
      const Mat grad = h * g.conjugate();
      const Mat sym = 0.5 * (u.adjoint() * grad + grad.adjoint() * u);
      Mat dir = grad - u * sym;  // tangent component
      const double dn = dir.norm();
      if (dn < 1e-14) {
        // Critical point; nudge away in case it is a saddle.
        for (Dim i = 0; i < d; ++i)
          for (Dim j = 0; j < d; ++j)
            dir(i, j) = 1e-3 * cplx{rng.gaussian(), rng.gaussian()};
      } else {
        dir /= dn;
      }
      const Mat trial = gram_schmidt(u + step * dir);
      const double tv = value(trial);
      if (tv > cur) {
        u = trial;
        cur = tv;
        step *= 1.3;
      } else {
        step *= 0.5;
      }
    }
    best = std::max(best, cur);
  }
  return best;
}

double binomial_accept_probability(int n, double epsilon, double threshold_factor) {
  // Pascal triangle up to n.
  std::vector<std::vector<double>> choose(static_cast<std::size_t>(n + 1));
  for (int i = 0; i <= n; ++i) {
    choose[static_cast<std::size_t>(i)].assign(static_cast<std::size_t>(i + 1), 1.0);
    for (int j = 1; j < i; ++j)
      choose[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          choose[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)] +
          choose[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j)];
  }

  const double half_n = std::pow(0.5, n);
  double accept = 0.0;
  for (int m = 0; m <= n; ++m) {
    const int cutoff =
        static_cast<int>(std::floor(threshold_factor * epsilon * m + 1e-9));
    double tail = 0.0;
    for (int e = 0; e <= cutoff && e <= m; ++e)
      tail += choose[static_cast<std::size_t>(m)][static_cast<std::size_t>(e)] *
              std::pow(epsilon, e) * std::pow(1.0 - epsilon, m - e);
    accept += choose[static_cast<std::size_t>(n)][static_cast<std::size_t>(m)] *
              half_n * tail;
  }
  return accept;
}

std::vector<std::uint32_t> enumerate_codewords(const codes::LinearCode& code) {
  std::vector<std::uint32_t> words;
  words.reserve(std::size_t{1} << code.k);
  for (std::uint32_t m = 0; m < (std::uint32_t{1} << code.k); ++m) {
    std::uint32_t w = 0;
    for (int i = 0; i < code.k; ++i)
      if ((m >> (code.k - 1 - i)) & 1u) w ^= code.rows[static_cast<std::size_t>(i)];
    words.push_back(w);
  }
  return words;
}

}  // namespace qbc::oracles
