// Shared fixtures and independent oracles for the test binaries.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "ssma/dataset.hpp"
#include "ssma/random.hpp"

namespace ssma::testing {

inline Eigen::MatrixXd random_matrix(Rng& rng, Index rows, Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
  return m;
}

inline Eigen::MatrixXd random_spd(Rng& rng, Index d, double shift = 0.1) {
  const Eigen::MatrixXd g = random_matrix(rng, d, d);
  return g * g.transpose() + shift * Eigen::MatrixXd::Identity(d, d);
}

// Random multi-domain dataset; each sample labeled with probability
// `labeled_fraction`, and every class labeled at least once in domain 0.
inline MultiDomainDataset random_dataset(Rng& rng, const std::vector<Index>& dims,
                                         const std::vector<Index>& samples,
                                         int classes, double labeled_fraction) {
  std::vector<DomainDataset> domains;
  for (std::size_t m = 0; m < dims.size(); ++m) {
    DomainDataset dom;
    dom.id = "d" + std::to_string(m + 1);
    dom.features = random_matrix(rng, dims[m], samples[m]);
    for (Index i = 0; i < samples[m]; ++i) {
      const int cls = 1 + static_cast<int>(rng.index(static_cast<std::size_t>(classes)));
      if (m == 0 && i < classes)
        dom.labels.emplace_back(static_cast<int>(i) + 1);
      else if (rng.uniform() < labeled_fraction)
        dom.labels.emplace_back(cls);
      else
        dom.labels.emplace_back();
      if (dom.labels.back())
        dom.features.col(i).array() += 1.5 * (*dom.labels.back());
    }
    domains.push_back(std::move(dom));
  }
  return MultiDomainDataset(std::move(domains), classes);
}

// All-pairs kNN: for each i, sort every other index by (distance, index).
inline Eigen::MatrixXd brute_force_knn(const Eigen::MatrixXd& x, Index k) {
  const Index n = x.cols();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    std::vector<Index> others;
    for (Index j = 0; j < n; ++j)
      if (j != i) others.push_back(j);
    std::stable_sort(others.begin(), others.end(), [&](Index a, Index b) {
      return (x.col(a) - x.col(i)).squaredNorm() <
             (x.col(b) - x.col(i)).squaredNorm();
    });
    for (Index t = 0; t < k; ++t) {
      w(i, others[static_cast<std::size_t>(t)]) = 1.0;
      w(others[static_cast<std::size_t>(t)], i) = 1.0;
    }
  }
  return w;
}

// sum_ij W(i,j) |z_i - z_j|^2 over the columns of z.
inline double pair_sum(const Eigen::MatrixXd& w, const Eigen::MatrixXd& z) {
  double total = 0.0;
  for (Index i = 0; i < w.rows(); ++i)
    for (Index j = 0; j < w.cols(); ++j)
      if (w(i, j) != 0.0) total += w(i, j) * (z.col(i) - z.col(j)).squaredNorm();
  return total;
}

// Eigenvalues of B^{-1/2} A B^{-1/2}, with B^{-1/2} from B's own
// eigendecomposition.
inline Eigen::VectorXd similarity_oracle(const Eigen::MatrixXd& a,
                                         const Eigen::MatrixXd& b) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eb(b);
  const Eigen::MatrixXd inv_sqrt = eb.eigenvectors() *
                                   eb.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                                   eb.eigenvectors().transpose();
  Eigen::MatrixXd c = inv_sqrt * a * inv_sqrt;
  c = 0.5 * (c + c.transpose());
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(c, Eigen::EigenvaluesOnly)
      .eigenvalues();
}

// Random matrix with r orthonormal columns (QR of a Gaussian matrix).
inline Eigen::MatrixXd random_orthonormal(Rng& rng, Index d, Index r) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(random_matrix(rng, d, r));
  return qr.householderQ() * Eigen::MatrixXd::Identity(d, r);
}

}  // namespace ssma::testing
