// graphs.hpp - affinity graphs and their Laplacians.
//
// Three graph families drive the alignment: a kNN geometry graph per domain
// (block-assembled into one joint graph), and the class-similarity and
// class-dissimilarity graphs over all labeled samples of all domains.

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <span>
#include <string>
#include <vector>

#include "ssma/dataset.hpp"

namespace ssma {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Symmetric nonnegative affinity matrix with zero diagonal.
class SparseGraph {
 public:
  SparseGraph() = default;
  /// Validates symmetry (exact), zero diagonal and nonnegativity.
  explicit SparseGraph(SparseMatrix adjacency, std::string name = {});

  Index size() const { return adjacency_.rows(); }
  const SparseMatrix& adjacency() const { return adjacency_; }
  const std::string& name() const { return name_; }

  Index edge_count() const;  // stored nonzeros / 2
  double frobenius_norm() const { return adjacency_.norm(); }
  Eigen::VectorXd degrees() const;
  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(adjacency_); }

  SparseGraph scaled(double factor) const;

 private:
  SparseMatrix adjacency_;
  std::string name_;
};

/// Degree-minus-adjacency matrix L = U - W.
class Laplacian {
 public:
  Laplacian() = default;
  explicit Laplacian(SparseMatrix matrix) : matrix_(std::move(matrix)) {}

  Index size() const { return matrix_.rows(); }
  const SparseMatrix& matrix() const { return matrix_; }
  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(matrix_); }

 private:
  SparseMatrix matrix_;
};

/// Directed k-nearest-neighbour lists (Euclidean, self excluded, distance
/// ties broken by ascending sample index). Row i holds the k neighbours of
/// sample i, nearest first.
std::vector<std::vector<Index>> knn_lists(const Eigen::MatrixXd& features,
                                          Index k);

/// Binary kNN graph symmetrized by union: W(i,j) = 1 when either sample is
/// among the other's k nearest neighbours. Requires 1 <= k < n.
SparseGraph knn_graph(const Eigen::MatrixXd& features, Index k);

struct ClassGraphs {
  SparseGraph similarity;     // W_s: both labeled, same class
  SparseGraph dissimilarity;  // W_d: both labeled, different classes
};

/// Class graphs over the joint sample axis, including cross-domain and
/// within-domain pairs. Unlabeled samples have empty rows.
ClassGraphs class_graphs(const MultiDomainDataset& ds);

/// Scales every graph to unit Frobenius norm.
std::vector<SparseGraph> frobenius_rescale(std::span<const SparseGraph> graphs);

Laplacian laplacian(const SparseGraph& graph);

/// diag(W^1, ..., W^M) as one graph over the joint sample axis.
SparseGraph block_diag_graph(std::span<const SparseGraph> per_domain,
                             std::string name = {});

/// diag(L^1, ..., L^M); cross-domain entries are structurally zero. When
/// `expected_sizes` is given, block m must have that many rows.
Laplacian block_diag_geometry_laplacian(
    std::span<const Laplacian> per_domain,
    std::span<const Index> expected_sizes = {});

}  // namespace ssma
