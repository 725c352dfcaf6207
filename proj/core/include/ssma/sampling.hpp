// sampling.hpp - representative unlabeled samples via bisecting k-means.

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "ssma/dataset.hpp"

namespace ssma {

struct CentroidSet {
  Eigen::MatrixXd points;         // d x u, one centroid per cluster
  std::vector<Index> assignment;  // cluster id of every input sample
};

struct BisectingOptions {
  int restarts = 10;         // 2-means restarts per bisection, best SSE kept
  int max_iterations = 100;  // Lloyd iterations per restart
};

/// Starts from a single cluster and repeatedly bisects the cluster with the
/// largest within-cluster sum of squares until `clusters` exist. Requires
/// 1 <= clusters <= n.
CentroidSet bisecting_kmeans(const Eigen::MatrixXd& features, Index clusters,
                             std::uint64_t seed,
                             const BisectingOptions& options = {});

/// Total within-cluster sum of squared distances to the centroids.
double within_cluster_sse(const Eigen::MatrixXd& features,
                          const CentroidSet& centroids);

}  // namespace ssma
