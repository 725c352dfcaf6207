#include "ssma/sampling.hpp"

#include <limits>

#include "ssma/error.hpp"
#include "ssma/random.hpp"

namespace ssma {

namespace {

struct Cluster {
  std::vector<Index> members;
  Eigen::VectorXd centroid;
  double sse = 0.0;
};

Cluster make_cluster(const Eigen::MatrixXd& x, std::vector<Index> members) {
  Cluster c;
  c.centroid = Eigen::VectorXd::Zero(x.rows());
  for (Index i : members) c.centroid += x.col(i);
  c.centroid /= static_cast<double>(members.size());
  for (Index i : members) c.sse += (x.col(i) - c.centroid).squaredNorm();
  c.members = std::move(members);
  return c;
}

struct Bisection {
  std::vector<Index> left, right;
  double sse = std::numeric_limits<double>::infinity();
};

// One Lloyd run of 2-means from two seed points.
Bisection two_means(const Eigen::MatrixXd& x, const std::vector<Index>& members,
                    Eigen::VectorXd c0, Eigen::VectorXd c1, int max_iterations) {
  std::vector<char> side(members.size(), 2);
  for (int it = 0; it < max_iterations; ++it) {
    bool changed = false;
    for (std::size_t j = 0; j < members.size(); ++j) {
      const auto p = x.col(members[j]);
      const char s = (p - c1).squaredNorm() < (p - c0).squaredNorm() ? 1 : 0;
      if (s != side[j]) {
        side[j] = s;
        changed = true;
      }
    }
    if (!changed) break;
    Eigen::VectorXd sum0 = Eigen::VectorXd::Zero(x.rows()), sum1 = sum0;
    std::size_t n0 = 0, n1 = 0;
    for (std::size_t j = 0; j < members.size(); ++j) {
      if (side[j]) {
        sum1 += x.col(members[j]);
        ++n1;
      } else {
        sum0 += x.col(members[j]);
        ++n0;
      }
    }
    if (n0 == 0 || n1 == 0) return {};
    c0 = sum0 / static_cast<double>(n0);
    c1 = sum1 / static_cast<double>(n1);
  }
  Bisection out;
  for (std::size_t j = 0; j < members.size(); ++j)
    (side[j] ? out.right : out.left).push_back(members[j]);
  if (out.left.empty() || out.right.empty()) return {};
  out.sse = make_cluster(x, out.left).sse + make_cluster(x, out.right).sse;
  return out;
}

Bisection bisect(const Eigen::MatrixXd& x, const Cluster& cluster, Rng& rng,
                 const BisectingOptions& options) {
  const auto& members = cluster.members;
  const std::size_t n = members.size();
  Bisection best;
  for (int r = 0; r < options.restarts; ++r) {
    const std::size_t a = rng.index(n);
    std::size_t b = rng.index(n - 1);
    if (b >= a) ++b;
    if (x.col(members[a]) == x.col(members[b])) {
      // Look for any point distinct from the first seed.
      bool found = false;
      for (std::size_t t = 1; t < n && !found; ++t) {
        const std::size_t cand = (b + t) % n;
        if (x.col(members[cand]) != x.col(members[a])) {
          b = cand;
          found = true;
        }
      }
      if (!found) break;
    }
    auto candidate = two_means(x, members, x.col(members[a]),
                               x.col(members[b]), options.max_iterations);
    if (candidate.sse < best.sse) best = std::move(candidate);
  }
  if (best.left.empty()) {
    // All points coincide: split by position.
    best.left.assign(members.begin(), members.begin() + n / 2);
    best.right.assign(members.begin() + n / 2, members.end());
  }
  return best;
}

}  // namespace

CentroidSet bisecting_kmeans(const Eigen::MatrixXd& features, Index clusters,
                             std::uint64_t seed,
                             const BisectingOptions& options) {
  const Index n = features.cols();
  if (clusters < 1 || clusters > n)
    throw ParameterError("bisecting k-means needs 1 <= u <= n (u = " +
                         std::to_string(clusters) +
                         ", n = " + std::to_string(n) + ")");
  if (options.restarts < 1 || options.max_iterations < 1)
    throw ParameterError("bisecting k-means needs restarts and iterations >= 1");

  Rng rng(seed);
  std::vector<Index> all(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
  std::vector<Cluster> parts;
  parts.push_back(make_cluster(features, std::move(all)));

  while (static_cast<Index>(parts.size()) < clusters) {
    // Largest SSE among splittable clusters; size breaks SSE-zero ties.
    std::size_t pick = parts.size();
    for (std::size_t c = 0; c < parts.size(); ++c) {
      if (parts[c].members.size() < 2) continue;
      if (pick == parts.size() || parts[c].sse > parts[pick].sse ||
          (parts[c].sse == parts[pick].sse &&
           parts[c].members.size() > parts[pick].members.size()))
        pick = c;
    }
    auto split = bisect(features, parts[pick], rng, options);
    parts[pick] = make_cluster(features, std::move(split.left));
    parts.push_back(make_cluster(features, std::move(split.right)));
  }

  CentroidSet out;
  out.points.resize(features.rows(), clusters);
  out.assignment.assign(static_cast<std::size_t>(n), 0);
  for (std::size_t c = 0; c < parts.size(); ++c) {
    out.points.col(static_cast<Index>(c)) = parts[c].centroid;
    for (Index i : parts[c].members)
      out.assignment[static_cast<std::size_t>(i)] = static_cast<Index>(c);
  }
  return out;
}

double within_cluster_sse(const Eigen::MatrixXd& features,
                          const CentroidSet& centroids) {
  double sse = 0.0;
  for (Index i = 0; i < features.cols(); ++i)
    sse += (features.col(i) -
            centroids.points.col(
                centroids.assignment[static_cast<std::size_t>(i)]))
               .squaredNorm();
  return sse;
}

}  // namespace ssma
