#include "ssma/graphs.hpp"

#include <algorithm>
#include <numeric>

#include "ssma/error.hpp"

namespace ssma {

using Triplet = Eigen::Triplet<double>;

SparseGraph::SparseGraph(SparseMatrix adjacency, std::string name)
    : adjacency_(std::move(adjacency)), name_(std::move(name)) {
  if (adjacency_.rows() != adjacency_.cols())
    throw ValidationError("graph '" + name_ + "' adjacency is not square");
  adjacency_.prune(0.0);
  adjacency_.makeCompressed();
  for (Index j = 0; j < adjacency_.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(adjacency_, j); it; ++it) {
      if (it.row() == it.col())
        throw ValidationError("graph '" + name_ + "' has a self loop at " +
                              std::to_string(it.row()));
      if (!(it.value() >= 0.0))
        throw ValidationError("graph '" + name_ + "' has a negative weight");
    }
  }
  const SparseMatrix transposed = adjacency_.transpose();
  if ((adjacency_ - transposed).norm() != 0.0)
    throw ValidationError("graph '" + name_ + "' is not symmetric");
}

Index SparseGraph::edge_count() const { return adjacency_.nonZeros() / 2; }

Eigen::VectorXd SparseGraph::degrees() const {
  Eigen::VectorXd deg = Eigen::VectorXd::Zero(size());
  for (Index j = 0; j < adjacency_.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(adjacency_, j); it; ++it)
      deg(it.row()) += it.value();
  return deg;
}

SparseGraph SparseGraph::scaled(double factor) const {
  SparseGraph out = *this;
  out.adjacency_ *= factor;
  return out;
}

std::vector<std::vector<Index>> knn_lists(const Eigen::MatrixXd& features,
                                          Index k) {
  const Index n = features.cols();
  if (k < 1 || k >= n)
    throw ParameterError("kNN requires 1 <= k < n (k = " + std::to_string(k) +
                         ", n = " + std::to_string(n) + ")");

  std::vector<std::vector<Index>> out(static_cast<std::size_t>(n));
  std::vector<std::pair<double, Index>> dist(static_cast<std::size_t>(n - 1));
  for (Index i = 0; i < n; ++i) {
    std::size_t t = 0;
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      dist[t++] = {(features.col(i) - features.col(j)).squaredNorm(), j};
    }
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
    auto& row = out[static_cast<std::size_t>(i)];
    row.reserve(static_cast<std::size_t>(k));
    for (Index r = 0; r < k; ++r) row.push_back(dist[static_cast<std::size_t>(r)].second);
  }
  return out;
}

SparseGraph knn_graph(const Eigen::MatrixXd& features, Index k) {
  const auto lists = knn_lists(features, k);
  const Index n = features.cols();
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(2 * n * k));
  for (Index i = 0; i < n; ++i) {
    for (Index j : lists[static_cast<std::size_t>(i)]) {
      triplets.emplace_back(i, j, 1.0);
      triplets.emplace_back(j, i, 1.0);
    }
  }
  SparseMatrix w(n, n);
  // Union symmetrization: duplicates collapse to a single unit weight.
  w.setFromTriplets(triplets.begin(), triplets.end(),
                    [](double, double) { return 1.0; });
  return SparseGraph(std::move(w), "knn");
}

ClassGraphs class_graphs(const MultiDomainDataset& ds) {
  const auto labels = ds.joint_labels();
  std::vector<Index> labeled;
  std::vector<bool> present(static_cast<std::size_t>(ds.class_count()) + 1);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i]) {
      labeled.push_back(static_cast<Index>(i));
      present[static_cast<std::size_t>(*labels[i])] = true;
    }
  }
  if (std::count(present.begin(), present.end(), true) < 2)
    throw ValidationError(
        "class graphs need labeled samples from at least 2 classes");

  std::vector<Triplet> same, diff;
  for (std::size_t a = 0; a < labeled.size(); ++a) {
    for (std::size_t b = a + 1; b < labeled.size(); ++b) {
      const Index i = labeled[a], j = labeled[b];
      auto& target = (*labels[static_cast<std::size_t>(i)] ==
                      *labels[static_cast<std::size_t>(j)])
                         ? same
                         : diff;
      target.emplace_back(i, j, 1.0);
      target.emplace_back(j, i, 1.0);
    }
  }
  const Index n = ds.total_samples();
  SparseMatrix ws(n, n), wd(n, n);
  ws.setFromTriplets(same.begin(), same.end());
  wd.setFromTriplets(diff.begin(), diff.end());
  return {SparseGraph(std::move(ws), "similarity"),
          SparseGraph(std::move(wd), "dissimilarity")};
}

std::vector<SparseGraph> frobenius_rescale(
    std::span<const SparseGraph> graphs) {
  std::vector<SparseGraph> out;
  out.reserve(graphs.size());
  for (std::size_t g = 0; g < graphs.size(); ++g) {
    const double norm = graphs[g].frobenius_norm();
    if (!(norm > 0.0)) {
      const auto& name = graphs[g].name();
      throw ValidationError("cannot rescale all-zero graph " +
                            (name.empty() ? "#" + std::to_string(g)
                                          : "'" + name + "'"));
    }
    out.push_back(graphs[g].scaled(1.0 / norm));
  }
  return out;
}

Laplacian laplacian(const SparseGraph& graph) {
  const Eigen::VectorXd deg = graph.degrees();
  SparseMatrix degree(graph.size(), graph.size());
  std::vector<Triplet> diag;
  for (Index i = 0; i < deg.size(); ++i)
    if (deg(i) != 0.0) diag.emplace_back(i, i, deg(i));
  degree.setFromTriplets(diag.begin(), diag.end());
  SparseMatrix l = degree - graph.adjacency();
  l.makeCompressed();
  return Laplacian(std::move(l));
}

namespace {

SparseMatrix block_diag(std::span<const SparseMatrix* const> blocks) {
  Index n = 0;
  std::size_t nnz = 0;
  for (const auto* b : blocks) {
    n += b->rows();
    nnz += static_cast<std::size_t>(b->nonZeros());
  }
  std::vector<Triplet> triplets;
  triplets.reserve(nnz);
  Index offset = 0;
  for (const auto* b : blocks) {
    for (Index j = 0; j < b->outerSize(); ++j)
      for (SparseMatrix::InnerIterator it(*b, j); it; ++it)
        triplets.emplace_back(offset + it.row(), offset + it.col(), it.value());
    offset += b->rows();
  }
  SparseMatrix out(n, n);
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

}  // namespace

SparseGraph block_diag_graph(std::span<const SparseGraph> per_domain,
                             std::string name) {
  std::vector<const SparseMatrix*> blocks;
  for (const auto& g : per_domain) blocks.push_back(&g.adjacency());
  return SparseGraph(block_diag(blocks), std::move(name));
}

Laplacian block_diag_geometry_laplacian(std::span<const Laplacian> per_domain,
                                        std::span<const Index> expected_sizes) {
  if (!expected_sizes.empty()) {
    if (expected_sizes.size() != per_domain.size())
      throw ValidationError("expected " + std::to_string(expected_sizes.size()) +
                            " domain Laplacians, got " +
                            std::to_string(per_domain.size()));
    for (std::size_t m = 0; m < per_domain.size(); ++m)
      if (per_domain[m].size() != expected_sizes[m])
        throw ValidationError(
            "Laplacian of domain " + std::to_string(m) + " has size " +
            std::to_string(per_domain[m].size()) + ", expected " +
            std::to_string(expected_sizes[m]));
  }
  std::vector<const SparseMatrix*> blocks;
  for (const auto& l : per_domain) blocks.push_back(&l.matrix());
  return Laplacian(block_diag(blocks));
}

}  // namespace ssma
