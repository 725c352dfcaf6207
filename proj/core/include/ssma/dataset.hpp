// dataset.hpp - per-domain datasets, joint sample indexing and the
// block-diagonal data matrix consumed by the alignment math.
//
// Features are stored one column per sample (d_m x n_m). Labels are 1-based
// class ids; an unlabeled sample holds an empty optional, never a sentinel.

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ssma {

using Index = Eigen::Index;
using Label = std::optional<int>;

struct DomainDataset {
  std::string id;
  Eigen::MatrixXd features;  // d_m x n_m
  std::vector<Label> labels;  // length n_m
  std::string name;

  Index dims() const { return features.rows(); }
  Index samples() const { return features.cols(); }
  Index labeled_count() const;
  Index unlabeled_count() const { return samples() - labeled_count(); }
};

/// Ordered collection of domains sharing one class count. Immutable once
/// constructed; the constructor validates every invariant.
class MultiDomainDataset {
 public:
  MultiDomainDataset(std::vector<DomainDataset> domains, int class_count);

  const std::vector<DomainDataset>& domains() const { return domains_; }
  const DomainDataset& domain(std::size_t m) const { return domains_.at(m); }
  std::size_t domain_count() const { return domains_.size(); }
  int class_count() const { return class_count_; }

  /// Position of the domain with this id; throws ValidationError if absent.
  std::size_t domain_index(const std::string& id) const;
  std::optional<std::size_t> find_domain(const std::string& id) const;

  /// Exclusive prefix sums of n_m.
  const std::vector<Index>& joint_offsets() const { return sample_offsets_; }
  /// Exclusive prefix sums of d_m.
  const std::vector<Index>& dim_offsets() const { return dim_offsets_; }
  std::vector<Index> domain_dims() const;

  Index total_samples() const { return total_samples_; }
  Index total_dims() const { return total_dims_; }

  /// Label of the sample at joint index i.
  Label joint_label(Index i) const;
  /// Labels over the joint sample axis.
  std::vector<Label> joint_labels() const;

  /// Throws ValidationError unless every class 1..C is labeled somewhere.
  void require_all_classes_labeled() const;

 private:
  std::vector<DomainDataset> domains_;
  int class_count_;
  std::vector<Index> sample_offsets_;
  std::vector<Index> dim_offsets_;
  Index total_samples_ = 0;
  Index total_dims_ = 0;
};

/// Dense d x N realization of diag(X^1, ..., X^M).
struct JointBlockMatrix {
  Eigen::MatrixXd values;
  std::vector<Index> row_offsets;  // block starts along the feature axis
  std::vector<Index> col_offsets;  // block starts along the sample axis
};

JointBlockMatrix assemble_block_diagonal(const MultiDomainDataset& ds);

struct TrainTestSplit {
  MultiDomainDataset train;
  MultiDomainDataset test;
};

/// Stratified split of each domain's labeled samples. For a class with n
/// labeled samples the test side receives floor(n * test_fraction) of them,
/// clamped to [1, n - 1]. Unlabeled samples always stay in train.
TrainTestSplit split_train_test(const MultiDomainDataset& ds,
                                double test_fraction, std::uint64_t seed);

/// Keeps exactly `count` labeled samples per class in each listed domain and
/// marks the rest unlabeled; domains not listed are untouched. Draws are
/// nested: the selection for a count is a prefix of one fixed permutation
/// per (seed, domain, class), so smaller requests are subsets of larger ones.
MultiDomainDataset subsample_labeled(
    const MultiDomainDataset& ds,
    const std::map<std::string, std::size_t>& per_class_counts,
    std::uint64_t seed);

/// Per-feature affine normalization x -> (x - mean) / scale.
struct Standardization {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;

  /// Zero mean, unit (population) variance per row of `features`. Constant
  /// rows get scale 1.
  static Standardization fit(const Eigen::MatrixXd& features);
  static Standardization identity(Index dims);

  Eigen::MatrixXd apply(const Eigen::MatrixXd& features) const;
  Eigen::MatrixXd invert(const Eigen::MatrixXd& standardized) const;
  bool is_identity() const;
};

}  // namespace ssma
