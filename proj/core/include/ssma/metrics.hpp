// metrics.hpp - confusion matrices and Cohen's kappa.

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>

namespace ssma {

/// C x C counts; rows are true classes, columns predicted classes. Class c
/// (1-based) lives at index c - 1.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(int classes);
  explicit ConfusionMatrix(Eigen::Matrix<std::int64_t, Eigen::Dynamic,
                                         Eigen::Dynamic> counts);

  /// Tallies paired labels; both spans must have equal length and values
  /// in 1..C.
  static ConfusionMatrix from_labels(int classes, std::span<const int> truth,
                                     std::span<const int> predicted);

  void add(int truth, int predicted, std::int64_t count = 1);

  int classes() const { return static_cast<int>(counts_.rows()); }
  std::int64_t total() const { return counts_.sum(); }
  std::int64_t operator()(int truth, int predicted) const {
    return counts_(truth - 1, predicted - 1);
  }
  const Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>& counts()
      const {
    return counts_;
  }

 private:
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts_;
};

/// kappa = (p_o - p_e) / (1 - p_e). Returns 1 for the degenerate case
/// p_e = p_o = 1. Throws ValidationError on an empty matrix.
double cohen_kappa(const ConfusionMatrix& cm);

double overall_accuracy(const ConfusionMatrix& cm);

}  // namespace ssma
