#include "ssma/metrics.hpp"

#include <string>

#include "ssma/error.hpp"

namespace ssma {

ConfusionMatrix::ConfusionMatrix(int classes) {
  if (classes < 1) throw ParameterError("confusion matrix needs >= 1 class");
  counts_.setZero(classes, classes);
}

ConfusionMatrix::ConfusionMatrix(
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts)
    : counts_(std::move(counts)) {
  if (counts_.rows() != counts_.cols() || counts_.rows() < 1)
    throw ValidationError("confusion matrix must be square and non-empty");
  if ((counts_.array() < 0).any())
    throw ValidationError("confusion matrix has negative counts");
}

ConfusionMatrix ConfusionMatrix::from_labels(int classes,
                                             std::span<const int> truth,
                                             std::span<const int> predicted) {
  if (truth.size() != predicted.size())
    throw ValidationError("label and prediction counts differ");
  ConfusionMatrix cm(classes);
  for (std::size_t i = 0; i < truth.size(); ++i) cm.add(truth[i], predicted[i]);
  return cm;
}

void ConfusionMatrix::add(int truth, int predicted, std::int64_t count) {
  const int c = classes();
  if (truth < 1 || truth > c || predicted < 1 || predicted > c)
    throw ValidationError("class id outside 1.." + std::to_string(c));
  counts_(truth - 1, predicted - 1) += count;
}

double cohen_kappa(const ConfusionMatrix& cm) {
  const auto total = static_cast<double>(cm.total());
  if (!(total > 0.0)) throw ValidationError("kappa of an empty confusion matrix");
  const auto& n = cm.counts();
  const double observed = static_cast<double>(n.trace()) / total;
  double expected = 0.0;
  for (Eigen::Index c = 0; c < n.rows(); ++c)
    expected += static_cast<double>(n.row(c).sum()) *
                static_cast<double>(n.col(c).sum());
  expected /= total * total;
  if (expected >= 1.0) return observed >= 1.0 ? 1.0 : 0.0;
  return (observed - expected) / (1.0 - expected);
}

double overall_accuracy(const ConfusionMatrix& cm) {
  const auto total = static_cast<double>(cm.total());
  if (!(total > 0.0))
    throw ValidationError("accuracy of an empty confusion matrix");
  return static_cast<double>(cm.counts().trace()) / total;
}

}  // namespace ssma
