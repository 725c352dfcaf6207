// linear_classifier.hpp - one-vs-rest linear SVM (L2 regularization, hinge
// loss) trained by dual coordinate descent.

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

#include "ssma/alignment.hpp"

namespace ssma {

struct LinearTrainOptions {
  std::vector<double> c_grid{100.0, 250.0, 500.0, 750.0, 1000.0};
  int folds = 5;
  double tolerance = 1e-3;  // projected-gradient gap stopping rule
  int max_epochs = 2000;
  std::uint64_t seed = 0;

  bool operator==(const LinearTrainOptions&) const = default;
};

class LinearModel {
 public:
  LinearModel() = default;
  LinearModel(std::vector<int> classes, Eigen::MatrixXd weights,
              Eigen::VectorXd bias, Standardization input, double c)
      : classes_(std::move(classes)),
        weights_(std::move(weights)),
        bias_(std::move(bias)),
        input_(std::move(input)),
        c_(c) {}

  /// One row per class, one column per sample.
  Eigen::MatrixXd decision_values(const Eigen::MatrixXd& samples) const;
  /// Argmax of the decision values; ties go to the smallest class id.
  std::vector<int> predict(const Eigen::MatrixXd& samples) const;

  const std::vector<int>& classes() const { return classes_; }
  double c() const { return c_; }
  Index input_dims() const { return weights_.cols(); }

 private:
  std::vector<int> classes_;
  Eigen::MatrixXd weights_;  // classes x r
  Eigen::VectorXd bias_;
  Standardization input_;  // z-scoring fitted on the training samples
  double c_ = 0.0;
};

/// Trains with a fixed regularization constant.
LinearModel train_linear_fixed(const Eigen::MatrixXd& samples,
                               std::span<const int> labels, double c,
                               const LinearTrainOptions& options = {});

/// Picks C from options.c_grid by stratified k-fold cross-validated kappa
/// (ties -> smallest C), then retrains on all samples. The fold count drops
/// to the smallest class size when needed; below 2 the smallest C is used
/// without validation. Throws ValidationError on single-class input.
LinearModel train_linear(const Eigen::MatrixXd& samples,
                         std::span<const int> labels,
                         const LinearTrainOptions& options = {});

/// Adapter for select_dims.
FitPredict linear_fit_predict(const LinearTrainOptions& options = {});

}  // namespace ssma
