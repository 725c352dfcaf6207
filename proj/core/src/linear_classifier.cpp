#include "ssma/linear_classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "ssma/error.hpp"
#include "ssma/metrics.hpp"
#include "ssma/random.hpp"

namespace ssma {

namespace {

// Dual coordinate descent for min_w 0.5 |w|^2 + C sum_i max(0, 1 - y_i w.x_i)
// over samples augmented with a constant bias feature.
Eigen::VectorXd train_binary(const Eigen::MatrixXd& x,
                             const std::vector<double>& y, double c,
                             const LinearTrainOptions& options, Rng& rng) {
  const Index n = x.cols();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(x.rows());
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  const Eigen::VectorXd diag = x.colwise().squaredNorm().transpose();

  for (int epoch = 0; epoch < options.max_epochs; ++epoch) {
    double max_pg = -std::numeric_limits<double>::infinity();
    double min_pg = std::numeric_limits<double>::infinity();
    for (std::size_t i : rng.permutation(static_cast<std::size_t>(n))) {
      const auto j = static_cast<Index>(i);
      const double yi = y[i];
      const double g = yi * w.dot(x.col(j)) - 1.0;
      double pg = g;
      if (alpha(j) == 0.0)
        pg = std::min(g, 0.0);
      else if (alpha(j) == c)
        pg = std::max(g, 0.0);
      max_pg = std::max(max_pg, pg);
      min_pg = std::min(min_pg, pg);
      if (std::abs(pg) > 1e-12) {
        const double old = alpha(j);
        alpha(j) = std::clamp(old - g / diag(j), 0.0, c);
        w += (alpha(j) - old) * yi * x.col(j);
      }
    }
    if (max_pg - min_pg < options.tolerance) break;
  }
  return w;
}

void check_inputs(const Eigen::MatrixXd& samples, std::span<const int> labels) {
  if (static_cast<std::size_t>(samples.cols()) != labels.size())
    throw ValidationError("sample and label counts differ");
  if (samples.rows() < 1 || samples.cols() < 1)
    throw ValidationError("classifier needs at least one feature and sample");
  const std::set<int> classes(labels.begin(), labels.end());
  if (classes.size() < 2)
    throw ValidationError("classifier needs samples from at least 2 classes");
}

}  // namespace

Eigen::MatrixXd LinearModel::decision_values(
    const Eigen::MatrixXd& samples) const {
  if (samples.rows() != weights_.cols())
    throw ValidationError("classifier expects " +
                          std::to_string(weights_.cols()) + " features, got " +
                          std::to_string(samples.rows()));
  return (weights_ * input_.apply(samples)).colwise() + bias_;
}

std::vector<int> LinearModel::predict(const Eigen::MatrixXd& samples) const {
  const Eigen::MatrixXd scores = decision_values(samples);
  std::vector<int> out(static_cast<std::size_t>(samples.cols()));
  for (Index j = 0; j < scores.cols(); ++j) {
    Index best = 0;
    for (Index c = 1; c < scores.rows(); ++c)
      if (scores(c, j) > scores(best, j)) best = c;
    out[static_cast<std::size_t>(j)] = classes_[static_cast<std::size_t>(best)];
  }
  return out;
}

LinearModel train_linear_fixed(const Eigen::MatrixXd& samples,
                               std::span<const int> labels, double c,
                               const LinearTrainOptions& options) {
  check_inputs(samples, labels);
  if (!(c > 0.0)) throw ParameterError("regularization C must be > 0");

  const std::set<int> class_set(labels.begin(), labels.end());
  std::vector<int> classes(class_set.begin(), class_set.end());
  auto input = Standardization::fit(samples);

  const Index r = samples.rows(), n = samples.cols();
  Eigen::MatrixXd augmented(r + 1, n);
  augmented.topRows(r) = input.apply(samples);
  augmented.row(r).setOnes();

  Eigen::MatrixXd weights(static_cast<Index>(classes.size()), r);
  Eigen::VectorXd bias(static_cast<Index>(classes.size()));
  std::vector<double> y(static_cast<std::size_t>(n));
  for (std::size_t k = 0; k < classes.size(); ++k) {
    for (std::size_t i = 0; i < y.size(); ++i)
      y[i] = labels[i] == classes[k] ? 1.0 : -1.0;
    Rng rng(derive_seed(options.seed, "ovr/" + std::to_string(classes[k])));
    const Eigen::VectorXd w = train_binary(augmented, y, c, options, rng);
    weights.row(static_cast<Index>(k)) = w.head(r).transpose();
    bias(static_cast<Index>(k)) = w(r);
  }
  return LinearModel(std::move(classes), std::move(weights), std::move(bias),
                     std::move(input), c);
}

LinearModel train_linear(const Eigen::MatrixXd& samples,
                         std::span<const int> labels,
                         const LinearTrainOptions& options) {
  check_inputs(samples, labels);
  if (options.c_grid.empty()) throw ParameterError("empty C grid");
  std::vector<double> grid = options.c_grid;
  std::sort(grid.begin(), grid.end());
  if (grid.size() == 1) return train_linear_fixed(samples, labels, grid[0], options);

  std::map<int, std::size_t> per_class;
  for (int y : labels) ++per_class[y];
  std::size_t smallest = labels.size();
  for (const auto& [cls, count] : per_class) smallest = std::min(smallest, count);
  const int folds =
      static_cast<int>(std::min<std::size_t>(smallest, static_cast<std::size_t>(options.folds)));
  if (folds < 2) return train_linear_fixed(samples, labels, grid[0], options);

  const int classes = per_class.rbegin()->first;
  const auto fold = stratified_folds(labels, folds, derive_seed(options.seed, "cv"));

  double best_kappa = -std::numeric_limits<double>::infinity();
  double best_c = grid[0];
  for (double c : grid) {
    ConfusionMatrix cm(classes);
    for (int f = 0; f < folds; ++f) {
      std::vector<Index> train_idx, test_idx;
      for (std::size_t i = 0; i < labels.size(); ++i)
        (fold[i] == f ? test_idx : train_idx).push_back(static_cast<Index>(i));
      std::vector<int> train_y;
      for (Index i : train_idx) train_y.push_back(labels[static_cast<std::size_t>(i)]);
      if (std::set<int>(train_y.begin(), train_y.end()).size() < 2) continue;
      const auto model =
          train_linear_fixed(samples(Eigen::all, train_idx), train_y, c, options);
      const auto predicted = model.predict(samples(Eigen::all, test_idx));
      for (std::size_t j = 0; j < test_idx.size(); ++j)
        cm.add(labels[static_cast<std::size_t>(test_idx[j])], predicted[j]);
    }
    if (cm.total() == 0) continue;
    const double kappa = cohen_kappa(cm);
    if (kappa > best_kappa) {
      best_kappa = kappa;
      best_c = c;
    }
  }
  return train_linear_fixed(samples, labels, best_c, options);
}

FitPredict linear_fit_predict(const LinearTrainOptions& options) {
  return [options](const Eigen::MatrixXd& train, std::span<const int> labels,
                   const Eigen::MatrixXd& test) {
    return train_linear(train, labels, options).predict(test);
  };
}

}  // namespace ssma
