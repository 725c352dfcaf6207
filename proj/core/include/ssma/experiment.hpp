// experiment.hpp - labeled-budget experiments comparing SS-MA with the raw
// stacking and per-domain PCA baselines.
//
// For every seed: split each domain's labeled samples into train/test, pick
// `unlabeled` representatives per domain by bisecting k-means over the train
// pool, then for every leading domain and target budget draw nested labeled
// subsets, fit each method, train one joint linear classifier on the pooled
// labeled samples and score every domain's held-out test set.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ssma/alignment.hpp"
#include "ssma/dataset.hpp"
#include "ssma/linear_classifier.hpp"
#include "ssma/synth.hpp"

namespace ssma {

enum class Method { None, Ssma, Pca };

std::string method_name(Method m);
Method parse_method(const std::string& name);

/// Spiral pair regenerated for every seed.
struct SyntheticRecipe {
  std::string setting = "sr";  // none, s, sr or srt
  Index n_per_class = 667;
  int classes = 3;
  SpiralShape shape;

  bool operator==(const SyntheticRecipe&) const = default;
};

struct ExperimentConfig {
  std::optional<std::string> dataset_path;
  std::optional<SyntheticRecipe> synthetic;

  std::vector<std::string> leading;  // empty = first domain
  std::size_t leading_budget = 20;   // labeled per class in the leading domain
  std::vector<std::size_t> budgets{0, 5, 10, 15, 20};  // per class, others
  Index unlabeled = 300;             // per domain
  std::vector<Method> methods{Method::None, Method::Ssma};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  double test_fraction = 0.5;
  int dims_folds = 5;

  AlignmentParams alignment;
  LinearTrainOptions classifier;

  /// Throws ParameterError with the offending field name.
  void validate() const;
  bool operator==(const ExperimentConfig&) const = default;
};

struct ExperimentRow {
  std::string leading;
  std::string test_domain;
  std::size_t budget = 0;
  Method method = Method::None;
  std::uint64_t seed = 0;
  double kappa = 0.0;
  double accuracy = 0.0;
  Index dims = 0;
  double seconds = 0.0;  // wall time of fit + classification, not persisted
};

struct ExperimentResult {
  std::vector<ExperimentRow> rows;
};

/// Mean kappa over seeds of the rows matching the given cell.
double mean_kappa(const ExperimentResult& result, Method method,
                  const std::string& test_domain, std::size_t budget);

/// Runs on a fixed dataset (dataset_path / synthetic are ignored).
ExperimentResult run_experiment(const ExperimentConfig& config,
                                const MultiDomainDataset& dataset);

/// Loads `dataset_path` or regenerates `synthetic` for each seed.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Per-domain principal-component projector to a common dimension.
struct PcaProjector {
  Eigen::VectorXd mean;
  Eigen::MatrixXd components;  // d_m x q, orthonormal columns

  static PcaProjector fit(const Eigen::MatrixXd& features, Index dims);
  Eigen::MatrixXd apply(const Eigen::MatrixXd& features) const;
};

}  // namespace ssma
