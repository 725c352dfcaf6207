// alignment.hpp - semisupervised manifold alignment.
//
// Learns one linear projector per domain into a shared latent space of
// dimension d = sum_m d_m by solving the pencil
//
//   X (mu L_g + L_s) X^T phi = lambda X L_d X^T phi
//
// where X is the block-diagonal data matrix, L_g the block-diagonal kNN
// geometry Laplacian, and L_s / L_d the Laplacians of the same-class and
// different-class graphs over all labeled samples. The projector is
// F = [sqrt(lambda_1) phi_1 | ... | sqrt(lambda_d) phi_d], whose row block m
// maps domain m into the latent space.

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ssma/dataset.hpp"
#include "ssma/generalized_eigen.hpp"
#include "ssma/graphs.hpp"

namespace ssma {

struct AlignmentParams {
  double mu = 1.0;  // geometry tradeoff
  Index k = 9;      // kNN neighbours per domain
  RidgePolicy ridge;
  bool standardize = true;
  std::optional<Index> dims;  // fixed latent dimension; empty = select later

  void validate() const;
  bool operator==(const AlignmentParams&) const = default;
};

/// Every intermediate of a fit, exposed for diagnostics and tests.
struct AlignmentProblem {
  std::vector<Standardization> standardization;
  JointBlockMatrix x;  // standardized, d x N
  std::vector<Label> labels;
  SparseGraph geometry;       // joint W_g, unit Frobenius norm
  SparseGraph similarity;     // W_s, unit Frobenius norm
  SparseGraph dissimilarity;  // W_d, unit Frobenius norm
  Laplacian geometry_laplacian;
  Laplacian similarity_laplacian;
  Laplacian dissimilarity_laplacian;
  Eigen::MatrixXd a;  // X (mu L_g + L_s) X^T
  Eigen::MatrixXd b;  // X L_d X^T
};

struct AlignmentModel {
  std::vector<std::string> domain_ids;
  std::vector<Index> domain_dims;
  std::vector<Standardization> standardization;  // one per domain
  int class_count = 0;
  AlignmentParams params;
  Eigen::VectorXd eigenvalues;  // ascending
  Eigen::MatrixXd projector;    // F, d x d
  double ridge = 0.0;           // absolute eps used by the solver
  Index chosen_dims = 0;        // r

  Index total_dims() const { return projector.rows(); }
  std::size_t domain_index(const std::string& id) const;
  /// Row block f^m (d_m x d).
  Eigen::MatrixXd block(std::size_t m) const;
  AlignmentModel with_chosen_dims(Index r) const;
};

/// The three graph terms evaluated at a projector.
struct ObjectiveTerms {
  double geometry = 0.0;       // tr(F^T X L_g X^T F)
  double similarity = 0.0;     // tr(F^T X L_s X^T F)
  double dissimilarity = 0.0;  // tr(F^T X L_d X^T F)
};

/// X L X^T without materializing L densely.
Eigen::MatrixXd gram_laplacian(const Eigen::MatrixXd& x, const Laplacian& l);

AlignmentProblem build_problem(const MultiDomainDataset& ds,
                               const AlignmentParams& params);

AlignmentModel fit(const MultiDomainDataset& ds, const AlignmentParams& params);

/// Fits from an already-built problem (same dataset and params).
AlignmentModel fit(const AlignmentProblem& problem,
                   const MultiDomainDataset& ds, const AlignmentParams& params);

ObjectiveTerms objective_terms(const AlignmentProblem& problem,
                               const Eigen::MatrixXd& projector);

/// tr((F^T B F)^{-1} F^T A F).
double trace_ratio(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                   const Eigen::MatrixXd& projector);

/// First r rows of f^m^T standardize_m(X). Throws ValidationError for an
/// unknown domain or wrong row count, ParameterError for r outside 1..d.
Eigen::MatrixXd project(const AlignmentModel& model,
                        const std::string& domain_id,
                        const Eigen::MatrixXd& samples, Index r);

/// Maps samples of `src` through the first r latent dims into the feature
/// space of `dst` using the pseudoinverse of the first r columns of f^dst^T
/// (singular values below 1e-10 * sigma_max are dropped). Throws
/// ParameterError for r outside 1..d.
Eigen::MatrixXd synthesize(const AlignmentModel& model, const std::string& src,
                           const std::string& dst,
                           const Eigen::MatrixXd& samples, Index r);

/// Trains on (train, train_labels) and returns predictions for `test`.
using FitPredict = std::function<std::vector<int>(
    const Eigen::MatrixXd& train, std::span<const int> train_labels,
    const Eigen::MatrixXd& test)>;

struct DimSelection {
  Index dims = 0;
  std::vector<double> kappa_by_dims;  // entry r-1 holds the CV kappa at r
};

/// Stratified k-fold assignment (round-robin within each shuffled class).
std::vector<int> stratified_folds(std::span<const int> labels, int folds,
                                  std::uint64_t seed);

/// Cross-validated choice of the latent dimension. `latent` holds the
/// pooled labeled samples projected on all d dimensions. Returns the
/// smallest r whose kappa is within `tolerance` of the best.
DimSelection select_dims(const AlignmentModel& model,
                         const Eigen::MatrixXd& latent,
                         std::span<const int> labels,
                         const FitPredict& classifier, int folds,
                         std::uint64_t seed, double tolerance = 0.005);

}  // namespace ssma
