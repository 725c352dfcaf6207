// generalized_eigen.hpp - dense symmetric-definite pencil solver.
//
// Solves A phi = lambda (B + eps I) phi through a Cholesky factor of the
// regularized metric, returning all pairs in ascending order.

#pragma once

#include <Eigen/Dense>

#include <vector>

namespace ssma {

/// Relative ridge ladder: the absolute ridge of rung i is
/// ladder[i] * trace(B) / d.
struct RidgePolicy {
  std::vector<double> ladder{0.0, 1e-10, 1e-8, 1e-6, 1e-4};
  /// Pivot floor: the factor R of B + eps I is accepted only when
  /// min_i R_ii^2 >= min_pivot_ratio * max_i R_ii^2.
  double min_pivot_ratio = 1e-14;

  bool operator==(const RidgePolicy&) const = default;
};

struct EigenSolution {
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // column i pairs with eigenvalues(i)
  Eigen::VectorXd residual_norms;
  double ridge = 0.0;            // absolute eps added to B
  std::size_t ridge_rung = 0;    // index into the ladder
};

/// Inputs must be square, of equal size, and symmetric to within 1e-10
/// relative to their Frobenius norm; they are then symmetrized as
/// (M + M^T) / 2. Eigenvectors are (B + eps I)-orthonormal and each column's
/// largest-magnitude entry is positive. Throws ValidationError on shape or
/// symmetry violations and SingularityError when no rung of the ladder
/// yields a positive definite metric.
EigenSolution solve_generalized(const Eigen::MatrixXd& a,
                                const Eigen::MatrixXd& b,
                                const RidgePolicy& policy = {});

}  // namespace ssma
