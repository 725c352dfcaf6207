#include <gtest/gtest.h>

#include <limits>

#include "ssma/error.hpp"
#include "ssma/generalized_eigen.hpp"
#include "support.hpp"

namespace ssma {
namespace {

TEST(GeneralizedEigen, DiagonalCase) {
  Eigen::MatrixXd a(2, 2);
  a << 2, 0, 0, 1;
  const auto sol = solve_generalized(a, Eigen::MatrixXd::Identity(2, 2));
  EXPECT_NEAR(sol.eigenvalues(0), 1.0, 1e-14);
  EXPECT_NEAR(sol.eigenvalues(1), 2.0, 1e-14);
  EXPECT_TRUE(sol.eigenvectors.col(0).isApprox(Eigen::Vector2d(0, 1), 1e-14));
  EXPECT_TRUE(sol.eigenvectors.col(1).isApprox(Eigen::Vector2d(1, 0), 1e-14));
  EXPECT_EQ(sol.ridge, 0.0);
}

TEST(GeneralizedEigen, IdenticalPencilGivesOnes) {
  Rng rng(60);
  const Eigen::MatrixXd s = testing::random_spd(rng, 7);
  const auto sol = solve_generalized(s, s);
  EXPECT_LE((sol.eigenvalues.array() - 1.0).abs().maxCoeff(), 1e-10);
}

TEST(GeneralizedEigen, MatchesOracleD6) {
  Rng rng(61);
  const Eigen::MatrixXd a = testing::random_spd(rng, 6), b = testing::random_spd(rng, 6);
  const auto sol = solve_generalized(a, b);
  EXPECT_LE((sol.eigenvalues - testing::similarity_oracle(a, b)).cwiseAbs().maxCoeff(),
            1e-8 * std::max(1.0, sol.eigenvalues.cwiseAbs().maxCoeff()));
}

TEST(GeneralizedEigen, InvariantsOnRandomPencils) {
  Rng rng(62);
  for (int t = 0; t < 50; ++t) {
    const Index d = 1 + static_cast<Index>(rng.index(20));
    const Eigen::MatrixXd g = testing::random_matrix(rng, d, d);
    const Eigen::MatrixXd a = 0.5 * (g + g.transpose());  // indefinite A allowed
    const Eigen::MatrixXd b = testing::random_spd(rng, d, 0.5);
    const auto sol = solve_generalized(a, b);
    for (Index i = 1; i < d; ++i) EXPECT_LE(sol.eigenvalues(i - 1), sol.eigenvalues(i));
    const Eigen::MatrixXd& phi = sol.eigenvectors;
    EXPECT_LE((phi.transpose() * b * phi - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff(), 1e-8);
    for (Index i = 0; i < d; ++i) {
      const double res = (a * phi.col(i) - sol.eigenvalues(i) * b * phi.col(i)).norm();
      EXPECT_LE(res, 1e-8 * (a.norm() + std::abs(sol.eigenvalues(i)) * b.norm()));
      EXPECT_NEAR(sol.residual_norms(i), res, 1e-9 * (1.0 + a.norm()));
      Index arg = 0;
      phi.col(i).cwiseAbs().maxCoeff(&arg);
      EXPECT_GT(phi(arg, i), 0.0);
    }
    // Trace identity.
    double lhs = 0.0, rhs = 0.0;
    for (Index i = 0; i < d; ++i) {
      lhs += sol.eigenvalues(i) * phi.col(i).dot(b * phi.col(i));
      rhs += phi.col(i).dot(a * phi.col(i));
    }
    EXPECT_NEAR(lhs, rhs, 1e-8 * (1.0 + std::abs(rhs)));
  }
}

TEST(GeneralizedEigen, ScaleEquivariance) {
  Rng rng(63);
  const Eigen::MatrixXd a = testing::random_spd(rng, 5), b = testing::random_spd(rng, 5);
  const auto s1 = solve_generalized(a, b);
  const auto s2 = solve_generalized(3.5 * a, b);
  EXPECT_LE((3.5 * s1.eigenvalues - s2.eigenvalues).cwiseAbs().maxCoeff(), 1e-10);
  for (Index i = 0; i < 5; ++i) {
    const double cosine = std::abs(s1.eigenvectors.col(i).normalized().dot(
        s2.eigenvectors.col(i).normalized()));
    EXPECT_NEAR(cosine, 1.0, 1e-8);
  }
}

TEST(GeneralizedEigen, BitwiseReproducible) {
  Rng rng(64);
  const Eigen::MatrixXd a = testing::random_spd(rng, 9), b = testing::random_spd(rng, 9);
  const auto s1 = solve_generalized(a, b), s2 = solve_generalized(a, b);
  EXPECT_EQ(s1.eigenvectors, s2.eigenvectors);
  EXPECT_EQ(s1.eigenvalues, s2.eigenvalues);
}

TEST(GeneralizedEigen, RidgeLadderOnSingularB) {
  Rng rng(65);
  const Eigen::MatrixXd v = testing::random_matrix(rng, 6, 3);
  const Eigen::MatrixXd b = v * v.transpose();  // rank 3
  const Eigen::MatrixXd a = testing::random_spd(rng, 6);
  const auto sol = solve_generalized(a, b);
  EXPECT_GT(sol.ridge, 0.0);
  EXPECT_GT(sol.ridge_rung, 0u);
  const double unit = b.trace() / 6.0;
  EXPECT_NEAR(sol.ridge, RidgePolicy{}.ladder[sol.ridge_rung] * unit, 1e-20 + 1e-12 * sol.ridge);
  const Eigen::MatrixXd breg = b + sol.ridge * Eigen::MatrixXd::Identity(6, 6);
  // Backward error of a Cholesky-reduced solve grows with cond(B + eps I).
  const Eigen::VectorXd bev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(breg).eigenvalues();
  const double tol = 64.0 * std::numeric_limits<double>::epsilon() * bev.maxCoeff() / bev.minCoeff();
  for (Index i = 0; i < 6; ++i) {
    const auto phi = sol.eigenvectors.col(i);
    EXPECT_LE((a * phi - sol.eigenvalues(i) * breg * phi).norm(),
              tol * (a.norm() + std::abs(sol.eigenvalues(i)) * breg.norm()));
  }
}

TEST(GeneralizedEigen, SingularityErrorCarriesLadder) {
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(3, 3);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(3, 3);
  b(0, 0) = -1.0;  // indefinite: no ridge on the ladder rescues it
  try {
    solve_generalized(a, b);
    FAIL();
  } catch (const SingularityError& e) {
    EXPECT_EQ(e.attempted_ridges().size(), RidgePolicy{}.ladder.size());
    EXPECT_EQ(e.kind(), ErrorKind::Numerical);
  }
}

TEST(GeneralizedEigen, AsymmetryRejected) {
  Eigen::MatrixXd a(2, 2);
  a << 1, 0.5, 0, 1;
  EXPECT_THROW(solve_generalized(a, Eigen::MatrixXd::Identity(2, 2)), ValidationError);
  Eigen::MatrixXd tiny = Eigen::MatrixXd::Identity(2, 2);
  tiny(0, 1) = 1e-14;  // within tolerance
  EXPECT_NO_THROW(solve_generalized(tiny, Eigen::MatrixXd::Identity(2, 2)));
  EXPECT_THROW(solve_generalized(Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(3, 3)),
               ValidationError);
}

}  // namespace
}  // namespace ssma
