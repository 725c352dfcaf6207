#include "ssma/generalized_eigen.hpp"

#include <cmath>
#include <sstream>

#include "ssma/error.hpp"

namespace ssma {

namespace {

Eigen::MatrixXd checked_symmetric(const Eigen::MatrixXd& m, const char* name) {
  if (m.rows() != m.cols())
    throw ValidationError(std::string("matrix ") + name + " is not square");
  if (!m.allFinite())
    throw ValidationError(std::string("matrix ") + name +
                          " has non-finite entries");
  const double asym = (m - m.transpose()).norm();
  if (asym > 1e-10 * std::max(m.norm(), 1e-300))
    throw ValidationError(std::string("matrix ") + name +
                          " is not symmetric (asymmetry " +
                          std::to_string(asym) + ")");
  return 0.5 * (m + m.transpose());
}

}  // namespace

EigenSolution solve_generalized(const Eigen::MatrixXd& a_in,
                                const Eigen::MatrixXd& b_in,
                                const RidgePolicy& policy) {
  const Eigen::MatrixXd a = checked_symmetric(a_in, "A");
  const Eigen::MatrixXd b = checked_symmetric(b_in, "B");
  if (a.rows() != b.rows())
    throw ValidationError("pencil matrices differ in size");
  const Eigen::Index d = a.rows();
  if (d == 0) throw ValidationError("empty pencil");

  const double unit = std::abs(b.trace()) / static_cast<double>(d);
  std::vector<double> tried;
  for (std::size_t rung = 0; rung < policy.ladder.size(); ++rung) {
    const double eps = policy.ladder[rung] * unit;
    if (!std::isfinite(eps) || eps < 0.0) continue;
    tried.push_back(eps);

    Eigen::MatrixXd metric = b;
    metric.diagonal().array() += eps;
    Eigen::LLT<Eigen::MatrixXd> llt(metric);
    if (llt.info() != Eigen::Success) continue;
    const Eigen::MatrixXd lower = llt.matrixL();
    const Eigen::VectorXd pivots = lower.diagonal().array().square();
    if (!(pivots.minCoeff() > 0.0) ||
        pivots.minCoeff() < policy.min_pivot_ratio * pivots.maxCoeff())
      continue;

    // C = L^{-1} A L^{-T}; eigenvectors map back through L^{-T}.
    Eigen::MatrixXd c = llt.matrixL().solve(a);
    c = llt.matrixL().solve(c.transpose().eval());
    c = 0.5 * (c + c.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c);
    if (eig.info() != Eigen::Success)
      throw NumericalError("symmetric eigensolver did not converge");

    EigenSolution sol;
    sol.eigenvalues = eig.eigenvalues();
    sol.eigenvectors = llt.matrixU().solve(eig.eigenvectors());
    sol.ridge = eps;
    sol.ridge_rung = rung;

    sol.residual_norms.resize(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      auto phi = sol.eigenvectors.col(i);
      Eigen::Index arg = 0;
      phi.cwiseAbs().maxCoeff(&arg);
      if (phi(arg) < 0.0) phi = -phi;
      sol.residual_norms(i) =
          (a * phi - sol.eigenvalues(i) * (metric * phi)).norm();
    }
    return sol;
  }

  std::ostringstream msg;
  msg << "B + eps*I is not positive definite for any ridge in {";
  for (std::size_t i = 0; i < tried.size(); ++i)
    msg << (i ? ", " : "") << tried[i];
  msg << "}";
  throw SingularityError(msg.str(), tried);
}

}  // namespace ssma
