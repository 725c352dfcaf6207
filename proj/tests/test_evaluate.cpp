#include <gtest/gtest.h>

#include "ssma/error.hpp"
#include "ssma/experiment.hpp"
#include "ssma/linear_classifier.hpp"
#include "ssma/metrics.hpp"
#include "support.hpp"

namespace ssma {
namespace {

using Counts = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

TEST(Kappa, Diagonal) {
  Counts c = Counts::Zero(3, 3);
  c.diagonal() << 5, 9, 2;
  EXPECT_EQ(cohen_kappa(ConfusionMatrix(c)), 1.0);
}

TEST(Kappa, ProductMarginalIsZero) {
  // Outer product of row and column marginals (30,20,50) x (10,60,30) / 100.
  Counts c(3, 3);
  c << 3, 18, 9, 2, 12, 6, 5, 30, 15;
  EXPECT_NEAR(cohen_kappa(ConfusionMatrix(c)), 0.0, 1e-12);
}

TEST(Kappa, WorkedExample) {
  Counts c(2, 2);
  c << 30, 10, 10, 50;
  // p_o = 0.8, p_e = 0.4 * 0.4 + 0.6 * 0.6 = 0.52.
  EXPECT_NEAR(cohen_kappa(ConfusionMatrix(c)), 0.28 / 0.48, 1e-12);
  EXPECT_NEAR(cohen_kappa(ConfusionMatrix(c)), 0.5833, 1e-4);
  EXPECT_NEAR(overall_accuracy(ConfusionMatrix(c)), 0.8, 1e-15);
}

TEST(Kappa, PermutationInvariance) {
  Rng rng(100);
  Counts c(4, 4);
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 4; ++j) c(i, j) = static_cast<std::int64_t>(rng.index(20));
  const std::vector<Index> perm{2, 0, 3, 1};
  Counts p(4, 4);
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 4; ++j) p(i, j) = c(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  EXPECT_NEAR(cohen_kappa(ConfusionMatrix(c)), cohen_kappa(ConfusionMatrix(p)), 1e-14);
}

TEST(Kappa, OneIffDiagonal) {
  Counts c = Counts::Zero(2, 2);
  c(0, 0) = 7;
  EXPECT_EQ(cohen_kappa(ConfusionMatrix(c)), 1.0);  // single class, perfect
  c(1, 0) = 1;
  EXPECT_LT(cohen_kappa(ConfusionMatrix(c)), 1.0);
}

TEST(Kappa, EmptyAndMalformed) {
  EXPECT_THROW(cohen_kappa(ConfusionMatrix(2)), ValidationError);
  EXPECT_THROW(ConfusionMatrix(Counts::Zero(2, 3)), ValidationError);
  Counts neg = Counts::Zero(2, 2);
  neg(0, 1) = -1;
  EXPECT_THROW(ConfusionMatrix{neg}, ValidationError);
}

TEST(ConfusionMatrix, FromLabels) {
  const std::vector<int> truth{1, 1, 2, 3, 3}, pred{1, 2, 2, 3, 1};
  const auto cm = ConfusionMatrix::from_labels(3, truth, pred);
  EXPECT_EQ(cm.total(), 5);
  EXPECT_EQ(cm(1, 1), 1);
  EXPECT_EQ(cm(1, 2), 1);
  EXPECT_EQ(cm(3, 1), 1);
  EXPECT_THROW(ConfusionMatrix::from_labels(2, truth, pred), ValidationError);
  EXPECT_THROW(ConfusionMatrix::from_labels(3, truth, std::vector<int>{1}), ValidationError);
}

TEST(LinearClassifier, SeparableEveryC) {
  Rng rng(101);
  Eigen::MatrixXd x(2, 60);
  std::vector<int> y;
  for (Index i = 0; i < 60; ++i) {
    const int c = i % 2;
    x.col(i) << (c ? 3.0 : -3.0) + 0.5 * rng.normal(), rng.normal();
    y.push_back(c + 1);
  }
  for (double c : LinearTrainOptions{}.c_grid) {
    const auto model = train_linear_fixed(x, y, c);
    const auto pred = model.predict(x);
    EXPECT_EQ(pred, y) << "C = " << c;
  }
}

TEST(LinearClassifier, FlippedDuplicateGivesHalfAccuracy) {
  Rng rng(102);
  const Eigen::MatrixXd base = testing::random_matrix(rng, 2, 20);
  Eigen::MatrixXd x(2, 40);
  x << base, base;
  std::vector<int> y;
  for (int i = 0; i < 20; ++i) y.push_back(1 + (base(0, i) > 0));
  for (int i = 0; i < 20; ++i) y.push_back(3 - y[static_cast<std::size_t>(i)]);
  const auto model = train_linear(x, y);
  const auto pred = model.predict(x);
  EXPECT_EQ(pred, model.predict(x));  // deterministic
  int correct = 0;
  for (std::size_t i = 0; i < y.size(); ++i) correct += pred[i] == y[i];
  EXPECT_EQ(correct, 20);
}

TEST(LinearClassifier, ArgmaxTiesGoToSmallestClass) {
  const LinearModel model({1, 2, 3}, Eigen::MatrixXd::Zero(3, 1),
                          Eigen::VectorXd::Zero(3), Standardization::identity(1), 1.0);
  EXPECT_EQ(model.predict(Eigen::MatrixXd::Ones(1, 4)), (std::vector<int>{1, 1, 1, 1}));
}

TEST(LinearClassifier, ThreeBlobsAgreeWithNearestMean) {
  Rng rng(103);
  const double sigma = 1.0;
  const Eigen::Vector2d centers[3] = {{0.0, 0.0}, {5.0, 0.0}, {2.5, 4.33}};
  auto draw = [&](Index per, Eigen::MatrixXd& x, std::vector<int>& y) {
    x.resize(2, 3 * per);
    y.clear();
    for (Index i = 0; i < 3 * per; ++i) {
      const int c = static_cast<int>(i % 3);
      x.col(i) = centers[c] + sigma * Eigen::Vector2d(rng.normal(), rng.normal());
      y.push_back(c + 1);
    }
  };
  Eigen::MatrixXd xtr, xte;
  std::vector<int> ytr, yte;
  draw(100, xtr, ytr);
  draw(500, xte, yte);
  const auto pred = train_linear(xtr, ytr).predict(xte);

  // Nearest-class-mean oracle with means estimated on the training set.
  Eigen::MatrixXd means = Eigen::MatrixXd::Zero(2, 3);
  for (Index i = 0; i < xtr.cols(); ++i) means.col(ytr[static_cast<std::size_t>(i)] - 1) += xtr.col(i) / 100.0;
  int svm_ok = 0, oracle_ok = 0;
  for (Index i = 0; i < xte.cols(); ++i) {
    Index best = 0;
    (means.colwise() - xte.col(i)).colwise().squaredNorm().minCoeff(&best);
    oracle_ok += static_cast<int>(best) + 1 == yte[static_cast<std::size_t>(i)];
    svm_ok += pred[static_cast<std::size_t>(i)] == yte[static_cast<std::size_t>(i)];
  }
  const double n = static_cast<double>(xte.cols());
  // Bayes accuracy for centres 5 sigma apart is about 0.988.
  EXPECT_GE(svm_ok / n, 0.97);
  EXPECT_GE(svm_ok / n, oracle_ok / n - 0.01);
}

TEST(LinearClassifier, CrossValidationPicksFromGridDeterministically) {
  Rng rng(104);
  const Eigen::MatrixXd x = testing::random_matrix(rng, 3, 80);
  std::vector<int> y;
  for (Index i = 0; i < 80; ++i) y.push_back(1 + (x(0, i) + 0.3 * x(1, i) > 0.0));
  const auto a = train_linear(x, y), b = train_linear(x, y);
  const auto grid = LinearTrainOptions{}.c_grid;
  EXPECT_NE(std::find(grid.begin(), grid.end(), a.c()), grid.end());
  EXPECT_EQ(a.c(), b.c());
  EXPECT_EQ(a.decision_values(x), b.decision_values(x));
}

TEST(LinearClassifier, Errors) {
  EXPECT_THROW(train_linear(Eigen::MatrixXd::Zero(2, 3), std::vector<int>{1, 1, 1}), ValidationError);
  EXPECT_THROW(train_linear(Eigen::MatrixXd::Zero(2, 3), std::vector<int>{1, 2}), ValidationError);
  EXPECT_THROW(train_linear_fixed(Eigen::MatrixXd::Zero(1, 2), std::vector<int>{1, 2}, 0.0),
               ParameterError);
  const auto model = train_linear_fixed(Eigen::MatrixXd::Identity(2, 2), std::vector<int>{1, 2}, 1.0);
  EXPECT_THROW(model.predict(Eigen::MatrixXd::Zero(3, 1)), ValidationError);
}

TEST(Pca, ComponentsOrderedAndSigned) {
  Rng rng(105);
  Eigen::MatrixXd x = testing::random_matrix(rng, 3, 500);
  x.row(0) *= 5.0;
  x.row(2) *= 2.0;
  const auto p = PcaProjector::fit(x, 2);
  EXPECT_TRUE((p.components.transpose() * p.components).isIdentity(1e-12));
  EXPECT_GT(std::abs(p.components(0, 0)), 0.99);
  EXPECT_GT(std::abs(p.components(2, 1)), 0.99);
  for (Index c = 0; c < 2; ++c) EXPECT_GT(p.components.col(c).maxCoeff(), 0.0);
  const Eigen::MatrixXd z = p.apply(x);
  EXPECT_GT(z.row(0).squaredNorm(), z.row(1).squaredNorm());
  EXPECT_THROW(PcaProjector::fit(x, 4), ParameterError);
}

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.synthetic = SyntheticRecipe{};
  cfg.synthetic->n_per_class = 80;
  cfg.leading_budget = 10;
  cfg.budgets = {0, 5, 10};
  cfg.unlabeled = 40;
  cfg.seeds = {1, 2};
  cfg.methods = {Method::None, Method::Ssma, Method::Pca};
  cfg.classifier.c_grid = {100.0, 1000.0};
  return cfg;
}

TEST(Experiment, TableShapeAndDeterminism) {
  const auto cfg = small_config();
  const auto a = run_experiment(cfg);
  // 2 test domains x 3 budgets x 3 methods x 2 seeds.
  EXPECT_EQ(a.rows.size(), 2u * 3u * 3u * 2u);
  const auto b = run_experiment(cfg);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].kappa, b.rows[i].kappa);
    EXPECT_EQ(a.rows[i].dims, b.rows[i].dims);
    EXPECT_EQ(a.rows[i].test_domain, b.rows[i].test_domain);
  }
  for (const auto& r : a.rows) {
    EXPECT_GE(r.kappa, -1.0);
    EXPECT_LE(r.kappa, 1.0);
    if (r.method == Method::Pca) EXPECT_EQ(r.dims, 2);
    if (r.method == Method::None) EXPECT_EQ(r.dims, 2);
    if (r.method == Method::Ssma) {
      EXPECT_GE(r.dims, 1);
      EXPECT_LE(r.dims, 4);
    }
  }
  EXPECT_NO_THROW(mean_kappa(a, Method::Ssma, "2", 10));
  EXPECT_THROW(mean_kappa(a, Method::Ssma, "2", 7), ValidationError);
}

TEST(Experiment, NoShiftNoneBaselineSimilarAcrossDomains) {
  auto cfg = small_config();
  cfg.synthetic->setting = "none";
  cfg.synthetic->n_per_class = 200;
  cfg.methods = {Method::None};
  cfg.budgets = {10};
  cfg.seeds = {1, 2, 3};
  const auto r = run_experiment(cfg);
  EXPECT_NEAR(mean_kappa(r, Method::None, "1", 10), mean_kappa(r, Method::None, "2", 10), 0.05);
}

TEST(Experiment, NoneWithMixedDimsIsConfigurationError) {
  Rng rng(106);
  const auto ds = testing::random_dataset(rng, {8, 4}, {60, 60}, 2, 1.0);
  ExperimentConfig cfg;
  cfg.methods = {Method::None, Method::Ssma};
  try {
    run_experiment(cfg, ds);
    FAIL();
  } catch (const ParameterError& e) {
    EXPECT_NE(std::string(e.what()).find("methods"), std::string::npos);
  }
}

TEST(Experiment, ValidateNamesFields) {
  auto expect_field = [](ExperimentConfig cfg, const std::string& field) {
    try {
      cfg.validate();
      FAIL() << field;
    } catch (const ParameterError& e) {
      EXPECT_NE(std::string(e.what()).find(field), std::string::npos) << e.what();
    }
  };
  ExperimentConfig c;
  c.test_fraction = 1.5;
  expect_field(c, "test_fraction");
  c = {};
  c.budgets.clear();
  expect_field(c, "budgets");
  c = {};
  c.methods.clear();
  expect_field(c, "methods");
  c = {};
  c.seeds.clear();
  expect_field(c, "seeds");
  c = {};
  c.synthetic = SyntheticRecipe{};
  c.synthetic->classes = 1;
  expect_field(c, "synthetic.classes");
  EXPECT_THROW(parse_method("lda"), ParameterError);
  EXPECT_EQ(parse_method(method_name(Method::Pca)), Method::Pca);
}

}  // namespace
}  // namespace ssma
