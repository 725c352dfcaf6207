#include <gtest/gtest.h>

#include "ssma/alignment.hpp"
#include "ssma/error.hpp"
#include "ssma/linear_classifier.hpp"
#include "ssma/synth.hpp"
#include "support.hpp"

namespace ssma {
namespace {

AlignmentParams small_params(Index k = 4) {
  AlignmentParams p;
  p.k = k;
  return p;
}

// Latent coordinates of every sample, computed per domain from f^m and the
// stored standardization without touching the joint block matrix.
Eigen::MatrixXd latent_by_domain(const MultiDomainDataset& ds,
                                 const AlignmentProblem& problem,
                                 const Eigen::MatrixXd& f) {
  Eigen::MatrixXd z(f.cols(), ds.total_samples());
  Index col = 0, row = 0;
  for (std::size_t m = 0; m < ds.domain_count(); ++m) {
    const auto& dom = ds.domain(m);
    const Eigen::MatrixXd fm = f.middleRows(row, dom.dims());
    const Eigen::MatrixXd xs = problem.standardization[m].apply(dom.features);
    for (Index i = 0; i < dom.samples(); ++i) z.col(col++) = fm.transpose() * xs.col(i);
    row += dom.dims();
  }
  return z;
}

TEST(Alignment, ToyPairGivesFourByFour) {
  const auto ds = make_spiral_pair(40, 3, toy_setting("sr"), 1);
  const auto model = fit(ds, AlignmentParams{});
  EXPECT_EQ(model.projector.rows(), 4);
  EXPECT_EQ(model.projector.cols(), 4);
  EXPECT_EQ(model.domain_dims, (std::vector<Index>{2, 2}));
  EXPECT_EQ(model.block(0).rows(), 2);
  EXPECT_EQ(model.block(1).rows(), 2);
  EXPECT_EQ(model.chosen_dims, 4);
}

TEST(Alignment, Dims884GiveTwentyByTwenty) {
  Rng rng(70);
  const auto ds = testing::random_dataset(rng, {8, 8, 4}, {40, 40, 40}, 3, 0.5);
  const auto model = fit(ds, AlignmentParams{});
  EXPECT_EQ(model.projector.rows(), 20);
  EXPECT_EQ(model.projector.cols(), 20);
  EXPECT_EQ(model.block(0), model.projector.topRows(8));
  EXPECT_EQ(model.block(1), model.projector.middleRows(8, 8));
  EXPECT_EQ(model.block(2), model.projector.bottomRows(4));
}

TEST(Alignment, MatrixFormsEqualDoubleSums) {
  Rng rng(71);
  for (int t = 0; t < 20; ++t) {
    const Index m = 1 + static_cast<Index>(rng.index(3));
    std::vector<Index> dims, samples;
    for (Index i = 0; i < m; ++i) {
      dims.push_back(1 + static_cast<Index>(rng.index(4)));
      samples.push_back(10 + static_cast<Index>(rng.index(50)));
    }
    const auto ds = testing::random_dataset(rng, dims, samples, 2 + static_cast<int>(rng.index(3)), 0.5);
    AlignmentParams params = small_params(1 + static_cast<Index>(rng.index(8)));
    params.mu = rng.uniform(0.0, 3.0);
    const auto problem = build_problem(ds, params);
    const auto model = fit(problem, ds, params);

    const Eigen::MatrixXd z = latent_by_domain(ds, problem, model.projector);
    const double g = 0.5 * testing::pair_sum(problem.geometry.dense(), z);
    const double s = 0.5 * testing::pair_sum(problem.similarity.dense(), z);
    const double d = 0.5 * testing::pair_sum(problem.dissimilarity.dense(), z);
    const auto terms = objective_terms(problem, model.projector);
    const auto& f = model.projector;
    const double scale = 1.0 + std::abs(g) + std::abs(s) + std::abs(d);
    EXPECT_NEAR(terms.geometry, g, 1e-8 * scale);
    EXPECT_NEAR(terms.similarity, s, 1e-8 * scale);
    EXPECT_NEAR(terms.dissimilarity, d, 1e-8 * scale);
    EXPECT_NEAR((f.transpose() * problem.a * f).trace(), params.mu * g + s, 1e-8 * scale);
    EXPECT_NEAR((f.transpose() * problem.b * f).trace(), d, 1e-8 * scale);
  }
}

TEST(Alignment, PencilSymmetricAndPsd) {
  Rng rng(72);
  const auto ds = testing::random_dataset(rng, {3, 2}, {30, 25}, 3, 0.5);
  const auto p = build_problem(ds, small_params());
  for (const Eigen::MatrixXd* m : {&p.a, &p.b}) {
    EXPECT_LE((*m - m->transpose()).cwiseAbs().maxCoeff(), 1e-10 * m->norm());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(*m, Eigen::EigenvaluesOnly);
    EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-8);
  }
  EXPECT_NEAR(p.geometry.frobenius_norm(), 1.0, 1e-12);
  EXPECT_NEAR(p.similarity.frobenius_norm(), 1.0, 1e-12);
  EXPECT_NEAR(p.dissimilarity.frobenius_norm(), 1.0, 1e-12);
}

TEST(Alignment, ZeroMuLeavesOnlySimilarity) {
  Rng rng(73);
  const auto ds = testing::random_dataset(rng, {2, 3}, {20, 20}, 2, 0.5);
  AlignmentParams params = small_params();
  params.mu = 0.0;
  const auto p = build_problem(ds, params);
  EXPECT_EQ(p.a, gram_laplacian(p.x.values, p.similarity_laplacian));
  const auto model = fit(ds, params);
  EXPECT_EQ(model.params.mu, 0.0);
}

TEST(Alignment, ColumnsScaledBySqrtLambda) {
  Rng rng(74);
  const auto ds = testing::random_dataset(rng, {2, 2}, {30, 30}, 3, 0.5);
  const auto p = build_problem(ds, small_params());
  const auto model = fit(p, ds, small_params());
  const Eigen::MatrixXd metric = p.b + model.ridge * Eigen::MatrixXd::Identity(4, 4);
  const Eigen::MatrixXd gram = model.projector.transpose() * metric * model.projector;
  for (Index i = 0; i < 4; ++i)
    EXPECT_NEAR(gram(i, i), std::max(model.eigenvalues(i), 0.0), 1e-9);
  for (Index i = 1; i < 4; ++i) EXPECT_LE(model.eigenvalues(i - 1), model.eigenvalues(i));
}

TEST(Alignment, OptimalityAgainstRandomProjectors) {
  Rng rng(75);
  for (int t = 0; t < 3; ++t) {
    const auto ds = testing::random_dataset(rng, {1, 2}, {25, 25}, 2, 0.6);
    const auto p = build_problem(ds, small_params());
    const auto model = fit(p, ds, small_params());
    const Eigen::MatrixXd metric = p.b + model.ridge * Eigen::MatrixXd::Identity(3, 3);
    for (Index r = 1; r <= 3; ++r) {
      const double fitted = trace_ratio(p.a, metric, model.projector.leftCols(r));
      EXPECT_NEAR(fitted, model.eigenvalues.head(r).sum(), 1e-9 * (1.0 + std::abs(fitted)));
      for (int c = 0; c < 2000; ++c) {
        const double cand = trace_ratio(p.a, metric, testing::random_orthonormal(rng, 3, r));
        EXPECT_GE(cand, fitted - 1e-9);
      }
    }
  }
}

TEST(Alignment, Preconditions) {
  Rng rng(76);
  const auto ds = testing::random_dataset(rng, {2, 2}, {8, 30}, 2, 0.5);
  EXPECT_THROW(fit(ds, AlignmentParams{}), ParameterError);  // 8 samples, k = 9
  AlignmentParams bad = small_params();
  bad.mu = -1.0;
  EXPECT_THROW(fit(ds, bad), ParameterError);
  bad = small_params();
  bad.k = 0;
  EXPECT_THROW(fit(ds, bad), ParameterError);
  bad = small_params();
  bad.dims = 5;
  EXPECT_THROW(fit(ds, bad), ParameterError);
  // Class 3 never labeled anywhere.
  DomainDataset dom{"a", testing::random_matrix(rng, 2, 12), {}, {}};
  for (int i = 0; i < 12; ++i) dom.labels.emplace_back(1 + i % 2);
  EXPECT_THROW(fit(MultiDomainDataset({dom}, 3), small_params()), ValidationError);
}

TEST(Alignment, DomainWithoutLabelsAllowed) {
  Rng rng(77);
  auto ds = testing::random_dataset(rng, {2, 2}, {30, 30}, 2, 0.5);
  auto domains = ds.domains();
  for (auto& l : domains[1].labels) l.reset();
  const auto model = fit(MultiDomainDataset(domains, 2), small_params());
  EXPECT_EQ(model.projector.rows(), 4);
}

AlignmentModel identity_model(const std::vector<Index>& dims) {
  AlignmentModel m;
  Index d = 0;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    m.domain_ids.push_back("d" + std::to_string(i + 1));
    m.domain_dims.push_back(dims[i]);
    m.standardization.push_back(Standardization::identity(dims[i]));
    d += dims[i];
  }
  m.projector = Eigen::MatrixXd::Identity(d, d);
  m.eigenvalues = Eigen::VectorXd::Ones(d);
  m.chosen_dims = d;
  m.class_count = 2;
  return m;
}

TEST(Project, IdentityBlockReturnsLeadingCoordinates) {
  // d = 3 + 3; the first domain's block is [I_3 | 0].
  const auto model = identity_model({3, 3});
  Rng rng(78);
  const Eigen::MatrixXd x = testing::random_matrix(rng, 3, 10);
  EXPECT_EQ(project(model, "d1", x, 2), x.topRows(2));
  EXPECT_EQ(project(model, "d1", x, 3), x);
}

TEST(Project, LinearityAndBlockLocality) {
  Rng rng(79);
  const auto ds = testing::random_dataset(rng, {3, 2}, {30, 30}, 2, 0.5);
  AlignmentParams params = small_params();
  params.standardize = false;
  const auto model = fit(ds, params);
  const Eigen::MatrixXd x1 = testing::random_matrix(rng, 3, 7), x2 = testing::random_matrix(rng, 3, 7);
  const Eigen::MatrixXd lhs = project(model, "d1", 2.0 * x1 - 0.5 * x2, 5);
  const Eigen::MatrixXd rhs = 2.0 * project(model, "d1", x1, 5) - 0.5 * project(model, "d1", x2, 5);
  EXPECT_LE((lhs - rhs).cwiseAbs().maxCoeff(), 1e-10 * (1.0 + lhs.cwiseAbs().maxCoeff()));

  // Editing another domain's block leaves this domain's projection unchanged.
  AlignmentModel edited = model;
  edited.projector.bottomRows(2).setRandom();
  EXPECT_EQ(project(edited, "d1", x1, 5), project(model, "d1", x1, 5));
}

TEST(Project, Errors) {
  const auto model = identity_model({2, 2});
  EXPECT_THROW(project(model, "nope", Eigen::MatrixXd::Zero(2, 1), 1), ValidationError);
  EXPECT_THROW(project(model, "d1", Eigen::MatrixXd::Zero(3, 1), 1), ValidationError);
  EXPECT_THROW(project(model, "d1", Eigen::MatrixXd::Zero(2, 1), 0), ParameterError);
  EXPECT_THROW(project(model, "d1", Eigen::MatrixXd::Zero(2, 1), 5), ParameterError);
}

TEST(Project, ToyAlignmentShrinksCrossDomainClassDistances) {
  const auto ds = make_spiral_pair(150, 3, toy_setting("sr"), 5);
  const auto model = fit(ds, AlignmentParams{});
  auto class_means = [&](const Eigen::MatrixXd& x, const DomainDataset& dom) {
    Eigen::MatrixXd means = Eigen::MatrixXd::Zero(x.rows(), 3);
    Eigen::Vector3d n = Eigen::Vector3d::Zero();
    for (Index i = 0; i < x.cols(); ++i) {
      const int c = *dom.labels[static_cast<std::size_t>(i)] - 1;
      means.col(c) += x.col(i);
      n(c) += 1;
    }
    for (int c = 0; c < 3; ++c) means.col(c) /= n(c);
    return means;
  };
  // Ratio of same-class cross-domain distance to the spread of class means,
  // raw (standardized) versus latent.
  auto ratio = [&](const Eigen::MatrixXd& m1, const Eigen::MatrixXd& m2) {
    double same = 0.0, spread = 0.0;
    for (int c = 0; c < 3; ++c) {
      same += (m1.col(c) - m2.col(c)).norm();
      for (int e = 0; e < 3; ++e) spread += (m1.col(c) - m1.col(e)).norm();
    }
    return same / spread;
  };
  const auto& d1 = ds.domain(0);
  const auto& d2 = ds.domain(1);
  const double raw = ratio(class_means(model.standardization[0].apply(d1.features), d1),
                           class_means(model.standardization[1].apply(d2.features), d2));
  const double latent = ratio(class_means(project(model, "1", d1.features, 2), d1),
                              class_means(project(model, "2", d2.features, 2), d2));
  EXPECT_LT(latent, 0.5 * raw) << "raw " << raw << " latent " << latent;
}

TEST(Synthesize, RoundTripAndZeroInput) {
  Rng rng(80);
  const auto ds = testing::random_dataset(rng, {3, 2}, {30, 30}, 3, 0.6);
  const auto model = fit(ds, small_params());
  const auto& x = ds.domain(0).features;
  const Eigen::MatrixXd back = synthesize(model, "d1", "d1", x, model.total_dims());
  EXPECT_LE((back - x).norm(), 1e-6 * x.norm());
  // Zero standardized input: the synthesized point is the destination mean.
  const Eigen::MatrixXd zero_std = model.standardization[0].mean;
  const Eigen::MatrixXd out = synthesize(model, "d1", "d2", zero_std, model.total_dims());
  EXPECT_LE((out - model.standardization[1].mean).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_THROW(synthesize(model, "d1", "zz", x, 5), ValidationError);
  EXPECT_THROW(synthesize(model, "d1", "d2", x, 0), ParameterError);
  EXPECT_THROW(synthesize(model, "d1", "d2", x, 6), ParameterError);
}

TEST(Synthesize, RankZeroDestinationRejected) {
  auto model = identity_model({2, 2});
  model.projector.bottomRows(2).setZero();
  EXPECT_THROW(synthesize(model, "d1", "d2", Eigen::MatrixXd::Ones(2, 1), 4), NumericalError);
}

TEST(Synthesize, IdenticalDomainsKeepClassOfNearestNeighbour) {
  const auto ds = make_spiral_pair(150, 3, Deformation{}, 6);
  const auto model = fit(ds, AlignmentParams{});
  const auto& src = ds.domain(0);
  const auto& dst = ds.domain(1);
  // The two smallest-eigenvalue directions carry the alignment.
  const Eigen::MatrixXd y = synthesize(model, "1", "2", src.features, 2);
  Index agree = 0;
  for (Index i = 0; i < y.cols(); ++i) {
    Index best = 0;
    (dst.features.colwise() - y.col(i)).colwise().squaredNorm().minCoeff(&best);
    if (dst.labels[static_cast<std::size_t>(best)] == src.labels[static_cast<std::size_t>(i)]) ++agree;
  }
  EXPECT_GE(static_cast<double>(agree) / static_cast<double>(y.cols()), 0.9);
}

TEST(StratifiedFolds, BalancedAndDeterministic) {
  std::vector<int> labels;
  for (int i = 0; i < 23; ++i) labels.push_back(1 + i % 3);
  const auto f1 = stratified_folds(labels, 4, 9);
  EXPECT_EQ(f1, stratified_folds(labels, 4, 9));
  for (int c = 1; c <= 3; ++c) {
    std::vector<int> count(4, 0);
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == c) ++count[static_cast<std::size_t>(f1[i])];
    EXPECT_LE(*std::max_element(count.begin(), count.end()) -
                  *std::min_element(count.begin(), count.end()),
              1);
  }
  EXPECT_THROW(stratified_folds(labels, 1, 0), ParameterError);
}

TEST(SelectDims, PerfectClassifierPicksOne) {
  const auto model = identity_model({2, 2});
  Rng rng(81);
  const Eigen::MatrixXd latent = testing::random_matrix(rng, 4, 30);
  std::vector<int> labels;
  for (int i = 0; i < 30; ++i) labels.push_back(1 + i % 2);
  // The oracle classifier memorises the true labels by column position.
  const FitPredict oracle = [&](const Eigen::MatrixXd&, std::span<const int>,
                                const Eigen::MatrixXd& test) {
    std::vector<int> out;
    for (Index j = 0; j < test.cols(); ++j)
      for (Index i = 0; i < latent.cols(); ++i)
        if (latent(0, i) == test(0, j)) out.push_back(labels[static_cast<std::size_t>(i)]);
    return out;
  };
  const auto sel = select_dims(model, latent, labels, oracle, 5, 1);
  EXPECT_EQ(sel.dims, 1);
  for (double k : sel.kappa_by_dims) EXPECT_EQ(k, 1.0);
}

TEST(SelectDims, SignalInLeadingDimsMatchesExhaustiveSweep) {
  const auto model = identity_model({3, 3});
  Rng rng(82);
  Eigen::MatrixXd latent = testing::random_matrix(rng, 6, 120);
  std::vector<int> labels;
  for (Index i = 0; i < latent.cols(); ++i) {
    labels.push_back(latent(0, i) > 0.0 ? 2 : 1);
    latent(0, i) += latent(0, i) > 0.0 ? 1.0 : -1.0;  // margin
  }
  LinearTrainOptions opts;
  opts.c_grid = {100.0};
  const auto classifier = linear_fit_predict(opts);
  const auto sel = select_dims(model, latent, labels, classifier, 5, 3);
  EXPECT_TRUE(sel.dims == 1 || sel.dims == 2) << sel.dims;

  // Exhaustive oracle: the same fold assignment, scored independently.
  const auto folds = stratified_folds(labels, 5, 3);
  std::vector<double> kappas;
  for (Index r = 1; r <= 6; ++r) {
    Index agree = 0;
    Eigen::Matrix2d cm = Eigen::Matrix2d::Zero();
    for (int f = 0; f < 5; ++f) {
      std::vector<Index> tr, te;
      for (std::size_t i = 0; i < labels.size(); ++i) (folds[i] == f ? te : tr).push_back(static_cast<Index>(i));
      std::vector<int> ytr;
      for (Index i : tr) ytr.push_back(labels[static_cast<std::size_t>(i)]);
      const auto pred = classifier(latent(Eigen::seqN(0, r), tr), ytr, latent(Eigen::seqN(0, r), te));
      for (std::size_t j = 0; j < te.size(); ++j) {
        cm(labels[static_cast<std::size_t>(te[j])] - 1, pred[j] - 1) += 1;
        agree += pred[j] == labels[static_cast<std::size_t>(te[j])];
      }
    }
    const double n = cm.sum();
    const double po = cm.trace() / n;
    const double pe = (cm.rowwise().sum().array() * cm.colwise().sum().transpose().array()).sum() / (n * n);
    kappas.push_back((po - pe) / (1.0 - pe));
  }
  const double best = *std::max_element(kappas.begin(), kappas.end());
  Index expected = 0;
  for (std::size_t r = 0; r < kappas.size(); ++r)
    if (kappas[r] >= best - 0.005) {
      expected = static_cast<Index>(r) + 1;
      break;
    }
  EXPECT_EQ(sel.dims, expected);
  for (std::size_t r = 0; r < kappas.size(); ++r)
    EXPECT_NEAR(sel.kappa_by_dims[r], kappas[r], 1e-12);
}

TEST(SelectDims, DeterministicOnToy) {
  const auto ds = make_spiral_pair(60, 3, toy_setting("sr"), 8);
  const auto model = fit(ds, AlignmentParams{});
  Eigen::MatrixXd latent(4, ds.total_samples());
  latent << project(model, "1", ds.domain(0).features, 4), project(model, "2", ds.domain(1).features, 4);
  std::vector<int> labels;
  for (const auto& l : ds.joint_labels()) labels.push_back(*l);
  LinearTrainOptions opts;
  opts.c_grid = {100.0};
  const auto a = select_dims(model, latent, labels, linear_fit_predict(opts), 5, 4);
  const auto b = select_dims(model, latent, labels, linear_fit_predict(opts), 5, 4);
  EXPECT_EQ(a.dims, b.dims);
  EXPECT_EQ(a.kappa_by_dims, b.kappa_by_dims);
}

TEST(SelectDims, Errors) {
  const auto model = identity_model({1, 1});
  const Eigen::MatrixXd latent = Eigen::MatrixXd::Zero(2, 6);
  const std::vector<int> labels{1, 1, 1, 2, 2, 2};
  const FitPredict dummy = [](const Eigen::MatrixXd&, std::span<const int>,
                              const Eigen::MatrixXd& t) {
    return std::vector<int>(static_cast<std::size_t>(t.cols()), 1);
  };
  EXPECT_THROW(select_dims(model, latent, labels, dummy, 4, 0), ParameterError);
  const std::vector<int> single{1, 1, 1, 1, 1, 1};
  EXPECT_THROW(select_dims(model, latent, single, dummy, 2, 0), ValidationError);
  EXPECT_THROW(select_dims(model, Eigen::MatrixXd::Zero(3, 6), labels, dummy, 2, 0),
               ValidationError);
}

}  // namespace
}  // namespace ssma
