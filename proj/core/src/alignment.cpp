#include "ssma/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "ssma/error.hpp"
#include "ssma/metrics.hpp"
#include "ssma/random.hpp"

namespace ssma {

void AlignmentParams::validate() const {
  if (!(mu >= 0.0) || !std::isfinite(mu))
    throw ParameterError("mu must be a finite value >= 0");
  if (k < 1) throw ParameterError("k must be >= 1");
  if (dims && *dims < 1) throw ParameterError("dims must be >= 1");
  if (ridge.ladder.empty()) throw ParameterError("ridge ladder is empty");
}

std::size_t AlignmentModel::domain_index(const std::string& id) const {
  auto it = std::find(domain_ids.begin(), domain_ids.end(), id);
  if (it == domain_ids.end())
    throw ValidationError("model has no domain '" + id + "'");
  return static_cast<std::size_t>(it - domain_ids.begin());
}

Eigen::MatrixXd AlignmentModel::block(std::size_t m) const {
  Index offset = 0;
  for (std::size_t i = 0; i < m; ++i) offset += domain_dims[i];
  return projector.middleRows(offset, domain_dims.at(m));
}

AlignmentModel AlignmentModel::with_chosen_dims(Index r) const {
  if (r < 1 || r > total_dims())
    throw ParameterError("latent dimension must lie in 1.." +
                         std::to_string(total_dims()));
  AlignmentModel out = *this;
  out.chosen_dims = r;
  return out;
}

Eigen::MatrixXd gram_laplacian(const Eigen::MatrixXd& x, const Laplacian& l) {
  const Eigen::MatrixXd xl = x * l.matrix();
  Eigen::MatrixXd g = xl * x.transpose();
  return 0.5 * (g + g.transpose());
}

AlignmentProblem build_problem(const MultiDomainDataset& ds,
                               const AlignmentParams& params) {
  params.validate();
  ds.require_all_classes_labeled();

  AlignmentProblem p;
  std::vector<DomainDataset> scaled;
  for (const auto& dom : ds.domains()) {
    if (dom.samples() <= params.k)
      throw ParameterError("domain '" + dom.id + "' has " +
                           std::to_string(dom.samples()) +
                           " samples; kNN with k = " +
                           std::to_string(params.k) + " needs at least " +
                           std::to_string(params.k + 1));
    auto stats = params.standardize ? Standardization::fit(dom.features)
                                    : Standardization::identity(dom.dims());
    DomainDataset copy = dom;
    copy.features = stats.apply(dom.features);
    p.standardization.push_back(std::move(stats));
    scaled.push_back(std::move(copy));
  }
  const MultiDomainDataset work(std::move(scaled), ds.class_count());

  p.x = assemble_block_diagonal(work);
  p.labels = work.joint_labels();

  std::vector<SparseGraph> knn;
  for (const auto& dom : work.domains())
    knn.push_back(knn_graph(dom.features, params.k));
  auto classes = class_graphs(work);

  const SparseGraph joint[] = {block_diag_graph(knn, "geometry"),
                               classes.similarity, classes.dissimilarity};
  auto rescaled = frobenius_rescale(joint);
  p.geometry = std::move(rescaled[0]);
  p.similarity = std::move(rescaled[1]);
  p.dissimilarity = std::move(rescaled[2]);

  p.geometry_laplacian = laplacian(p.geometry);
  p.similarity_laplacian = laplacian(p.similarity);
  p.dissimilarity_laplacian = laplacian(p.dissimilarity);

  const auto& x = p.x.values;
  p.a = gram_laplacian(x, p.similarity_laplacian);
  if (params.mu != 0.0)
    p.a += params.mu * gram_laplacian(x, p.geometry_laplacian);
  p.b = gram_laplacian(x, p.dissimilarity_laplacian);
  return p;
}

AlignmentModel fit(const AlignmentProblem& problem,
                   const MultiDomainDataset& ds,
                   const AlignmentParams& params) {
  const auto sol = solve_generalized(problem.a, problem.b, params.ridge);

  AlignmentModel model;
  for (const auto& dom : ds.domains()) {
    model.domain_ids.push_back(dom.id);
    model.domain_dims.push_back(dom.dims());
  }
  model.standardization = problem.standardization;
  model.class_count = ds.class_count();
  model.params = params;
  model.eigenvalues = sol.eigenvalues;
  model.ridge = sol.ridge;

  const Index d = sol.eigenvalues.size();
  model.projector.resize(d, d);
  for (Index i = 0; i < d; ++i)
    model.projector.col(i) =
        std::sqrt(std::max(sol.eigenvalues(i), 0.0)) * sol.eigenvectors.col(i);

  if (params.dims && *params.dims > d)
    throw ParameterError("requested " + std::to_string(*params.dims) +
                         " latent dimensions but d = " + std::to_string(d));
  model.chosen_dims = params.dims.value_or(d);
  return model;
}

AlignmentModel fit(const MultiDomainDataset& ds,
                   const AlignmentParams& params) {
  return fit(build_problem(ds, params), ds, params);
}

ObjectiveTerms objective_terms(const AlignmentProblem& problem,
                               const Eigen::MatrixXd& projector) {
  const Eigen::MatrixXd latent = projector.transpose() * problem.x.values;
  auto term = [&](const Laplacian& l) {
    return (latent * l.matrix()).cwiseProduct(latent).sum();
  };
  return {term(problem.geometry_laplacian), term(problem.similarity_laplacian),
          term(problem.dissimilarity_laplacian)};
}

double trace_ratio(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                   const Eigen::MatrixXd& projector) {
  const Eigen::MatrixXd fbf = projector.transpose() * b * projector;
  const Eigen::MatrixXd faf = projector.transpose() * a * projector;
  return fbf.ldlt().solve(faf).trace();
}

Eigen::MatrixXd project(const AlignmentModel& model,
                        const std::string& domain_id,
                        const Eigen::MatrixXd& samples, Index r) {
  const auto m = model.domain_index(domain_id);
  if (samples.rows() != model.domain_dims[m])
    throw ValidationError("domain '" + domain_id + "' expects " +
                          std::to_string(model.domain_dims[m]) +
                          " features, got " + std::to_string(samples.rows()));
  if (r < 1 || r > model.total_dims())
    throw ParameterError("latent dimension must lie in 1.." +
                         std::to_string(model.total_dims()));
  const Eigen::MatrixXd f = model.block(m).leftCols(r);
  return f.transpose() * model.standardization[m].apply(samples);
}

Eigen::MatrixXd synthesize(const AlignmentModel& model, const std::string& src,
                           const std::string& dst,
                           const Eigen::MatrixXd& samples, Index r) {
  const Eigen::MatrixXd latent = project(model, src, samples, r);
  const auto m = model.domain_index(dst);
  const Eigen::MatrixXd map = model.block(m).leftCols(r).transpose();  // r x d_dst

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      map, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  if (sigma.size() == 0 || !(sigma(0) > 0.0))
    throw NumericalError("projector of domain '" + dst +
                         "' is numerically rank zero");
  const double cutoff = 1e-10 * sigma(0);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(sigma.size());
  for (Index i = 0; i < sigma.size(); ++i)
    if (sigma(i) > cutoff) inv(i) = 1.0 / sigma(i);
  const Eigen::MatrixXd pinv =
      svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
  return model.standardization[m].invert(pinv * latent);
}

std::vector<int> stratified_folds(std::span<const int> labels, int folds,
                                  std::uint64_t seed) {
  if (folds < 2) throw ParameterError("need at least 2 folds");
  std::vector<int> fold(labels.size(), 0);
  const std::set<int> classes(labels.begin(), labels.end());
  for (int c : classes) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == c) members.push_back(i);
    Rng rng(derive_seed(seed, "fold/" + std::to_string(c)));
    rng.shuffle(std::span<std::size_t>(members));
    for (std::size_t j = 0; j < members.size(); ++j)
      fold[members[j]] = static_cast<int>(j % static_cast<std::size_t>(folds));
  }
  return fold;
}

DimSelection select_dims(const AlignmentModel& model,
                         const Eigen::MatrixXd& latent,
                         std::span<const int> labels,
                         const FitPredict& classifier, int folds,
                         std::uint64_t seed, double tolerance) {
  const Index d = model.total_dims();
  if (latent.rows() != d)
    throw ValidationError("latent samples must have " + std::to_string(d) +
                          " rows");
  if (static_cast<std::size_t>(latent.cols()) != labels.size())
    throw ValidationError("latent sample and label counts differ");

  std::map<int, std::size_t> per_class;
  for (int y : labels) ++per_class[y];
  if (per_class.size() < 2)
    throw ValidationError("dimension selection needs >= 2 classes");
  std::size_t smallest = labels.size();
  for (const auto& [c, n] : per_class) smallest = std::min(smallest, n);
  if (folds < 2 || static_cast<std::size_t>(folds) > smallest)
    throw ParameterError("cannot run " + std::to_string(folds) +
                         "-fold cross-validation: smallest class has " +
                         std::to_string(smallest) + " samples");

  const int classes = std::max(model.class_count, per_class.rbegin()->first);
  const auto fold = stratified_folds(labels, folds, seed);

  DimSelection out;
  for (Index r = 1; r <= d; ++r) {
    ConfusionMatrix cm(classes);
    for (int f = 0; f < folds; ++f) {
      std::vector<Index> train_idx, test_idx;
      for (std::size_t i = 0; i < labels.size(); ++i)
        (fold[i] == f ? test_idx : train_idx).push_back(static_cast<Index>(i));
      Eigen::MatrixXd train(r, static_cast<Index>(train_idx.size()));
      Eigen::MatrixXd test(r, static_cast<Index>(test_idx.size()));
      std::vector<int> train_y;
      for (std::size_t j = 0; j < train_idx.size(); ++j) {
        train.col(static_cast<Index>(j)) = latent.col(train_idx[j]).head(r);
        train_y.push_back(labels[static_cast<std::size_t>(train_idx[j])]);
      }
      for (std::size_t j = 0; j < test_idx.size(); ++j)
        test.col(static_cast<Index>(j)) = latent.col(test_idx[j]).head(r);
      const auto predicted = classifier(train, train_y, test);
      for (std::size_t j = 0; j < test_idx.size(); ++j)
        cm.add(labels[static_cast<std::size_t>(test_idx[j])], predicted.at(j));
    }
    out.kappa_by_dims.push_back(cohen_kappa(cm));
  }
  const double best =
      *std::max_element(out.kappa_by_dims.begin(), out.kappa_by_dims.end());
  for (std::size_t i = 0; i < out.kappa_by_dims.size(); ++i) {
    if (out.kappa_by_dims[i] >= best - tolerance) {
      out.dims = static_cast<Index>(i + 1);
      break;
    }
  }
  return out;
}

}  // namespace ssma
