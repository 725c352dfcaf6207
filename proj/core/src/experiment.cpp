#include "ssma/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <map>
#include <set>

#include "ssma/error.hpp"
#include "ssma/io.hpp"
#include "ssma/metrics.hpp"
#include "ssma/random.hpp"
#include "ssma/sampling.hpp"

namespace ssma {

std::string method_name(Method m) {
  switch (m) {
    case Method::None: return "none";
    case Method::Ssma: return "ssma";
    case Method::Pca: return "pca";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  if (name == "none") return Method::None;
  if (name == "ssma") return Method::Ssma;
  if (name == "pca") return Method::Pca;
  throw ParameterError("unknown method '" + name +
                       "' (expected none, ssma or pca)");
}

void ExperimentConfig::validate() const {
  if (dataset_path && synthetic)
    throw ParameterError("config: set only one of 'dataset' and 'synthetic'");
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw ParameterError("config field 'test_fraction' must lie in (0, 1)");
  if (budgets.empty())
    throw ParameterError("config field 'budgets' must not be empty");
  if (methods.empty())
    throw ParameterError("config field 'methods' must not be empty");
  if (seeds.empty())
    throw ParameterError("config field 'seeds' must not be empty");
  if (unlabeled < 1)
    throw ParameterError("config field 'unlabeled' must be >= 1");
  if (dims_folds < 2)
    throw ParameterError("config field 'dims_folds' must be >= 2");
  if (synthetic) {
    toy_setting(synthetic->setting);
    if (synthetic->classes < 2)
      throw ParameterError("config field 'synthetic.classes' must be >= 2");
    if (synthetic->n_per_class < 1)
      throw ParameterError("config field 'synthetic.n_per_class' must be >= 1");
  }
  alignment.validate();
}

double mean_kappa(const ExperimentResult& result, Method method,
                  const std::string& test_domain, std::size_t budget) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& row : result.rows) {
    if (row.method == method && row.test_domain == test_domain &&
        row.budget == budget) {
      sum += row.kappa;
      ++n;
    }
  }
  if (n == 0)
    throw ValidationError("no rows for method " + method_name(method) +
                          ", domain '" + test_domain + "', budget " +
                          std::to_string(budget));
  return sum / static_cast<double>(n);
}

PcaProjector PcaProjector::fit(const Eigen::MatrixXd& features, Index dims) {
  if (dims < 1 || dims > features.rows())
    throw ParameterError("PCA dimension must lie in 1.." +
                         std::to_string(features.rows()));
  PcaProjector p;
  p.mean = features.rowwise().mean();
  const Eigen::MatrixXd centered = features.colwise() - p.mean;
  const Eigen::MatrixXd cov =
      centered * centered.transpose() / static_cast<double>(features.cols());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  // Descending variance; each component's largest entry made positive.
  p.components = eig.eigenvectors().rowwise().reverse().leftCols(dims);
  for (Index c = 0; c < dims; ++c) {
    Index arg = 0;
    p.components.col(c).cwiseAbs().maxCoeff(&arg);
    if (p.components(arg, c) < 0.0) p.components.col(c) *= -1.0;
  }
  return p;
}

Eigen::MatrixXd PcaProjector::apply(const Eigen::MatrixXd& features) const {
  return components.transpose() * (features.colwise() - mean);
}

namespace {

// Labeled samples of one domain plus the unlabeled centroids.
DomainDataset fit_domain(const DomainDataset& labeled_pool,
                         const Eigen::MatrixXd& centroids) {
  DomainDataset out;
  out.id = labeled_pool.id;
  out.name = labeled_pool.name;
  std::vector<Index> keep;
  for (std::size_t i = 0; i < labeled_pool.labels.size(); ++i)
    if (labeled_pool.labels[i]) keep.push_back(static_cast<Index>(i));
  out.features.resize(labeled_pool.dims(),
                      static_cast<Index>(keep.size()) + centroids.cols());
  for (std::size_t j = 0; j < keep.size(); ++j) {
    out.features.col(static_cast<Index>(j)) = labeled_pool.features.col(keep[j]);
    out.labels.push_back(labeled_pool.labels[static_cast<std::size_t>(keep[j])]);
  }
  out.features.rightCols(centroids.cols()) = centroids;
  out.labels.resize(out.labels.size() + static_cast<std::size_t>(centroids.cols()));
  return out;
}

struct Pooled {
  Eigen::MatrixXd samples;
  std::vector<int> labels;
};

// Per-domain feature maps; each returns the representation a method feeds
// to the classifier.
using DomainMap = std::function<Eigen::MatrixXd(std::size_t, const Eigen::MatrixXd&)>;

Pooled pool_labeled(const MultiDomainDataset& ds, const DomainMap& map) {
  std::vector<Eigen::MatrixXd> parts;
  Pooled out;
  Index cols = 0, rows = -1;
  for (std::size_t m = 0; m < ds.domain_count(); ++m) {
    const auto& dom = ds.domain(m);
    std::vector<Index> keep;
    for (std::size_t i = 0; i < dom.labels.size(); ++i) {
      if (dom.labels[i]) {
        keep.push_back(static_cast<Index>(i));
        out.labels.push_back(*dom.labels[i]);
      }
    }
    if (keep.empty()) continue;
    parts.push_back(map(m, dom.features(Eigen::all, keep)));
    rows = parts.back().rows();
    cols += parts.back().cols();
  }
  out.samples.resize(rows, cols);
  Index at = 0;
  for (const auto& p : parts) {
    out.samples.middleCols(at, p.cols()) = p;
    at += p.cols();
  }
  return out;
}

std::vector<int> true_labels(const DomainDataset& dom) {
  std::vector<int> y;
  for (const auto& l : dom.labels) y.push_back(*l);
  return y;
}

struct CellOutcome {
  Index dims = 0;
  std::vector<std::pair<double, double>> scores;  // (kappa, OA) per domain
};

CellOutcome score_domains(const LinearModel& clf, const MultiDomainDataset& test,
                          const DomainMap& map, Index dims) {
  CellOutcome out;
  out.dims = dims;
  for (std::size_t m = 0; m < test.domain_count(); ++m) {
    const auto& dom = test.domain(m);
    Eigen::MatrixXd z = map(m, dom.features);
    const auto predicted = clf.predict(z.topRows(dims));
    const auto truth = true_labels(dom);
    const auto cm =
        ConfusionMatrix::from_labels(test.class_count(), truth, predicted);
    out.scores.emplace_back(cohen_kappa(cm), overall_accuracy(cm));
  }
  return out;
}

int cv_folds(std::span<const int> labels, int wanted) {
  std::map<int, int> count;
  for (int y : labels) ++count[y];
  int smallest = wanted;
  for (const auto& [c, n] : count) smallest = std::min(smallest, n);
  return smallest;
}

CellOutcome run_method(Method method, const ExperimentConfig& cfg,
                       const MultiDomainDataset& labeled,
                       const MultiDomainDataset& fit_data,
                       const MultiDomainDataset& test, std::uint64_t cell_seed) {
  LinearTrainOptions clf_opts = cfg.classifier;
  clf_opts.seed = derive_seed(cell_seed, "classifier");

  switch (method) {
    case Method::None: {
      const auto dims = labeled.domain_dims();
      if (std::adjacent_find(dims.begin(), dims.end(), std::not_equal_to<>()) !=
          dims.end())
        throw ParameterError(
            "method 'none' needs all domains to share one feature dimension");
      const DomainMap identity = [](std::size_t, const Eigen::MatrixXd& x) {
        return x;
      };
      const auto pooled = pool_labeled(labeled, identity);
      const auto clf = train_linear(pooled.samples, pooled.labels, clf_opts);
      return score_domains(clf, test, identity, pooled.samples.rows());
    }
    case Method::Pca: {
      const auto dims = labeled.domain_dims();
      const Index q = *std::min_element(dims.begin(), dims.end());
      std::vector<PcaProjector> pcas;
      for (const auto& dom : fit_data.domains())
        pcas.push_back(PcaProjector::fit(dom.features, q));
      const DomainMap map = [&](std::size_t m, const Eigen::MatrixXd& x) {
        return pcas[m].apply(x);
      };
      const auto pooled = pool_labeled(labeled, map);
      const auto clf = train_linear(pooled.samples, pooled.labels, clf_opts);
      return score_domains(clf, test, map, q);
    }
    case Method::Ssma: {
      const auto model = fit(fit_data, cfg.alignment);
      const Index d = model.total_dims();
      const DomainMap map = [&](std::size_t m, const Eigen::MatrixXd& x) {
        return project(model, model.domain_ids[m], x, d);
      };
      const auto pooled = pool_labeled(labeled, map);
      Index r = d;
      if (cfg.alignment.dims) {
        r = *cfg.alignment.dims;
      } else {
        const int folds = cv_folds(pooled.labels, cfg.dims_folds);
        if (folds >= 2) {
          // C is chosen once on all dims and held fixed while r varies.
          LinearTrainOptions fixed = clf_opts;
          fixed.c_grid = {train_linear(pooled.samples, pooled.labels, clf_opts).c()};
          r = select_dims(model, pooled.samples, pooled.labels,
                          linear_fit_predict(fixed), folds,
                          derive_seed(cell_seed, "dims"))
                  .dims;
        }
      }
      const auto clf = train_linear(pooled.samples.topRows(r), pooled.labels,
                                    clf_opts);
      return score_domains(clf, test, map, r);
    }
  }
  throw ParameterError("unhandled method");
}

void run_seed(const ExperimentConfig& cfg, const MultiDomainDataset& ds,
              std::uint64_t seed, ExperimentResult& result) {
  std::vector<std::string> leading = cfg.leading;
  if (leading.empty()) leading.push_back(ds.domain(0).id);
  for (const auto& id : leading) ds.domain_index(id);

  const auto split = split_train_test(ds, cfg.test_fraction,
                                      derive_seed(seed, "split"));
  std::vector<Eigen::MatrixXd> centroids;
  for (const auto& dom : split.train.domains())
    centroids.push_back(bisecting_kmeans(dom.features, cfg.unlabeled,
                                         derive_seed(seed, "unlabeled/" + dom.id))
                            .points);

  for (const auto& lead : leading) {
    for (std::size_t budget : cfg.budgets) {
      std::map<std::string, std::size_t> counts;
      for (const auto& dom : split.train.domains())
        counts[dom.id] = dom.id == lead ? cfg.leading_budget : budget;
      const auto labeled =
          subsample_labeled(split.train, counts, derive_seed(seed, "labels"));

      std::vector<DomainDataset> fit_domains;
      for (std::size_t m = 0; m < labeled.domain_count(); ++m)
        fit_domains.push_back(fit_domain(labeled.domain(m), centroids[m]));
      const MultiDomainDataset fit_data(std::move(fit_domains),
                                        ds.class_count());

      for (Method method : cfg.methods) {
        const auto cell_seed = derive_seed(
            seed, lead + "/" + std::to_string(budget) + "/" + method_name(method));
        const auto start = std::chrono::steady_clock::now();
        const auto outcome =
            run_method(method, cfg, labeled, fit_data, split.test, cell_seed);
        const double seconds = std::chrono::duration<double>(
                                   std::chrono::steady_clock::now() - start)
                                   .count();
        for (std::size_t m = 0; m < split.test.domain_count(); ++m) {
          ExperimentRow row;
          row.leading = lead;
          row.test_domain = split.test.domain(m).id;
          row.budget = budget;
          row.method = method;
          row.seed = seed;
          row.kappa = outcome.scores[m].first;
          row.accuracy = outcome.scores[m].second;
          row.dims = outcome.dims;
          row.seconds = seconds;
          result.rows.push_back(std::move(row));
        }
      }
    }
  }
}

void check_methods(const ExperimentConfig& cfg, const MultiDomainDataset& ds) {
  const auto dims = ds.domain_dims();
  const bool mixed =
      std::adjacent_find(dims.begin(), dims.end(), std::not_equal_to<>()) !=
      dims.end();
  if (mixed && std::find(cfg.methods.begin(), cfg.methods.end(),
                         Method::None) != cfg.methods.end()) {
    std::string list;
    for (std::size_t m = 0; m < dims.size(); ++m)
      list += (m ? "/" : "") + std::to_string(dims[m]);
    throw ParameterError("config field 'methods': 'none' needs equal domain "
                         "dimensions, dataset has " + list);
  }
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config,
                                const MultiDomainDataset& dataset) {
  config.validate();
  check_methods(config, dataset);
  ExperimentResult result;
  for (auto seed : config.seeds) run_seed(config, dataset, seed, result);
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  if (config.dataset_path)
    return run_experiment(config, read_dataset_file(*config.dataset_path));
  if (!config.synthetic)
    throw ParameterError("config needs either 'dataset' or 'synthetic'");

  const auto& recipe = *config.synthetic;
  const auto deform = toy_setting(recipe.setting);
  ExperimentResult result;
  for (auto seed : config.seeds) {
    const auto ds = make_spiral_pair(recipe.n_per_class, recipe.classes, deform,
                                     derive_seed(seed, "data"), recipe.shape);
    run_seed(config, ds, seed, result);
  }
  return result;
}

}  // namespace ssma
