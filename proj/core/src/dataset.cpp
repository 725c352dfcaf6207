#include "ssma/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "ssma/error.hpp"
#include "ssma/random.hpp"

namespace ssma {

Index DomainDataset::labeled_count() const {
  return static_cast<Index>(
      std::count_if(labels.begin(), labels.end(),
                    [](const Label& l) { return l.has_value(); }));
}

MultiDomainDataset::MultiDomainDataset(std::vector<DomainDataset> domains,
                                       int class_count)
    : domains_(std::move(domains)), class_count_(class_count) {
  if (domains_.empty()) throw ValidationError("dataset has no domains");
  if (class_count_ < 1)
    throw ValidationError("class count must be >= 1, got " +
                          std::to_string(class_count_));

  std::set<std::string> seen;
  for (const auto& dom : domains_) {
    if (dom.id.empty()) throw ValidationError("domain with empty id");
    if (!seen.insert(dom.id).second)
      throw ValidationError("duplicate domain id '" + dom.id + "'");
    if (dom.dims() < 1 || dom.samples() < 1)
      throw ValidationError("domain '" + dom.id +
                            "' needs at least one feature and one sample");
    if (static_cast<Index>(dom.labels.size()) != dom.samples())
      throw ValidationError("domain '" + dom.id + "' has " +
                            std::to_string(dom.labels.size()) +
                            " labels for " + std::to_string(dom.samples()) +
                            " samples");
    for (std::size_t i = 0; i < dom.labels.size(); ++i) {
      const auto& l = dom.labels[i];
      if (l && (*l < 1 || *l > class_count_))
        throw ValidationError("domain '" + dom.id + "' sample " +
                              std::to_string(i) + " has label " +
                              std::to_string(*l) + " outside 1.." +
                              std::to_string(class_count_));
    }
    if (!dom.features.allFinite())
      throw ValidationError("domain '" + dom.id + "' has non-finite features");

    sample_offsets_.push_back(total_samples_);
    dim_offsets_.push_back(total_dims_);
    total_samples_ += dom.samples();
    total_dims_ += dom.dims();
  }
}

std::optional<std::size_t> MultiDomainDataset::find_domain(
    const std::string& id) const {
  for (std::size_t m = 0; m < domains_.size(); ++m)
    if (domains_[m].id == id) return m;
  return std::nullopt;
}

std::size_t MultiDomainDataset::domain_index(const std::string& id) const {
  if (auto m = find_domain(id)) return *m;
  throw ValidationError("unknown domain '" + id + "'");
}

std::vector<Index> MultiDomainDataset::domain_dims() const {
  std::vector<Index> dims;
  for (const auto& dom : domains_) dims.push_back(dom.dims());
  return dims;
}

Label MultiDomainDataset::joint_label(Index i) const {
  auto it = std::upper_bound(sample_offsets_.begin(), sample_offsets_.end(), i);
  const auto m = static_cast<std::size_t>(it - sample_offsets_.begin()) - 1;
  return domains_[m].labels[static_cast<std::size_t>(i - sample_offsets_[m])];
}

std::vector<Label> MultiDomainDataset::joint_labels() const {
  std::vector<Label> out;
  out.reserve(static_cast<std::size_t>(total_samples_));
  for (const auto& dom : domains_)
    out.insert(out.end(), dom.labels.begin(), dom.labels.end());
  return out;
}

void MultiDomainDataset::require_all_classes_labeled() const {
  std::vector<bool> covered(static_cast<std::size_t>(class_count_) + 1, false);
  for (const auto& dom : domains_)
    for (const auto& l : dom.labels)
      if (l) covered[static_cast<std::size_t>(*l)] = true;
  std::vector<int> missing;
  for (int c = 1; c <= class_count_; ++c)
    if (!covered[static_cast<std::size_t>(c)]) missing.push_back(c);
  if (!missing.empty()) {
    std::ostringstream msg;
    msg << "classes without any labeled sample in any domain:";
    for (int c : missing) msg << ' ' << c;
    throw ValidationError(msg.str());
  }
}

JointBlockMatrix assemble_block_diagonal(const MultiDomainDataset& ds) {
  JointBlockMatrix out;
  out.values = Eigen::MatrixXd::Zero(ds.total_dims(), ds.total_samples());
  out.row_offsets = ds.dim_offsets();
  out.col_offsets = ds.joint_offsets();
  for (std::size_t m = 0; m < ds.domain_count(); ++m) {
    const auto& dom = ds.domain(m);
    out.values.block(out.row_offsets[m], out.col_offsets[m], dom.dims(),
                     dom.samples()) = dom.features;
  }
  return out;
}

namespace {

// Labeled sample indices of one class, in ascending order.
std::vector<std::size_t> class_members(const DomainDataset& dom, int c) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < dom.labels.size(); ++i)
    if (dom.labels[i] && *dom.labels[i] == c) idx.push_back(i);
  return idx;
}

DomainDataset select_columns(const DomainDataset& dom,
                             const std::vector<std::size_t>& cols) {
  DomainDataset out;
  out.id = dom.id;
  out.name = dom.name;
  out.features.resize(dom.dims(), static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    out.features.col(static_cast<Index>(j)) =
        dom.features.col(static_cast<Index>(cols[j]));
    out.labels.push_back(dom.labels[cols[j]]);
  }
  return out;
}

}  // namespace

TrainTestSplit split_train_test(const MultiDomainDataset& ds,
                                double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw ParameterError("test fraction must lie in (0, 1), got " +
                         std::to_string(test_fraction));

  std::vector<DomainDataset> train, test;
  for (const auto& dom : ds.domains()) {
    std::vector<bool> in_test(static_cast<std::size_t>(dom.samples()), false);
    for (int c = 1; c <= ds.class_count(); ++c) {
      auto members = class_members(dom, c);
      if (members.empty()) continue;
      if (members.size() < 2)
        throw ValidationError("cannot split class " + std::to_string(c) +
                              " of domain '" + dom.id +
                              "': fewer than 2 labeled samples");
      const auto n = members.size();
      auto n_test = static_cast<std::size_t>(
          std::floor(static_cast<double>(n) * test_fraction));
      n_test = std::clamp<std::size_t>(n_test, 1, n - 1);

      Rng rng(derive_seed(seed, "split/" + dom.id + "/" + std::to_string(c)));
      const auto perm = rng.permutation(n);
      for (std::size_t j = 0; j < n_test; ++j) in_test[members[perm[j]]] = true;
    }
    std::vector<std::size_t> train_cols, test_cols;
    for (std::size_t i = 0; i < in_test.size(); ++i)
      (in_test[i] ? test_cols : train_cols).push_back(i);
    if (test_cols.empty())
      throw ValidationError("domain '" + dom.id +
                            "' has no labeled samples to hold out");
    train.push_back(select_columns(dom, train_cols));
    test.push_back(select_columns(dom, test_cols));
  }
  return {MultiDomainDataset(std::move(train), ds.class_count()),
          MultiDomainDataset(std::move(test), ds.class_count())};
}

MultiDomainDataset subsample_labeled(
    const MultiDomainDataset& ds,
    const std::map<std::string, std::size_t>& per_class_counts,
    std::uint64_t seed) {
  for (const auto& [id, count] : per_class_counts) ds.domain_index(id);

  std::vector<DomainDataset> out;
  std::ostringstream shortfall;
  for (const auto& dom : ds.domains()) {
    DomainDataset copy = dom;
    auto it = per_class_counts.find(dom.id);
    if (it != per_class_counts.end()) {
      const std::size_t want = it->second;
      std::vector<Label> labels(dom.labels.size());
      for (int c = 1; c <= ds.class_count(); ++c) {
        auto members = class_members(dom, c);
        if (members.size() < want) {
          shortfall << " domain '" << dom.id << "' class " << c << ": have "
                    << members.size() << ", need " << want << ';';
          continue;
        }
        Rng rng(derive_seed(seed,
                            "subsample/" + dom.id + "/" + std::to_string(c)));
        const auto perm = rng.permutation(members.size());
        for (std::size_t j = 0; j < want; ++j) labels[members[perm[j]]] = c;
      }
      copy.labels = std::move(labels);
    }
    out.push_back(std::move(copy));
  }
  if (!shortfall.str().empty())
    throw ValidationError("insufficient labeled samples:" + shortfall.str());
  return MultiDomainDataset(std::move(out), ds.class_count());
}

Standardization Standardization::fit(const Eigen::MatrixXd& features) {
  Standardization s;
  const double n = static_cast<double>(features.cols());
  s.mean = features.rowwise().mean();
  s.scale.resize(features.rows());
  for (Index r = 0; r < features.rows(); ++r) {
    const double var =
        (features.row(r).array() - s.mean(r)).square().sum() / n;
    const double sd = std::sqrt(var);
    s.scale(r) = sd > 1e-12 * std::max(1.0, std::abs(s.mean(r))) ? sd : 1.0;
  }
  return s;
}

Standardization Standardization::identity(Index dims) {
  return {Eigen::VectorXd::Zero(dims), Eigen::VectorXd::Ones(dims)};
}

Eigen::MatrixXd Standardization::apply(const Eigen::MatrixXd& features) const {
  return (features.colwise() - mean).array().colwise() / scale.array();
}

Eigen::MatrixXd Standardization::invert(
    const Eigen::MatrixXd& standardized) const {
  return (standardized.array().colwise() * scale.array()).matrix().colwise() +
         mean;
}

bool Standardization::is_identity() const {
  return mean.isZero(0.0) && (scale.array() == 1.0).all();
}

}  // namespace ssma
