// ssma - command-line front end for toy generation, alignment, projection,
// synthesis, experiments and kappa evaluation.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ssma/alignment.hpp"
#include "ssma/error.hpp"
#include "ssma/experiment.hpp"
#include "ssma/io.hpp"
#include "ssma/linear_classifier.hpp"
#include "ssma/metrics.hpp"
#include "ssma/random.hpp"
#include "ssma/synth.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

// Writes to `path`, or to stdout when the path is empty or "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_)
        throw ssma::ValidationError("cannot open '" + path + "' for writing");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
  bool to_stdout() const { return !file_.is_open(); }
  void finish(const std::string& path) {
    stream().flush();
    if (!stream()) throw ssma::ValidationError("failed writing '" + path + "'");
  }

 private:
  std::ofstream file_;
};

// Summaries go to stderr when the payload itself is on stdout.
std::ostream& info(const Output& out) {
  return out.to_stdout() ? std::cerr : std::cout;
}

struct AlignFlags {
  double mu = 1.0;
  ssma::Index k = 9;
  std::optional<ssma::Index> dims;
  bool standardize = true;
  std::uint64_t seed = 0;

  ssma::AlignmentParams params() const {
    ssma::AlignmentParams p;
    p.mu = mu;
    p.k = k;
    p.dims = dims;
    p.standardize = standardize;
    return p;
  }
};

void add_align_flags(CLI::App* cmd, AlignFlags& f) {
  cmd->add_option("--mu", f.mu, "Geometry tradeoff")->capture_default_str();
  cmd->add_option("--k", f.k, "kNN neighbours per domain")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--dims", f.dims,
                  "Latent dimension (default: cross-validated)")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--standardize,!--no-standardize", f.standardize,
                "Per-domain z-scoring before alignment (default on)");
  cmd->add_option("--seed", f.seed, "Random seed")->capture_default_str();
}

std::vector<std::int64_t> class_counts(const ssma::DomainDataset& dom,
                                       int classes) {
  std::vector<std::int64_t> counts(static_cast<std::size_t>(classes) + 1, 0);
  for (const auto& l : dom.labels) ++counts[l ? static_cast<std::size_t>(*l) : 0];
  return counts;
}

void print_dataset_summary(std::ostream& os, const ssma::MultiDomainDataset& ds) {
  os << "N = " << ds.total_samples() << ", d = " << ds.total_dims() << '\n';
  for (const auto& dom : ds.domains()) {
    const auto counts = class_counts(dom, ds.class_count());
    os << "domain " << dom.id << ": n = " << dom.samples()
       << ", d = " << dom.dims() << ", classes =";
    for (int c = 1; c <= ds.class_count(); ++c)
      os << ' ' << c << ':' << counts[static_cast<std::size_t>(c)];
    if (counts[0] > 0) os << ", unlabeled = " << counts[0];
    os << '\n';
  }
}

// ---------------------------------------------------------------------------

struct ToyArgs {
  std::string setting = "sr";
  ssma::Index n_per_class = 667;
  int classes = 3;
  std::uint64_t seed = 0;
  std::optional<double> scale, rotation;
  std::vector<double> translate;
  double noise = ssma::SpiralShape{}.noise_sd;
  std::string out;
};

int cmd_toy(const ToyArgs& a) {
  auto deform = ssma::toy_setting(a.setting);
  if (a.scale) deform.scale = *a.scale;
  if (a.rotation) deform.rotation_deg = *a.rotation;
  if (!a.translate.empty()) deform.translation = {a.translate[0], a.translate[1]};
  ssma::SpiralShape shape;
  shape.noise_sd = a.noise;
  const auto ds =
      ssma::make_spiral_pair(a.n_per_class, a.classes, deform, a.seed, shape);
  Output out(a.out);
  ssma::write_dataset(out.stream(), ds);
  out.finish(a.out);
  print_dataset_summary(info(out), ds);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct AlignArgs {
  std::string data;
  std::string out;
  AlignFlags flags;
};

// Labeled samples of every domain projected on all latent dimensions.
void pooled_latent(const ssma::AlignmentModel& model,
                   const ssma::MultiDomainDataset& ds, Eigen::MatrixXd& latent,
                   std::vector<int>& labels) {
  std::vector<Eigen::MatrixXd> parts;
  ssma::Index cols = 0;
  for (const auto& dom : ds.domains()) {
    std::vector<ssma::Index> keep;
    for (std::size_t i = 0; i < dom.labels.size(); ++i)
      if (dom.labels[i]) {
        keep.push_back(static_cast<ssma::Index>(i));
        labels.push_back(*dom.labels[i]);
      }
    parts.push_back(ssma::project(model, dom.id, dom.features(Eigen::all, keep),
                                  model.total_dims()));
    cols += parts.back().cols();
  }
  latent.resize(model.total_dims(), cols);
  ssma::Index at = 0;
  for (const auto& p : parts) {
    latent.middleCols(at, p.cols()) = p;
    at += p.cols();
  }
}

int cmd_align(const AlignArgs& a) {
  const auto ds = ssma::read_dataset_file(a.data);
  auto model = ssma::fit(ds, a.flags.params());
  std::string how = "fixed";
  if (!a.flags.dims) {
    Eigen::MatrixXd latent;
    std::vector<int> labels;
    pooled_latent(model, ds, latent, labels);
    std::map<int, int> per_class;
    for (int y : labels) ++per_class[y];
    int folds = 5;
    for (const auto& [c, n] : per_class) folds = std::min(folds, n);
    if (folds >= 2) {
      ssma::LinearTrainOptions opts;
      opts.seed = ssma::derive_seed(a.flags.seed, "align/classifier");
      opts.c_grid = {ssma::train_linear(latent, labels, opts).c()};
      const auto sel = ssma::select_dims(model, latent, labels,
                                         ssma::linear_fit_predict(opts), folds,
                                         ssma::derive_seed(a.flags.seed, "align/dims"));
      model = model.with_chosen_dims(sel.dims);
      how = "cross-validated";
    } else {
      how = "all (too few labels to cross-validate)";
    }
  }
  Output out(a.out);
  ssma::write_model(out.stream(), model);
  out.finish(a.out);

  auto& os = info(out);
  const auto& ev = model.eigenvalues;
  os << "F: " << model.projector.rows() << " x " << model.projector.cols()
     << ", blocks";
  for (auto d : model.domain_dims) os << ' ' << d;
  os << '\n';
  os << "eigenvalues: " << ev.size() << ", min " << ssma::format_double(ev.minCoeff())
     << ", max " << ssma::format_double(ev.maxCoeff()) << "\n  ";
  for (ssma::Index i = 0; i < ev.size(); ++i)
    os << (i ? " " : "") << ssma::format_double(ev(i));
  os << '\n';
  os << "ridge epsilon: " << ssma::format_double(model.ridge) << '\n';
  os << "mu: " << ssma::format_double(model.params.mu)
     << (model.params.mu == 0.0 ? " (geometry term disabled)" : "") << '\n';
  os << "chosen dims: " << model.chosen_dims << " (" << how << ")\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct ProjectArgs {
  std::string model;
  std::string data;
  std::string out;
  std::optional<ssma::Index> dims;
};

void write_label(std::ostream& os, const ssma::Label& l) {
  if (l) os << *l;
}

int cmd_project(const ProjectArgs& a) {
  const auto model = ssma::read_model_file(a.model);
  const auto ds = ssma::read_dataset_file(a.data);
  const ssma::Index r = a.dims.value_or(model.chosen_dims);
  Output out(a.out);
  auto& os = out.stream();
  os << "sample,domain,label";
  for (ssma::Index j = 1; j <= r; ++j) os << ",z" << j;
  os << '\n';
  ssma::Index rows = 0;
  for (const auto& dom : ds.domains()) {
    const auto z = ssma::project(model, dom.id, dom.features, r);
    for (ssma::Index i = 0; i < z.cols(); ++i) {
      os << i << ',' << dom.id << ',';
      write_label(os, dom.labels[static_cast<std::size_t>(i)]);
      for (ssma::Index j = 0; j < r; ++j) os << ',' << ssma::format_double(z(j, i));
      os << '\n';
    }
    rows += z.cols();
  }
  out.finish(a.out);
  info(out) << "projected " << rows << " samples onto " << r << " dims\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  std::string model;
  std::string data;
  std::string src;
  std::string dst;
  std::optional<ssma::Index> dims;
  std::string out;
};

int cmd_synthesize(const SynthArgs& a) {
  const auto model = ssma::read_model_file(a.model);
  const auto ds = ssma::read_dataset_file(a.data);
  const auto& dom = ds.domain(ds.domain_index(a.src));
  const ssma::Index r = a.dims.value_or(model.chosen_dims);
  const auto y = ssma::synthesize(model, a.src, a.dst, dom.features, r);
  const bool round_trip = a.src == a.dst;

  Output out(a.out);
  auto& os = out.stream();
  os << "sample,domain,label";
  for (ssma::Index j = 1; j <= y.rows(); ++j) os << ",f" << j;
  if (round_trip) os << ",recon_error";
  os << '\n';
  double worst = 0.0;
  for (ssma::Index i = 0; i < y.cols(); ++i) {
    os << i << ',' << dom.id << ',';
    write_label(os, dom.labels[static_cast<std::size_t>(i)]);
    for (ssma::Index j = 0; j < y.rows(); ++j)
      os << ',' << ssma::format_double(y(j, i));
    if (round_trip) {
      const double err = (y.col(i) - dom.features.col(i)).norm();
      worst = std::max(worst, err);
      os << ',' << ssma::format_double(err);
    }
    os << '\n';
  }
  out.finish(a.out);
  auto& msg = info(out);
  msg << "synthesized " << y.cols() << " samples of '" << a.src << "' into '"
      << a.dst << "' (" << y.rows() << " features, " << r << " latent dims)\n";
  if (round_trip)
    msg << "max reconstruction error: " << ssma::format_double(worst) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct ExperimentArgs {
  std::string config;
  std::string out;
  std::vector<std::string> methods;
  std::optional<std::uint64_t> seed;
  std::optional<double> test_fraction;
  std::optional<double> mu;
  std::optional<ssma::Index> k;
  std::optional<ssma::Index> dims;
  std::optional<bool> standardize;
  bool dump_config = false;
};

int cmd_experiment(const ExperimentArgs& a) {
  auto cfg = ssma::read_config_file(a.config);
  if (!a.methods.empty()) {
    cfg.methods.clear();
    for (const auto& m : a.methods) cfg.methods.push_back(ssma::parse_method(m));
  }
  if (a.seed) cfg.seeds = {*a.seed};
  if (a.test_fraction) cfg.test_fraction = *a.test_fraction;
  if (a.mu) cfg.alignment.mu = *a.mu;
  if (a.k) cfg.alignment.k = *a.k;
  if (a.dims) cfg.alignment.dims = *a.dims;
  if (a.standardize) cfg.alignment.standardize = *a.standardize;
  cfg.validate();
  if (a.dump_config) {
    std::cout << ssma::config_to_json(cfg);
    return kExitOk;
  }

  const auto start = std::chrono::steady_clock::now();
  const auto result = ssma::run_experiment(cfg);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();

  Output out(a.out);
  ssma::write_results(out.stream(), result);
  out.finish(a.out);

  // Mean kappa per (method, test domain, budget).
  auto& os = info(out);
  std::vector<std::string> domains;
  std::vector<std::size_t> budgets;
  for (const auto& r : result.rows) {
    if (std::find(domains.begin(), domains.end(), r.test_domain) == domains.end())
      domains.push_back(r.test_domain);
    if (std::find(budgets.begin(), budgets.end(), r.budget) == budgets.end())
      budgets.push_back(r.budget);
  }
  os << "mean kappa over " << cfg.seeds.size() << " seed(s)\n";
  os << "method,test_domain";
  for (auto b : budgets) os << ",budget_" << b;
  os << '\n';
  for (auto m : cfg.methods)
    for (const auto& d : domains) {
      os << ssma::method_name(m) << ',' << d;
      for (auto b : budgets) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4f", ssma::mean_kappa(result, m, d, b));
        os << ',' << buf;
      }
      os << '\n';
    }
  std::cerr << "elapsed " << seconds << " s\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct KappaArgs {
  std::string predictions;
  std::string matrix;
  std::optional<int> classes;
};

ssma::ConfusionMatrix parse_matrix(const std::string& text) {
  std::vector<std::vector<std::int64_t>> rows;
  std::stringstream all(text);
  std::string row;
  while (std::getline(all, row, ';')) {
    rows.emplace_back();
    std::stringstream cells(row);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      try {
        std::size_t used = 0;
        const long long v = std::stoll(cell, &used);
        if (cell.find_first_not_of(" \t", used) != std::string::npos || v < 0)
          throw std::invalid_argument(cell);
        rows.back().push_back(v);
      } catch (const std::exception&) {
        throw ssma::ParameterError("--matrix: invalid count '" + cell + "'");
      }
    }
  }
  const auto c = static_cast<ssma::Index>(rows.size());
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts(c, c);
  for (ssma::Index i = 0; i < c; ++i) {
    if (static_cast<ssma::Index>(rows[static_cast<std::size_t>(i)].size()) != c)
      throw ssma::ParameterError("--matrix must be square (rows split by ';')");
    for (ssma::Index j = 0; j < c; ++j)
      counts(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return ssma::ConfusionMatrix(counts);
}

// CSV with a header naming `truth` and `predicted` columns.
ssma::ConfusionMatrix read_predictions(const std::string& path,
                                       std::optional<int> classes) {
  std::ifstream in(path);
  if (!in) throw ssma::ValidationError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ssma::ParseError(path, 1, "empty file");
  std::vector<std::string> header;
  {
    std::stringstream s(line);
    std::string cell;
    while (std::getline(s, cell, ',')) header.push_back(cell);
  }
  auto column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw ssma::ParseError(path, 1, "missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto ti = column("truth"), pi = column("predicted");
  std::vector<int> truth, predicted;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> cells;
    std::stringstream s(line);
    std::string cell;
    while (std::getline(s, cell, ',')) cells.push_back(cell);
    if (cells.size() != header.size())
      throw ssma::ParseError(path, line_no, "expected " +
                                                std::to_string(header.size()) +
                                                " columns");
    try {
      truth.push_back(std::stoi(cells[ti]));
      predicted.push_back(std::stoi(cells[pi]));
    } catch (const std::exception&) {
      throw ssma::ParseError(path, line_no, "labels must be integers");
    }
  }
  int c = classes.value_or(0);
  for (int v : truth) c = std::max(c, v);
  for (int v : predicted) c = std::max(c, v);
  if (truth.empty()) throw ssma::ValidationError(path + ": no predictions");
  return ssma::ConfusionMatrix::from_labels(c, truth, predicted);
}

int cmd_eval_kappa(const KappaArgs& a) {
  if (a.predictions.empty() == a.matrix.empty())
    throw ssma::ParameterError("give exactly one of --predictions and --matrix");
  const auto cm = a.matrix.empty() ? read_predictions(a.predictions, a.classes)
                                   : parse_matrix(a.matrix);
  std::cout << "kappa " << ssma::format_double(ssma::cohen_kappa(cm)) << '\n';
  std::cout << "overall_accuracy " << ssma::format_double(ssma::overall_accuracy(cm))
            << '\n';
  std::cout << "samples " << cm.total() << '\n';
  return kExitOk;
}

int exit_code(ssma::ErrorKind kind) {
  switch (kind) {
    case ssma::ErrorKind::Usage: return kExitUsage;
    case ssma::ErrorKind::Data: return kExitData;
    case ssma::ErrorKind::Numerical: return kExitNumerical;
  }
  return kExitData;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semisupervised manifold alignment"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "ssma 1.0.0");

  ToyArgs toy;
  auto* c_toy = app.add_subcommand("toy", "Generate a deformed two-spiral pair");
  c_toy->add_option("--setting", toy.setting, "Deformation preset")
      ->check(CLI::IsMember({"none", "s", "sr", "srt"}))
      ->capture_default_str();
  c_toy->add_option("--n-per-class", toy.n_per_class, "Samples per class and domain")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_toy->add_option("--classes", toy.classes, "Number of classes (>= 2)")
      ->check(CLI::Range(2, 1000))
      ->capture_default_str();
  c_toy->add_option("--seed", toy.seed, "Random seed")->capture_default_str();
  c_toy->add_option("--scale", toy.scale, "Override the preset scale")
      ->check(CLI::PositiveNumber);
  c_toy->add_option("--rotation", toy.rotation, "Override the preset rotation (degrees)");
  c_toy->add_option("--translate", toy.translate, "Override the preset translation")
      ->expected(2)
      ->delimiter(',');
  c_toy->add_option("--noise", toy.noise, "Gaussian noise sd")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  c_toy->add_option("-o,--out", toy.out, "Dataset file (default stdout)");

  AlignArgs align;
  auto* c_align = app.add_subcommand("align", "Fit the alignment and write a model");
  c_align->add_option("data", align.data, "Dataset file")->required();
  c_align->add_option("-o,--out", align.out, "Model file (default stdout)");
  add_align_flags(c_align, align.flags);

  ProjectArgs proj;
  auto* c_proj = app.add_subcommand("project", "Project samples into the latent space");
  c_proj->add_option("--model", proj.model, "Model file")->required();
  c_proj->add_option("data", proj.data, "Dataset file")->required();
  c_proj->add_option("--dims", proj.dims, "Latent dims (default: model's chosen dims)")
      ->check(CLI::PositiveNumber);
  c_proj->add_option("-o,--out", proj.out, "Output CSV (default stdout)");

  SynthArgs syn;
  auto* c_syn = app.add_subcommand("synthesize",
                                   "Map samples of one domain into another's features");
  c_syn->add_option("--model", syn.model, "Model file")->required();
  c_syn->add_option("data", syn.data, "Dataset file")->required();
  c_syn->add_option("--src", syn.src, "Source domain id")->required();
  c_syn->add_option("--dst", syn.dst, "Destination domain id")->required();
  c_syn->add_option("--dims", syn.dims, "Latent dims (default: model's chosen dims)")
      ->check(CLI::PositiveNumber);
  c_syn->add_option("-o,--out", syn.out, "Output CSV (default stdout)");

  ExperimentArgs exp;
  auto* c_exp = app.add_subcommand("experiment", "Run a labeled-budget experiment");
  c_exp->add_option("config", exp.config, "JSON config file")->required();
  c_exp->add_option("-o,--out", exp.out, "Results CSV (default stdout)");
  c_exp->add_option("--methods", exp.methods, "Override methods (none, ssma, pca)")
      ->delimiter(',');
  c_exp->add_option("--seed", exp.seed, "Run a single seed");
  c_exp->add_option("--test-fraction", exp.test_fraction, "Held-out fraction");
  c_exp->add_option("--mu", exp.mu, "Geometry tradeoff");
  c_exp->add_option("--k", exp.k, "kNN neighbours")->check(CLI::PositiveNumber);
  c_exp->add_option("--dims", exp.dims, "Fixed latent dims")->check(CLI::PositiveNumber);
  c_exp->add_flag("--standardize,!--no-standardize", exp.standardize,
                  "Override per-domain z-scoring");
  c_exp->add_flag("--dump-config", exp.dump_config,
                  "Print the effective config and exit");

  KappaArgs kap;
  auto* c_kap = app.add_subcommand("eval-kappa", "Cohen's kappa of predictions");
  c_kap->add_option("--predictions", kap.predictions,
                    "CSV with 'truth' and 'predicted' columns");
  c_kap->add_option("--matrix", kap.matrix,
                    "Confusion counts, rows by truth: \"30,10;10,50\"");
  c_kap->add_option("--classes", kap.classes, "Class count (default: max label)")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (c_toy->parsed()) return cmd_toy(toy);
    if (c_align->parsed()) return cmd_align(align);
    if (c_proj->parsed()) return cmd_project(proj);
    if (c_syn->parsed()) return cmd_synthesize(syn);
    if (c_exp->parsed()) return cmd_experiment(exp);
    if (c_kap->parsed()) return cmd_eval_kappa(kap);
  } catch (const ssma::Error& e) {
    std::cerr << "ssma: error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "ssma: error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
