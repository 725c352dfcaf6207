#include "ssma/io.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "ssma/error.hpp"

namespace ssma {

namespace {

std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return std::string(s.substr(begin, end - begin + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& text, const std::string& source,
                    std::size_t line, const std::string& what) {
  if (text.empty()) throw ParseError(source, line, "empty " + what);
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size() || errno == ERANGE || !std::isfinite(v))
    throw ParseError(source, line, "invalid " + what + " '" + text + "'");
  return v;
}

long long parse_int(const std::string& text, const std::string& source,
                    std::size_t line, const std::string& what) {
  long long v = 0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (text.empty() || ec != std::errc() || ptr != last)
    throw ParseError(source, line, "invalid " + what + " '" + text + "'");
  return v;
}

void check_id(const std::string& id) {
  if (id.empty() || id.find_first_of(",; \t\r\n#=") != std::string::npos)
    throw ValidationError("domain id '" + id +
                          "' cannot be written (empty or contains one of "
                          "',; #=' or whitespace)");
}

// "#ssma-<kind> v<major>[.<minor>]" -> major.
int parse_version(const std::string& header, const std::string& kind,
                  const std::string& source) {
  const std::string prefix = "#ssma-" + kind + " v";
  if (header.rfind(prefix, 0) != 0)
    throw ParseError(source, 1, "missing '" + prefix + "' header");
  std::string rest = header.substr(prefix.size());
  rest = rest.substr(0, rest.find_first_of(".; \t"));
  return static_cast<int>(parse_int(rest, source, 1, "format version"));
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open '" + path.string() + "' for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  return in;
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

// ---------------------------------------------------------------------------
// Dataset
// ---------------------------------------------------------------------------

void write_dataset(std::ostream& out, const MultiDomainDataset& ds) {
  for (const auto& dom : ds.domains()) check_id(dom.id);
  out << "#ssma-dataset v" << kDatasetFormatVersion
      << "; domains=" << ds.domain_count() << "; dims=";
  for (std::size_t m = 0; m < ds.domain_count(); ++m)
    out << (m ? "," : "") << ds.domain(m).dims();
  out << "; classes=" << ds.class_count() << '\n';
  for (const auto& dom : ds.domains()) {
    for (Index i = 0; i < dom.samples(); ++i) {
      out << dom.id << ',';
      if (const auto& l = dom.labels[static_cast<std::size_t>(i)]) out << *l;
      for (Index r = 0; r < dom.dims(); ++r)
        out << ',' << format_double(dom.features(r, i));
      out << '\n';
    }
  }
}

MultiDomainDataset read_dataset(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  std::string header;
  while (header.empty() && std::getline(in, line)) {
    ++line_no;
    header = trim(line);
  }
  if (header.empty()) throw ParseError(source, 0, "empty dataset file");
  const int version = parse_version(header, "dataset", source);
  if (version > kDatasetFormatVersion)
    throw ValidationError(source + ": dataset format v" +
                          std::to_string(version) +
                          " is newer than supported v" +
                          std::to_string(kDatasetFormatVersion));

  long long domains = -1, classes = -1;
  std::vector<Index> dims;
  const auto fields = split(header, ';');
  for (std::size_t f = 1; f < fields.size(); ++f) {
    if (fields[f].empty()) continue;
    const auto eq = fields[f].find('=');
    if (eq == std::string::npos)
      throw ParseError(source, line_no, "malformed header field '" + fields[f] + "'");
    const auto key = trim(fields[f].substr(0, eq));
    const auto value = trim(fields[f].substr(eq + 1));
    if (key == "domains") {
      domains = parse_int(value, source, line_no, "domain count");
    } else if (key == "classes") {
      classes = parse_int(value, source, line_no, "class count");
    } else if (key == "dims") {
      for (const auto& d : split(value, ','))
        dims.push_back(static_cast<Index>(parse_int(d, source, line_no, "dimension")));
    } else {
      throw ParseError(source, line_no, "unknown header field '" + key + "'");
    }
  }
  if (domains < 1 || classes < 1 || static_cast<long long>(dims.size()) != domains)
    throw ParseError(source, line_no,
                     "header must declare domains >= 1, classes >= 1 and one "
                     "dimension per domain");
  for (Index d : dims)
    if (d < 1) throw ParseError(source, line_no, "dimensions must be >= 1");

  struct Pending {
    std::string id;
    std::vector<double> values;
    std::vector<Label> labels;
  };
  std::vector<Pending> pending;
  std::map<std::string, std::size_t> slot;

  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty()) continue;
    const auto cells = split(text, ',');
    if (cells.size() < 2)
      throw ParseError(source, line_no, "expected domain_id,label,features...");
    auto it = slot.find(cells[0]);
    if (it == slot.end()) {
      if (cells[0].empty()) throw ParseError(source, line_no, "empty domain id");
      if (static_cast<long long>(pending.size()) == domains)
        throw ParseError(source, line_no,
                         "more than " + std::to_string(domains) + " domains");
      it = slot.emplace(cells[0], pending.size()).first;
      pending.push_back({cells[0], {}, {}});
    }
    auto& dom = pending[it->second];
    const Index d = dims[it->second];
    if (static_cast<Index>(cells.size()) != d + 2)
      throw ParseError(source, line_no,
                       "domain '" + dom.id + "' expects " + std::to_string(d) +
                           " features, got " + std::to_string(cells.size() - 2));
    if (cells[1].empty()) {
      dom.labels.emplace_back();
    } else {
      const auto label = parse_int(cells[1], source, line_no, "label");
      if (label < 1 || label > classes)
        throw ParseError(source, line_no,
                         "label " + cells[1] + " outside 1.." + std::to_string(classes));
      dom.labels.emplace_back(static_cast<int>(label));
    }
    for (std::size_t c = 2; c < cells.size(); ++c)
      dom.values.push_back(parse_double(cells[c], source, line_no, "feature"));
  }
  if (static_cast<long long>(pending.size()) != domains)
    throw ParseError(source, line_no,
                     "header declares " + std::to_string(domains) +
                         " domains, found " + std::to_string(pending.size()));

  std::vector<DomainDataset> out;
  for (std::size_t m = 0; m < pending.size(); ++m) {
    DomainDataset dom;
    dom.id = pending[m].id;
    const Index n = static_cast<Index>(pending[m].labels.size());
    dom.features = Eigen::Map<const Eigen::MatrixXd>(pending[m].values.data(),
                                                     dims[m], n);
    dom.labels = std::move(pending[m].labels);
    out.push_back(std::move(dom));
  }
  return MultiDomainDataset(std::move(out), static_cast<int>(classes));
}

void write_dataset_file(const std::filesystem::path& path,
                        const MultiDomainDataset& ds) {
  auto out = open_out(path);
  write_dataset(out, ds);
  if (!out) throw ValidationError("failed writing '" + path.string() + "'");
}

MultiDomainDataset read_dataset_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_dataset(in, path.string());
}

// ---------------------------------------------------------------------------
// Model
// ---------------------------------------------------------------------------

namespace {

void write_matrix(std::ostream& out, const std::string& name,
                  const Eigen::MatrixXd& m) {
  out << "matrix " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c)
      out << (c ? " " : "") << format_double(m(r, c));
    out << '\n';
  }
}

template <typename T>
std::string join(const std::vector<T>& values) {
  std::ostringstream s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) s << ',';
    if constexpr (std::is_floating_point_v<T>)
      s << format_double(values[i]);
    else
      s << values[i];
  }
  return s.str();
}

}  // namespace

void write_model(std::ostream& out, const AlignmentModel& model) {
  for (const auto& id : model.domain_ids) check_id(id);
  const auto& p = model.params;
  out << "#ssma-model v" << kModelFormatVersion << '\n';
  out << "domains=" << model.domain_ids.size() << '\n';
  out << "domain_ids=" << join(model.domain_ids) << '\n';
  out << "domain_dims=" << join(model.domain_dims) << '\n';
  out << "class_count=" << model.class_count << '\n';
  out << "mu=" << format_double(p.mu) << '\n';
  out << "k=" << p.k << '\n';
  out << "standardize=" << (p.standardize ? 1 : 0) << '\n';
  out << "dims=" << (p.dims ? std::to_string(*p.dims) : std::string("auto"))
      << '\n';
  out << "ridge_ladder=" << join(p.ridge.ladder) << '\n';
  out << "ridge_min_pivot_ratio=" << format_double(p.ridge.min_pivot_ratio)
      << '\n';
  out << "ridge=" << format_double(model.ridge) << '\n';
  out << "chosen_dims=" << model.chosen_dims << '\n';
  write_matrix(out, "eigenvalues", model.eigenvalues.transpose());
  write_matrix(out, "projector", model.projector);
  for (std::size_t m = 0; m < model.domain_ids.size(); ++m) {
    Eigen::MatrixXd stats(2, model.domain_dims[m]);
    stats.row(0) = model.standardization[m].mean.transpose();
    stats.row(1) = model.standardization[m].scale.transpose();
    write_matrix(out, "standardization/" + model.domain_ids[m], stats);
  }
}

AlignmentModel read_model(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError(source, 0, "empty model file");
  ++line_no;
  const int version = parse_version(trim(line), "model", source);
  if (version > kModelFormatVersion)
    throw ValidationError(source + ": model format v" + std::to_string(version) +
                          " is newer than supported v" +
                          std::to_string(kModelFormatVersion));

  std::map<std::string, std::string> keys;
  std::map<std::string, Eigen::MatrixXd> matrices;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty()) continue;
    if (text.rfind("matrix ", 0) == 0) {
      std::istringstream head(text.substr(7));
      std::string name;
      long long rows = -1, cols = -1;
      head >> name >> rows >> cols;
      if (!head || rows < 0 || cols < 0)
        throw ParseError(source, line_no, "malformed matrix header");
      Eigen::MatrixXd m(rows, cols);
      for (long long r = 0; r < rows; ++r) {
        if (!std::getline(in, line))
          throw ParseError(source, line_no, "truncated matrix '" + name + "'");
        ++line_no;
        std::istringstream row(line);
        for (long long c = 0; c < cols; ++c) {
          std::string cell;
          row >> cell;
          m(r, c) = parse_double(cell, source, line_no, "matrix entry");
        }
      }
      matrices[name] = std::move(m);
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos)
      throw ParseError(source, line_no, "expected key=value");
    keys[text.substr(0, eq)] = text.substr(eq + 1);
  }

  auto key = [&](const std::string& k) -> const std::string& {
    auto it = keys.find(k);
    if (it == keys.end()) throw ParseError(source, 0, "missing key '" + k + "'");
    return it->second;
  };
  auto matrix = [&](const std::string& k) -> const Eigen::MatrixXd& {
    auto it = matrices.find(k);
    if (it == matrices.end())
      throw ParseError(source, 0, "missing matrix '" + k + "'");
    return it->second;
  };

  AlignmentModel model;
  for (const auto& id : split(key("domain_ids"), ',')) model.domain_ids.push_back(id);
  for (const auto& d : split(key("domain_dims"), ','))
    model.domain_dims.push_back(static_cast<Index>(parse_int(d, source, 0, "domain_dims")));
  if (model.domain_ids.size() != model.domain_dims.size() ||
      static_cast<long long>(model.domain_ids.size()) !=
          parse_int(key("domains"), source, 0, "domains"))
    throw ParseError(source, 0, "domain_ids, domain_dims and domains disagree");
  model.class_count = static_cast<int>(parse_int(key("class_count"), source, 0, "class_count"));

  auto& p = model.params;
  p.mu = parse_double(key("mu"), source, 0, "mu");
  p.k = static_cast<Index>(parse_int(key("k"), source, 0, "k"));
  p.standardize = parse_int(key("standardize"), source, 0, "standardize") != 0;
  if (key("dims") != "auto")
    p.dims = static_cast<Index>(parse_int(key("dims"), source, 0, "dims"));
  p.ridge.ladder.clear();
  for (const auto& v : split(key("ridge_ladder"), ','))
    p.ridge.ladder.push_back(parse_double(v, source, 0, "ridge_ladder"));
  p.ridge.min_pivot_ratio =
      parse_double(key("ridge_min_pivot_ratio"), source, 0, "ridge_min_pivot_ratio");
  model.ridge = parse_double(key("ridge"), source, 0, "ridge");
  model.chosen_dims = static_cast<Index>(parse_int(key("chosen_dims"), source, 0, "chosen_dims"));

  Index d = 0;
  for (Index dm : model.domain_dims) d += dm;
  const auto& ev = matrix("eigenvalues");
  const auto& f = matrix("projector");
  if (ev.rows() != 1 || ev.cols() != d || f.rows() != d || f.cols() != d)
    throw ParseError(source, 0, "eigenvalue/projector shapes do not match d = " +
                                    std::to_string(d));
  model.eigenvalues = ev.row(0).transpose();
  model.projector = f;
  for (std::size_t m = 0; m < model.domain_ids.size(); ++m) {
    const auto& s = matrix("standardization/" + model.domain_ids[m]);
    if (s.rows() != 2 || s.cols() != model.domain_dims[m])
      throw ParseError(source, 0, "bad standardization block for domain '" +
                                      model.domain_ids[m] + "'");
    model.standardization.push_back({s.row(0).transpose(), s.row(1).transpose()});
  }
  if (model.chosen_dims < 1 || model.chosen_dims > d)
    throw ParseError(source, 0, "chosen_dims outside 1..d");
  return model;
}

void write_model_file(const std::filesystem::path& path,
                      const AlignmentModel& model) {
  auto out = open_out(path);
  write_model(out, model);
  if (!out) throw ValidationError("failed writing '" + path.string() + "'");
}

AlignmentModel read_model_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_model(in, path.string());
}

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

std::string config_to_json(const ExperimentConfig& c) {
  using nlohmann::json;
  json j;
  if (c.dataset_path) j["dataset"] = *c.dataset_path;
  if (c.synthetic) {
    const auto& s = *c.synthetic;
    j["synthetic"] = {{"setting", s.setting},
                      {"n_per_class", s.n_per_class},
                      {"classes", s.classes},
                      {"inner_radius", s.shape.inner_radius},
                      {"growth", s.shape.growth},
                      {"tau_begin", s.shape.tau_begin},
                      {"tau_end", s.shape.tau_end},
                      {"noise_sd", s.shape.noise_sd}};
  }
  j["leading"] = c.leading;
  j["leading_budget"] = c.leading_budget;
  j["budgets"] = c.budgets;
  j["unlabeled"] = c.unlabeled;
  std::vector<std::string> methods;
  for (auto m : c.methods) methods.push_back(method_name(m));
  j["methods"] = methods;
  j["seeds"] = c.seeds;
  j["test_fraction"] = c.test_fraction;
  j["dims_folds"] = c.dims_folds;
  const auto& a = c.alignment;
  j["alignment"] = {{"mu", a.mu},
                    {"k", a.k},
                    {"standardize", a.standardize},
                    {"ridge_ladder", a.ridge.ladder},
                    {"ridge_min_pivot_ratio", a.ridge.min_pivot_ratio}};
  j["alignment"]["dims"] = a.dims ? json(*a.dims) : json(nullptr);
  const auto& l = c.classifier;
  j["classifier"] = {{"c_grid", l.c_grid},
                     {"folds", l.folds},
                     {"tolerance", l.tolerance},
                     {"max_epochs", l.max_epochs}};
  return j.dump(2) + "\n";
}

namespace {

template <typename T>
void read_field(const nlohmann::json& obj, const char* key, T& out,
                const std::string& path) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError("config field '" + path + key + "': " + e.what());
  }
}

void reject_unknown(const nlohmann::json& obj,
                    std::initializer_list<const char*> known,
                    const std::string& path) {
  for (const auto& [k, v] : obj.items()) {
    bool ok = false;
    for (const char* name : known) ok = ok || k == name;
    if (!ok) throw ParameterError("config has unknown field '" + path + k + "'");
  }
}

}  // namespace

ExperimentConfig config_from_json(const std::string& text,
                                  const std::string& source) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(source, 0, e.what());
  }
  if (!j.is_object()) throw ParseError(source, 0, "config must be a JSON object");
  reject_unknown(j,
                 {"dataset", "synthetic", "leading", "leading_budget", "budgets",
                  "unlabeled", "methods", "seeds", "test_fraction", "dims_folds",
                  "alignment", "classifier"},
                 "");

  ExperimentConfig c;
  if (j.contains("dataset")) {
    std::string path;
    read_field(j, "dataset", path, "");
    c.dataset_path = path;
  }
  if (j.contains("synthetic")) {
    const auto& s = j.at("synthetic");
    if (!s.is_object()) throw ParameterError("config field 'synthetic' must be an object");
    reject_unknown(s,
                   {"setting", "n_per_class", "classes", "inner_radius", "growth",
                    "tau_begin", "tau_end", "noise_sd"},
                   "synthetic.");
    SyntheticRecipe r;
    read_field(s, "setting", r.setting, "synthetic.");
    read_field(s, "n_per_class", r.n_per_class, "synthetic.");
    read_field(s, "classes", r.classes, "synthetic.");
    read_field(s, "inner_radius", r.shape.inner_radius, "synthetic.");
    read_field(s, "growth", r.shape.growth, "synthetic.");
    read_field(s, "tau_begin", r.shape.tau_begin, "synthetic.");
    read_field(s, "tau_end", r.shape.tau_end, "synthetic.");
    read_field(s, "noise_sd", r.shape.noise_sd, "synthetic.");
    c.synthetic = r;
  }
  read_field(j, "leading", c.leading, "");
  read_field(j, "leading_budget", c.leading_budget, "");
  read_field(j, "budgets", c.budgets, "");
  read_field(j, "unlabeled", c.unlabeled, "");
  if (j.contains("methods")) {
    std::vector<std::string> names;
    read_field(j, "methods", names, "");
    c.methods.clear();
    for (const auto& n : names) c.methods.push_back(parse_method(n));
  }
  read_field(j, "seeds", c.seeds, "");
  read_field(j, "test_fraction", c.test_fraction, "");
  read_field(j, "dims_folds", c.dims_folds, "");
  if (j.contains("alignment")) {
    const auto& a = j.at("alignment");
    if (!a.is_object()) throw ParameterError("config field 'alignment' must be an object");
    reject_unknown(a, {"mu", "k", "standardize", "dims", "ridge_ladder",
                       "ridge_min_pivot_ratio"},
                   "alignment.");
    read_field(a, "mu", c.alignment.mu, "alignment.");
    read_field(a, "k", c.alignment.k, "alignment.");
    read_field(a, "standardize", c.alignment.standardize, "alignment.");
    read_field(a, "ridge_ladder", c.alignment.ridge.ladder, "alignment.");
    read_field(a, "ridge_min_pivot_ratio", c.alignment.ridge.min_pivot_ratio,
               "alignment.");
    if (a.contains("dims") && !a.at("dims").is_null()) {
      Index dims = 0;
      read_field(a, "dims", dims, "alignment.");
      c.alignment.dims = dims;
    }
  }
  if (j.contains("classifier")) {
    const auto& l = j.at("classifier");
    if (!l.is_object()) throw ParameterError("config field 'classifier' must be an object");
    reject_unknown(l, {"c_grid", "folds", "tolerance", "max_epochs"}, "classifier.");
    read_field(l, "c_grid", c.classifier.c_grid, "classifier.");
    read_field(l, "folds", c.classifier.folds, "classifier.");
    read_field(l, "tolerance", c.classifier.tolerance, "classifier.");
    read_field(l, "max_epochs", c.classifier.max_epochs, "classifier.");
  }
  c.validate();
  return c;
}

ExperimentConfig read_config_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::ostringstream text;
  text << in.rdbuf();
  auto config = config_from_json(text.str(), path.string());
  // Relative dataset paths resolve against the config's directory.
  if (config.dataset_path && std::filesystem::path(*config.dataset_path).is_relative())
    config.dataset_path = (path.parent_path() / *config.dataset_path).string();
  return config;
}

// ---------------------------------------------------------------------------
// Results
// ---------------------------------------------------------------------------

void write_results(std::ostream& out, const ExperimentResult& result) {
  out << "leading,test_domain,budget,method,seed,kappa,overall_accuracy,dims\n";
  for (const auto& r : result.rows) {
    out << r.leading << ',' << r.test_domain << ',' << r.budget << ','
        << method_name(r.method) << ',' << r.seed << ','
        << format_double(r.kappa) << ',' << format_double(r.accuracy) << ','
        << r.dims << '\n';
  }
}

}  // namespace ssma
