// io.hpp - dataset, model, config and result file formats.
//
// Dataset (delimited text):
//   #ssma-dataset v1; domains=<M>; dims=<d_1,...,d_M>; classes=<C>
//   <domain_id>,<label or empty>,<f_1>,...,<f_dm>
// Domains are ordered by first appearance; dims follow that order.
//
// Model (structured text, doubles with 17 significant digits):
//   #ssma-model v1
//   key=value lines, then `matrix <name> <rows> <cols>` blocks of row-major
//   values, one row per line.
//
// Config: JSON object (see config_to_json for the field names).
// Results: CSV with the fixed header
//   leading,test_domain,budget,method,seed,kappa,overall_accuracy,dims

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "ssma/alignment.hpp"
#include "ssma/dataset.hpp"
#include "ssma/experiment.hpp"

namespace ssma {

inline constexpr int kDatasetFormatVersion = 1;
inline constexpr int kModelFormatVersion = 1;

/// %.17g formatting; round-trips every finite double.
std::string format_double(double value);

void write_dataset(std::ostream& out, const MultiDomainDataset& ds);
MultiDomainDataset read_dataset(std::istream& in,
                                const std::string& source = "<stream>");
void write_dataset_file(const std::filesystem::path& path,
                        const MultiDomainDataset& ds);
MultiDomainDataset read_dataset_file(const std::filesystem::path& path);

void write_model(std::ostream& out, const AlignmentModel& model);
/// Throws ValidationError for a newer major format version.
AlignmentModel read_model(std::istream& in,
                          const std::string& source = "<stream>");
void write_model_file(const std::filesystem::path& path,
                      const AlignmentModel& model);
AlignmentModel read_model_file(const std::filesystem::path& path);

std::string config_to_json(const ExperimentConfig& config);
/// Field-level ParameterError / ParseError messages.
ExperimentConfig config_from_json(const std::string& text,
                                  const std::string& source = "<config>");
ExperimentConfig read_config_file(const std::filesystem::path& path);

void write_results(std::ostream& out, const ExperimentResult& result);

}  // namespace ssma
