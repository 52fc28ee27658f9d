#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "vecsturm/scalar_base.hpp"
#include "vecsturm/spectral.hpp"

namespace vecsturm::app {

namespace fs = std::filesystem;

/// "%.17g", so every double survives a write/read cycle exactly.
std::string format_double(double v);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Parsed CSV with column lookup by name.
struct CsvData {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;
  int integer(std::size_t row, const std::string& name) const;
  const std::string& text(std::size_t row, const std::string& name) const;
  cplx complex(std::size_t row, const std::string& prefix) const;  // prefix_re, prefix_im
};

void write_text(const fs::path& path, const std::string& text);
void write_json(const fs::path& path, const nlohmann::json& j);
/// Throw MissingArtifact when the file is absent.
CsvData read_csv(const fs::path& path);
nlohmann::json read_json(const fs::path& path);

nlohmann::json complex_json(cplx z);
cplx complex_from_json(const nlohmann::json& j);
nlohmann::json matrix_json(const CMatrix& a);
CMatrix matrix_from_json(const nlohmann::json& j);

void add_complex(std::vector<std::string>& header, const std::string& prefix);
void push_complex(std::vector<std::string>& row, cplx z);

// base.csv
std::string base_csv(const BaseSpectrum& base);
BaseSpectrum read_base(const fs::path& dir);

// predict.json
nlohmann::json prediction_json(const CPrediction& pred, const CMatrix& c);
CPrediction read_prediction(const fs::path& dir);

// predictions.csv
std::string predictions_csv(const BaseSpectrum& base, const CPrediction& pred);

// eigenvalues.csv and traces/trace_<label>_<j>.csv
std::string eigenvalues_csv(std::span<const MatrixEigenpair> pairs);
std::string trace_name(int label, int j);
std::string trace_csv(const QuadratureGrid& grid, const MatrixEigenpair& pair);

struct SolvedArtifacts {
  QuadratureGrid grid;
  std::vector<MatrixEigenpair> pairs;  // traces filled for accepted pairs
};

/// Reads eigenvalues.csv; with `traces` also the trace file of every accepted pair.
SolvedArtifacts read_solved(const fs::path& dir, int m, bool traces);

}  // namespace vecsturm::app
