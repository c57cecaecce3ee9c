#pragma once

#include "ttofs/fsd.hpp"
#include "ttofs/widom.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ttofs::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitAssertion = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitResolution = 3;

/// Overrides `output.dir` of every config when set.
inline constexpr const char* kOutputDirVariable = "TTOFS_OUTPUT_DIR";

enum class ExperimentKind { Widom, Isometry, Stability, Convergence, Fredholm, Pseudospectra };

std::string to_string(ExperimentKind kind);

struct Expectations {
  std::optional<double> max_residual;
  std::optional<std::string> verdict;
  std::optional<std::size_t> kernel_dim;
  bool nonincreasing = true;
};

struct OutputSpec {
  std::string dir = ".";
  std::string prefix;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Widom;
  BlaschkeProduct u = BlaschkeProduct::geometric(0.5);
  Symbol a;
  Symbol b;
  std::vector<std::size_t> n_list;
  std::size_t window = 1024;
  std::vector<double> eps_list{0.1};
  std::uint64_t seed = 0;
  std::vector<CompactTerm> compact;
  Perturbation perturbation;
  double threshold = 0.5;
  double gap_factor = 0.5;
  double tolerance = 1e-6;
  std::optional<std::size_t> reference_n;
  std::optional<GridRect> rect;
  Expectations expect;
  OutputSpec output;
  bool parallel = false;
};

/// Zero family from `{"family": ..., params}` or a bare list of zeros.
BlaschkeProduct parse_zeros(const nlohmann::json& j);

/// Symbol from a number, "shift", "laurent:{k: c, ...}" or an object
/// mapping Fourier indices to coefficients. `grid_m` resamples the symbol
/// on a larger quadrature grid.
Symbol parse_symbol(const nlohmann::json& j, const std::string& field, std::optional<std::size_t> grid_m = {});

/// Validates against the schema and throws ConfigError naming the field.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

struct Table {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string to_csv(const Table& table);

struct RunResult {
  int status = kExitPass;
  nlohmann::json document;
  std::vector<Table> tables;
};

/// Runs the experiment without touching the file system.
RunResult run(const ExperimentConfig& config);

/// Writes `<prefix>_result.json` and `<prefix>_<table>.csv`; returns the
/// directory used.
std::filesystem::path write_artifacts(const RunResult& result, const OutputSpec& output);

/// Zero families and symbol forms with parameter docs, analytic verdicts and
/// an example config per family.
nlohmann::json catalog();

int command_run(const std::filesystem::path& config, std::ostream& out, std::ostream& err);
int command_validate(const std::filesystem::path& config, std::ostream& out, std::ostream& err);
int command_list_families(std::ostream& out);

}  // namespace ttofs::cli
