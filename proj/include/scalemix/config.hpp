#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "scalemix/distributions.hpp"
#include "scalemix/gsm.hpp"
#include "scalemix/mixed.hpp"
#include "scalemix/sim.hpp"

namespace scalemix {

inline constexpr int kSchemaVersion = 1;

enum class Mode { FitContinuous, FitMixed, Simulate, Evaluate, DiagnoseTails };
Mode parse_mode(const std::string& s);
std::string to_string(Mode m);

enum class ColumnKind { Continuous, Discrete };

// A column rule applies to one column by name or to a 1-based inclusive
// range of positions; later rules override earlier ones field by field.
struct ColumnRule {
  std::optional<std::string> name;
  std::optional<IndexRange> range;  // stored 0-based
  std::optional<ColumnKind> kind;
  std::optional<MixingFamily> mixing;
  std::optional<double> skew_alpha, skew_beta;
  std::optional<double> centering;
};

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::Continuous;
  MarginSpec margin;
  double centering = 0.5;
};

// Throws Error(SchemaMismatch) if a named rule matches no column or a range
// runs past the header.
std::vector<ColumnSpec> resolve_columns(const std::vector<ColumnRule>& rules,
                                        const std::vector<std::string>& header);

struct Dataset {
  std::vector<ColumnSpec> columns;
  Eigen::MatrixXd values;

  int num_discrete() const;
  std::vector<std::string> names() const;
};

// Reads a CSV, applies the column rules, and validates it: discrete columns
// must hold integers (SchemaMismatch) and no column may be constant
// (ConstantColumn). With standardize, continuous columns are centered and
// scaled to unit sample standard deviation.
Dataset ingest(const std::string& path, const std::vector<ColumnRule>& rules, bool standardize);
Dataset ingest_table(const std::vector<std::string>& header, const Eigen::MatrixXd& values,
                     const std::vector<ColumnRule>& rules, bool standardize);

// Stable reorder putting discrete columns first.
Dataset discrete_first(const Dataset& d);

struct GsmSection {
  double b = 10.0;
  double rho = 0.5;
  double edge_weight = 0.1;
  double scale_step = 0.5;
  int graph_moves_per_sweep = 1;
  bool sample_sigma = true;
};

struct MixedSection {
  double alpha = 0.5;
  double beta = 0.5;
  double pg_b = 1.0;
  double slab_prob = 0.5;
  double theta_step = 0.3;
  double omega_step = 0.3;
  double gamma_step = 0.1;
};

struct SimulateSection {
  std::string model = "gsm";  // "gsm" or "mixed"
  int n = 100;
  int num_discrete = 0;
  int pg_b = 1;
  std::vector<ColumnRule> margins;  // applied to the generated x1..xp names
};

struct EvaluateSection {
  bool include_diagonal = true;
};

struct RunConfig {
  Mode mode = Mode::FitContinuous;
  std::string data_path;
  std::string truth_path;
  std::string output_dir = ".";
  int iters = 10000;
  int burnin = 4000;
  std::uint64_t seed = 1;
  int chains = 1;
  double threshold = 0.5;
  bool standardize = false;
  bool report_runtime = false;

  std::vector<ColumnRule> columns;
  GsmSection gsm;
  MixedSection mixed;
  std::optional<TruthSpec> truth;
  SimulateSection simulate;
  EvaluateSection evaluate;

  // Throws Error(ConfigError).
  void validate() const;
};

// Throws Error(ConfigError) for unknown keys, wrong types, or a schema
// version other than kSchemaVersion.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config_file(const std::string& path);

MixingFamily mixing_from_json(const nlohmann::json& j);
nlohmann::json mixing_to_json(const MixingFamily& family);

GsmConfig make_gsm_config(const RunConfig& rc, const std::vector<ColumnSpec>& columns);
MixedConfig make_mixed_config(const RunConfig& rc);

}  // namespace scalemix
