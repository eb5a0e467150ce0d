#include "scalemix/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "scalemix/csv.hpp"
#include "scalemix/error.hpp"

namespace scalemix {

using nlohmann::json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) config_error(where + " must be a JSON object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items())
    if (!ok.count(key)) config_error("unknown key '" + key + "' in " + where);
}

template <class T>
T get(const json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    config_error(where + "." + key + ": " + e.what());
  }
}

template <class T>
void maybe(const json& j, const char* key, const std::string& where, T& out) {
  if (j.contains(key)) out = get<T>(j, key, where);
}

IndexRange parse_range(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
    config_error(where + " must be a [first, last] pair of 1-based integers");
  const int first = j[0].get<int>(), last = j[1].get<int>();
  if (first < 1 || last < first) config_error(where + " must satisfy 1 <= first <= last");
  return IndexRange{first - 1, last - 1};
}

ColumnKind parse_kind(const std::string& s) {
  if (s == "continuous") return ColumnKind::Continuous;
  if (s == "discrete") return ColumnKind::Discrete;
  config_error("column kind must be 'continuous' or 'discrete', got '" + s + "'");
}

std::vector<ColumnRule> parse_rules(const json& j, const std::string& where) {
  if (!j.is_array()) config_error(where + " must be an array");
  std::vector<ColumnRule> rules;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const json& r = j[k];
    const std::string w = where + "[" + std::to_string(k) + "]";
    check_keys(r, w, {"name", "range", "kind", "mixing", "skew_alpha", "skew_beta", "centering"});
    ColumnRule rule;
    if (r.contains("name")) rule.name = get<std::string>(r, "name", w);
    if (r.contains("range")) rule.range = parse_range(r["range"], w + ".range");
    if (rule.name.has_value() == rule.range.has_value())
      config_error(w + " needs exactly one of 'name' or 'range'");
    if (r.contains("kind")) rule.kind = parse_kind(get<std::string>(r, "kind", w));
    if (r.contains("mixing")) rule.mixing = mixing_from_json(r["mixing"]);
    if (r.contains("skew_alpha")) rule.skew_alpha = get<double>(r, "skew_alpha", w);
    if (r.contains("skew_beta")) rule.skew_beta = get<double>(r, "skew_beta", w);
    if (r.contains("centering")) rule.centering = get<double>(r, "centering", w);
    rules.push_back(std::move(rule));
  }
  return rules;
}

TruthSpec parse_truth(const json& j) {
  const std::string w = "truth";
  if (!j.is_object() || !j.contains("kind")) config_error("truth needs a 'kind'");
  const std::string kind = get<std::string>(j, "kind", w);
  TruthSpec spec;
  if (kind == "banded") {
    check_keys(j, w, {"kind", "dim", "v", "frac1", "frac2", "extra_blocks"});
    BandedTruth b;
    maybe(j, "v", w, b.v);
    maybe(j, "frac1", w, b.frac1);
    maybe(j, "frac2", w, b.frac2);
    spec.kind = b;
  } else if (kind == "block") {
    check_keys(j, w, {"kind", "dim", "size", "magnitude", "diagonal", "extra_blocks"});
    BlockTruth b;
    maybe(j, "size", w, b.size);
    maybe(j, "magnitude", w, b.magnitude);
    maybe(j, "diagonal", w, b.diagonal);
    spec.kind = b;
  } else if (kind == "random_sparse") {
    check_keys(j, w, {"kind", "dim", "pos_frac", "neg_frac", "magnitude", "extra_blocks"});
    RandomSparseTruth s;
    maybe(j, "pos_frac", w, s.pos_frac);
    maybe(j, "neg_frac", w, s.neg_frac);
    maybe(j, "magnitude", w, s.magnitude);
    spec.kind = s;
  } else {
    config_error("truth.kind must be 'banded', 'block' or 'random_sparse'");
  }
  maybe(j, "dim", w, spec.dim);
  if (j.contains("extra_blocks")) {
    const json& blocks = j["extra_blocks"];
    if (!blocks.is_array()) config_error("truth.extra_blocks must be an array");
    for (std::size_t k = 0; k < blocks.size(); ++k) {
      const std::string bw = "truth.extra_blocks[" + std::to_string(k) + "]";
      check_keys(blocks[k], bw, {"rows", "cols", "value"});
      ExtraBlock eb;
      eb.rows = parse_range(blocks[k].at("rows"), bw + ".rows");
      eb.cols = parse_range(blocks[k].at("cols"), bw + ".cols");
      eb.value = get<double>(blocks[k], "value", bw);
      spec.extra_blocks.push_back(eb);
    }
  }
  return spec;
}

bool is_integer_valued(const Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v(i) != std::floor(v(i))) return false;
  return true;
}

}  // namespace

Mode parse_mode(const std::string& s) {
  if (s == "fit-continuous") return Mode::FitContinuous;
  if (s == "fit-mixed") return Mode::FitMixed;
  if (s == "simulate") return Mode::Simulate;
  if (s == "evaluate") return Mode::Evaluate;
  if (s == "diagnose-tails") return Mode::DiagnoseTails;
  config_error("unknown mode '" + s + "'");
}

std::string to_string(Mode m) {
  switch (m) {
    case Mode::FitContinuous: return "fit-continuous";
    case Mode::FitMixed: return "fit-mixed";
    case Mode::Simulate: return "simulate";
    case Mode::Evaluate: return "evaluate";
    case Mode::DiagnoseTails: return "diagnose-tails";
  }
  return "?";
}

MixingFamily mixing_from_json(const json& j) {
  const std::string w = "mixing";
  if (!j.is_object() || !j.contains("family")) config_error("mixing needs a 'family'");
  const std::string f = get<std::string>(j, "family", w);
  MixingFamily out;
  if (f == "degenerate") {
    check_keys(j, w, {"family"});
    out = Degenerate{};
  } else if (f == "exponential") {
    check_keys(j, w, {"family", "rate", "mean"});
    if (j.contains("rate") == j.contains("mean"))
      config_error("exponential mixing needs exactly one of 'rate' or 'mean'");
    out = Exponential{j.contains("rate") ? get<double>(j, "rate", w) : 1.0 / get<double>(j, "mean", w)};
  } else if (f == "inverse_gamma") {
    check_keys(j, w, {"family", "shape", "scale"});
    out = InverseGamma{get<double>(j, "shape", w), get<double>(j, "scale", w)};
  } else if (f == "gig") {
    check_keys(j, w, {"family", "lambda", "chi", "psi"});
    out = Gig{get<double>(j, "lambda", w), get<double>(j, "chi", w), get<double>(j, "psi", w)};
  } else if (f == "polya_gamma") {
    check_keys(j, w, {"family", "b"});
    out = PolyaGamma{get<double>(j, "b", w)};
  } else {
    config_error("unknown mixing family '" + f + "'");
  }
  try {
    validate(out);
  } catch (const Error& e) {
    config_error(std::string("mixing: ") + e.what());
  }
  return out;
}

json mixing_to_json(const MixingFamily& family) {
  return std::visit(
      overloaded{
          [](const Degenerate&) { return json{{"family", "degenerate"}}; },
          [](const Exponential& e) { return json{{"family", "exponential"}, {"rate", e.rate}}; },
          [](const InverseGamma& g) {
            return json{{"family", "inverse_gamma"}, {"shape", g.shape}, {"scale", g.scale}};
          },
          [](const Gig& g) {
            return json{{"family", "gig"}, {"lambda", g.lambda}, {"chi", g.chi}, {"psi", g.psi}};
          },
          [](const PolyaGamma& p) { return json{{"family", "polya_gamma"}, {"b", p.b}}; },
      },
      family);
}

std::vector<ColumnSpec> resolve_columns(const std::vector<ColumnRule>& rules,
                                        const std::vector<std::string>& header) {
  std::vector<ColumnSpec> specs(header.size());
  for (std::size_t i = 0; i < header.size(); ++i) specs[i].name = header[i];
  auto apply = [](const ColumnRule& r, ColumnSpec& s) {
    if (r.kind) s.kind = *r.kind;
    if (r.mixing) s.margin.mixing = *r.mixing;
    if (r.skew_alpha) s.margin.skew_alpha = *r.skew_alpha;
    if (r.skew_beta) s.margin.skew_beta = *r.skew_beta;
    if (r.centering) s.centering = *r.centering;
  };
  for (const auto& r : rules) {
    if (r.name) {
      bool found = false;
      for (auto& s : specs)
        if (s.name == *r.name) {
          apply(r, s);
          found = true;
        }
      if (!found) throw Error(ErrorCode::SchemaMismatch, "no column named '" + *r.name + "'");
    } else {
      if (r.range->last >= static_cast<int>(specs.size()))
        throw Error(ErrorCode::SchemaMismatch,
                    "column range ends at " + std::to_string(r.range->last + 1) + " but the data have " +
                        std::to_string(specs.size()) + " columns");
      for (int i = r.range->first; i <= r.range->last; ++i) apply(r, specs[i]);
    }
  }
  for (const auto& s : specs)
    if (s.kind == ColumnKind::Discrete && !is_degenerate(s.margin.mixing))
      throw Error(ErrorCode::SchemaMismatch,
                  "discrete column '" + s.name + "' cannot carry a mixing distribution");
  return specs;
}

int Dataset::num_discrete() const {
  int d = 0;
  for (const auto& c : columns) d += c.kind == ColumnKind::Discrete;
  return d;
}

std::vector<std::string> Dataset::names() const {
  std::vector<std::string> out;
  for (const auto& c : columns) out.push_back(c.name);
  return out;
}

Dataset ingest_table(const std::vector<std::string>& header, const Eigen::MatrixXd& values,
                     const std::vector<ColumnRule>& rules, bool standardize) {
  if (header.empty()) throw Error(ErrorCode::SchemaMismatch, "data have no columns");
  if (static_cast<Eigen::Index>(header.size()) != values.cols())
    throw Error(ErrorCode::SchemaMismatch, "header width does not match the data");
  Dataset d;
  d.columns = resolve_columns(rules, header);
  d.values = values;
  for (Eigen::Index j = 0; j < values.cols(); ++j) {
    const auto& spec = d.columns[j];
    auto col = d.values.col(j);
    if (spec.kind == ColumnKind::Discrete && !is_integer_valued(col))
      throw Error(ErrorCode::SchemaMismatch,
                  "discrete column '" + spec.name + "' contains non-integer values");
    if (col.size() == 0 || col.maxCoeff() == col.minCoeff())
      throw Error(ErrorCode::ConstantColumn, "column '" + spec.name + "' is constant");
    if (standardize && spec.kind == ColumnKind::Continuous) {
      const double mean = col.mean();
      col.array() -= mean;
      const double sd = std::sqrt(col.squaredNorm() / static_cast<double>(col.size() - 1));
      col /= sd;
    }
  }
  return d;
}

Dataset ingest(const std::string& path, const std::vector<ColumnRule>& rules, bool standardize) {
  const CsvTable t = read_csv_file(path);
  return ingest_table(t.header, t.values, rules, standardize);
}

Dataset discrete_first(const Dataset& d) {
  std::vector<int> order;
  for (int pass = 0; pass < 2; ++pass)
    for (int j = 0; j < static_cast<int>(d.columns.size()); ++j)
      if ((d.columns[j].kind == ColumnKind::Discrete) == (pass == 0)) order.push_back(j);
  Dataset out;
  out.values.resize(d.values.rows(), d.values.cols());
  for (std::size_t k = 0; k < order.size(); ++k) {
    out.columns.push_back(d.columns[order[k]]);
    out.values.col(static_cast<Eigen::Index>(k)) = d.values.col(order[k]);
  }
  return out;
}

void RunConfig::validate() const {
  if (iters < 1 || burnin < 0 || iters <= burnin) config_error("need iters > burnin >= 0");
  if (chains < 1) config_error("chains must be >= 1");
  if (!(threshold > 0.0 && threshold < 1.0)) config_error("threshold must lie in (0, 1)");
  if (mode != Mode::Simulate && data_path.empty()) config_error("a data path is required");
  if (mode == Mode::Evaluate && truth_path.empty()) config_error("evaluate needs a truth path");
  if (mode == Mode::Simulate) {
    if (!truth) config_error("simulate needs a 'truth' section");
    if (simulate.model != "gsm" && simulate.model != "mixed")
      config_error("simulate.model must be 'gsm' or 'mixed'");
    if (simulate.n < 1) config_error("simulate.n must be positive");
  }
}

RunConfig parse_config(const json& j) {
  check_keys(j, "config",
             {"schema_version", "mode", "data", "truth_path", "output_dir", "iters", "burnin", "seed",
              "chains", "threshold", "standardize", "report_runtime", "columns", "gsm", "mixed",
              "truth", "simulate", "evaluate"});
  if (!j.contains("schema_version")) config_error("config needs 'schema_version'");
  const int version = get<int>(j, "schema_version", "config");
  if (version != kSchemaVersion)
    config_error("unsupported schema_version " + std::to_string(version) + " (expected " +
                 std::to_string(kSchemaVersion) + ")");

  RunConfig rc;
  const std::string w = "config";
  if (j.contains("mode")) rc.mode = parse_mode(get<std::string>(j, "mode", w));
  maybe(j, "data", w, rc.data_path);
  maybe(j, "truth_path", w, rc.truth_path);
  maybe(j, "output_dir", w, rc.output_dir);
  maybe(j, "iters", w, rc.iters);
  maybe(j, "burnin", w, rc.burnin);
  maybe(j, "seed", w, rc.seed);
  maybe(j, "chains", w, rc.chains);
  maybe(j, "threshold", w, rc.threshold);
  maybe(j, "standardize", w, rc.standardize);
  maybe(j, "report_runtime", w, rc.report_runtime);
  if (j.contains("columns")) rc.columns = parse_rules(j["columns"], "columns");

  if (j.contains("gsm")) {
    const json& g = j["gsm"];
    check_keys(g, "gsm", {"b", "rho", "edge_weight", "scale_step", "graph_moves_per_sweep", "sample_sigma"});
    maybe(g, "b", "gsm", rc.gsm.b);
    maybe(g, "rho", "gsm", rc.gsm.rho);
    maybe(g, "edge_weight", "gsm", rc.gsm.edge_weight);
    maybe(g, "scale_step", "gsm", rc.gsm.scale_step);
    maybe(g, "graph_moves_per_sweep", "gsm", rc.gsm.graph_moves_per_sweep);
    maybe(g, "sample_sigma", "gsm", rc.gsm.sample_sigma);
  }
  if (j.contains("mixed")) {
    const json& m = j["mixed"];
    check_keys(m, "mixed",
               {"alpha", "beta", "pg_b", "slab_prob", "theta_step", "omega_step", "gamma_step"});
    maybe(m, "alpha", "mixed", rc.mixed.alpha);
    maybe(m, "beta", "mixed", rc.mixed.beta);
    maybe(m, "pg_b", "mixed", rc.mixed.pg_b);
    maybe(m, "slab_prob", "mixed", rc.mixed.slab_prob);
    maybe(m, "theta_step", "mixed", rc.mixed.theta_step);
    maybe(m, "omega_step", "mixed", rc.mixed.omega_step);
    maybe(m, "gamma_step", "mixed", rc.mixed.gamma_step);
  }
  if (j.contains("truth")) rc.truth = parse_truth(j["truth"]);
  if (j.contains("simulate")) {
    const json& s = j["simulate"];
    check_keys(s, "simulate", {"model", "n", "num_discrete", "pg_b", "margins"});
    maybe(s, "model", "simulate", rc.simulate.model);
    maybe(s, "n", "simulate", rc.simulate.n);
    maybe(s, "num_discrete", "simulate", rc.simulate.num_discrete);
    maybe(s, "pg_b", "simulate", rc.simulate.pg_b);
    if (s.contains("margins")) rc.simulate.margins = parse_rules(s["margins"], "simulate.margins");
  }
  if (j.contains("evaluate")) {
    const json& e = j["evaluate"];
    check_keys(e, "evaluate", {"include_diagonal"});
    maybe(e, "include_diagonal", "evaluate", rc.evaluate.include_diagonal);
  }
  return rc;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::IoError, "cannot open config " + path);
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, path + ": " + e.what());
  }
  return parse_config(j);
}

GsmConfig make_gsm_config(const RunConfig& rc, const std::vector<ColumnSpec>& columns) {
  GsmConfig c;
  c.b = rc.gsm.b;
  c.rho = rc.gsm.rho;
  c.edge_weights = EdgePriorWeights::constant(static_cast<int>(columns.size()), rc.gsm.edge_weight);
  for (const auto& col : columns) c.margins.push_back(col.margin);
  c.scale_step = rc.gsm.scale_step;
  c.graph_moves_per_sweep = rc.gsm.graph_moves_per_sweep;
  c.sample_sigma = rc.gsm.sample_sigma;
  c.iters = rc.iters;
  c.burnin = rc.burnin;
  c.seed = rc.seed;
  c.threshold = rc.threshold;
  return c;
}

MixedConfig make_mixed_config(const RunConfig& rc) {
  MixedConfig c;
  c.alpha = rc.mixed.alpha;
  c.beta = rc.mixed.beta;
  c.pg_b = rc.mixed.pg_b;
  c.slab_prob = rc.mixed.slab_prob;
  c.theta_step = rc.mixed.theta_step;
  c.omega_step = rc.mixed.omega_step;
  c.gamma_step = rc.mixed.gamma_step;
  c.iters = rc.iters;
  c.burnin = rc.burnin;
  c.seed = rc.seed;
  c.threshold = rc.threshold;
  return c;
}

}  // namespace scalemix
