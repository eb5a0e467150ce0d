#include "scalemix/orchestrate.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <thread>

#include "scalemix/csv.hpp"
#include "scalemix/error.hpp"
#include "scalemix/gsm.hpp"
#include "scalemix/mixed.hpp"
#include "scalemix/sim.hpp"

namespace scalemix {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string out_path(const RunConfig& rc, const std::string& name) {
  return (fs::path(rc.output_dir) / name).string();
}

void write_json(const std::string& path, const json& j) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot write " + path);
  f << j.dump(2) << '\n';
}

json sign_table_json(const SignTable& t) {
  auto num = [](double x) { return std::isnan(x) ? json(nullptr) : json(x); };
  return json{{"counts",
               {{"est_zero", t.est_zero}, {"true_zero", t.true_zero}, {"est_pos", t.est_pos},
                {"true_pos", t.true_pos}, {"est_neg", t.est_neg}, {"true_neg", t.true_neg}}},
              {"ratios", {{"zero", num(t.ratio_zero)}, {"pos", num(t.ratio_pos)}, {"neg", num(t.ratio_neg)}}}};
}

Eigen::MatrixXi to_sign_matrix(const Eigen::MatrixXd& m, const std::string& source) {
  Eigen::MatrixXi out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      if (v != -1.0 && v != 0.0 && v != 1.0)
        throw Error(ErrorCode::ParseError, source + ": sign entries must be -1, 0 or 1");
      out(i, j) = static_cast<int>(v);
    }
  return out;
}

Eigen::MatrixXd load_truth(const std::string& path, int dim) {
  const CsvTable t = read_csv_file(path);
  if (t.values.rows() != dim || t.values.cols() != dim)
    throw Error(ErrorCode::DimensionMismatch, path + ": truth must be " + std::to_string(dim) +
                                                  " x " + std::to_string(dim));
  return t.values;
}

void write_fit_outputs(const RunConfig& rc, const std::vector<std::string>& names,
                       const std::vector<std::string>& scale_names, const std::string& scale_file,
                       const PosteriorSummary& s, double runtime, std::ostream& log) {
  const int p = static_cast<int>(names.size());
  write_csv_file(out_path(rc, "edge_prob.csv"), names, s.edge_prob);
  write_csv_file(out_path(rc, "mean_precision.csv"), names, s.mean_precision);
  write_csv_file(out_path(rc, "sign_class.csv"), names, s.sign_class);
  write_csv_file(out_path(rc, scale_file), scale_names, Eigen::MatrixXd(s.scale_means.transpose()));

  std::size_t rows = 0;
  for (const auto& tr : s.loglik_traces) rows += tr.size();
  Eigen::MatrixXd trace(static_cast<Eigen::Index>(rows), 3);
  Eigen::Index r = 0;
  for (std::size_t c = 0; c < s.loglik_traces.size(); ++c)
    for (std::size_t k = 0; k < s.loglik_traces[c].size(); ++k, ++r) {
      trace(r, 0) = static_cast<double>(c);
      trace(r, 1) = static_cast<double>(k);
      trace(r, 2) = s.loglik_traces[c][k];
    }
  write_csv_file(out_path(rc, "loglik_trace.csv"), {"chain", "sweep", "loglik"}, trace);

  std::vector<Edge> edges;
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j)
      if (s.edge_prob(i, j) > rc.threshold) edges.emplace_back(i, j);
  {
    std::ofstream f(out_path(rc, "edges.txt"), std::ios::binary);
    if (!f) throw Error(ErrorCode::IoError, "cannot write edges.txt");
    write_edge_list(f, edges);
  }

  json j;
  j["schema_version"] = kSchemaVersion;
  j["mode"] = to_string(rc.mode);
  j["seed"] = rc.seed;
  j["chains"] = rc.chains;
  j["iters"] = rc.iters;
  j["burnin"] = rc.burnin;
  j["threshold"] = rc.threshold;
  j["num_samples"] = s.num_samples;
  j["num_edges"] = edges.size();
  j["columns"] = names;
  j["acceptance"] = s.acceptance;
  j["diagnostics"] = s.diagnostics;
  if (!rc.truth_path.empty()) {
    const SignTable t = sign_detection_table(s.sign_class, load_truth(rc.truth_path, p),
                                             rc.evaluate.include_diagonal);
    j["sign_table"] = sign_table_json(t);
    log << "sign ratios (zero, pos, neg): " << t.ratio_zero << ", " << t.ratio_pos << ", "
        << t.ratio_neg << "\n";
  }
  if (rc.report_runtime) j["runtime_seconds"] = runtime;
  write_json(out_path(rc, "summary.json"), j);
}

template <class RunOne>
PosteriorSummary run_chains(const RunConfig& rc, RunOne run_one, std::ostream& log) {
  std::vector<PosteriorSummary> parts(rc.chains);
  const int threads = std::min(rc.chains, worker_thread_cap());
  log << "running " << rc.chains << " chain(s) on " << threads << " worker(s)\n";
  run_parallel(rc.chains, threads, [&](int k) { parts[k] = run_one(rc.seed + static_cast<std::uint64_t>(k)); });
  return merge_summaries(parts, rc.threshold);
}

void fit_continuous(const RunConfig& rc, std::ostream& log) {
  const Dataset ds = ingest(rc.data_path, rc.columns, rc.standardize);
  if (ds.num_discrete() > 0)
    throw Error(ErrorCode::SchemaMismatch, "fit-continuous cannot use discrete columns; use fit-mixed");
  const GsmConfig base = make_gsm_config(rc, ds.columns);
  const auto start = std::chrono::steady_clock::now();
  const PosteriorSummary s = run_chains(rc, [&](std::uint64_t seed) {
    GsmConfig c = base;
    c.seed = seed;
    return run_chain(ds.values, c);
  }, log);
  const double runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  log << "fit finished in " << runtime << " s\n";
  write_fit_outputs(rc, ds.names(), ds.names(), "scales.csv", s, runtime, log);
}

void fit_mixed(const RunConfig& rc, std::ostream& log) {
  const Dataset ds = discrete_first(ingest(rc.data_path, rc.columns, rc.standardize));
  const int d = ds.num_discrete();
  MixedData data;
  data.values = ds.values;
  data.num_discrete = d;
  data.centering = 0.0;
  for (int j = 0; j < d; ++j) data.values.col(j).array() -= ds.columns[j].centering;
  for (const auto& c : ds.columns)
    if (c.kind == ColumnKind::Continuous && !is_degenerate(c.margin.mixing))
      throw Error(ErrorCode::SchemaMismatch,
                  "fit-mixed treats continuous columns as Gaussian; drop the mixing spec on '" +
                      c.name + "'");
  const MixedConfig base = make_mixed_config(rc);
  const auto start = std::chrono::steady_clock::now();
  const PosteriorSummary s = run_chains(rc, [&](std::uint64_t seed) {
    MixedConfig c = base;
    c.seed = seed;
    return run_mixed_chain(data, c);
  }, log);
  const double runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  log << "fit finished in " << runtime << " s\n";
  const std::vector<std::string> names = ds.names();
  write_fit_outputs(rc, names, std::vector<std::string>(names.begin(), names.begin() + d),
                    "omega.csv", s, runtime, log);
}

void simulate(const RunConfig& rc, std::ostream& log) {
  Rng rng(rc.seed);
  const Eigen::MatrixXd truth = make_truth(*rc.truth, rng);
  const int p = static_cast<int>(truth.rows());
  std::vector<std::string> names;
  if (rc.simulate.model == "mixed") {
    const int d = rc.simulate.num_discrete;
    if (d < 0 || d > p) throw Error(ErrorCode::ConfigError, "simulate.num_discrete out of range");
    for (int j = 0; j < p; ++j)
      names.push_back(j < d ? "z" + std::to_string(j + 1) : "y" + std::to_string(j - d + 1));
    const MixedSimulation sim = simulate_mixed_data(rc.simulate.n, truth, d, rc.simulate.pg_b, rng);
    write_csv_file(out_path(rc, "data.csv"), names, sim.data.values);
    write_csv_file(out_path(rc, "precision.csv"), names, sim.precision);
    write_csv_file(out_path(rc, "omega.csv"), std::vector<std::string>(names.begin(), names.begin() + d),
                   Eigen::MatrixXd(sim.omega.transpose()));
    log << "omega diagonal accepted after " << sim.attempts << " draw(s)\n";
  } else {
    for (int j = 0; j < p; ++j) names.push_back("x" + std::to_string(j + 1));
    std::vector<MarginSpec> margins;
    for (const auto& c : resolve_columns(rc.simulate.margins, names)) margins.push_back(c.margin);
    const GsmSimulation sim = simulate_gsm_data(rc.simulate.n, truth, margins, rng);
    write_csv_file(out_path(rc, "data.csv"), names, sim.data);
    write_csv_file(out_path(rc, "scales.csv"), names, Eigen::MatrixXd(sim.scales.transpose()));
  }
  write_csv_file(out_path(rc, "truth.csv"), names, truth);
  const SignTable t = sign_detection_table(sign_matrix(truth), truth, rc.evaluate.include_diagonal);
  log << "truth classes (zero, pos, neg): " << t.true_zero << ", " << t.true_pos << ", "
      << t.true_neg << "\n";
}

void evaluate(const RunConfig& rc, std::ostream& log) {
  const CsvTable est = read_csv_file(rc.data_path);
  const Eigen::MatrixXi signs = to_sign_matrix(est.values, rc.data_path);
  const Eigen::MatrixXd truth = load_truth(rc.truth_path, static_cast<int>(signs.rows()));
  const SignTable t = sign_detection_table(signs, truth, rc.evaluate.include_diagonal);
  json j = sign_table_json(t);
  j["include_diagonal"] = rc.evaluate.include_diagonal;
  write_json(out_path(rc, "sign_table.json"), j);
  log << "sign ratios (zero, pos, neg): " << t.ratio_zero << ", " << t.ratio_pos << ", "
      << t.ratio_neg << "\n";
}

void diagnose_tails(const RunConfig& rc, std::ostream& log) {
  const Dataset ds = ingest(rc.data_path, rc.columns, rc.standardize);
  json cols = json::array();
  for (std::size_t j = 0; j < ds.columns.size(); ++j) {
    const auto& spec = ds.columns[j];
    if (spec.kind != ColumnKind::Continuous) continue;
    TailReport r;
    try {
      r = recommend_mixing(ds.values.col(static_cast<Eigen::Index>(j)));
    } catch (const Error& e) {
      throw Error(e.code(), "column '" + spec.name + "': " + e.what());
    }
    cols.push_back({{"name", spec.name},
                    {"n", r.n},
                    {"tail_class", r.tail_class},
                    {"suggestion", mixing_to_json(r.suggestion)},
                    {"excess_ratio", r.excess_ratio},
                    {"hill_index", r.hill_index},
                    {"qq_correlation", r.qq_correlation},
                    {"qq_max_deviation", r.qq_max_deviation},
                    {"skewness", r.skewness},
                    {"excess_kurtosis", r.excess_kurtosis}});
    log << spec.name << ": " << r.tail_class << " -> " << describe(r.suggestion) << "\n";
  }
  if (cols.empty()) throw Error(ErrorCode::SchemaMismatch, "no continuous columns to diagnose");
  write_json(out_path(rc, "tails.json"), json{{"schema_version", kSchemaVersion}, {"columns", cols}});
}

}  // namespace

int worker_thread_cap() {
  if (const char* env = std::getenv("SCALEMIX_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void run_parallel(int count, int threads, const std::function<void(int)>& task) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int k; (k = next.fetch_add(1)) < count;) {
      try {
        task(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

void orchestrate(const RunConfig& rc, std::ostream& log) {
  rc.validate();
  std::error_code ec;
  fs::create_directories(rc.output_dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create output directory " + rc.output_dir);
  switch (rc.mode) {
    case Mode::FitContinuous: return fit_continuous(rc, log);
    case Mode::FitMixed: return fit_mixed(rc, log);
    case Mode::Simulate: return simulate(rc, log);
    case Mode::Evaluate: return evaluate(rc, log);
    case Mode::DiagnoseTails: return diagnose_tails(rc, log);
  }
}

}  // namespace scalemix
