#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "scalemix/distributions.hpp"
#include "scalemix/graph.hpp"
#include "scalemix/hiw.hpp"
#include "scalemix/rng.hpp"
#include "scalemix/summary.hpp"

namespace scalemix {

// Column law: y_i = sqrt(d_i) z_i + alpha + beta d_i with d_i ~ mixing.
struct MarginSpec {
  MixingFamily mixing = Degenerate{};
  double skew_alpha = 0.0;
  double skew_beta = 0.0;
};

struct GsmConfig {
  double b = 10.0;
  double rho = 0.5;
  EdgePriorWeights edge_weights;  // empty means constant 0.1
  std::vector<MarginSpec> margins;
  double scale_step = 0.5;        // initial random-walk step on log d
  int iters = 10000;
  int burnin = 4000;
  std::uint64_t seed = 1;
  int graph_moves_per_sweep = 1;
  bool sample_sigma = true;       // post-burn-in HIW draw per sweep
  int adapt_interval = 50;
  int drift_check_interval = 1000;
  double threshold = 0.5;

  // Throws Error(InvalidParams) / Error(DimensionMismatch).
  void validate(int q) const;
};

// (y_i - alpha_i - beta_i d_i) / sqrt(d_i) column by column. Throws
// Error(NonPositiveScale) for d_i <= 0 and Error(DimensionMismatch).
Eigen::MatrixXd transform(const Eigen::MatrixXd& data, const Eigen::VectorXd& scales,
                          const std::vector<MarginSpec>& margins);

struct GsmState {
  DecomposableGraph graph;
  Eigen::VectorXd scales;
  std::optional<Eigen::MatrixXd> sigma;
  std::optional<Eigen::MatrixXd> precision;
  double log_marginal = 0.0;  // log HMT of the transformed data under graph
};

// Owns the chain state plus the bookkeeping that keeps each update local:
// the transformed Gram matrix and the per-clique HMT terms.
class GsmSampler {
 public:
  GsmSampler(Eigen::MatrixXd data, GsmConfig config);

  const GsmState& state() const noexcept { return state_; }
  const GsmConfig& config() const noexcept { return config_; }
  const Eigen::MatrixXd& transformed_gram() const noexcept { return gram_z_; }
  int num_samples() const noexcept { return static_cast<int>(data_.rows()); }

  // Replaces graph and scales and rebuilds every cache.
  void reset(const DecomposableGraph& graph, const Eigen::VectorXd& scales);

  // One MH step on the graph. Returns true on acceptance.
  bool update_graph(Rng& rng);
  // One MH step on log d_i for each non-degenerate margin, in index order.
  // With adapt, step sizes are tuned every adapt_interval calls.
  void update_scales(Rng& rng, bool adapt);
  // HIW(b + n, rho I + Z'Z) for the current transformed data Z.
  HiwDraw sample_sigma_posterior(Rng& rng);

  // log p(Y | G, d): HMT of the transformed data plus the Jacobian.
  double log_likelihood() const;
  // Recomputes log_marginal from scratch and returns |cached - fresh|.
  double refresh_log_marginal();

  double graph_acceptance_rate() const;
  double scale_acceptance_rate() const;
  const Eigen::VectorXd& scale_steps() const noexcept { return steps_; }
  void reset_acceptance_counters();

 private:
  void rebuild_structure();
  void refresh_gram_row(int i, double d, Eigen::VectorXd& row) const;
  double subset_term(const std::vector<int>& idx) const;
  double column_log_jacobian(int i, double d) const;

  Eigen::MatrixXd data_;
  GsmConfig config_;
  GsmState state_;
  MoveSet moves_;
  Eigen::MatrixXd raw_gram_;
  Eigen::VectorXd col_sums_;
  Eigen::MatrixXd gram_z_;
  std::vector<std::vector<int>> clique_idx_, sep_idx_;
  std::vector<double> clique_terms_, sep_terms_;
  std::vector<std::vector<int>> cliques_of_, seps_of_;  // per vertex
  Eigen::VectorXd steps_;
  Eigen::VectorXi scale_tries_, scale_accepts_;
  Eigen::VectorXi batch_tries_, batch_accepts_;
  int adapt_calls_ = 0;
  long graph_tries_ = 0, graph_accepts_ = 0;
};

// Full chain: graph moves, scale moves, then (after burn-in) a Sigma draw per
// sweep. Deterministic given config.seed.
PosteriorSummary run_chain(const Eigen::MatrixXd& data, const GsmConfig& config);

// Tail diagnostics for one column.
struct TailReport {
  MixingFamily suggestion;
  std::string tail_class;  // "gaussian", "exponential" or "polynomial"
  double excess_ratio = 0.0;   // mean excess at the 99% vs 90% quantile of |y|
  double hill_index = 0.0;     // Hill tail-index estimate on the upper tail
  double qq_correlation = 0.0; // normal q-q plot correlation
  double qq_max_deviation = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  int n = 0;
};

// Throws Error(TooFewSamples) for n < 30.
TailReport recommend_mixing(const Eigen::VectorXd& column);

}  // namespace scalemix
