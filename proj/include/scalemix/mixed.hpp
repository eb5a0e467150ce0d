#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "scalemix/graph.hpp"
#include "scalemix/rng.hpp"
#include "scalemix/summary.hpp"

namespace scalemix {

// Columns are discrete first, then continuous.
struct MixedData {
  Eigen::MatrixXd values;
  int num_discrete = 0;
  double centering = 0.5;  // subtracted from discrete columns before fitting

  int n() const noexcept { return static_cast<int>(values.rows()); }
  int dim() const noexcept { return static_cast<int>(values.cols()); }
  int num_continuous() const noexcept { return dim() - num_discrete; }
};

Eigen::MatrixXd center_discrete(const Eigen::MatrixXd& values, int num_discrete, double c);

// Omega = Theta Gamma Theta with unit-diagonal Gamma.
struct PrecisionDecomp {
  Eigen::VectorXd theta;
  Eigen::MatrixXd gamma;
  Adjacency inclusion;  // off-diagonal nonzero pattern of gamma
};

// Throws Error(NotPositiveDefinite).
PrecisionDecomp decompose_precision(const Eigen::MatrixXd& omega);
Eigen::MatrixXd precision_from_decomp(const PrecisionDecomp& decomp);

struct MixedConfig {
  double alpha = 0.5;      // Gamma(alpha, rate beta) prior on continuous Omega_jj
  double beta = 0.5;
  double pg_b = 1.0;       // omega_j ~ PG(pg_b, 0)
  double slab_prob = 0.5;  // prior inclusion probability for each Gamma_ij
  double theta_step = 0.3;
  double omega_step = 0.3;
  double gamma_step = 0.1;
  int iters = 10000;
  int burnin = 4000;
  std::uint64_t seed = 1;
  int adapt_interval = 50;
  int drift_check_interval = 1000;
  double threshold = 0.5;

  void validate() const;
};

struct MixedState {
  Eigen::VectorXd omega;  // one per discrete column; theta_j = omega_j^(-1/2)
  PrecisionDecomp decomp;
  double loglik = 0.0;
};

class MixedSampler {
 public:
  // `centered` must already have the discrete centering applied.
  MixedSampler(Eigen::MatrixXd centered, int num_discrete, MixedConfig config);

  const MixedState& state() const noexcept { return state_; }
  const MixedConfig& config() const noexcept { return config_; }
  Eigen::MatrixXd precision() const { return precision_from_decomp(state_.decomp); }

  void set_state(const Eigen::VectorXd& theta, const Eigen::MatrixXd& gamma);

  void update_omega(Rng& rng, bool adapt);
  void update_theta(Rng& rng, bool adapt);
  void update_gamma(Rng& rng, bool adapt);

  // Gaussian log-likelihood of the centered rows under the current Omega.
  double full_loglik() const;
  // Recomputes Gamma^-1 (verifying positive definiteness) and the cached
  // log-likelihood; returns the absolute drift of the cache.
  double refresh();

  std::map<std::string, double> acceptance_rates() const;
  void reset_acceptance_counters();

 private:
  struct Counter {
    long tries = 0, accepts = 0, batch_tries = 0, batch_accepts = 0;
    void record(bool ok) {
      ++tries;
      ++batch_tries;
      accepts += ok;
      batch_accepts += ok;
    }
  };

  double theta_loglik_part(int j, double theta_j) const;
  void set_theta(int j, double theta_j);
  void apply_gamma_change(int i, int j, double delta, double r);
  void adapt_step(Counter& c, double& step) const;

  Eigen::MatrixXd s_;  // X'X
  int n_ = 0;
  int d_ = 0;
  MixedConfig config_;
  MixedState state_;
  Eigen::MatrixXd w_;  // Gamma^-1
  Eigen::VectorXd theta_steps_;
  double gamma_step_ = 0.1;
  std::vector<Counter> theta_counters_;
  Counter toggle_counter_, slab_counter_;
  int adapt_calls_ = 0;
};

PosteriorSummary run_mixed_chain(const MixedData& data, const MixedConfig& config);

}  // namespace scalemix
