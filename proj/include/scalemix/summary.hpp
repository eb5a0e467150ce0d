#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "scalemix/graph.hpp"

namespace scalemix {

struct PosteriorSummary {
  Eigen::MatrixXd edge_prob;       // diagonal 1 by convention
  Eigen::MatrixXd mean_precision;
  Eigen::MatrixXi sign_class;      // entries in {-1, 0, 1}
  Eigen::VectorXd scale_means;     // d for continuous fits, omega for mixed fits
  // One raw per-sweep series per chain, burn-in included.
  std::vector<std::vector<double>> loglik_traces;
  // Acceptance rates keyed by move type, averaged over post-burn-in sweeps.
  std::map<std::string, double> acceptance;
  // Numerical health figures such as the largest cached-likelihood drift.
  std::map<std::string, double> diagnostics;
  std::size_t num_samples = 0;
  double threshold = 0.5;
};

// One post-burn-in draw: the graph (or inclusion pattern), the precision
// matrix, and the scale vector.
struct PosteriorSample {
  Adjacency inclusion;
  Eigen::MatrixXd precision;
  Eigen::VectorXd scales;
};

// 0 where edge_prob <= threshold, otherwise the sign of mean_precision.
Eigen::MatrixXi classify_signs(const Eigen::MatrixXd& edge_prob,
                               const Eigen::MatrixXd& mean_precision, double threshold);

// Running sums over post-burn-in draws.
class SummaryAccumulator {
 public:
  SummaryAccumulator() = default;
  SummaryAccumulator(int dim, int num_scales);

  void add(const Adjacency& inclusion, const Eigen::MatrixXd& precision,
           const Eigen::VectorXd& scales);
  void add(const PosteriorSample& s) { add(s.inclusion, s.precision, s.scales); }
  void merge(const SummaryAccumulator& other);

  std::size_t count() const noexcept { return count_; }

  // Throws Error(EmptySampleSet) when nothing was added.
  PosteriorSummary finish(double threshold) const;

 private:
  Eigen::MatrixXd edge_count_;
  Eigen::MatrixXd precision_sum_;
  Eigen::VectorXd scale_sum_;
  std::size_t count_ = 0;
};

// Throws Error(EmptySampleSet).
PosteriorSummary summarize(const std::vector<PosteriorSample>& samples, double threshold = 0.5);

// Pools per-chain summaries, weighting by sample count, in the given order.
// Traces are kept per chain. Throws Error(EmptySampleSet) for an empty list.
PosteriorSummary merge_summaries(const std::vector<PosteriorSummary>& parts, double threshold);

// Counts over all entries of the matrices; the diagonal can be excluded.
struct SignTable {
  long est_zero = 0, true_zero = 0;
  long est_pos = 0, true_pos = 0;
  long est_neg = 0, true_neg = 0;
  double ratio_zero = 0.0, ratio_pos = 0.0, ratio_neg = 0.0;  // NaN when the true count is 0
};

// Sign of each entry of a numeric matrix (exact zero -> 0).
Eigen::MatrixXi sign_matrix(const Eigen::MatrixXd& m);

// Throws Error(DimensionMismatch).
SignTable sign_detection_table(const Eigen::MatrixXi& estimated_sign, const Eigen::MatrixXd& truth,
                               bool include_diagonal = true);

}  // namespace scalemix
