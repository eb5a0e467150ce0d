#pragma once

#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "scalemix/gsm.hpp"
#include "scalemix/mixed.hpp"
#include "scalemix/rng.hpp"

namespace scalemix {

// Diagonal v, first off-diagonal frac1 v, second off-diagonal frac2 v.
// Throws Error(NotDiagonallyDominant).
Eigen::MatrixXd make_banded_precision(int q, double v, double frac1, double frac2);

// Inclusive 0-based index range.
struct IndexRange {
  int first = 0;
  int last = 0;
  int size() const noexcept { return last - first + 1; }
};

// Sets the block and its transpose to `value`. Blocks touching the diagonal
// are refused (InvalidParams); a non-PD result throws Error(NotPositiveDefinite).
Eigen::MatrixXd add_block(const Eigen::MatrixXd& m, IndexRange rows, IndexRange cols, double value);

struct BandedTruth {
  double v = 3.0;
  double frac1 = 0.25;
  double frac2 = -0.2;
};

// Top-left size x size block of off-diagonal entries, alternately +magnitude
// and -magnitude in row-major pair order; everything else off-diagonal is 0.
struct BlockTruth {
  int size = 5;
  double magnitude = 0.2;
  double diagonal = 1.0;
};

// Random decomposable support with the given fractions of positive and
// negative pairs, entries +-magnitude, and a common diagonal one above the
// largest absolute off-diagonal row sum.
struct RandomSparseTruth {
  double pos_frac = 0.05;
  double neg_frac = 0.05;
  double magnitude = 0.5;
};

struct ExtraBlock {
  IndexRange rows;
  IndexRange cols;
  double value = 0.0;
};

struct TruthSpec {
  std::variant<BandedTruth, BlockTruth, RandomSparseTruth> kind = BandedTruth{};
  int dim = 50;
  std::vector<ExtraBlock> extra_blocks;
};

// Rng is only consumed by RandomSparse.
Eigen::MatrixXd make_truth(const TruthSpec& spec, Rng& rng);

// Support of a precision matrix as a graph (nonzero off-diagonals).
Adjacency precision_support(const Eigen::MatrixXd& precision);

// Rows of Z ~ N(0, precision^-1); column i of the output is
// sqrt(d_i) z_i + alpha_i + beta_i d_i with one d_i per column. The scales
// are drawn from rng before the Gaussian rows.
struct GsmSimulation {
  Eigen::MatrixXd data;
  Eigen::VectorXd scales;
};
GsmSimulation simulate_gsm_data(int n, const Eigen::MatrixXd& precision,
                                const std::vector<MarginSpec>& margins, Rng& rng);

// Gaussian rows with zero mean and the given precision.
Eigen::MatrixXd sample_gaussian_rows(int n, const Eigen::MatrixXd& precision, Rng& rng);

struct MixedSimulation {
  MixedData data;
  Eigen::MatrixXd precision;  // template with the omega diagonal substituted
  Eigen::VectorXd omega;
  int attempts = 0;
};

// omega_j ~ PG(pg_b, 0) for the first d coordinates, Omega_jj = 1/omega_j.
// Gaussian rows are drawn and the first d columns rounded to the nearest
// integer. The whole draw is repeated while Omega is not positive definite
// or a rounded column is constant, at most max_attempts times, then
// Error(NotPositiveDefinite) or Error(ConstantColumn). The returned data
// carry centering 0, matching this generator.
MixedSimulation simulate_mixed_data(int n, const Eigen::MatrixXd& precision_template, int d,
                                    int pg_b, Rng& rng, int max_attempts = 10000);

}  // namespace scalemix
