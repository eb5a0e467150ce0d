#pragma once

#include <Eigen/Dense>

#include "scalemix/graph.hpp"
#include "scalemix/rng.hpp"

namespace scalemix {

// Inverse Wishart with `df` degrees of freedom and scale `scale` (mean
// scale / (df - p - 1)). Requires df > p - 1.
Eigen::MatrixXd sample_inverse_wishart(double df, const Eigen::MatrixXd& scale, Rng& rng);

struct HiwParams {
  double degrees = 3.0;   // b
  Eigen::MatrixXd scale;  // D, symmetric positive definite
};

struct HiwDraw {
  Eigen::MatrixXd sigma;
  // Assembled clique by clique, so entries at non-edges are exactly zero.
  Eigen::MatrixXd precision;
};

// Sequential clique-conditional draw along the perfect sequence, followed by
// the Markov completion of Sigma. Throws Error(NonPdScale) for an invalid
// scale and Error(InvalidParams) for degrees <= 0.
HiwDraw sample_hiw(const DecomposableGraph& g, const HiwParams& params, Rng& rng);

// K = sum_C [Sigma_C^-1]^0 - sum_S [Sigma_S^-1]^0.
Eigen::MatrixXd precision_from_cliques(const DecomposableGraph& g, const Eigen::MatrixXd& sigma);

}  // namespace scalemix
