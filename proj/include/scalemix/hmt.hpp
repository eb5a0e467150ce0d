#pragma once

#include <vector>

#include <Eigen/Dense>

#include "scalemix/graph.hpp"

namespace scalemix {

// Hyper-matrix-t marginal likelihood of n x q data Y under
//   Y | Sigma ~ MN(0, I_n, Sigma),  Sigma | G ~ HIW_G(b, rho I).
//
// Degrees of freedom follow the convention in which a clique C carries an
// inverse Wishart with b + |C| - 1 degrees of freedom, so the complete graph
// is the ordinary conjugate inverse Wishart and the posterior is
// HIW_G(b + n, rho I + Y'Y).
//
// All functions depend on the data only through its Gram matrix Y'Y, which
// the samplers keep up to date incrementally.

double log_multivariate_gamma(int p, double a);

// Fully normalised log f(y_C) for one clique. Throws Error(IllConditioned)
// if rho I + y_C'y_C has condition number above 1e12.
double log_hmt_clique_term(const Eigen::MatrixXd& data_block, double b, double rho);
double log_hmt_clique_term_gram(const Eigen::MatrixXd& gram_block, int n, double b, double rho);

// Sum of clique terms minus separator terms. `vertices` indexes into gram.
double log_hmt_subset_term(const Eigen::MatrixXd& gram, const std::vector<int>& vertices, int n,
                           double b, double rho);

double log_hmt_marginal(const DecomposableGraph& g, const Eigen::MatrixXd& data, double b,
                        double rho);
double log_hmt_marginal_gram(const DecomposableGraph& g, const Eigen::MatrixXd& gram, int n,
                             double b, double rho);

// log f(Y | g') - log f(Y | g) for graphs differing in a single edge,
// touching only the clique that edge opens or closes. Identical graphs give
// 0. Throws Error(IllegalMovePair) otherwise.
double log_hmt_move_ratio(const DecomposableGraph& g, const DecomposableGraph& g_new,
                          const Eigen::MatrixXd& data, double b, double rho);
double log_hmt_move_ratio_gram(const DecomposableGraph& g, const DecomposableGraph& g_new,
                               const Eigen::MatrixXd& gram, int n, double b, double rho);

// The same local ratio for toggling `e` in g, without building g'.
double log_hmt_edge_toggle_ratio(const DecomposableGraph& g, Edge e, const Eigen::MatrixXd& gram,
                                 int n, double b, double rho);

}  // namespace scalemix
