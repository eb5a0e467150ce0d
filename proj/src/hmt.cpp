#include "scalemix/hmt.hpp"

#include <cmath>

#include "scalemix/error.hpp"

namespace scalemix {

namespace {

constexpr double kLogPi = 1.14472988584940017414;
constexpr double kMaxCondition = 1e12;

double log_det_regularized(const Eigen::MatrixXd& gram_block, double rho) {
  const Eigen::Index p = gram_block.rows();
  Eigen::MatrixXd m = gram_block;
  m.diagonal().array() += rho;
  // Eigenvalues are bounded below by rho and above by the trace, so the
  // eigendecomposition is only needed when that cheap bound is inconclusive.
  if (m.trace() / rho > kMaxCondition) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
    const auto& ev = eig.eigenvalues();
    if (!(ev(0) > 0.0) || ev(p - 1) / ev(0) > kMaxCondition)
      throw Error(ErrorCode::IllConditioned,
                  "clique block rho*I + Y'Y has condition number above 1e12");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::IllConditioned, "clique block rho*I + Y'Y is not positive definite");
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

void check_hyper(double b, double rho) {
  if (!(b > 0.0) || !std::isfinite(b)) throw Error(ErrorCode::InvalidParams, "b must be positive");
  if (!(rho > 0.0) || !std::isfinite(rho))
    throw Error(ErrorCode::InvalidParams, "rho must be positive");
}

// Toggled edge between two graphs, or nullopt-like {-1,-1} when identical.
Edge single_edge_difference(const DecomposableGraph& g, const DecomposableGraph& h) {
  if (g.num_vertices() != h.num_vertices())
    throw Error(ErrorCode::IllegalMovePair, "graphs have different vertex counts");
  Edge found{-1, -1};
  int count = 0;
  for (int u = 0; u < g.num_vertices(); ++u) {
    const VertexSet diff = (g.neighbors(u) - h.neighbors(u)) | (h.neighbors(u) - g.neighbors(u));
    diff.for_each([&](int v) {
      if (v > u) {
        found = Edge(u, v);
        ++count;
      }
    });
  }
  if (count > 1) throw Error(ErrorCode::IllegalMovePair, "graphs differ in more than one edge");
  return found;
}

}  // namespace

double log_multivariate_gamma(int p, double a) {
  double out = 0.25 * p * (p - 1) * kLogPi;
  for (int j = 0; j < p; ++j) out += std::lgamma(a - 0.5 * j);
  return out;
}

double log_hmt_clique_term_gram(const Eigen::MatrixXd& gram_block, int n, double b, double rho) {
  check_hyper(b, rho);
  const int p = static_cast<int>(gram_block.rows());
  if (p == 0) return 0.0;
  const double prior_df = 0.5 * (b + p - 1.0);
  const double post_df = 0.5 * (b + n + p - 1.0);
  return -0.5 * n * p * kLogPi + log_multivariate_gamma(p, post_df) -
         log_multivariate_gamma(p, prior_df) + prior_df * p * std::log(rho) -
         post_df * log_det_regularized(gram_block, rho);
}

double log_hmt_clique_term(const Eigen::MatrixXd& data_block, double b, double rho) {
  const Eigen::MatrixXd gram = data_block.transpose() * data_block;
  return log_hmt_clique_term_gram(gram, static_cast<int>(data_block.rows()), b, rho);
}

double log_hmt_subset_term(const Eigen::MatrixXd& gram, const std::vector<int>& vertices, int n,
                           double b, double rho) {
  if (vertices.empty()) return 0.0;
  return log_hmt_clique_term_gram(gram(vertices, vertices), n, b, rho);
}

double log_hmt_marginal_gram(const DecomposableGraph& g, const Eigen::MatrixXd& gram, int n,
                             double b, double rho) {
  if (gram.rows() != g.num_vertices() || gram.cols() != g.num_vertices())
    throw Error(ErrorCode::DimensionMismatch, "Gram matrix does not match the graph");
  double total = 0.0;
  for (const auto& c : g.cliques()) total += log_hmt_subset_term(gram, c.to_vector(), n, b, rho);
  for (const auto& s : g.separators()) total -= log_hmt_subset_term(gram, s.to_vector(), n, b, rho);
  return total;
}

double log_hmt_marginal(const DecomposableGraph& g, const Eigen::MatrixXd& data, double b,
                        double rho) {
  const Eigen::MatrixXd gram = data.transpose() * data;
  return log_hmt_marginal_gram(g, gram, static_cast<int>(data.rows()), b, rho);
}

double log_hmt_edge_toggle_ratio(const DecomposableGraph& g, Edge e, const Eigen::MatrixXd& gram,
                                 int n, double b, double rho) {
  // Adding uv merges the cliques S+u and S+v into S+u+v, where S is the
  // common neighbourhood; every other factor is unchanged.
  const VertexSet sep = g.neighbors(e.u) & g.neighbors(e.v);
  std::vector<int> s = sep.to_vector();
  std::vector<int> su = s, sv = s, suv = s;
  su.push_back(e.u);
  sv.push_back(e.v);
  suv.push_back(e.u);
  suv.push_back(e.v);
  const double delta = log_hmt_subset_term(gram, suv, n, b, rho) +
                       log_hmt_subset_term(gram, s, n, b, rho) -
                       log_hmt_subset_term(gram, su, n, b, rho) -
                       log_hmt_subset_term(gram, sv, n, b, rho);
  return g.has_edge(e.u, e.v) ? -delta : delta;
}

double log_hmt_move_ratio_gram(const DecomposableGraph& g, const DecomposableGraph& g_new,
                               const Eigen::MatrixXd& gram, int n, double b, double rho) {
  const Edge e = single_edge_difference(g, g_new);
  if (e.u < 0) return 0.0;
  return log_hmt_edge_toggle_ratio(g, e, gram, n, b, rho);
}

double log_hmt_move_ratio(const DecomposableGraph& g, const DecomposableGraph& g_new,
                          const Eigen::MatrixXd& data, double b, double rho) {
  const Eigen::MatrixXd gram = data.transpose() * data;
  return log_hmt_move_ratio_gram(g, g_new, gram, static_cast<int>(data.rows()), b, rho);
}

}  // namespace scalemix
