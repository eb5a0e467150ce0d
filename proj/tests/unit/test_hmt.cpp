#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "oracles.hpp"
#include "scalemix/error.hpp"
#include "scalemix/hiw.hpp"
#include "scalemix/hmt.hpp"
#include "stats.hpp"

using namespace scalemix;

namespace {

Eigen::MatrixXd random_matrix(int rows, int cols, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < m.size(); ++i) m(i) = std_normal(rng);
  return m;
}

DecomposableGraph random_chordal(int q, int steps, Rng& rng) {
  DecomposableGraph g(q);
  for (int s = 0; s < steps; ++s) g = propose_edge_move(g, rng).graph;
  return g;
}

}  // namespace

TEST_CASE("multivariate gamma") {
  CHECK(log_multivariate_gamma(1, 2.5) == doctest::Approx(std::lgamma(2.5)));
  CHECK(log_multivariate_gamma(3, 4.2) == doctest::Approx(oracle::log_multigamma(3, 4.2)));
}

TEST_CASE("single-vertex clique with zero data is the normalising constant") {
  const double b = 4.0, rho = 0.7;
  const int n = 3;
  const double expect = -1.5 * std::log(M_PI) + std::lgamma((b + n) / 2) - std::lgamma(b / 2) +
                        (b / 2) * std::log(rho) - ((b + n) / 2) * std::log(rho);
  CHECK(log_hmt_clique_term(Eigen::MatrixXd::Zero(n, 1), b, rho) ==
        doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("complete graph equals the matrix-t density") {
  Rng rng(1);
  for (int t = 0; t < 30; ++t) {
    const int n = 1 + static_cast<int>(uniform_index(6, rng));
    const int q = 1 + static_cast<int>(uniform_index(5, rng));
    const Eigen::MatrixXd y = random_matrix(n, q, rng);
    const double b = 0.5 + 6 * uniform01(rng), rho = 0.1 + 2 * uniform01(rng);
    const double lib = log_hmt_marginal(DecomposableGraph::complete(q), y, b, rho);
    const double ref = oracle::matrix_t_log_density(y, b, rho * Eigen::MatrixXd::Identity(q, q));
    CHECK(lib == doctest::Approx(ref).epsilon(1e-12));
    CHECK(std::abs(lib - ref) < 1e-8);
  }
}

TEST_CASE("clique terms are normalised densities and their ratio is a conditional density") {
  const double b = 3.0, rho = 0.8;
  auto term = [&](double y1, double y2) {
    Eigen::MatrixXd y(1, 2);
    y << y1, y2;
    return std::exp(log_hmt_clique_term(y, b, rho));
  };
  auto single = [&](double y2) {
    return std::exp(log_hmt_clique_term(Eigen::MatrixXd::Constant(1, 1, y2), b, rho));
  };
  // Beyond |y| = 1e4 the clique block is too ill-conditioned to evaluate and
  // the remaining mass is below the tolerance.
  const double inf = 1e4;
  // f(y_C) / f(y_S) integrates to one over y_1 for several y_2.
  for (double y2 : {-2.0, 0.0, 0.3, 1.7}) {
    const double total = stats::integrate([&](double y1) { return term(y1, y2) / single(y2); }, -inf, inf);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
  }
  // The pair density integrates to one over the plane, and marginalises to
  // the single-vertex density.
  const double plane = stats::integrate(
      [&](double y2) { return stats::integrate([&](double y1) { return term(y1, y2); }, -inf, inf); },
      -inf, inf);
  CHECK(plane == doctest::Approx(1.0).epsilon(1e-7));
  const double marg = stats::integrate([&](double y1) { return term(y1, 0.9); }, -inf, inf);
  CHECK(marg == doctest::Approx(single(0.9)).epsilon(1e-8));
}

TEST_CASE("empty graph factorises into univariate terms") {
  Rng rng(2);
  const Eigen::MatrixXd y = random_matrix(7, 4, rng);
  double sum = 0.0;
  for (int j = 0; j < 4; ++j) sum += log_hmt_clique_term(y.col(j), 5.0, 0.5);
  CHECK(log_hmt_marginal(DecomposableGraph(4), y, 5.0, 0.5) == doctest::Approx(sum).epsilon(1e-13));
}

TEST_CASE("single-edge difference depends only on the two columns") {
  Rng rng(3);
  Eigen::MatrixXd y = random_matrix(6, 4, rng);
  const DecomposableGraph g0(4);
  const auto g1 = DecomposableGraph::from_edges(4, {{0, 1}});
  const double d1 = log_hmt_marginal(g1, y, 3.0, 1.0) - log_hmt_marginal(g0, y, 3.0, 1.0);
  y.col(2) = random_matrix(6, 1, rng);
  y.col(3) *= 7.0;
  const double d2 = log_hmt_marginal(g1, y, 3.0, 1.0) - log_hmt_marginal(g0, y, 3.0, 1.0);
  CHECK(d1 == doctest::Approx(d2).epsilon(1e-12));
}

TEST_CASE("path graph marginal against prior-predictive Monte Carlo") {
  // f(Y | G) = E[ N(Y | 0, Sigma) ] with Sigma ~ HIW_G(b, rho I).
  Rng rng(4);
  const auto g = DecomposableGraph::from_edges(3, {{0, 1}, {1, 2}});
  Eigen::MatrixXd y(2, 3);
  y << 0.3, -0.5, 0.8, -0.2, 0.4, 0.1;
  const double b = 4.0, rho = 1.0;
  const HiwParams params{b, rho * Eigen::MatrixXd::Identity(3, 3)};
  const int draws = 1000000;
  std::vector<double> lik(draws);
  for (int s = 0; s < draws; ++s)
    lik[s] = std::exp(oracle::gaussian_rows_log_density(y, sample_hiw(g, params, rng).sigma));
  const auto m = stats::moments(lik);
  const double exact = std::exp(log_hmt_marginal(g, y, b, rho));
  CHECK(std::abs(m.mean - exact) < 3.0 * m.se_mean);
}

TEST_CASE("local move ratio equals the difference of full evaluations") {
  Rng rng(5);
  for (int t = 0; t < 200; ++t) {
    const int q = 3 + static_cast<int>(uniform_index(7, rng));
    const int n = 1 + static_cast<int>(uniform_index(10, rng));
    const Eigen::MatrixXd y = random_matrix(n, q, rng);
    const Eigen::MatrixXd gram = y.transpose() * y;
    const DecomposableGraph g = random_chordal(q, 3 * q, rng);
    const EdgeProposal p = propose_edge_move(g, rng);
    const double b = 1.0 + 5 * uniform01(rng), rho = 0.2 + uniform01(rng);
    const double full = log_hmt_marginal(p.graph, y, b, rho) - log_hmt_marginal(g, y, b, rho);
    const double fast = log_hmt_move_ratio(g, p.graph, y, b, rho);
    CHECK(std::abs(fast - full) < 1e-10);
    CHECK(log_hmt_move_ratio_gram(g, p.graph, gram, n, b, rho) == doctest::Approx(fast).epsilon(1e-12));
    CHECK(log_hmt_edge_toggle_ratio(g, p.move.edge, gram, n, b, rho) ==
          doctest::Approx(fast).epsilon(1e-12));
    CHECK(log_hmt_move_ratio(p.graph, g, y, b, rho) == doctest::Approx(-fast).epsilon(1e-12));
    CHECK(log_hmt_move_ratio(g, g, y, b, rho) == 0.0);
  }
}

TEST_CASE("HMT error paths") {
  Rng rng(6);
  const Eigen::MatrixXd y = random_matrix(4, 4, rng);
  const DecomposableGraph g0(4);
  const auto g2 = DecomposableGraph::from_edges(4, {{0, 1}, {2, 3}});
  try {
    log_hmt_move_ratio(g0, g2, y, 3.0, 1.0);
    FAIL("expected IllegalMovePair");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IllegalMovePair);
  }
  CHECK_THROWS_AS(log_hmt_marginal(g0, y, 0.0, 1.0), Error);
  CHECK_THROWS_AS(log_hmt_marginal(g0, y, 3.0, -1.0), Error);

  // Two collinear, very large columns with a tiny rho.
  Eigen::MatrixXd bad(5, 2);
  bad.col(0) = 1e4 * random_matrix(5, 1, rng);
  bad.col(1) = bad.col(0);
  try {
    log_hmt_clique_term(bad, 3.0, 1e-6);
    FAIL("expected IllConditioned");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IllConditioned);
  }
}
