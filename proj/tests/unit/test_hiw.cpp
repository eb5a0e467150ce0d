#include <doctest.h>

#include <cmath>

#include "scalemix/error.hpp"
#include "scalemix/hiw.hpp"
#include "scalemix/linalg.hpp"

using namespace scalemix;

namespace {

Eigen::MatrixXd random_spd(int p, Rng& rng) {
  Eigen::MatrixXd a(p, p);
  for (int i = 0; i < a.size(); ++i) a(i) = std_normal(rng);
  return a * a.transpose() / p + Eigen::MatrixXd::Identity(p, p);
}

// Per-entry mean and standard error over draws.
struct MatrixMoments {
  Eigen::MatrixXd sum, sumsq;
  int n = 0;
  void add(const Eigen::MatrixXd& m) {
    if (n == 0) {
      sum = Eigen::MatrixXd::Zero(m.rows(), m.cols());
      sumsq = sum;
    }
    sum += m;
    sumsq += m.cwiseProduct(m);
    ++n;
  }
  Eigen::MatrixXd mean() const { return sum / n; }
  Eigen::MatrixXd se() const {
    const Eigen::MatrixXd mu = mean();
    return ((sumsq / n - mu.cwiseProduct(mu)) / (n - 1)).cwiseSqrt();
  }
};

}  // namespace

TEST_CASE("inverse Wishart mean") {
  Rng rng(1);
  const Eigen::MatrixXd scale = random_spd(3, rng);
  const double df = 9.0;
  MatrixMoments mm;
  for (int s = 0; s < 100000; ++s) mm.add(sample_inverse_wishart(df, scale, rng));
  const Eigen::MatrixXd expect = scale / (df - 3 - 1);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(std::abs(mm.mean()(i, j) - expect(i, j)) < 3.5 * mm.se()(i, j));
}

TEST_CASE("complete-graph HIW is the inverse Wishart with b + p - 1 degrees") {
  Rng rng(2);
  const Eigen::MatrixXd d = random_spd(4, rng);
  const double b = 6.0;
  MatrixMoments mm;
  for (int s = 0; s < 100000; ++s) mm.add(sample_hiw(DecomposableGraph::complete(4), {b, d}, rng).sigma);
  const Eigen::MatrixXd expect = d / (b - 2);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(std::abs(mm.mean()(i, j) - expect(i, j)) < 3.5 * mm.se()(i, j));
}

TEST_CASE("clique marginals of an HIW draw follow their inverse Wishart laws") {
  Rng rng(3);
  const Eigen::MatrixXd d = random_spd(5, rng);
  const auto g = DecomposableGraph::from_edges(5, {{0, 1}, {1, 2}, {0, 2}, {2, 3}, {3, 4}});
  const double b = 5.0;
  MatrixMoments mm;
  for (int s = 0; s < 100000; ++s) mm.add(sample_hiw(g, {b, d}, rng).sigma);
  for (const auto& c : g.cliques()) {
    const auto idx = c.to_vector();
    const Eigen::MatrixXd expect = d(idx, idx) / (b - 2);
    const Eigen::MatrixXd got = mm.mean()(idx, idx), se = mm.se()(idx, idx);
    for (int i = 0; i < got.rows(); ++i)
      for (int j = 0; j < got.cols(); ++j) CHECK(std::abs(got(i, j) - expect(i, j)) < 3.5 * se(i, j));
  }
}

TEST_CASE("structural zeros are exact") {
  Rng rng(4);
  SUBCASE("empty graph") {
    const auto draw = sample_hiw(DecomposableGraph(4), {3.0, Eigen::MatrixXd::Identity(4, 4)}, rng);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        if (i != j) CHECK(draw.precision(i, j) == 0.0);
  }
  SUBCASE("two cliques") {
    const auto g = DecomposableGraph::from_edges(3, {{0, 1}, {1, 2}});
    for (int s = 0; s < 1000; ++s) {
      const auto draw = sample_hiw(g, {3.0, random_spd(3, rng)}, rng);
      CHECK(draw.precision(0, 2) == 0.0);
      CHECK(draw.precision(2, 0) == 0.0);
    }
  }
  SUBCASE("random graphs") {
    for (int t = 0; t < 100; ++t) {
      DecomposableGraph g(9);
      for (int s = 0; s < 30; ++s) g = propose_edge_move(g, rng).graph;
      const auto draw = sample_hiw(g, {4.0, random_spd(9, rng)}, rng);
      for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 9; ++j)
          if (i != j && !g.has_edge(i, j)) CHECK(draw.precision(i, j) == 0.0);
      CHECK(is_positive_definite(draw.sigma));
      // Precision is the inverse of Sigma.
      const Eigen::MatrixXd id = draw.precision * draw.sigma;
      CHECK((id - Eigen::MatrixXd::Identity(9, 9)).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
}

TEST_CASE("HIW error paths") {
  Rng rng(5);
  Eigen::MatrixXd not_pd = Eigen::MatrixXd::Identity(3, 3);
  not_pd(0, 0) = -1.0;
  try {
    sample_hiw(DecomposableGraph(3), {3.0, not_pd}, rng);
    FAIL("expected NonPdScale");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonPdScale);
  }
  try {
    sample_hiw(DecomposableGraph(3), {0.0, Eigen::MatrixXd::Identity(3, 3)}, rng);
    FAIL("expected InvalidParams");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidParams);
  }
}
