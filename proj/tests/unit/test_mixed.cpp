#include <doctest.h>

#include <cmath>
#include <vector>

#include <boost/math/distributions/gamma.hpp>

#include "scalemix/distributions.hpp"
#include "scalemix/error.hpp"
#include "scalemix/gsm.hpp"
#include "scalemix/linalg.hpp"
#include "scalemix/mixed.hpp"
#include "scalemix/sim.hpp"
#include "stats.hpp"

using namespace scalemix;

namespace {

Eigen::MatrixXd random_spd(int p, Rng& rng) {
  Eigen::MatrixXd a(p, p);
  for (int i = 0; i < a.size(); ++i) a(i) = std_normal(rng);
  return a * a.transpose() + 0.5 * Eigen::MatrixXd::Identity(p, p);
}

}  // namespace

TEST_CASE("centering") {
  Eigen::MatrixXd x{{0, 1, 2.5}, {1, 0, -1.0}};
  CHECK(center_discrete(x, 2, 0.0) == x);
  const Eigen::MatrixXd c = center_discrete(x, 2, 0.5);
  CHECK(c(0, 0) == -0.5);
  CHECK(c(1, 0) == 0.5);
  CHECK(c(0, 1) == 0.5);
  CHECK(c(0, 2) == 2.5);
  CHECK_THROWS_AS(center_discrete(x, 4, 0.5), Error);
}

TEST_CASE("precision decomposition round trip") {
  Rng rng(1);
  for (int t = 0; t < 50; ++t) {
    const Eigen::MatrixXd om = random_spd(6, rng);
    const PrecisionDecomp d = decompose_precision(om);
    CHECK((precision_from_decomp(d) - om).cwiseAbs().maxCoeff() < 1e-12 * om.cwiseAbs().maxCoeff());
    CHECK(d.gamma.diagonal().isOnes());
    CHECK(d.gamma.cwiseAbs().maxCoeff() <= 1.0);
    CHECK(is_positive_definite(d.gamma));
  }
  PrecisionDecomp id;
  id.theta = Eigen::Vector3d(1.0, 2.0, 3.0);
  id.gamma = Eigen::Matrix3d::Identity();
  id.inclusion = empty_adjacency(3);
  CHECK(precision_from_decomp(id) == Eigen::Vector3d(1.0, 4.0, 9.0).asDiagonal().toDenseMatrix());
  CHECK_THROWS_AS(decompose_precision(-Eigen::MatrixXd::Identity(2, 2)), Error);
}

TEST_CASE("inverted inverse gamma is gamma with rate beta") {
  for (double alpha : {0.5, 2.0}) {
    for (double beta : {0.5, 3.0}) {
      const boost::math::gamma_distribution<double> g(alpha, 1.0 / beta);
      for (double k : {0.05, 0.7, 2.0, 9.0}) {
        const double via_ig = log_mixing_density(InverseGamma{alpha, beta}, 1.0 / k) - 2.0 * std::log(k);
        CHECK(std::abs(via_ig - std::log(boost::math::pdf(g, k))) < 1e-12);
      }
    }
  }
}

TEST_CASE("omega update for a single discrete column matches quadrature") {
  Rng rng(2);
  const int n = 200;
  Eigen::MatrixXd x(n, 1);
  for (int i = 0; i < n; ++i) x(i, 0) = std::round(0.8 * std_normal(rng));
  const double s = x.squaredNorm();

  // Omega = 1 / omega, so log p(omega | x) = -(n/2) log omega - s / (2 omega) + log PG(omega).
  auto log_post = [&](double w) { return -0.5 * n * std::log(w) - 0.5 * s / w + log_pg_density(1.0, w); };
  double peak = -1e300;
  for (double w = 0.05; w < 5; w *= 1.01) peak = std::max(peak, log_post(w));
  const double z = stats::integrate([&](double w) { return std::exp(log_post(w) - peak); }, 0.05, 5.0);
  const double mean = stats::integrate([&](double w) { return w * std::exp(log_post(w) - peak); }, 0.05, 5.0) / z;

  MixedConfig cfg;
  MixedSampler sampler(x, 1, cfg);
  Rng chain(3);
  for (int i = 0; i < 2000; ++i) sampler.update_omega(chain, true);
  std::vector<double> trace;
  for (int i = 0; i < 100000; ++i) {
    sampler.update_omega(chain, false);
    trace.push_back(sampler.state().omega(0));
  }
  CHECK(std::abs(stats::moments(trace).mean - mean) < 3.0 * stats::batch_means_se(trace, 100));
  const double rate = sampler.acceptance_rates().at("omega");
  CHECK(rate > 0.2);
  CHECK(rate < 0.6);
}

TEST_CASE("updates with nothing to do are no-ops") {
  Rng rng(4);
  Eigen::MatrixXd x(20, 2);
  for (int i = 0; i < x.size(); ++i) x(i) = std_normal(rng);
  MixedSampler cont(x, 0, MixedConfig{});
  const MixedState before = cont.state();
  cont.update_omega(rng, false);
  CHECK(cont.state().loglik == before.loglik);
  CHECK(cont.state().omega.size() == 0);

  MixedSampler disc(x.array().round().matrix(), 2, MixedConfig{});
  const Eigen::VectorXd theta = disc.state().decomp.theta;
  disc.update_theta(rng, false);
  CHECK(disc.state().decomp.theta == theta);
}

TEST_CASE("state invariants under long runs") {
  Rng rng(5);
  Eigen::MatrixXd om = Eigen::MatrixXd::Identity(5, 5) * 2.0;
  om(0, 3) = om(3, 0) = 0.8;
  om(1, 2) = om(2, 1) = -0.7;
  const MixedSimulation sim = simulate_mixed_data(150, om, 2, 1, rng);
  MixedSampler s(sim.data.values, 2, MixedConfig{});
  for (int sweep = 0; sweep < 3000; ++sweep) {
    s.update_omega(rng, sweep < 1000);
    s.update_theta(rng, sweep < 1000);
    s.update_gamma(rng, sweep < 1000);
    const auto& d = s.state().decomp;
    for (int j = 0; j < 2; ++j) CHECK(d.theta(j) == doctest::Approx(1.0 / std::sqrt(s.state().omega(j))).epsilon(1e-14));
    if (sweep % 100 == 0) {
      const Eigen::MatrixXd prec = s.precision();
      CHECK(is_positive_definite(prec));
      for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
          if (i != j && !d.inclusion[i].contains(j)) {
            CHECK(d.gamma(i, j) == 0.0);
            CHECK(prec(i, j) == 0.0);
          }
      const double fresh = s.full_loglik();
      CHECK(std::abs(fresh - s.state().loglik) < 1e-8 * std::max(1.0, std::abs(fresh)));
    }
  }
}

TEST_CASE("three-variable toy recovers the strong pair") {
  Rng rng(6);
  Eigen::MatrixXd om = Eigen::MatrixXd::Identity(3, 3);
  om(0, 1) = om(1, 0) = 0.6;
  MixedData data;
  data.values = sample_gaussian_rows(100, om, rng);
  data.num_discrete = 0;
  MixedConfig cfg;
  cfg.iters = 100000;
  cfg.burnin = 5000;
  cfg.seed = 7;
  const PosteriorSummary s = run_mixed_chain(data, cfg);
  CHECK(s.edge_prob(0, 1) > 0.9);
  CHECK(s.edge_prob(0, 2) < 0.5);
  CHECK(s.edge_prob(1, 2) < 0.5);
  CHECK(s.sign_class(0, 1) == 1);
}

TEST_CASE("planted dependence in each block is recovered") {
  // Discrete-discrete (0,1), discrete-continuous (1,2), continuous-continuous (3,4).
  // Unit diagonal keeps the rounded columns informative.
  Rng rng(8);
  Eigen::MatrixXd om = Eigen::MatrixXd::Identity(5, 5);
  om(0, 1) = om(1, 0) = -0.45;
  om(1, 2) = om(2, 1) = 0.45;
  om(3, 4) = om(4, 3) = -0.45;
  MixedData data;
  data.values = sample_gaussian_rows(500, om, rng);
  data.values.leftCols(2) = data.values.leftCols(2).array().round().matrix();
  data.num_discrete = 2;
  data.centering = 0.0;
  MixedConfig cfg;
  cfg.iters = 20000;
  cfg.burnin = 5000;
  cfg.seed = 9;
  const PosteriorSummary s = run_mixed_chain(data, cfg);
  CHECK(s.edge_prob(0, 1) > 0.9);
  CHECK(s.edge_prob(1, 2) > 0.9);
  CHECK(s.edge_prob(3, 4) > 0.9);
  CHECK(s.sign_class(0, 1) == -1);
  CHECK(s.sign_class(1, 2) == 1);
  CHECK(s.sign_class(3, 4) == -1);
  CHECK(s.edge_prob(0, 4) < 0.5);
  CHECK(s.edge_prob(2, 3) < 0.5);
}

TEST_CASE("node conditionals of the joint Gaussian are linear regressions") {
  Rng rng(10);
  Eigen::MatrixXd om(4, 4);
  om << 2.0, 0.5, -0.4, 0.0,  //
      0.5, 1.5, 0.0, 0.3,     //
      -0.4, 0.0, 1.8, -0.6,   //
      0.0, 0.3, -0.6, 2.2;
  const int n = 200000;
  const Eigen::MatrixXd x = sample_gaussian_rows(n, om, rng);
  for (int g = 0; g < 4; ++g) {
    std::vector<int> rest;
    for (int j = 0; j < 4; ++j)
      if (j != g) rest.push_back(j);
    const Eigen::MatrixXd xr = x(Eigen::all, rest);
    const Eigen::MatrixXd xtx = xr.transpose() * xr;
    const Eigen::VectorXd coef = xtx.ldlt().solve(xr.transpose() * x.col(g));
    const double sigma2 = (x.col(g) - xr * coef).squaredNorm() / (n - 3);
    const Eigen::VectorXd se = (sigma2 * inverse_spd(xtx).diagonal()).cwiseSqrt();
    for (int k = 0; k < 3; ++k) {
      const double expect = -om(g, rest[k]) / om(g, g);
      CHECK(std::abs(coef(k) - expect) < 3.0 * se(k));
    }
    CHECK(sigma2 == doctest::Approx(1.0 / om(g, g)).epsilon(0.02));
  }
}

TEST_CASE("continuous-only fit agrees with the graph model on strong signals") {
  Rng rng(11);
  Eigen::MatrixXd om = Eigen::MatrixXd::Identity(5, 5);
  om(0, 1) = om(1, 0) = 0.45;
  om(1, 2) = om(2, 1) = -0.45;
  om(3, 4) = om(4, 3) = 0.45;
  const Eigen::MatrixXd x = sample_gaussian_rows(400, om, rng);
  MixedData data;
  data.values = x;
  MixedConfig mc;
  mc.iters = 6000;
  mc.burnin = 2000;
  mc.seed = 3;
  const PosteriorSummary a = run_mixed_chain(data, mc);
  GsmConfig gc;
  gc.margins.assign(5, MarginSpec{});
  gc.edge_weights = EdgePriorWeights::constant(5, 0.5);
  gc.iters = 6000;
  gc.burnin = 2000;
  gc.seed = 3;
  const PosteriorSummary b = run_chain(x, gc);
  // The uniform slab penalises weak edges less than the hyper-inverse
  // Wishart prior, so only the planted edges are compared exactly.
  const Eigen::MatrixXi truth = sign_matrix(om);
  double zero_a = 0, zero_b = 0;
  int zeros = 0;
  for (int i = 0; i < 5; ++i)
    for (int j = i + 1; j < 5; ++j) {
      if (truth(i, j) != 0) {
        CHECK(a.sign_class(i, j) == truth(i, j));
        CHECK(b.sign_class(i, j) == truth(i, j));
      } else {
        zero_a += a.edge_prob(i, j);
        zero_b += b.edge_prob(i, j);
        ++zeros;
      }
    }
  CHECK(zero_a / zeros < 0.3);
  CHECK(zero_b / zeros < 0.3);
}

TEST_CASE("run_mixed_chain") {
  Rng rng(12);
  Eigen::MatrixXd om = Eigen::MatrixXd::Identity(4, 4) * 2.0;
  om(0, 2) = om(2, 0) = 0.7;
  const MixedSimulation sim = simulate_mixed_data(80, om, 2, 1, rng);
  MixedConfig cfg;
  cfg.iters = 11;
  cfg.burnin = 10;
  const PosteriorSummary one = run_mixed_chain(sim.data, cfg);
  CHECK(one.num_samples == 1);
  CHECK(one.loglik_traces.at(0).size() == 11);

  cfg.iters = 500;
  cfg.burnin = 100;
  const PosteriorSummary a = run_mixed_chain(sim.data, cfg);
  const PosteriorSummary b = run_mixed_chain(sim.data, cfg);
  CHECK(a.edge_prob == b.edge_prob);
  CHECK(a.mean_precision == b.mean_precision);
  CHECK(a.loglik_traces == b.loglik_traces);
  CHECK(a.scale_means.size() == 2);

  MixedConfig bad;
  bad.alpha = 0.0;
  CHECK_THROWS_AS(run_mixed_chain(sim.data, bad), Error);
  bad = MixedConfig{};
  bad.slab_prob = 1.0;
  CHECK_THROWS_AS(run_mixed_chain(sim.data, bad), Error);
}
