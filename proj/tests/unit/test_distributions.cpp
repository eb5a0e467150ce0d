#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "scalemix/distributions.hpp"
#include "scalemix/error.hpp"
#include "stats.hpp"

using namespace scalemix;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::IoError;
}

std::vector<double> draws(int n, const std::function<double()>& f) {
  std::vector<double> x(n);
  for (double& v : x) v = f();
  return x;
}

}  // namespace

TEST_CASE("closed-form mixing densities") {
  CHECK(log_mixing_density(Exponential{2.5}, 0.7) == doctest::Approx(std::log(2.5) - 2.5 * 0.7));
  const double ig = std::log(1000.0 / 2.0) - 4.0 * std::log(5.0) - 2.0;
  CHECK(log_mixing_density(InverseGamma{3.0, 10.0}, 5.0) == doctest::Approx(ig).epsilon(1e-14));

  // GIG with lambda=1 and chi -> 0 approaches Exponential(psi/2).
  CHECK(log_mixing_density(Gig{1.0, 1e-12, 3.0}, 0.8) ==
        doctest::Approx(log_mixing_density(Exponential{1.5}, 0.8)).epsilon(1e-6));
  // lambda=-a, psi -> 0: InverseGamma(a, chi/2).
  CHECK(log_mixing_density(Gig{-2.0, 6.0, 1e-12}, 1.3) ==
        doctest::Approx(log_mixing_density(InverseGamma{2.0, 3.0}, 1.3)).epsilon(1e-6));
}

TEST_CASE("densities integrate to one") {
  for (const MixingFamily& f :
       {MixingFamily{Exponential{0.3}}, MixingFamily{InverseGamma{2.0, 7.0}},
        MixingFamily{Gig{-0.5, 2.0, 1.0}}, MixingFamily{Gig{0.4, 0.2, 3.0}},
        MixingFamily{Gig{3.0, 5.0, 0.5}}}) {
    const double total =
        stats::integrate_positive([&](double x) { return std::exp(log_mixing_density(f, x)); });
    CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
  }
  // The PG density has an essential singularity at 0; integrate piecewise.
  for (double b : {1.0, 2.0}) {
    const auto f = [&](double x) { return std::exp(log_pg_density(b, x)); };
    const double total = stats::integrate(f, 1e-6, 1.0) + stats::integrate(f, 1.0, 8.0) +
                         stats::integrate(f, 8.0, 60.0 + 4 * b);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-7));
  }
  // Non-integer b is only available where the series keeps its precision.
  CHECK(std::isfinite(log_pg_density(3.5, 1.0)));
  CHECK_THROWS_AS(log_pg_density(3.5, 10.0), Error);
}

TEST_CASE("PG density identities") {
  // E[exp(-t^2 X / 2)] = cosh(t/2)^-b for X ~ PG(b, 0).
  for (double b : {1.0, 2.0}) {
    for (double t : {0.5, 2.0}) {
      const auto f = [&](double x) { return std::exp(log_pg_density(b, x) - 0.5 * t * t * x); };
      const double lhs = stats::integrate(f, 1e-6, 1.0) + stats::integrate(f, 1.0, 60.0);
      CHECK(lhs == doctest::Approx(std::pow(std::cosh(t / 2.0), -b)).epsilon(1e-7));
    }
  }
  // Moments from the density match b/4 and b/24.
  const auto mean = stats::integrate([](double x) { return x * std::exp(log_pg_density(1.0, x)); },
                                     1e-6, 40.0);
  CHECK(mean == doctest::Approx(0.25).epsilon(1e-7));
  // Convolution branch agrees with the series at moderate x.
  CHECK(std::isfinite(log_pg_density(2.0, 3.0)));
}

TEST_CASE("PG sampler moments") {
  Rng rng(1);
  for (int b : {1, 4}) {
    const auto m = stats::moments(draws(200000, [&] { return sample_pg(b, rng); }));
    CHECK(std::abs(m.mean - b / 4.0) < 3.5 * m.se_mean);
    CHECK(std::abs(m.var - b / 24.0) < 3.5 * m.se_var);
  }
  CHECK(code_of([&] { sample_pg(0, rng); }) == ErrorCode::InvalidParams);
}

TEST_CASE("PG sampler matches its density") {
  Rng rng(2);
  const auto x = draws(4000, [&] { return sample_pg1(rng); });
  const auto cdf = [](double t) {
    return t <= 0 ? 0.0 : stats::integrate([](double u) { return std::exp(log_pg_density(1.0, u)); },
                                           1e-6, t);
  };
  CHECK(stats::ks_test(x, cdf).p_value > 0.01);
}

TEST_CASE("GIG sampler") {
  Rng rng(3);
  for (const auto& p : {Gig{-0.5, 2.0, 1.0}, Gig{0.2, 0.05, 0.1}, Gig{0.5, 0.8, 0.9},
                        Gig{4.0, 3.0, 2.0}, Gig{-3.0, 1.0, 6.0}}) {
    const double w = std::sqrt(p.chi * p.psi);
    const double bessel = std::sqrt(p.chi / p.psi) * boost::math::cyl_bessel_k(p.lambda + 1, w) /
                          boost::math::cyl_bessel_k(p.lambda, w);
    CHECK(gig_mean(p.lambda, p.chi, p.psi) == doctest::Approx(bessel).epsilon(1e-10));
    const double quad = stats::integrate_positive(
        [&](double x) { return x * std::exp(log_mixing_density(p, x)); });
    CHECK(quad == doctest::Approx(bessel).epsilon(1e-6));
    const auto m =
        stats::moments(draws(100000, [&] { return sample_gig(p.lambda, p.chi, p.psi, rng); }));
    CHECK(std::abs(m.mean - bessel) < 3.5 * m.se_mean);
  }
  // Limits dispatch to gamma and inverse gamma.
  const auto g = stats::moments(draws(100000, [&] { return sample_gig(2.0, 0.0, 1.0, rng); }));
  CHECK(std::abs(g.mean - 4.0) < 3.5 * g.se_mean);
  CHECK(code_of([&] { sample_gig(0.5, 1.0, 0.0, rng); }) == ErrorCode::InvalidParams);
  CHECK(code_of([&] { sample_gig(-0.5, 0.0, 1.0, rng); }) == ErrorCode::InvalidParams);
}

TEST_CASE("inverse gamma and exponential samplers") {
  Rng rng(4);
  const auto ig = stats::moments(draws(100000, [&] { return sample_mixing(InverseGamma{4.0, 6.0}, rng); }));
  CHECK(std::abs(ig.mean - 2.0) < 3.5 * ig.se_mean);
  const auto ex = stats::moments(draws(100000, [&] { return sample_mixing(Exponential{0.1}, rng); }));
  CHECK(std::abs(ex.mean - 10.0) < 3.5 * ex.se_mean);
  CHECK(sample_mixing(Degenerate{}, rng) == 1.0);
}

TEST_CASE("parameter validation") {
  CHECK(code_of([] { validate(Exponential{0.0}); }) == ErrorCode::InvalidParams);
  CHECK(code_of([] { validate(InverseGamma{-1.0, 1.0}); }) == ErrorCode::InvalidParams);
  CHECK(code_of([] { validate(Gig{0.0, 0.0, 1.0}); }) == ErrorCode::InvalidParams);
  CHECK(code_of([] { validate(PolyaGamma{0.0}); }) == ErrorCode::InvalidParams);
  CHECK_NOTHROW(validate(Gig{1.0, 0.0, 1.0}));
  CHECK(code_of([] { log_mixing_density(Exponential{1.0}, 0.0); }) == ErrorCode::NonPositiveInput);
  CHECK(code_of([] { log_mixing_density(Degenerate{}, 1.0); }) == ErrorCode::InvalidParams);
  CHECK(code_of([] { gig_mean(1.0, 0.0, 1.0); }) == ErrorCode::InvalidParams);
  CHECK(is_degenerate(Degenerate{}));
  CHECK_FALSE(is_degenerate(Exponential{1.0}));
  CHECK(describe(InverseGamma{2.0, 7.0}).find("InverseGamma") != std::string::npos);
}
