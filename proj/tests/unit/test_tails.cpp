#include <doctest.h>

#include <variant>

#include "scalemix/error.hpp"
#include "scalemix/gsm.hpp"

using namespace scalemix;

namespace {

Eigen::VectorXd draw(int n, Rng& rng, const std::function<double(Rng&)>& f) {
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x(i) = f(rng);
  return x;
}

}  // namespace

TEST_CASE("Student-t(4) is classified as polynomial-tailed") {
  Rng rng(1);
  const auto x = draw(100000, rng, [](Rng& r) {
    return std_normal(r) * std::sqrt(sample_inverse_gamma(2.0, 2.0, r));
  });
  const TailReport rep = recommend_mixing(x);
  CHECK(rep.tail_class == "polynomial");
  REQUIRE(std::holds_alternative<InverseGamma>(rep.suggestion));
  // Lambda = -2 maps to an inverse gamma shape of 2.
  const double shape = std::get<InverseGamma>(rep.suggestion).shape;
  CHECK(shape >= 1.5);
  CHECK(shape <= 2.5);
}

TEST_CASE("normal draws get a degenerate suggestion") {
  Rng rng(2);
  const auto x = draw(100000, rng, [](Rng& r) { return 3.0 + 2.0 * std_normal(r); });
  const TailReport rep = recommend_mixing(x);
  CHECK(rep.tail_class == "gaussian");
  CHECK(std::holds_alternative<Degenerate>(rep.suggestion));
  CHECK(std::abs(rep.excess_kurtosis) < 0.1);
}

TEST_CASE("Laplace draws are classified as exponential-tailed") {
  Rng rng(3);
  const auto x = draw(100000, rng, [](Rng& r) {
    return (uniform01(r) < 0.5 ? -1.0 : 1.0) * std_exponential(r);
  });
  const TailReport rep = recommend_mixing(x);
  CHECK(rep.tail_class == "exponential");
  CHECK(std::holds_alternative<Exponential>(rep.suggestion));
}

TEST_CASE("tail diagnosis errors") {
  Rng rng(4);
  try {
    recommend_mixing(draw(29, rng, [](Rng& r) { return std_normal(r); }));
    FAIL("expected TooFewSamples");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooFewSamples);
  }
  try {
    recommend_mixing(Eigen::VectorXd::Constant(100, 2.0));
    FAIL("expected ConstantColumn");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConstantColumn);
  }
}
