#include "scalemix/distributions.hpp"

#include <cmath>
#include <sstream>

#include <boost/math/special_functions/bessel.hpp>

#include "scalemix/error.hpp"

namespace scalemix {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool positive_finite(double x) { return x > 0.0 && std::isfinite(x); }

// log K_nu(z), falling back to the large-argument expansion when the direct
// evaluation under- or overflows.
double log_bessel_k(double nu, double z) {
  nu = std::abs(nu);  // K is even in its order
  const double k = boost::math::cyl_bessel_k(nu, z);
  if (k > 0.0 && std::isfinite(k)) return std::log(k);
  const double mu = 4.0 * nu * nu;
  return 0.5 * std::log(M_PI / (2.0 * z)) - z +
         std::log1p((mu - 1.0) / (8.0 * z) + (mu - 1.0) * (mu - 9.0) / (128.0 * z * z));
}

double log_gig_density(double lambda, double chi, double psi, double x) {
  if (chi == 0.0) {
    // Gamma(lambda, rate psi/2).
    return lambda * std::log(0.5 * psi) - std::lgamma(lambda) + (lambda - 1.0) * std::log(x) -
           0.5 * psi * x;
  }
  if (psi == 0.0) {
    // InverseGamma(-lambda, chi/2).
    const double a = -lambda;
    const double s = 0.5 * chi;
    return a * std::log(s) - std::lgamma(a) - (a + 1.0) * std::log(x) - s / x;
  }
  const double omega = std::sqrt(chi * psi);
  const double log_norm =
      0.5 * lambda * std::log(psi / chi) - std::log(2.0) - log_bessel_k(lambda, omega);
  return log_norm + (lambda - 1.0) * std::log(x) - 0.5 * (chi / x + psi * x);
}

}  // namespace

bool gig_params_admissible(double lambda, double chi, double psi) {
  if (!std::isfinite(lambda) || !std::isfinite(chi) || !std::isfinite(psi)) return false;
  if (chi < 0.0 || psi < 0.0) return false;
  if (chi > 0.0 && psi > 0.0) return true;
  if (chi == 0.0 && psi > 0.0) return lambda > 0.0;
  if (psi == 0.0 && chi > 0.0) return lambda < 0.0;
  return false;
}

void validate(const MixingFamily& family) {
  std::visit(overloaded{
                 [](const Degenerate&) {},
                 [](const Exponential& e) {
                   if (!positive_finite(e.rate))
                     throw Error(ErrorCode::InvalidParams, "exponential rate must be positive");
                 },
                 [](const InverseGamma& ig) {
                   if (!positive_finite(ig.shape) || !positive_finite(ig.scale))
                     throw Error(ErrorCode::InvalidParams,
                                 "inverse gamma shape and scale must be positive");
                 },
                 [](const Gig& g) {
                   if (!gig_params_admissible(g.lambda, g.chi, g.psi))
                     throw Error(ErrorCode::InvalidParams,
                                 "GIG parameters outside the admissible region");
                 },
                 [](const PolyaGamma& pg) {
                   if (!positive_finite(pg.b) || pg.b != std::floor(pg.b))
                     throw Error(ErrorCode::InvalidParams,
                                 "Polya-Gamma b must be a positive integer");
                 },
             },
             family);
}

bool is_degenerate(const MixingFamily& family) {
  return std::holds_alternative<Degenerate>(family);
}

std::string describe(const MixingFamily& family) {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const Degenerate&) { os << "Degenerate"; },
                 [&](const Exponential& e) { os << "Exponential(rate=" << e.rate << ")"; },
                 [&](const InverseGamma& ig) {
                   os << "InverseGamma(shape=" << ig.shape << ", scale=" << ig.scale << ")";
                 },
                 [&](const Gig& g) {
                   os << "GIG(lambda=" << g.lambda << ", chi=" << g.chi << ", psi=" << g.psi
                      << ")";
                 },
                 [&](const PolyaGamma& pg) { os << "PolyaGamma(b=" << pg.b << ")"; },
             },
             family);
  return os.str();
}

double log_mixing_density(const MixingFamily& family, double x) {
  validate(family);
  if (!(x > 0.0))
    throw Error(ErrorCode::NonPositiveInput, "mixing density evaluated at a non-positive point");
  return std::visit(
      overloaded{
          [](const Degenerate&) -> double {
            throw Error(ErrorCode::InvalidParams, "degenerate mixing has no density");
          },
          [x](const Exponential& e) { return std::log(e.rate) - e.rate * x; },
          [x](const InverseGamma& ig) {
            return ig.shape * std::log(ig.scale) - std::lgamma(ig.shape) -
                   (ig.shape + 1.0) * std::log(x) - ig.scale / x;
          },
          [x](const Gig& g) { return log_gig_density(g.lambda, g.chi, g.psi, x); },
          [x](const PolyaGamma& pg) { return log_pg_density(pg.b, x); },
      },
      family);
}

double sample_inverse_gamma(double shape, double scale, Rng& rng) {
  return scale / gamma_variate(shape, 1.0, rng);
}

double sample_mixing(const MixingFamily& family, Rng& rng) {
  validate(family);
  return std::visit(overloaded{
                        [](const Degenerate&) { return 1.0; },
                        [&](const Exponential& e) { return std_exponential(rng) / e.rate; },
                        [&](const InverseGamma& ig) {
                          return sample_inverse_gamma(ig.shape, ig.scale, rng);
                        },
                        [&](const Gig& g) { return sample_gig(g.lambda, g.chi, g.psi, rng); },
                        [&](const PolyaGamma& pg) {
                          return sample_pg(static_cast<int>(pg.b), rng);
                        },
                    },
                    family);
}

double gig_mean(double lambda, double chi, double psi) {
  if (!(chi > 0.0 && psi > 0.0))
    throw Error(ErrorCode::InvalidParams, "gig_mean requires chi > 0 and psi > 0");
  const double omega = std::sqrt(chi * psi);
  return std::sqrt(chi / psi) *
         std::exp(log_bessel_k(lambda + 1.0, omega) - log_bessel_k(lambda, omega));
}

}  // namespace scalemix
