// Generalized inverse Gaussian variates (Hörmann & Leydold, 2014).
//
// Sampling is done on the one-parameter standardized density
//   g(x) ∝ x^(lambda-1) exp(-omega/2 (x + 1/x)),  omega = sqrt(chi psi),
// and scaled back by sqrt(chi/psi). Negative lambda uses 1/X ~ GIG(-lambda).

#include <cmath>

#include "scalemix/distributions.hpp"
#include "scalemix/error.hpp"

namespace scalemix {

namespace {

double gig_mode(double lambda, double omega) {
  if (lambda >= 1.0)
    return (std::sqrt((lambda - 1.0) * (lambda - 1.0) + omega * omega) + (lambda - 1.0)) / omega;
  return omega / (std::sqrt((1.0 - lambda) * (1.0 - lambda) + omega * omega) + (1.0 - lambda));
}

// Ratio-of-uniforms with the mode shifted to the origin. Used for
// lambda > 1 or omega > 1.
double rou_shift(double lambda, double omega, Rng& rng) {
  const double t = 0.5 * (lambda - 1.0);
  const double s = 0.25 * omega;
  const double xm = gig_mode(lambda, omega);
  const double nc = t * std::log(xm) - s * (xm + 1.0 / xm);

  // Extremes of (x - xm) sqrt(g(x)) are the outer roots of a cubic.
  const double a = -(2.0 * (lambda + 1.0) / omega + xm);
  const double b = 2.0 * (lambda - 1.0) * xm / omega - 1.0;
  const double c = xm;
  const double p = b - a * a / 3.0;
  const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const double fi = std::acos(-q / (2.0 * std::sqrt(-(p * p * p) / 27.0)));
  const double fak = 2.0 * std::sqrt(-p / 3.0);
  const double y1 = fak * std::cos(fi / 3.0) - a / 3.0;
  const double y2 = fak * std::cos(fi / 3.0 + 4.0 / 3.0 * M_PI) - a / 3.0;
  const double uplus = (y1 - xm) * std::exp(t * std::log(y1) - s * (y1 + 1.0 / y1) - nc);
  const double uminus = (y2 - xm) * std::exp(t * std::log(y2) - s * (y2 + 1.0 / y2) - nc);

  for (;;) {
    const double u = uminus + uniform01(rng) * (uplus - uminus);
    const double v = uniform_open(rng);
    const double x = u / v + xm;
    if (x > 0.0 && std::log(v) <= t * std::log(x) - s * (x + 1.0 / x) - nc) return x;
  }
}

// Ratio-of-uniforms without shift, for 0 <= lambda <= 1 and
// min(1/2, 2/3 sqrt(1-lambda)) <= omega <= 1.
double rou_noshift(double lambda, double omega, Rng& rng) {
  const double t = 0.5 * (lambda - 1.0);
  const double s = 0.25 * omega;
  const double xm = gig_mode(lambda, omega);
  const double nc = t * std::log(xm) - s * (xm + 1.0 / xm);
  const double ym =
      ((lambda + 1.0) + std::sqrt((lambda + 1.0) * (lambda + 1.0) + omega * omega)) / omega;
  const double um = std::exp(0.5 * (lambda + 1.0) * std::log(ym) - s * (ym + 1.0 / ym) - nc);

  for (;;) {
    const double u = um * uniform_open(rng);
    const double v = uniform_open(rng);
    const double x = u / v;
    if (std::log(v) <= t * std::log(x) - s * (x + 1.0 / x) - nc) return x;
  }
}

// Rejection from a three-piece hat; for 0 <= lambda < 1 and small omega,
// where both ratio-of-uniforms variants have poor acceptance.
double concave_hat(double lambda, double omega, Rng& rng) {
  const double xm = gig_mode(lambda, omega);
  const double x0 = omega / (1.0 - lambda);

  const double k0 = std::exp((lambda - 1.0) * std::log(xm) - 0.5 * omega * (xm + 1.0 / xm));
  const double a0 = k0 * x0;
  double k1, a1, k2, a2;
  if (x0 >= 2.0 / omega) {
    k1 = 0.0;
    a1 = 0.0;
    k2 = std::pow(x0, lambda - 1.0);
    a2 = k2 * 2.0 * std::exp(-omega * x0 / 2.0) / omega;
  } else {
    k1 = std::exp(-omega);
    a1 = lambda == 0.0 ? k1 * std::log(2.0 / (omega * omega))
                       : k1 / lambda * (std::pow(2.0 / omega, lambda) - std::pow(x0, lambda));
    k2 = std::pow(2.0 / omega, lambda - 1.0);
    a2 = k2 * 2.0 * std::exp(-1.0) / omega;
  }
  const double total = a0 + a1 + a2;

  for (;;) {
    double v = total * uniform01(rng);
    double x, hx;
    if (v <= a0) {
      x = x0 * v / a0;
      hx = k0;
    } else if ((v -= a0) <= a1) {
      if (lambda == 0.0) {
        x = omega * std::exp(std::exp(omega) * v);
        hx = k1 / x;
      } else {
        x = std::pow(std::pow(x0, lambda) + lambda / k1 * v, 1.0 / lambda);
        hx = k1 * std::pow(x, lambda - 1.0);
      }
    } else {
      v -= a1;
      const double a = std::max(x0, 2.0 / omega);
      x = -2.0 / omega * std::log(std::exp(-omega / 2.0 * a) - omega / (2.0 * k2) * v);
      hx = k2 * std::exp(-omega / 2.0 * x);
    }
    if (!(x > 0.0) || !std::isfinite(x)) continue;
    const double u = uniform01(rng) * hx;
    if (std::log(u) <= (lambda - 1.0) * std::log(x) - omega / 2.0 * (x + 1.0 / x)) return x;
  }
}

double sample_standard_gig(double lambda, double omega, Rng& rng) {
  if (lambda > 1.0 || omega > 1.0) return rou_shift(lambda, omega, rng);
  if (omega >= std::min(0.5, 2.0 / 3.0 * std::sqrt(1.0 - lambda)))
    return rou_noshift(lambda, omega, rng);
  return concave_hat(lambda, omega, rng);
}

}  // namespace

double sample_gig(double lambda, double chi, double psi, Rng& rng) {
  if (!gig_params_admissible(lambda, chi, psi))
    throw Error(ErrorCode::InvalidParams, "GIG parameters outside the admissible region");
  if (chi == 0.0) return gamma_variate(lambda, 0.5 * psi, rng);
  if (psi == 0.0) return sample_inverse_gamma(-lambda, 0.5 * chi, rng);

  const double omega = std::sqrt(chi * psi);
  const double alpha = std::sqrt(chi / psi);
  const double x = sample_standard_gig(std::abs(lambda), omega, rng);
  return lambda < 0.0 ? alpha / x : alpha * x;
}

}  // namespace scalemix
