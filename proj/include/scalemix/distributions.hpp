#pragma once

#include <string>
#include <variant>

#include "scalemix/rng.hpp"

namespace scalemix {

// Mixing laws for a Gaussian variance d, so that y | d ~ N(0, d).
struct Degenerate {};  // d == 1
struct Exponential {
  double rate = 1.0;
};
struct InverseGamma {
  double shape = 1.0;
  double scale = 1.0;
};
// Density ∝ x^(lambda-1) exp(-(chi/x + psi*x)/2).
struct Gig {
  double lambda = 1.0;
  double chi = 1.0;
  double psi = 1.0;
};
struct PolyaGamma {
  double b = 1.0;
};

using MixingFamily = std::variant<Degenerate, Exponential, InverseGamma, Gig, PolyaGamma>;

// Throws Error(InvalidParams).
void validate(const MixingFamily& family);
// GIG admissible region: chi, psi >= 0 with chi > 0 when lambda <= 0 and
// psi > 0 when lambda >= 0.
bool gig_params_admissible(double lambda, double chi, double psi);

bool is_degenerate(const MixingFamily& family);
std::string describe(const MixingFamily& family);

// Throws Error(NonPositiveInput) for x <= 0 and Error(InvalidParams) for
// invalid parameters. Degenerate has no density; it throws InvalidParams.
double log_mixing_density(const MixingFamily& family, double x);

double sample_mixing(const MixingFamily& family, Rng& rng);

double sample_inverse_gamma(double shape, double scale, Rng& rng);
double sample_gig(double lambda, double chi, double psi, Rng& rng);

// Pólya-Gamma PG(b, 0).
double sample_pg1(Rng& rng);
double sample_pg(int b, Rng& rng);
// Alternating-series evaluation; the first omitted term bounds the
// truncation error, and summation stops once it is below 1e-14 relative to
// the partial sum. Integer b >= 2 falls back to convolution with PG(1) once
// cancellation sets in; non-integer b throws Error(InvalidParams) there.
double log_pg_density(double b, double x);

// Closed-form mean of GIG(lambda, chi, psi) with chi, psi > 0.
double gig_mean(double lambda, double chi, double psi);

}  // namespace scalemix
