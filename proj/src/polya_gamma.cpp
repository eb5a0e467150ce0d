// Pólya-Gamma PG(b, 0) variates and density.
//
// PG(1, 0) = J*(1) / 4, where J*(1) is sampled exactly by Devroye's
// alternating-series method. Its density f(x) = sum_n (-1)^n a_n(x) has two
// exact series representations; a_n below uses the small-x form for x <= t
// and the large-x form beyond, which makes the coefficients decrease
// monotonically in n for every x.

#include <cmath>
#include <limits>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "scalemix/distributions.hpp"
#include "scalemix/error.hpp"

namespace scalemix {

namespace {

constexpr double kTrunc = 0.64;
constexpr double kPi = 3.14159265358979323846;

long double jstar_coef(int n, double x) {
  const long double k = n + 0.5L;
  if (x <= kTrunc) {
    return kPi * k * std::pow(2.0L / (kPi * x), 1.5L) * std::exp(-2.0L * k * k / x);
  }
  return kPi * k * std::exp(-k * k * kPi * kPi * x / 2.0L);
}

double sample_jstar1(Rng& rng) {
  const double k = kPi * kPi / 8.0;
  // Masses of a_0 to the right and left of the truncation point.
  const double right_mass = (4.0 / kPi) * std::exp(-k * kTrunc);
  const double left_mass =
      4.0 * boost::math::cdf(boost::math::normal_distribution<double>{}, -1.0 / std::sqrt(kTrunc));
  const double right_prob = right_mass / (right_mass + left_mass);

  for (;;) {
    double x;
    if (uniform01(rng) < right_prob) {
      x = kTrunc + std_exponential(rng) / k;
    } else {
      // 1/x is chi-square(1) restricted to (1/t, inf): normal tail beyond
      // 1/sqrt(t) by exponential rejection.
      double e1, e2;
      do {
        e1 = std_exponential(rng);
        e2 = std_exponential(rng);
      } while (e1 * e1 > 2.0 * e2 / kTrunc);
      const double denom = 1.0 + kTrunc * e1;
      x = kTrunc / (denom * denom);
    }

    long double s = jstar_coef(0, x);
    const long double y = uniform01(rng) * s;
    for (int n = 1;; ++n) {
      if (n & 1) {
        s -= jstar_coef(n, x);
        if (y <= s) return x;
      } else {
        s += jstar_coef(n, x);
        if (y > s) break;
      }
    }
  }
}

double pg1_log_density(double x) {
  // PG(1,0) density is 4 f_J*(4x). Summing a_n / a_0 keeps the far tails
  // representable.
  const double u = 4.0 * x;
  const long double log_a0 =
      u <= kTrunc ? std::log(kPi * 0.5L) + 1.5L * std::log(2.0L / (kPi * u)) - 0.5L / u
                  : std::log(kPi * 0.5L) - kPi * kPi * u / 8.0L;
  long double sum = 1.0L;
  for (int n = 1;; ++n) {
    const long double k = n + 0.5L;
    const long double excess = k * k - 0.25L;
    const long double ratio = (2.0L * n + 1.0L) * (u <= kTrunc ? std::exp(-2.0L * excess / u)
                                                               : std::exp(-excess * kPi * kPi * u / 2.0L));
    sum += (n & 1) ? -ratio : ratio;
    if (ratio < 1e-15L * sum) break;
    if (n > 100000)
      throw Error(ErrorCode::InvalidParams, "Polya-Gamma series failed to converge");
  }
  return static_cast<double>(std::log(4.0L) + log_a0 + std::log(sum));
}

double pg1_density(double x) { return std::exp(pg1_log_density(x)); }

// Small-x series for general b, or NaN when cancellation has eaten the
// precision (large x relative to b).
double pg_series_density(double b, double x) {
  long double sum = 0.0L;
  long double peak = 0.0L;
  bool past_peak = false;
  long double prev = 0.0L;
  for (int n = 0;; ++n) {
    const long double m = 2.0L * n + b;
    const long double log_term = std::lgamma(n + b) - std::lgamma(n + 1.0) + std::log(m) -
                                 m * m / (8.0L * x);
    const long double term = std::exp(log_term);
    sum += (n & 1) ? -term : term;
    peak = std::max(peak, term);
    if (n > 0 && term < prev) past_peak = true;
    prev = term;
    if (past_peak && term < 1e-14L * std::abs(sum)) break;
    if (n > 200000) return std::numeric_limits<double>::quiet_NaN();
  }
  if (!(std::abs(sum) > 1e-4L * peak)) return std::numeric_limits<double>::quiet_NaN();
  const long double scale =
      std::exp((b - 1.0L) * std::log(2.0L) - std::lgamma(b)) / std::sqrt(2.0L * kPi * x * x * x);
  return static_cast<double>(scale * sum);
}

double pg_density(double b, double x) {
  if (b == 1.0) return pg1_density(x);
  const double series = pg_series_density(b, x);
  if (!std::isnan(series)) return series;
  if (b != std::floor(b) || b < 2.0)
    throw Error(ErrorCode::InvalidParams,
                "Polya-Gamma density for non-integer b is unavailable this far in the tail");
  // PG(b) = PG(1) + PG(b-1): convolve.
  auto integrand = [&](double y) { return pg1_density(y) * pg_density(b - 1.0, x - y); };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, x, 15,
                                                                       1e-13);
}

}  // namespace

double sample_pg1(Rng& rng) { return 0.25 * sample_jstar1(rng); }

double sample_pg(int b, Rng& rng) {
  if (b < 1) throw Error(ErrorCode::InvalidParams, "Polya-Gamma b must be >= 1");
  double total = 0.0;
  for (int i = 0; i < b; ++i) total += sample_pg1(rng);
  return total;
}

double log_pg_density(double b, double x) {
  if (!(b > 0.0) || !std::isfinite(b))
    throw Error(ErrorCode::InvalidParams, "Polya-Gamma b must be positive");
  if (!(x > 0.0))
    throw Error(ErrorCode::NonPositiveInput, "Polya-Gamma density evaluated at x <= 0");
  if (b == 1.0) return pg1_log_density(x);
  const double f = pg_density(b, x);
  return f > 0.0 ? std::log(f) : -std::numeric_limits<double>::infinity();
}

}  // namespace scalemix
