#include "stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>

namespace stats {

Moments moments(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  Moments m;
  for (double v : x) m.mean += v;
  m.mean /= n;
  double m2 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double c = v - m.mean;
    m2 += c * c;
    m4 += c * c * c * c;
  }
  m.var = m2 / (n - 1.0);
  m.se_mean = std::sqrt(m.var / n);
  const double mu2 = m2 / n, mu4 = m4 / n;
  m.se_var = std::sqrt((mu4 - mu2 * mu2) / n);
  return m;
}

double batch_means_se(const std::vector<double>& x, int num_batches) {
  const std::size_t len = x.size() / num_batches;
  std::vector<double> means;
  for (int b = 0; b < num_batches; ++b) {
    double s = 0.0;
    for (std::size_t i = b * len; i < (b + 1) * len; ++i) s += x[i];
    means.push_back(s / len);
  }
  return moments(means).se_mean;
}

double kolmogorov_sf(double t) {
  if (t < 0.2) return 1.0;
  double s = 0.0;
  for (int k = 1; k < 200; ++k) {
    const double term = std::exp(-2.0 * k * k * t * t);
    s += (k % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-17) break;
  }
  return std::clamp(s, 0.0, 1.0);
}

KsResult ks_test(std::vector<double> x, const std::function<double(double)>& cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  const double sn = std::sqrt(n);
  return {d, kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d)};
}

double integrate_positive(const std::function<double(double)>& f) {
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-12);
}

double integrate(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-12);
}

}  // namespace stats
