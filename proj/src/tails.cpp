#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "scalemix/error.hpp"
#include "scalemix/gsm.hpp"

namespace scalemix {

namespace {

constexpr double kGaussianBelow = 0.88;
constexpr double kPolynomialAbove = 1.25;

// Mean excess over the (k+1)-th largest value, from sorted ascending data.
double mean_excess(const std::vector<double>& sorted, int k) {
  const std::size_t n = sorted.size();
  const double u = sorted[n - k - 1];
  double s = 0.0;
  for (std::size_t i = n - k; i < n; ++i) s += sorted[i] - u;
  return s / k;
}

double hill_index(const std::vector<double>& sorted, int k) {
  const std::size_t n = sorted.size();
  const double u = sorted[n - k - 1];
  if (!(u > 0.0)) return std::numeric_limits<double>::infinity();
  double s = 0.0;
  for (std::size_t i = n - k; i < n; ++i) s += std::log(sorted[i] / u);
  return s > 0.0 ? k / s : std::numeric_limits<double>::infinity();
}

double median_of(std::vector<double> v) {
  const std::size_t n = v.size();
  std::nth_element(v.begin(), v.begin() + n / 2, v.end());
  double hi = v[n / 2];
  if (n % 2) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + n / 2);
  return 0.5 * (lo + hi);
}

}  // namespace

TailReport recommend_mixing(const Eigen::VectorXd& column) {
  const int n = static_cast<int>(column.size());
  if (n < 30)
    throw Error(ErrorCode::TooFewSamples, "tail diagnosis needs at least 30 observations");
  if (!column.allFinite()) throw Error(ErrorCode::InvalidParams, "column has non-finite values");

  TailReport r;
  r.n = n;
  std::vector<double> y(column.data(), column.data() + n);

  const double mean = column.mean();
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : y) {
    const double c = v - mean;
    m2 += c * c;
    m3 += c * c * c;
    m4 += c * c * c * c;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  if (!(m2 > 0.0)) throw Error(ErrorCode::ConstantColumn, "column is constant");
  r.skewness = m3 / std::pow(m2, 1.5);
  r.excess_kurtosis = m4 / (m2 * m2) - 3.0;

  // Normal q-q summary on the standardized column.
  std::vector<double> sorted = y;
  std::sort(sorted.begin(), sorted.end());
  const boost::math::normal_distribution<double> normal;
  const double sd = std::sqrt(m2);
  double sxy = 0.0, sxx = 0.0, syy = 0.0, max_dev = 0.0;
  for (int i = 0; i < n; ++i) {
    const double th = boost::math::quantile(normal, (i + 0.5) / n);
    const double em = (sorted[i] - mean) / sd;
    sxy += th * em;
    sxx += th * th;
    syy += em * em;
    max_dev = std::max(max_dev, std::abs(em - th));
  }
  r.qq_correlation = sxy / std::sqrt(sxx * syy);
  r.qq_max_deviation = max_dev;

  const double center = median_of(y);
  std::vector<double> a(n);
  for (int i = 0; i < n; ++i) a[i] = std::abs(y[i] - center);
  std::sort(a.begin(), a.end());
  const int k2 = std::min(n - 1, std::max(5, n / 100));
  const int k1 = std::min(n - 1, std::max(4 * k2, n / 10));
  const double e_hi = mean_excess(a, k2);
  const double e_lo = mean_excess(a, k1);
  r.excess_ratio = e_lo > 0.0 ? e_hi / e_lo : 0.0;
  r.hill_index = hill_index(a, k2);

  if (r.excess_ratio < kGaussianBelow) {
    r.tail_class = "gaussian";
    r.suggestion = Degenerate{};
  } else if (r.excess_ratio <= kPolynomialAbove) {
    // Laplace |y| has constant mean excess equal to its scale s, and a
    // Laplace(s) margin is a normal mixed over an Exponential(1/(2 s^2)) variance.
    r.tail_class = "exponential";
    r.suggestion = Exponential{1.0 / (2.0 * e_lo * e_lo)};
  } else {
    // A density tail |y|^-(nu+1) comes from InverseGamma(nu/2, .) mixing;
    // the Hill index estimates nu. The scale matches the median of |y| to a
    // Student-t with nu degrees of freedom.
    r.tail_class = "polynomial";
    const double nu = std::clamp(r.hill_index, 0.2, 200.0);
    const double s =
        median_of(a) / boost::math::quantile(boost::math::students_t_distribution<double>(nu), 0.75);
    r.suggestion = InverseGamma{0.5 * nu, 0.5 * nu * s * s};
  }
  return r;
}

}  // namespace scalemix
