#pragma once

#include <cstdint>
#include <random>

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <boost/random/uniform_int_distribution.hpp>

namespace scalemix {

// The engine's output sequence is fixed by the standard. The distributions in
// <random> are not, so all variates go through Boost.Random, whose algorithms
// are identical on every platform.
using Rng = std::mt19937_64;

inline double uniform01(Rng& rng) {
  return boost::random::uniform_01<double>{}(rng);
}

// Uniform on the open interval (0, 1); safe to take logs of.
inline double uniform_open(Rng& rng) {
  double u;
  do {
    u = uniform01(rng);
  } while (u <= 0.0);
  return u;
}

inline double std_normal(Rng& rng) {
  return boost::random::normal_distribution<double>{}(rng);
}

inline double std_exponential(Rng& rng) {
  return boost::random::exponential_distribution<double>{}(rng);
}

inline double gamma_variate(double shape, double rate, Rng& rng) {
  return boost::random::gamma_distribution<double>{shape, 1.0 / rate}(rng);
}

inline double chi_squared(double df, Rng& rng) {
  return 2.0 * gamma_variate(0.5 * df, 1.0, rng);
}

inline std::size_t uniform_index(std::size_t n, Rng& rng) {
  return boost::random::uniform_int_distribution<std::size_t>{0, n - 1}(rng);
}

}  // namespace scalemix
