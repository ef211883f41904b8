#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace photonq {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using Mat2c = Eigen::Matrix2cd;
using Mat3 = Eigen::Matrix3d;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Invalid quantum numbers, parity violations and similar caller mistakes.
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A computation ran into a numerical guard (singular matrix, truncation, ...).
struct NumericalGuard : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline double wrap_two_pi(double x) {
  double y = std::fmod(x, two_pi);
  if (y < 0) y += two_pi;
  if (y >= two_pi) y -= two_pi;
  return y;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent generator for stream (seed, a, b). Streams do not depend on
// scheduling, so parallel sweeps reproduce serial ones.
inline std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t a = 0,
                                  std::uint64_t b = 0) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ splitmix64(a + 0x632be59bd9b4e019ULL));
  h = splitmix64(h ^ splitmix64(b + 0x85157af5ULL));
  return std::mt19937_64(h);
}

}  // namespace photonq
