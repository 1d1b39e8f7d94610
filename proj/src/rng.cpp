#include "bayespoker/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace bayespoker {

double RngStream::uniform01() {
  return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

int RngStream::uniform_int(int n) {
  if (n <= 0) throw std::invalid_argument("uniform_int needs n > 0");
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = eng_();
  } while (x >= limit);
  return static_cast<int>(x % bound);
}

double RngStream::normal() {
  double u1;
  do {
    u1 = uniform01();
  } while (u1 <= 0.0);
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925 * u2);
}

double RngStream::gamma(double shape) {
  if (shape <= 0.0) throw std::invalid_argument("gamma shape must be positive");
  if (shape < 1.0) {
    // Boost: Gamma(a) = Gamma(a + 1) * U^(1/a).
    const double g = gamma(shape + 1.0);
    double u;
    do {
      u = uniform01();
    } while (u <= 0.0);
    return g * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform01();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

std::vector<double> RngStream::dirichlet(double concentration, int dims) {
  if (dims <= 0) throw std::invalid_argument("dirichlet needs dims > 0");
  std::vector<double> out(static_cast<std::size_t>(dims));
  double sum = 0.0;
  for (double& x : out) {
    x = gamma(concentration);
    sum += x;
  }
  if (sum <= 0.0) {  // astronomically unlikely; keep the vector valid
    for (double& x : out) x = 1.0 / dims;
    return out;
  }
  for (double& x : out) x /= sum;
  return out;
}

static std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream_name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the stream name
  for (char c : stream_name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return splitmix64(seed ^ splitmix64(h));
}

RngStream derive_stream(std::uint64_t seed, std::string_view stream_name) {
  return RngStream(derive_seed(seed, stream_name));
}

}  // namespace bayespoker
