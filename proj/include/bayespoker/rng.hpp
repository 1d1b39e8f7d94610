#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace bayespoker {

// Deterministic random stream. The engine (mt19937_64) is fully specified by
// the standard and all distribution transforms are implemented here, so a
// given seed reproduces the same draws on any platform with the same libm.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }
  // Uniform in [0, 1): 53 mantissa bits.
  double uniform01();
  // Uniform integer in [0, n).
  int uniform_int(int n);
  // Standard normal via Box-Muller (no cached spare, for reproducibility).
  double normal();
  // Gamma(shape, 1) via Marsaglia-Tsang, boosted for shape < 1.
  double gamma(double shape);
  // Dirichlet with a shared concentration per coordinate.
  std::vector<double> dirichlet(double concentration, int dims);
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (int i = static_cast<int>(v.size()) - 1; i > 0; --i)
      std::swap(v[static_cast<std::size_t>(i)],
                v[static_cast<std::size_t>(uniform_int(i + 1))]);
  }

 private:
  std::mt19937_64 eng_;
};

// Named sub-stream derivation: hashes the name into the seed so per-purpose
// streams (deck, thompson, ensembles, agent action sampling, ...) are
// decorrelated and individually reproducible.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream_name);
RngStream derive_stream(std::uint64_t seed, std::string_view stream_name);

}  // namespace bayespoker
