#pragma once

#include <cstdint>
#include <random>

namespace sgsr {

/// Standard normal variates from a seeded 64-bit Mersenne Twister.
///
/// std::mt19937_64 produces the same sequence on every conforming
/// implementation. Uniforms are built from the top 53 bits of each draw and
/// turned into normals with the Box-Muller transform, so the whole stream is
/// reproducible without relying on std::normal_distribution.
class NormalGenerator {
 public:
  explicit NormalGenerator(std::uint64_t seed) : engine_(seed) {}

  double operator()();

  /// Uniform in [0, 1).
  double uniform();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace sgsr
