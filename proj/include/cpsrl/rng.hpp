#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace cpsrl {

// Deterministic random source. The engine is std::mt19937_64, whose output is
// fully specified by the standard; the samplers below are implemented here
// instead of std::*_distribution because the latter are implementation-defined
// and would break byte-reproducibility of experiment outputs across builds.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Independent stream derived from (seed, label). Used to decouple
  // environment generation, prior revelation, and agent randomness so a run
  // does not depend on which other runs share the configuration.
  static Rng derive(std::uint64_t seed, std::string_view label);

  std::uint64_t next_u64() { return engine_(); }

  double uniform01();                            // [0, 1)
  std::uint64_t uniform_below(std::uint64_t n);  // {0, ..., n-1}
  double normal();
  double gamma(double shape);  // unit scale, shape > 0
  double beta(double a, double b);
  std::vector<double> dirichlet(std::span<const double> alpha);
  void dirichlet_into(std::span<const double> alpha, std::span<double> out);
  std::size_t categorical(std::span<const double> weights);  // unnormalized

 private:
  std::mt19937_64 engine_;
};

}  // namespace cpsrl
