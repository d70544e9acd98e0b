#include "cpsrl/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace cpsrl {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

Rng Rng::derive(std::uint64_t seed, std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the label
  for (unsigned char c : label) {
    h = (h ^ c) * 0x100000001b3ULL;
  }
  return Rng(splitmix64(seed ^ splitmix64(h)));
}

double Rng::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::uniform_below(std::uint64_t n) {
  if (n == 0) {
    throw std::invalid_argument("uniform_below: n must be positive");
  }
  // Multiply-shift range reduction; bias is far below 2^-32 for the ranges
  // used here.
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
}

double Rng::normal() {
  // Marsaglia polar method. The paired variate is discarded so the stream
  // position never depends on call history.
  for (;;) {
    const double u = 2.0 * uniform01() - 1.0;
    const double v = 2.0 * uniform01() - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) {
      return u * std::sqrt(-2.0 * std::log(s) / s);
    }
  }
}

double Rng::gamma(double shape) {
  if (!(shape > 0.0)) {
    throw std::invalid_argument("gamma: shape must be positive");
  }
  if (shape < 1.0) {
    // Boost to shape + 1 and scale back (Marsaglia & Tsang).
    const double u = 1.0 - uniform01();  // (0, 1]
    return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = 0.0;
    double v = 0.0;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = 1.0 - uniform01();
    if (u < 1.0 - 0.0331 * x * x * x * x) {
      return d * v;
    }
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
      return d * v;
    }
  }
}

double Rng::beta(double a, double b) {
  const double x = gamma(a);
  const double y = gamma(b);
  const double s = x + y;
  return s > 0.0 ? x / s : 0.5;
}

std::vector<double> Rng::dirichlet(std::span<const double> alpha) {
  std::vector<double> out(alpha.size());
  dirichlet_into(alpha, out);
  return out;
}

void Rng::dirichlet_into(std::span<const double> alpha, std::span<double> out) {
  if (alpha.size() != out.size()) {
    throw std::invalid_argument("dirichlet_into: size mismatch");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    out[i] = gamma(alpha[i]);
    total += out[i];
  }
  if (!(total > 0.0)) {
    // All-zero draws only occur for degenerate shapes; fall back to uniform.
    const double p = 1.0 / static_cast<double>(out.size());
    for (double& w : out) w = p;
    return;
  }
  for (double& w : out) w /= total;
}

std::size_t Rng::categorical(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("categorical: negative weight");
    total += w;
  }
  if (!(total > 0.0)) {
    throw std::invalid_argument("categorical: weights sum to zero");
  }
  double u = uniform01() * total;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
    u -= weights[i];
    if (u < 0.0) return i;
  }
  return weights.size() - 1;
}

}  // namespace cpsrl
