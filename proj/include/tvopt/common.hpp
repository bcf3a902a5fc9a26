#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace tvopt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Rng = std::mt19937_64;

/// Input with inconsistent sizes (vector vs. set vs. constraint dimensions).
struct DimensionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Requested a prox for a (regularizer, set) pair that has no closed form.
struct ProxUnsupportedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid configuration (bad key, out-of-range value, solver/problem mismatch).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives an independent stream seed from a base seed and up to three tags.
/// Used to split randomness per (run, node, time) without shared state.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t s = base;
  std::uint64_t h = splitmix64(s);
  s ^= a * 0xff51afd7ed558ccdULL;
  h ^= splitmix64(s);
  s ^= b * 0xc4ceb9fe1a85ec53ULL;
  h ^= splitmix64(s);
  s ^= c * 0x2545f4914f6cdd1dULL;
  h ^= splitmix64(s);
  return h;
}

inline Vector gaussian_vector(int dim, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = normal(rng);
  return v;
}

inline Vector random_unit_vector(int dim, Rng& rng) {
  Vector v = gaussian_vector(dim, rng);
  double n = v.norm();
  while (n < 1e-12) {
    v = gaussian_vector(dim, rng);
    n = v.norm();
  }
  return v / n;
}

/// Serializes a double with 17 significant digits (round-trip exact).
std::string format_g17(double value);

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;

inline std::uint64_t fnv1a64(const void* data, std::size_t size,
                             std::uint64_t h = kFnvOffset) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t fnv1a64_file(const std::string& path);

}  // namespace tvopt
