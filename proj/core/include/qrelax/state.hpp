#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace qrelax {

using Complex = std::complex<double>;

// Number of index pairs (a, b) with a, b >= 0 and a + b <= m.
inline constexpr int triangular_size(int m) { return (m + 1) * (m + 2) / 2; }

// Flat offset of the pair (a, b): shells in ascending order of s = a + b,
// first index ascending within a shell.
inline constexpr int triangular_offset(int a, int b) {
  const int s = a + b;
  return s * (s + 1) / 2 + a;
}

// Superposition over the angular basis chi_{nd,ng} with nd + ng <= m.
struct AngularState {
  int m = 0;
  std::vector<Complex> c;  // triangular order, c[triangular_offset(nd, ng)]

  AngularState() : c(1, Complex(1.0, 0.0)) {}
  explicit AngularState(int shell);

  Complex& at(int nd, int ng) { return c[triangular_offset(nd, ng)]; }
  const Complex& at(int nd, int ng) const { return c[triangular_offset(nd, ng)]; }

  // Number of basis states in the superposition label, M = (m+1)(m+2)/2.
  int basis_count() const { return triangular_size(m); }

  double norm_sq() const;
  void normalize();
};

// Superposition over Cartesian eigenstates psi_{nx,ny} with nx + ny <= m.
struct CartesianState {
  int m = 0;
  std::vector<Complex> c;  // triangular order, c[triangular_offset(nx, ny)]

  CartesianState() : c(1, Complex(1.0, 0.0)) {}
  explicit CartesianState(int shell);

  Complex& at(int nx, int ny) { return c[triangular_offset(nx, ny)]; }
  const Complex& at(int nx, int ny) const { return c[triangular_offset(nx, ny)]; }

  int basis_count() const { return triangular_size(m); }

  double norm_sq() const;
  void normalize();
};

// Shell index m for a basis-count label M = (m+1)(m+2)/2; throws
// std::invalid_argument when M is not triangular.
int shell_for_basis_count(int M);

// Random superposition over the full basis up to shell m: uniform magnitudes
// normalized to unit total probability, then independent uniform phases.
// Bit-reproducible for a given (m, seed) on any platform.
AngularState random_state(int m, std::uint64_t seed);

namespace rng {

// Uniform double in [0, 1) from the generator's high 53 bits; bit-identical
// on every platform, unlike std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// SplitMix64 step, used to derive independent substream seeds.
inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t s = master + 0x9E3779B97F4A7C15ull * (index + 1);
  return splitmix64(s);
}

}  // namespace rng

}  // namespace qrelax
