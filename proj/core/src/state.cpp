#include "qrelax/state.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "qrelax/geometry.hpp"

namespace qrelax {

namespace {

void check_shell(int m) {
  if (m < 0) throw std::invalid_argument("shell index must be >= 0, got " + std::to_string(m));
}

double norm_sq_of(const std::vector<Complex>& c) {
  double s = 0.0;
  for (const Complex& z : c) s += std::norm(z);
  return s;
}

void normalize_vec(std::vector<Complex>& c) {
  const double n = norm_sq_of(c);
  if (n <= 0.0) throw std::invalid_argument("cannot normalize a zero state");
  const double inv = 1.0 / std::sqrt(n);
  for (Complex& z : c) z *= inv;
}

}  // namespace

AngularState::AngularState(int shell) : m(shell) {
  check_shell(shell);
  c.assign(triangular_size(shell), Complex(0.0, 0.0));
}

double AngularState::norm_sq() const { return norm_sq_of(c); }
void AngularState::normalize() { normalize_vec(c); }

CartesianState::CartesianState(int shell) : m(shell) {
  check_shell(shell);
  c.assign(triangular_size(shell), Complex(0.0, 0.0));
}

double CartesianState::norm_sq() const { return norm_sq_of(c); }
void CartesianState::normalize() { normalize_vec(c); }

int shell_for_basis_count(int M) {
  for (int m = 0; triangular_size(m) <= M; ++m)
    if (triangular_size(m) == M) return m;
  throw std::invalid_argument("basis count " + std::to_string(M) +
                              " is not triangular; valid: 1, 3, 6, 10, 15, 21, ...");
}

AngularState random_state(int m, std::uint64_t seed) {
  check_shell(m);
  std::mt19937_64 eng(seed);
  AngularState state(m);

  const int n = state.basis_count();
  std::vector<double> mag(n);
  double total = 0.0;
  // shells ascending, nd ascending within a shell: the flat triangular order
  for (int i = 0; i < n; ++i) {
    mag[i] = rng::uniform01(eng);
    total += mag[i] * mag[i];
  }
  const double inv = 1.0 / std::sqrt(total);
  for (int i = 0; i < n; ++i) {
    const double phase = kTwoPi * rng::uniform01(eng);
    state.c[i] = std::polar(mag[i] * inv, phase);
  }
  return state;
}

}  // namespace qrelax
