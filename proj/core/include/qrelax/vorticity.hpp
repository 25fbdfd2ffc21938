#pragma once

#include <map>
#include <optional>

#include "qrelax/basis.hpp"

namespace qrelax {

// Top-shell polynomial g(z) = sum_k C_{k,m-k} z^k / sqrt(k! (m-k)!).
// The total vorticity of the state is 2*pi*(2*Z - m) with Z the number of
// zeros of g inside the unit disk.
struct ShellPolynomial {
  int m = 0;
  std::vector<Complex> coeffs;  // coeffs[k] multiplies z^k
};

enum class VorticityMethod { theorem, brute_force };

struct VorticityReport {
  int n = 0;  // total vorticity in units of 2*pi
  VorticityMethod method = VorticityMethod::theorem;
  std::optional<int> zero_count;  // theorem route only
  double margin = 0.0;            // certified |W - n*2pi| slack or zero-free annulus width
};

// Throws EmptyShellError when the top shell carries no amplitude
// (max_k |coeffs[k]| < 1e-300).
ShellPolynomial shell_polynomial(const AngularState& state);

// Winding-number count of the zeros of g inside the unit disk, certified by
// a Lipschitz bound on the circle; throws ZeroNearCircleError when a zero
// lies within `margin` of the circle (or cannot be excluded from it).
int zeros_in_unit_disk(const ShellPolynomial& g, double margin = 1e-9);

std::vector<int> allowed_vorticities(int m);

VorticityReport total_vorticity_theorem(const AngularState& state);

// Certified radius: no node of the state lies at eta >= the returned value,
// at any time.  On that circle the leading top-shell form dominates every
// remaining term, and the dominance only grows with radius.  Throws
// ZeroNearCircleError when the top-shell form vanishes somewhere on the unit
// circle (no finite circle is certifiable then) and EmptyShellError for the
// zero state.
double node_exclusion_radius(const AngularState& state);

// Direct phase unwrap of psi around a circle certified to enclose every node.
// eta_probe is a lower bound for the probe radius; it is grown until the
// exclusion certificate holds, then doubled.  eta_probe <= 0 starts from the
// default m + 10.
VorticityReport total_vorticity_bruteforce(const AngularState& state, double eta_probe = -1.0,
                                           double T = 0.0, int base_samples = 256);

// Cross-check route: winding of the Laurent form z^{-m} g(z^2) on the unit
// circle equals n directly (zeros minus the order-m pole).
int total_vorticity_laurent(const AngularState& state);

struct VorticityHistogram {
  int m = 0;
  long long samples = 0;
  std::map<int, long long> counts;  // vorticity -> occurrences
  long long resampled = 0;          // draws replaced after ZeroNearCircle
  std::uint64_t seed = 0;
};

VorticityHistogram sample_vorticity_distribution(int m, long long n_samples, std::uint64_t seed);

// Rejection-samples random states until the theorem reports target_n.
// Throws AttemptsExhaustedError after max_attempts rejections and
// std::invalid_argument when target_n is not an allowed value for m.
AngularState generate_state_with_vorticity(int m, int target_n, std::uint64_t seed,
                                           long long max_attempts = 1000000);

}  // namespace qrelax
