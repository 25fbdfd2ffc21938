#pragma once

// Internal: adaptive phase unwrapping along closed curves.

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <vector>

#include "qrelax/errors.hpp"
#include "qrelax/geometry.hpp"

namespace qrelax::detail {

// Total unwrapped phase change / 2*pi of value_at(t) as t runs once around
// [0, 1).  Arcs whose sampled phase jump reaches pi/2 are bisected, down to
// max_depth extra levels below the base sampling.
inline double unwrap_cycles(const std::function<Complex(double)>& value_at, int base_samples,
                            int max_depth = 48) {
  struct Arc {
    double t0, t1;
    Complex z0, z1;
    int depth;
  };

  const auto probe = [&](double t) {
    const Complex z = value_at(t);
    if (!(std::abs(z) > 0.0))
      throw AmbiguousWindingError("curve passes through zero at sample point");
    return z;
  };

  std::vector<Complex> base(base_samples);
  for (int i = 0; i < base_samples; ++i) base[i] = probe(static_cast<double>(i) / base_samples);

  std::vector<Arc> work;
  work.reserve(base_samples);
  for (int i = 0; i < base_samples; ++i)
    work.push_back({static_cast<double>(i) / base_samples,
                    static_cast<double>(i + 1) / base_samples, base[i],
                    base[(i + 1) % base_samples], 0});

  double total = 0.0;
  while (!work.empty()) {
    const Arc a = work.back();
    work.pop_back();
    const double d = std::arg(a.z1 / a.z0);
    if (std::abs(d) < kPi / 2) {
      total += d;
      continue;
    }
    if (a.depth >= max_depth)
      throw AmbiguousWindingError("phase jump not resolved by refinement");
    const double tm = 0.5 * (a.t0 + a.t1);
    const Complex zm = probe(tm);
    work.push_back({a.t0, tm, a.z0, zm, a.depth + 1});
    work.push_back({tm, a.t1, zm, a.z1, a.depth + 1});
  }
  return total / kTwoPi;
}

struct CertifiedWinding {
  int n = 0;
  double margin = 0.0;  // certified zero-free annulus half-width around the curve
};

// Winding of the polynomial sum_k coeffs[k] z^k around the unit circle with
// a Lipschitz certificate: every accepted arc is guaranteed zero-free out to
// distance `margin` from the circle.  Throws ZeroNearCircleError when a zero
// within (or too close to) the circle's margin tube cannot be excluded.
inline CertifiedWinding certified_polynomial_winding(const std::vector<Complex>& coeffs,
                                                     double margin) {
  double lip = 0.0;  // |g'| on the closed unit disk
  for (std::size_t k = 1; k < coeffs.size(); ++k) lip += k * std::abs(coeffs[k]);

  const auto value_at = [&](double theta) {
    const Complex z = std::polar(1.0, theta);
    Complex acc(0.0, 0.0);
    for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * z + coeffs[k];
    return acc;
  };

  struct Arc {
    double t0, t1;
    Complex z0, z1;
  };

  const int base = 64;
  std::vector<Complex> vals(base);
  for (int i = 0; i < base; ++i) vals[i] = value_at(kTwoPi * i / base);

  std::vector<Arc> work;
  work.reserve(base);
  for (int i = 0; i < base; ++i)
    work.push_back({kTwoPi * i / base, kTwoPi * (i + 1) / base, vals[i], vals[(i + 1) % base]});

  double total = 0.0;
  double certified = std::numeric_limits<double>::infinity();
  while (!work.empty()) {
    const Arc a = work.back();
    work.pop_back();
    const double lo = std::min(std::abs(a.z0), std::abs(a.z1));
    if (lo <= lip * margin || lo <= 0.0)
      throw ZeroNearCircleError("top-shell polynomial has a zero within the unit-circle margin");
    const double half = 0.5 * (a.t1 - a.t0);  // arc half-length on the unit circle
    const bool cert_ok = lip == 0.0 || lo > lip * (half + margin);
    const double d = std::arg(a.z1 / a.z0);
    if (cert_ok && std::abs(d) < kPi / 2) {
      total += d;
      if (lip > 0.0) certified = std::min(certified, (lo - lip * half) / lip);
      continue;
    }
    if (2.0 * half < margin * 1e-3 || 2.0 * half < 1e-15)
      throw ZeroNearCircleError("unit-circle winding arc refinement exhausted");
    const double tm = 0.5 * (a.t0 + a.t1);
    const Complex zm = value_at(tm);
    work.push_back({a.t0, tm, a.z0, zm});
    work.push_back({tm, a.t1, zm, a.z1});
  }

  const double cycles = total / kTwoPi;
  const int n = static_cast<int>(std::lround(cycles));
  if (std::abs(cycles - n) > 1e-6)
    throw AmbiguousWindingError("unit-circle winding failed integer snap");
  return {n, std::isfinite(certified) ? certified : margin};
}

}  // namespace qrelax::detail
