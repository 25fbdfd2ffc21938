#include "qrelax/vorticity.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <string>

#include "farfield.hpp"
#include "qrelax/errors.hpp"
#include "qrelax/parallel.hpp"
#include "winding.hpp"

namespace qrelax {

namespace detail {

Complex FarField::top_form(double theta) const {
  Complex v(0.0, 0.0);
  for (std::size_t k = 0; k < g.size(); ++k) v += g[k] * std::polar(1.0, k * theta);
  return v;
}

double FarField::tail_bound(double eta) const {
  double P = 0.0;
  for (const auto& [c, p] : tail) P += c * std::pow(eta, p);
  return P;
}

FarField far_field(const AngularState& state) {
  FarField ff;
  struct Term {
    Complex coef;
    int k;  // angular harmonic nd - ng
    RadialPoly f;
  };
  std::vector<Term> terms;
  for (int nd = 0; nd <= state.m; ++nd) {
    for (int ng = 0; nd + ng <= state.m; ++ng) {
      const Complex c = state.at(nd, ng);
      if (std::abs(c) < 1e-300) continue;
      terms.push_back({c, nd - ng, make_radial_poly(nd, ng)});
      ff.m = std::max(ff.m, nd + ng);
    }
  }
  if (terms.empty()) throw EmptyShellError("state carries no amplitude at all");

  // Leading coefficients: the top radial coefficient of f_{nd,ng} is
  // 1/sqrt(nd! ng!); everything else lands in the absolute tail bound.
  ff.g.assign(ff.m + 1, Complex(0.0, 0.0));
  for (const Term& t : terms) {
    const int top = static_cast<int>(t.f.a.size()) - 1;
    const int s = t.f.ell + 2 * top;
    if (s == ff.m) ff.g[(t.k + ff.m) / 2] += t.coef * t.f.a.back();
    const double mag = std::abs(t.coef);
    for (int j = 0; j <= top; ++j) {
      if (s == ff.m && j == top) continue;
      ff.tail.push_back({mag * std::abs(t.f.a[j]), t.f.ell + 2 * j});
    }
  }
  for (std::size_t k = 0; k < ff.g.size(); ++k) ff.lip += k * std::abs(ff.g[k]);
  return ff;
}

double certified_exclusion_radius(const FarField& ff, double R_start) {
  // certified positive lower bound of |L| over the circle (Lipschitz slack)
  double lo = -1.0;
  for (int nsamp = 256; nsamp <= (1 << 22); nsamp <<= 1) {
    double mn = 1e300;
    for (int i = 0; i < nsamp; ++i) mn = std::min(mn, std::abs(ff.top_form(kTwoPi * i / nsamp)));
    lo = mn - ff.lip * kPi / nsamp;
    if (lo > 0.0) break;
  }
  if (lo <= 0.0)
    throw ZeroNearCircleError(
        "top-shell form vanishes on the unit circle; no finite circle encloses every node");

  double R = R_start;
  while (std::pow(R, ff.m) * lo <= 2.0 * ff.tail_bound(R)) {
    R *= 1.25;
    if (ff.m * std::log10(R) > 250.0)
      throw AmbiguousWindingError("node-enclosing probe radius exceeds the double range");
  }
  return R;
}

}  // namespace detail

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int j = 2; j <= n; ++j) f *= j;
  return f;
}

int snap_integer(double cycles, double tol, const char* what) {
  const int n = static_cast<int>(std::lround(cycles));
  if (std::abs(cycles - n) > tol)
    throw AmbiguousWindingError(std::string(what) + " winding failed integer snap");
  return n;
}

}  // namespace

ShellPolynomial shell_polynomial(const AngularState& state) {
  ShellPolynomial g;
  g.m = state.m;
  g.coeffs.resize(state.m + 1);
  double peak = 0.0;
  for (int k = 0; k <= state.m; ++k) {
    g.coeffs[k] = state.at(k, state.m - k) / std::sqrt(factorial(k) * factorial(state.m - k));
    peak = std::max(peak, std::abs(g.coeffs[k]));
  }
  if (peak < 1e-300)
    throw EmptyShellError("top shell carries no amplitude; vorticity theorem does not apply");
  return g;
}

int zeros_in_unit_disk(const ShellPolynomial& g, double margin) {
  // winding of g around |z| = 1 counts the interior zeros
  return detail::certified_polynomial_winding(g.coeffs, margin).n;
}

std::vector<int> allowed_vorticities(int m) {
  if (m < 0) throw std::invalid_argument("shell index must be >= 0");
  std::vector<int> out;
  for (int n = -m; n <= m; n += 2) out.push_back(n);
  return out;
}

VorticityReport total_vorticity_theorem(const AngularState& state) {
  const ShellPolynomial g = shell_polynomial(state);
  const detail::CertifiedWinding w = detail::certified_polynomial_winding(g.coeffs, 1e-9);
  VorticityReport rep;
  rep.method = VorticityMethod::theorem;
  rep.zero_count = w.n;
  rep.n = 2 * w.n - state.m;
  rep.margin = w.margin;
  return rep;
}

double node_exclusion_radius(const AngularState& state) {
  return detail::certified_exclusion_radius(detail::far_field(state), 1.0);
}

VorticityReport total_vorticity_bruteforce(const AngularState& state, double eta_probe, double T,
                                           int base_samples) {
  // Unwrap psi / chi00 instead of psi: same phase everywhere, no Gaussian
  // underflow, so the probe circle can sit as far out as the exclusion
  // certificate needs.  Doubling the certified radius keeps every node well
  // inside, so the phase dips along the circle stay resolvable.
  const double R = 2.0 * detail::certified_exclusion_radius(
                             detail::far_field(state), eta_probe > 0.0 ? eta_probe : state.m + 10.0);

  const WaveFunction wf(state);
  const double cycles =
      detail::unwrap_cycles([&](double t) { return wf.envelope({R, kTwoPi * t}, T); }, base_samples);
  VorticityReport rep;
  rep.method = VorticityMethod::brute_force;
  rep.n = snap_integer(cycles, 1e-6, "probe-circle");
  rep.margin = std::abs(cycles - rep.n);
  return rep;
}

int total_vorticity_laurent(const AngularState& state) {
  const ShellPolynomial g = shell_polynomial(state);
  // winding of f = z^{-m} g(z^2) on |z| = 1: zeros minus the order-m pole
  const double cycles = detail::unwrap_cycles(
      [&](double t) {
        Complex acc(0.0, 0.0);
        for (int k = 0; k <= g.m; ++k)
          acc += g.coeffs[k] * std::polar(1.0, (2 * k - g.m) * kTwoPi * t);
        return acc;
      },
      std::max(64, 16 * (g.m + 1)));
  return snap_integer(cycles, 1e-6, "Laurent");
}

VorticityHistogram sample_vorticity_distribution(int m, long long n_samples, std::uint64_t seed) {
  if (n_samples < 0) throw std::invalid_argument("sample count must be >= 0");
  VorticityHistogram hist;
  hist.m = m;
  hist.samples = n_samples;
  hist.seed = seed;

  std::vector<int> vorticity(n_samples);
  std::vector<int> retries(n_samples, 0);
  parallel_for(static_cast<std::size_t>(n_samples), [&](std::size_t i) {
    const std::uint64_t slot = rng::derive_seed(seed, i);
    for (int attempt = 0;; ++attempt) {
      if (attempt > 1000)
        throw AttemptsExhaustedError("vorticity sampling slot kept hitting the circle margin");
      const AngularState st = random_state(m, rng::derive_seed(slot, attempt));
      try {
        vorticity[i] = total_vorticity_theorem(st).n;
        retries[i] = attempt;
        return;
      } catch (const ZeroNearCircleError&) {
      } catch (const EmptyShellError&) {
      }
    }
  });

  for (long long i = 0; i < n_samples; ++i) {
    ++hist.counts[vorticity[i]];
    hist.resampled += retries[i];
  }
  return hist;
}

AngularState generate_state_with_vorticity(int m, int target_n, std::uint64_t seed,
                                           long long max_attempts) {
  if (std::abs(target_n) > m || ((target_n - m) % 2) != 0)
    throw std::invalid_argument("vorticity " + std::to_string(target_n) +
                                " is not attainable at shell " + std::to_string(m) +
                                "; allowed: -m, -m+2, ..., m");
  for (long long attempt = 0; attempt < max_attempts; ++attempt) {
    const AngularState st = random_state(m, rng::derive_seed(seed, attempt));
    try {
      if (total_vorticity_theorem(st).n == target_n) return st;
    } catch (const ZeroNearCircleError&) {
    } catch (const EmptyShellError&) {
    }
  }
  throw AttemptsExhaustedError("no state with vorticity " + std::to_string(target_n) +
                               " at shell " + std::to_string(m) + " within " +
                               std::to_string(max_attempts) + " attempts");
}

}  // namespace qrelax
