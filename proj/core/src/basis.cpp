#include "qrelax/basis.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qrelax {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int j = 2; j <= n; ++j) f *= j;
  return f;
}

double binom(int n, int r) {
  if (r < 0 || r > n) return 0.0;
  double b = 1.0;
  for (int j = 0; j < r; ++j) b = b * (n - j) / (j + 1);
  return b;
}

void check_indices(int nd, int ng) {
  if (nd < 0 || ng < 0)
    throw std::invalid_argument("basis indices must be >= 0");
}

void check_evaluator_shell(int m) {
  if (m > kMaxShell)
    throw std::invalid_argument("shell " + std::to_string(m) + " exceeds evaluator cap " +
                                std::to_string(kMaxShell));
}

const Complex kIPow[4] = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};

inline Complex ipow(int t) { return kIPow[((t % 4) + 4) % 4]; }

}  // namespace

double RadialPoly::value(double eta) const {
  const double t = eta * eta;
  double s = 0.0;
  for (int k = static_cast<int>(a.size()) - 1; k >= 0; --k) s = s * t + a[k];
  double pw = 1.0;
  for (int j = 0; j < ell; ++j) pw *= eta;
  return pw * s;
}

double RadialPoly::derivative(double eta) const {
  const double t = eta * eta;
  double P = 0.0, dP = 0.0;
  for (int k = static_cast<int>(a.size()) - 1; k >= 1; --k) dP = dP * t + k * a[k];
  for (int k = static_cast<int>(a.size()) - 1; k >= 0; --k) P = P * t + a[k];
  if (ell == 0) return 2.0 * eta * dP;
  double pw = 1.0;
  for (int j = 0; j < ell - 1; ++j) pw *= eta;
  return pw * (ell * P + 2.0 * t * dP);
}

RadialPoly make_radial_poly(int nd, int ng) {
  check_indices(nd, ng);
  const int p = std::min(nd, ng);
  const int ell = std::abs(nd - ng);

  double norm = 1.0;  // p!/(p+ell)!
  for (int j = 1; j <= ell; ++j) norm /= (p + j);
  norm = std::sqrt(norm);

  RadialPoly poly;
  poly.ell = ell;
  poly.a.resize(p + 1);
  for (int k = 0; k <= p; ++k) {
    const double sign = ((p + k) % 2 == 0) ? 1.0 : -1.0;
    poly.a[k] = sign * norm * binom(p + ell, p - k) / factorial(k);
  }
  return poly;
}

double eval_f(int nd, int ng, double eta) { return make_radial_poly(nd, ng).value(eta); }

WaveFunction::WaveFunction(AngularState state) : state_(std::move(state)) {
  check_evaluator_shell(state_.m);
  for (int s = 0; s <= state_.m; ++s) {
    for (int nd = 0; nd <= s; ++nd) {
      const int ng = s - nd;
      const Complex c = state_.at(nd, ng);
      if (c == Complex(0.0, 0.0)) continue;
      terms_.push_back({c, std::abs(c), nd - ng, s, make_radial_poly(nd, ng)});
    }
  }
}

Complex WaveFunction::envelope(const PolarPoint& p, double T) const {
  std::array<Complex, kMaxShell + 1> eiphi, eiT;
  eiphi[0] = eiT[0] = Complex(1.0, 0.0);
  const Complex u = std::polar(1.0, p.phi);
  const Complex w = std::polar(1.0, -T);
  for (int k = 1; k <= state_.m; ++k) {
    eiphi[k] = eiphi[k - 1] * u;
    eiT[k] = eiT[k - 1] * w;
  }
  Complex acc(0.0, 0.0);
  for (const Term& t : terms_) {
    const Complex ang = (t.k >= 0) ? eiphi[t.k] : std::conj(eiphi[-t.k]);
    acc += t.coef * ang * eiT[t.s] * t.f.value(p.eta);
  }
  return acc;
}

Complex WaveFunction::psi(const PolarPoint& p, double T) const {
  return envelope(p, T) * chi00(p.eta);
}

PsiPolar WaveFunction::envelope_and_grad(const PolarPoint& p, double T) const {
  std::array<Complex, kMaxShell + 1> eiphi, eiT;
  eiphi[0] = eiT[0] = Complex(1.0, 0.0);
  const Complex u = std::polar(1.0, p.phi);
  const Complex w = std::polar(1.0, -T);
  for (int k = 1; k <= state_.m; ++k) {
    eiphi[k] = eiphi[k - 1] * u;
    eiT[k] = eiT[k - 1] * w;
  }
  Complex env(0.0, 0.0), de(0.0, 0.0), dp(0.0, 0.0);
  double bound = 0.0;
  for (const Term& t : terms_) {
    const double f = t.f.value(p.eta);
    const Complex ang = (t.k >= 0) ? eiphi[t.k] : std::conj(eiphi[-t.k]);
    const Complex ct = t.coef * ang * eiT[t.s];
    env += ct * f;
    de += ct * t.f.derivative(p.eta);
    dp += ct * Complex(0.0, static_cast<double>(t.k)) * f;
    bound += t.abs_coef * std::abs(f);
  }
  return {env, de, dp, bound};
}

PsiPolar WaveFunction::psi_and_grad(const PolarPoint& p, double T) const {
  const PsiPolar e = envelope_and_grad(p, T);
  const double g = chi00(p.eta);
  return {e.psi * g, (e.d_eta - p.eta * e.psi) * g, e.d_phi * g, e.bound * g};
}

double WaveFunction::amplitude_bound(double eta) const {
  double bound = 0.0;
  for (const Term& t : terms_) bound += t.abs_coef * std::abs(t.f.value(eta));
  return bound * chi00(eta);
}

CartesianWaveFunction::CartesianWaveFunction(CartesianState state) : state_(std::move(state)) {
  check_evaluator_shell(state_.m);
  for (int s = 0; s <= state_.m; ++s) {
    for (int nx = 0; nx <= s; ++nx) {
      const int ny = s - nx;
      const Complex c = state_.at(nx, ny);
      if (c == Complex(0.0, 0.0)) continue;
      const double norm = std::sqrt(std::pow(2.0, s) * factorial(nx) * factorial(ny));
      terms_.push_back({c / norm, nx, ny, s});
    }
  }
}

namespace {

// Physicists' Hermite polynomials H_0..H_m at x.
inline void hermite_row(int m, double x, std::array<double, kMaxShell + 1>& H) {
  H[0] = 1.0;
  if (m >= 1) H[1] = 2.0 * x;
  for (int n = 1; n < m; ++n) H[n + 1] = 2.0 * x * H[n] - 2.0 * n * H[n - 1];
}

}  // namespace

Complex CartesianWaveFunction::psi(const CartesianPoint& q, double T) const {
  std::array<double, kMaxShell + 1> Hx, Hy;
  hermite_row(state_.m, q.x, Hx);
  hermite_row(state_.m, q.y, Hy);
  std::array<Complex, kMaxShell + 1> eiT;
  eiT[0] = Complex(1.0, 0.0);
  const Complex w = std::polar(1.0, -T);
  for (int k = 1; k <= state_.m; ++k) eiT[k] = eiT[k - 1] * w;

  Complex acc(0.0, 0.0);
  for (const Term& t : terms_) acc += t.coef * eiT[t.s] * Hx[t.nx] * Hy[t.ny];
  return acc * chi00(std::hypot(q.x, q.y));
}

PsiCartesian CartesianWaveFunction::psi_and_grad(const CartesianPoint& q, double T) const {
  std::array<double, kMaxShell + 1> Hx, Hy;
  hermite_row(state_.m, q.x, Hx);
  hermite_row(state_.m, q.y, Hy);
  std::array<Complex, kMaxShell + 1> eiT;
  eiT[0] = Complex(1.0, 0.0);
  const Complex w = std::polar(1.0, -T);
  for (int k = 1; k <= state_.m; ++k) eiT[k] = eiT[k - 1] * w;

  Complex psi(0.0, 0.0), dx(0.0, 0.0), dy(0.0, 0.0);
  for (const Term& t : terms_) {
    const Complex ct = t.coef * eiT[t.s];
    const double hx = Hx[t.nx], hy = Hy[t.ny];
    // d/dx [H_n(x) e^{-x^2/2}] = (2n H_{n-1}(x) - x H_n(x)) e^{-x^2/2}
    const double hxp = (t.nx > 0 ? 2.0 * t.nx * Hx[t.nx - 1] : 0.0) - q.x * hx;
    const double hyp = (t.ny > 0 ? 2.0 * t.ny * Hy[t.ny - 1] : 0.0) - q.y * hy;
    psi += ct * hx * hy;
    dx += ct * hxp * hy;
    dy += ct * hx * hyp;
  }
  const double g = chi00(std::hypot(q.x, q.y));
  return {psi * g, dx * g, dy * g};
}

Complex eval_psi_angular(const AngularState& state, const PolarPoint& p, double T) {
  return WaveFunction(state).psi(p, T);
}

Complex eval_psi_cartesian(const CartesianState& state, const CartesianPoint& q, double T) {
  return CartesianWaveFunction(state).psi(q, T);
}

PsiPolar grad_psi(const AngularState& state, const PolarPoint& p, double T) {
  return WaveFunction(state).psi_and_grad(p, T);
}

std::vector<std::vector<Complex>> shell_transform(int s) {
  if (s < 0) throw std::invalid_argument("shell index must be >= 0");
  std::vector<std::vector<Complex>> U(s + 1, std::vector<Complex>(s + 1));
  const double pref = std::pow(2.0, -0.5 * s);
  for (int p = 0; p <= s; ++p) {
    const int q = s - p;
    for (int nd = 0; nd <= s; ++nd) {
      const int ng = s - nd;
      Complex sum(0.0, 0.0);
      for (int j = std::max(0, p - ng); j <= std::min(p, nd); ++j) {
        const int k = p - j;
        sum += binom(nd, j) * binom(ng, k) * ipow(nd - j) * std::conj(ipow(ng - k));
      }
      U[p][nd] = pref *
                 std::sqrt(factorial(p) * factorial(q) / (factorial(nd) * factorial(ng))) * sum;
    }
  }
  return U;
}

CartesianState angular_to_cartesian(const AngularState& state) {
  CartesianState out(state.m);
  for (int s = 0; s <= state.m; ++s) {
    const auto U = shell_transform(s);
    for (int p = 0; p <= s; ++p) {
      Complex acc(0.0, 0.0);
      for (int nd = 0; nd <= s; ++nd) acc += U[p][nd] * state.at(nd, s - nd);
      out.at(p, s - p) = acc;
    }
  }
  return out;
}

AngularState cartesian_to_angular(const CartesianState& state) {
  AngularState out(state.m);
  for (int s = 0; s <= state.m; ++s) {
    const auto U = shell_transform(s);
    for (int nd = 0; nd <= s; ++nd) {
      Complex acc(0.0, 0.0);
      for (int p = 0; p <= s; ++p) acc += std::conj(U[p][nd]) * state.at(p, s - p);
      out.at(nd, s - nd) = acc;
    }
  }
  return out;
}

}  // namespace qrelax
