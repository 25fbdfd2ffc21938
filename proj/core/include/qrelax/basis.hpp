#pragma once

#include <vector>

#include "qrelax/geometry.hpp"
#include "qrelax/state.hpp"

namespace qrelax {

// Largest shell index supported by the stack-allocated evaluation buffers.
inline constexpr int kMaxShell = 32;

// Radial factor of chi_{nd,ng}: f(eta) = eta^ell * sum_k a[k] * eta^(2k),
// ell = |nd - ng|, k = 0..min(nd, ng).
struct RadialPoly {
  int ell = 0;
  std::vector<double> a;

  double value(double eta) const;
  double derivative(double eta) const;
};

RadialPoly make_radial_poly(int nd, int ng);

// f_{nd,ng}(eta); f_{0,0} = 1, f_{1,1}(eta) = eta^2 - 1, ...
double eval_f(int nd, int ng, double eta);

// Ground state chi_00(eta) = exp(-eta^2/2)/sqrt(pi), unit L2 norm in the
// plane measure eta deta dphi.
inline double chi00(double eta) {
  return std::exp(-0.5 * eta * eta) * 0.5641895835477562869480795;  // 1/sqrt(pi)
}

struct PsiPolar {
  Complex psi;
  Complex d_eta;  // partial wrt eta
  Complex d_phi;  // partial wrt phi
  double bound;   // chi00(eta) * sum_k |C_k| |f_k(eta)|  >=  |psi| at this radius
};

struct PsiCartesian {
  Complex psi;
  Complex d_x;
  Complex d_y;
};

// Angular-basis evaluator.  Radial polynomials are prepared once per state;
// evaluation at a point costs O(M) with no allocation.
class WaveFunction {
 public:
  explicit WaveFunction(AngularState state);

  Complex psi(const PolarPoint& p, double T) const;
  PsiPolar psi_and_grad(const PolarPoint& p, double T) const;

  // psi / chi00: same zeros and phase as psi, but polynomially bounded, so it
  // stays evaluable at radii where the Gaussian underflows to zero.  The
  // gradient fields and bound refer to the envelope itself (no chi00 factor).
  Complex envelope(const PolarPoint& p, double T) const;
  PsiPolar envelope_and_grad(const PolarPoint& p, double T) const;

  // Upper bound on |psi(eta, phi, T)| over all phi and T at fixed radius.
  double amplitude_bound(double eta) const;

  const AngularState& state() const { return state_; }

 private:
  struct Term {
    Complex coef;
    double abs_coef;
    int k;  // nd - ng, angular factor exp(i k phi)
    int s;  // nd + ng, time factor exp(-i s T)
    RadialPoly f;
  };

  AngularState state_;
  std::vector<Term> terms_;
};

// Cartesian-basis evaluator via the Hermite recurrence.  Exact at the origin
// where polar derivatives degenerate.
class CartesianWaveFunction {
 public:
  explicit CartesianWaveFunction(CartesianState state);

  Complex psi(const CartesianPoint& q, double T) const;
  PsiCartesian psi_and_grad(const CartesianPoint& q, double T) const;

  const CartesianState& state() const { return state_; }

 private:
  struct Term {
    Complex coef;  // C / sqrt(2^(nx+ny) nx! ny!)
    int nx, ny;
    int s;  // nx + ny
  };

  CartesianState state_;
  std::vector<Term> terms_;
};

Complex eval_psi_angular(const AngularState& state, const PolarPoint& p, double T);
Complex eval_psi_cartesian(const CartesianState& state, const CartesianPoint& q, double T);

// (d_eta psi, d_phi psi) for an angular-basis state.
PsiPolar grad_psi(const AngularState& state, const PolarPoint& p, double T);

// Shell-diagonal unitary change of basis between chi_{nd,ng} and psi_{nx,ny}.
CartesianState angular_to_cartesian(const AngularState& state);
AngularState cartesian_to_angular(const CartesianState& state);

// Row p, column nd of the shell-s block: D_{p,s-p} = sum_nd U[p][nd] C_{nd,s-nd}.
std::vector<std::vector<Complex>> shell_transform(int s);

}  // namespace qrelax
