#include "qrelax/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qrelax/errors.hpp"

namespace qrelax {

namespace {

struct Vec2 {
  double x = 0.0, y = 0.0;
};

inline Vec2 axpy(const CartesianPoint& q, double h, double a1, const Vec2& k1) {
  return {q.x + h * a1 * k1.x, q.y + h * a1 * k1.y};
}

// Cash-Karp 5(4) tableau
constexpr double kC2 = 1.0 / 5, kC3 = 3.0 / 10, kC4 = 3.0 / 5, kC5 = 1.0, kC6 = 7.0 / 8;
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 3.0 / 10, kA42 = -9.0 / 10, kA43 = 6.0 / 5;
constexpr double kA51 = -11.0 / 54, kA52 = 5.0 / 2, kA53 = -70.0 / 27, kA54 = 35.0 / 27;
constexpr double kA61 = 1631.0 / 55296, kA62 = 175.0 / 512, kA63 = 575.0 / 13824,
                 kA64 = 44275.0 / 110592, kA65 = 253.0 / 4096;
constexpr double kB1 = 37.0 / 378, kB3 = 250.0 / 621, kB4 = 125.0 / 594, kB6 = 512.0 / 1771;
constexpr double kE1 = kB1 - 2825.0 / 27648, kE3 = kB3 - 18575.0 / 48384,
                 kE4 = kB4 - 13525.0 / 55296, kE5 = -277.0 / 14336, kE6 = kB6 - 1.0 / 4;

inline void check_amplitude(double psi_sq, double bound, double floor_factor) {
  if (!(psi_sq > 0.0) || psi_sq < floor_factor * bound * bound)
    throw NodeProximityError("|psi|^2 below the near-node floor");
}

}  // namespace

GuidanceField::GuidanceField(const AngularState& state, double node_floor_factor)
    : wf_(state), cwf_(angular_to_cartesian(state)), floor_factor_(node_floor_factor) {}

CartesianVelocity GuidanceField::velocity(const CartesianPoint& q, double T) const {
  const double eta_sq = q.x * q.x + q.y * q.y;
  const double eta = std::sqrt(eta_sq);
  if (eta < 1e-8) {
    // polar derivatives degenerate at the origin; use the Cartesian basis
    const PsiCartesian r = cwf_.psi_and_grad(q, T);
    const double psi_sq = std::norm(r.psi);
    const double bound = wf_.amplitude_bound(eta);
    check_amplitude(psi_sq, bound, floor_factor_);
    const Complex inv = std::conj(r.psi) / psi_sq;
    return {std::imag(r.d_x * inv), std::imag(r.d_y * inv)};
  }
  const PsiPolar r = wf_.psi_and_grad({eta, std::atan2(q.y, q.x)}, T);
  const double psi_sq = std::norm(r.psi);
  check_amplitude(psi_sq, r.bound, floor_factor_);
  const Complex inv = std::conj(r.psi) / psi_sq;
  const double eta_dot = std::imag(r.d_eta * inv);
  const double phi_dot = std::imag(r.d_phi * inv) / eta_sq;
  const double c = q.x / eta, s = q.y / eta;
  return {eta_dot * c - eta * phi_dot * s, eta_dot * s + eta * phi_dot * c};
}

Velocity velocity(const AngularState& state, const PolarPoint& p, double T) {
  const PsiPolar r = WaveFunction(state).psi_and_grad(p, T);
  const double psi_sq = std::norm(r.psi);
  check_amplitude(psi_sq, r.bound, 1e-20);
  const Complex inv = std::conj(r.psi) / psi_sq;
  return {std::imag(r.d_eta * inv), std::imag(r.d_phi * inv) / (p.eta * p.eta)};
}

CartesianVelocity velocity_cartesian(const AngularState& state, const CartesianPoint& q, double T) {
  return GuidanceField(state).velocity(q, T);
}

StepResult step(const GuidanceField& field, const CartesianPoint& q, double T, double h,
                const IntegratorConfig& cfg, double prev_error) {
  const auto rhs = [&](double x, double y, double t) -> Vec2 {
    const CartesianVelocity v = field.velocity({x, y}, t);
    return {v.x_dot, v.y_dot};
  };

  const Vec2 k1 = rhs(q.x, q.y, T);
  const Vec2 k2 = rhs(q.x + h * kA21 * k1.x, q.y + h * kA21 * k1.y, T + kC2 * h);
  const Vec2 k3 = rhs(q.x + h * (kA31 * k1.x + kA32 * k2.x), q.y + h * (kA31 * k1.y + kA32 * k2.y),
                      T + kC3 * h);
  const Vec2 k4 = rhs(q.x + h * (kA41 * k1.x + kA42 * k2.x + kA43 * k3.x),
                      q.y + h * (kA41 * k1.y + kA42 * k2.y + kA43 * k3.y), T + kC4 * h);
  const Vec2 k5 = rhs(q.x + h * (kA51 * k1.x + kA52 * k2.x + kA53 * k3.x + kA54 * k4.x),
                      q.y + h * (kA51 * k1.y + kA52 * k2.y + kA53 * k3.y + kA54 * k4.y),
                      T + kC5 * h);
  const Vec2 k6 =
      rhs(q.x + h * (kA61 * k1.x + kA62 * k2.x + kA63 * k3.x + kA64 * k4.x + kA65 * k5.x),
          q.y + h * (kA61 * k1.y + kA62 * k2.y + kA63 * k3.y + kA64 * k4.y + kA65 * k5.y),
          T + kC6 * h);

  StepResult out;
  out.q = {q.x + h * (kB1 * k1.x + kB3 * k3.x + kB4 * k4.x + kB6 * k6.x),
           q.y + h * (kB1 * k1.y + kB3 * k3.y + kB4 * k4.y + kB6 * k6.y)};
  out.p = to_polar(out.q);

  const double ex = h * (kE1 * k1.x + kE3 * k3.x + kE4 * k4.x + kE5 * k5.x + kE6 * k6.x);
  const double ey = h * (kE1 * k1.y + kE3 * k3.y + kE4 * k4.y + kE5 * k5.y + kE6 * k6.y);
  const double sx = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(q.x), std::abs(out.q.x));
  const double sy = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(q.y), std::abs(out.q.y));
  const double rx = ex / sx, ry = ey / sy;
  out.error = std::sqrt(0.5 * (rx * rx + ry * ry));

  double fac;
  if (!std::isfinite(out.error)) {
    out.error = std::numeric_limits<double>::infinity();
    out.accepted = false;
    fac = 0.1;
  } else if (out.error <= 1.0) {
    out.accepted = true;
    // PI controller: safety * err^{-0.7/5} * prev_err^{0.4/5}
    fac = (out.error == 0.0)
              ? 5.0
              : std::clamp(0.9 * std::pow(out.error, -0.14) *
                               std::pow(std::clamp(prev_error, 1e-4, 1.0), 0.08),
                           0.2, 5.0);
  } else {
    out.accepted = false;
    fac = std::clamp(0.9 * std::pow(out.error, -0.2), 0.1, 0.9);
  }
  const double mag = std::min(std::abs(h) * fac, cfg.max_step);
  out.h_next = std::copysign(mag, h);
  return out;
}

StepResult step(const AngularState& state, const PolarPoint& p, double T, double h,
                const IntegratorConfig& cfg) {
  const GuidanceField field(state, cfg.node_floor_factor);
  return step(field, to_cartesian(p), T, h, cfg, 1.0);
}

TrajectoryStatus evolve_with_sink(const GuidanceField& field, const CartesianPoint& q0, double T0,
                                  double T1, const IntegratorConfig& cfg,
                                  const std::function<void(double, const CartesianPoint&)>& fn) {
  const double dir = (T1 >= T0) ? 1.0 : -1.0;
  CartesianPoint q = q0;
  double T = T0;
  fn(T, q);
  if (T1 == T0) return TrajectoryStatus::completed;

  double h = std::copysign(std::min(cfg.max_step, std::abs(T1 - T0)), dir);
  double prev_error = 1.0;
  int rejects = 0;

  try {
    for (;;) {
      bool last = false;
      double h_try = h;
      if (dir * (T + h_try - T1) >= 0.0) {
        h_try = T1 - T;
        last = true;
      }
      const StepResult r = step(field, q, T, h_try, cfg, prev_error);
      if (r.accepted) {
        T = last ? T1 : T + h_try;
        q = r.q;
        fn(T, q);
        if (last) return TrajectoryStatus::completed;
        prev_error = r.error;
        h = r.h_next;
        rejects = 0;
      } else {
        ++rejects;
        h = r.h_next;
        if (std::abs(h) < cfg.min_step || rejects > cfg.max_rejects)
          return TrajectoryStatus::step_underflow;
      }
    }
  } catch (const NodeProximityError&) {
    return TrajectoryStatus::aborted_near_node;
  }
}

Trajectory evolve(const AngularState& state, const PolarPoint& p0, double T0, double T1,
                  const IntegratorConfig& cfg) {
  const GuidanceField field(state, cfg.node_floor_factor);
  Trajectory out;
  bool first = true;
  out.status = evolve_with_sink(field, to_cartesian(p0), T0, T1, cfg,
                                [&](double T, const CartesianPoint& q) {
                                  out.samples.push_back({T, first ? p0 : to_polar(q)});
                                  first = false;
                                });
  return out;
}

}  // namespace qrelax
