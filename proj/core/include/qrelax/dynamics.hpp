#pragma once

#include <functional>
#include <vector>

#include "qrelax/basis.hpp"

namespace qrelax {

struct Velocity {
  double eta_dot = 0.0;
  double phi_dot = 0.0;
};

struct CartesianVelocity {
  double x_dot = 0.0;
  double y_dot = 0.0;
};

struct IntegratorConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = 0.01 * kTwoPi;
  double min_step = 1e-12;
  int max_rejects = 60;                 // consecutive rejections before giving up
  double node_floor_factor = 1e-20;     // abort when |psi|^2 < factor * bound(eta)^2
};

enum class TrajectoryStatus {
  completed,
  aborted_near_node,
  step_underflow,
};

struct TrajectorySample {
  double T;
  PolarPoint p;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  TrajectoryStatus status = TrajectoryStatus::completed;
};

// Common period of every superposition: all basis phases advance by integer
// multiples of 2*pi over T -> T + 2*pi.
inline constexpr double period(const AngularState&) { return kTwoPi; }

// de Broglie guidance velocity (eta_dot, phi_dot) at a configuration-space
// point.  Throws NodeProximityError near a node of psi.
Velocity velocity(const AngularState& state, const PolarPoint& p, double T);
CartesianVelocity velocity_cartesian(const AngularState& state, const CartesianPoint& q, double T);

// Reusable right-hand side for trajectory integration: one angular-basis
// evaluator plus a Cartesian fallback for the coordinate singularity at the
// origin.
class GuidanceField {
 public:
  explicit GuidanceField(const AngularState& state, double node_floor_factor = 1e-20);

  CartesianVelocity velocity(const CartesianPoint& q, double T) const;

  const WaveFunction& wave_function() const { return wf_; }

 private:
  WaveFunction wf_;
  CartesianWaveFunction cwf_;
  double floor_factor_;
};

struct StepResult {
  CartesianPoint q;      // proposed end point
  PolarPoint p;          // same point in polar form
  double error = 0.0;    // scaled error estimate of the attempt (accept iff <= 1)
  double h_next = 0.0;   // controller's suggestion for the next step
  bool accepted = false;
};

// One embedded Cash-Karp 5(4) attempt from (q, T) with step h.  prev_error
// feeds the PI step-size controller; pass 1 when there is no history.
StepResult step(const GuidanceField& field, const CartesianPoint& q, double T, double h,
                const IntegratorConfig& cfg, double prev_error = 1.0);
StepResult step(const AngularState& state, const PolarPoint& p, double T, double h,
                const IntegratorConfig& cfg = {});

// Adaptive integration of the guidance equation from T0 to T1 (either
// direction).  Samples are recorded at every accepted step.  Near-node
// aborts and step underflow are reported in the status, with samples up to
// the failure point retained.
Trajectory evolve(const AngularState& state, const PolarPoint& p0, double T0, double T1,
                  const IntegratorConfig& cfg = {});

// Sink form used by the drift and relaxation experiments: fn(T, q) is called
// at T0 and after every accepted step; nothing is stored.
TrajectoryStatus evolve_with_sink(const GuidanceField& field, const CartesianPoint& q0,
                                  double T0, double T1, const IntegratorConfig& cfg,
                                  const std::function<void(double, const CartesianPoint&)>& fn);

}  // namespace qrelax
