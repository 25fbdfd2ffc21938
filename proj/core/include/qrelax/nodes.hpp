#pragma once

#include <optional>

#include "qrelax/basis.hpp"

namespace qrelax {

struct Node {
  CartesianPoint position;
  double T = 0.0;
  int winding = 0;        // phase circulation in units of 2*pi
  double residual = 0.0;  // |psi| at the converged position
};

struct NodeSearchStats {
  int candidate_cells = 0;
  int singular_seeds = 0;   // Newton seeds discarded on a singular Jacobian
  int newton_failures = 0;
  int merged = 0;
  int densify_rounds = 0;
  double amplitude_scale = 0.0;
  bool closure_checked = false;  // exclusion certificate + theorem vorticity available
  bool closure_passed = true;    // winding-sum closure of the returned set
};

struct SearchRegion {
  double eta_max = 0.0;  // <= 0 selects the certified node-exclusion radius
};

// All nodes of psi at time T inside eta <= region.eta_max; with the default
// region, every node the state has.  Sign-change cells of Re / Im on a seed
// grid over the disk eta <= m + 6 feed a damped Newton iteration on the
// envelope psi / chi00; beyond the grid, the envelope restricted to each
// circle of a log-spaced radial ladder is a trigonometric polynomial whose
// near-unit-modulus roots seed the same Newton iteration.  Converged roots
// are deduplicated within 1e-6 and validated against the vorticity theorem
// (winding closure), densifying the seeding on mismatch.
std::vector<Node> find_nodes(const AngularState& state, double T, SearchRegion region = {},
                             int seed_density = 60, double tol = 1e-12,
                             NodeSearchStats* stats = nullptr);

// Phase circulation of psi around a small circle centred on a node, by
// adaptive unwrapping; result snaps to an integer multiple of 2*pi.
int node_winding(const AngularState& state, const CartesianPoint& node, double T,
                 double radius = 1e-4);

// Winding sign from the first spatial derivatives at the node: the
// orientation of the local linearization psi ~ a_x dx + a_y dy.  Throws
// FineTunedError for degenerate (non-transversal) nodes.
int node_winding_sign_linearized(const AngularState& state, const CartesianPoint& node, double T);

struct TrackSample {
  double T;
  CartesianPoint position;
};

struct NodeEvent {
  double T = 0.0;
  int partner = -1;  // track id of the opposite-winding partner
};

struct NodeTrack {
  int id = 0;
  int winding = 0;
  std::vector<TrackSample> samples;
  std::optional<NodeEvent> birth;  // absent: alive at T0
  std::optional<NodeEvent> death;  // absent: alive at T1
};

// Follow every node from T0 to T1, sampling at steps of dt and refining
// between frames whenever nearest-neighbour association is ambiguous or
// nodes appear/disappear.  Pair creation and annihilation events are
// recorded with opposite-winding partners.
std::vector<NodeTrack> track_nodes(const AngularState& state, double T0, double T1,
                                   double dt = kTwoPi / 2000.0, SearchRegion region = {},
                                   int seed_density = 60);

// Closed-form node path for an m = 1 superposition (three basis states) in
// terms of the Cartesian-basis amplitudes d e^{i theta}.  Throws
// FineTunedError when the two excited amplitudes are collinear.
CartesianPoint node_path_m3(const AngularState& state, double T);

enum class EllipseKind { Ellipse, Circle, Degenerate };

struct EllipseM3 {
  EllipseKind kind = EllipseKind::Ellipse;
  double semi_major = 0.0;
  double semi_minor = 0.0;
  double orientation = 0.0;  // major-axis direction, mod pi; 0 for circles
  double area = 0.0;
};

// Geometry of the m = 1 node orbit from the angular-basis magnitudes:
// semi-minor c00/(c10+c01), semi-major c00/|c10-c01|, a circle when either
// excited amplitude vanishes, degenerate when |c10 - c01| < 1e-12.
EllipseM3 node_ellipse_m3(const AngularState& state);

}  // namespace qrelax
