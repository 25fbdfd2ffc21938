#pragma once

// Internal: far-field structure of the envelope psi / chi00.

#include <utility>
#include <vector>

#include "qrelax/basis.hpp"

namespace qrelax::detail {

// E(eta, phi, T) = eta^m L(phi) e^{-imT} + lower powers of eta, where
// |L(phi)| = |g(e^{2 i phi})|.  Both |g| and the absolute tail bound are time
// independent, so one analysis serves every frame.
struct FarField {
  int m = 0;                                 // highest populated shell
  std::vector<Complex> g;                    // g(z) = sum_k g[k] z^k
  double lip = 0.0;                          // |dg/dtheta| bound on the unit circle
  std::vector<std::pair<double, int>> tail;  // (absolute coefficient, power of eta)

  Complex top_form(double theta) const;  // g(e^{i theta})
  double tail_bound(double eta) const;   // >= |E - leading term| for all phi, T
};

// Throws EmptyShellError when the state carries no amplitude at all.
FarField far_field(const AngularState& state);

// Smallest R >= R_start with R^m min|L| > 2 tail_bound(R): the exterior
// eta >= R is node free at every time, because the margin only grows with
// the radius.  Throws ZeroNearCircleError when min|L| cannot be bounded away
// from zero and AmbiguousWindingError when R leaves the double range.
double certified_exclusion_radius(const FarField& ff, double R_start);

}  // namespace qrelax::detail
