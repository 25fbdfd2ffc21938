#pragma once

#include <iosfwd>
#include <string>
#include <variant>

#include "qrelax/state.hpp"

namespace qrelax {

using AnyState = std::variant<AngularState, CartesianState>;

// JSON state files:
//   {"basis": "angular", "m": 2, "coefficients":
//     [{"nd": 0, "ng": 0, "re": 0.5, "im": 0.0}, ...]}
// Cartesian files use keys "nx"/"ny".  Omitted coefficients are zero;
// duplicate or out-of-range indices are schema errors.  The squared norm
// must be within 1e-9 of 1 unless renormalize is set.
AnyState load_state(std::istream& is, bool renormalize = false);
AnyState load_state_file(const std::string& path, bool renormalize = false);

// Any loaded state as an angular superposition.
AngularState load_angular_state_file(const std::string& path, bool renormalize = false);

void save_state(const AngularState& state, std::ostream& os);
void save_state(const CartesianState& state, std::ostream& os);
void save_state_file(const AngularState& state, const std::string& path);
void save_state_file(const CartesianState& state, const std::string& path);

}  // namespace qrelax
