#pragma once

#include <iosfwd>
#include <string>

#include "qrelax/dynamics.hpp"

namespace qrelax {

// Uniform polar grid: rows at eta_min + i*(eta_max-eta_min)/(n_eta-1),
// columns at j*2*pi/n_phi.
struct GridSpec {
  double eta_min = 5.0;
  double eta_max = 20.0;
  int n_eta = 64;
  int n_phi = 64;

  double eta(int i) const { return eta_min + i * (eta_max - eta_min) / (n_eta - 1); }
  double phi(int j) const { return j * kTwoPi / n_phi; }
  int cells() const { return n_eta * n_phi; }
  void validate() const;  // throws std::invalid_argument
};

enum class CellStatus : unsigned char { ok, aborted_near_node };

// One-period displacement map: cell (i, j) holds the change in (eta, phi)
// of the trajectory launched at grid point (i, j) at time T0.  d_phi is
// accumulated continuously (not wrapped).
struct DriftField {
  GridSpec grid;
  double T0 = 0.0;
  std::vector<double> d_eta;
  std::vector<double> d_phi;
  std::vector<CellStatus> status;

  int index(int i, int j) const { return i * grid.n_phi + j; }
  int aborted_cells() const;
};

DriftField compute_drift_field(const AngularState& state, const GridSpec& grid,
                               const IntegratorConfig& cfg = {}, double T0 = 0.0);

struct DriftDecomposition {
  double max_abs_d_eta = 0.0;
  double max_abs_d_phi = 0.0;
  double inward_fraction = 0.0;  // completed cells with d_eta < 0
  int completed_cells = 0;
  int aborted_cells = 0;
};

DriftDecomposition decompose(const DriftField& field);

enum class DriftKind { Type0, Type1, Type2, Unclassified };

const char* to_string(DriftKind kind);

struct DriftClass {
  DriftKind kind = DriftKind::Unclassified;
  int sign_changes = 0;                    // cyclic sign changes of d_phi per ring
  std::vector<double> attractive_axes;     // axis directions mod pi
  std::vector<double> repulsive_axes;
  bool mechanism_aligned = false;          // radial drift inward at attractive axes,
                                           // outward at repulsive ones, on every ring
  std::vector<double> probe_radii_used;    // rings that survived the abort filter
  std::vector<int> ring_sign_changes;      // per surviving ring, for diagnostics
};

// Classify the angular-drift sign pattern on probe rings (nearest grid rows).
// Rings with more than 5% aborted cells are skipped; sign changes are counted
// after suppressing |d_phi| below dead_zone * ring max.  Disagreeing rings
// yield Unclassified with per-ring diagnostics.
DriftClass classify(const DriftField& field, const std::vector<double>& probe_radii = {8.0, 10.0, 12.0},
                    double dead_zone = 1e-3);

struct RadialDriftRow {
  double eta_initial = 0.0;
  double phi_initial = 0.0;
  double eta_final = 0.0;
  TrajectoryStatus status = TrajectoryStatus::completed;
};

struct RadialDriftResult {
  std::vector<RadialDriftRow> rows;
  int completed = 0;
  int aborted = 0;
  double median_d_eta = 0.0;  // over completed trajectories
  double q1_d_eta = 0.0;
  double q3_d_eta = 0.0;
};

// Ensemble of trajectories launched uniformly (by area) in the annulus
// [eta_lo, eta_hi], integrated for n_periods common periods; summarizes the
// net radial displacement distribution.
RadialDriftResult radial_drift_experiment(const AngularState& state, int n_trajectories,
                                          double eta_lo, double eta_hi, int n_periods,
                                          std::uint64_t seed, const IntegratorConfig& cfg = {});

void write_field_csv(const DriftField& field, std::ostream& os);
DriftField read_field_csv(std::istream& is);  // throws SchemaError

std::string classification_json(const DriftClass& cls);

}  // namespace qrelax
