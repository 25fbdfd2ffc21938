#include "qrelax/drift.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "qrelax/errors.hpp"
#include "qrelax/parallel.hpp"

namespace qrelax {

void GridSpec::validate() const {
  if (!(eta_min >= 1.0))
    throw std::invalid_argument("grid eta_min must be >= 1 (outside the bulk)");
  if (!(eta_max > eta_min)) throw std::invalid_argument("grid eta_max must exceed eta_min");
  if (n_eta < 8 || n_phi < 8) throw std::invalid_argument("grid needs at least 8 rows and 8 columns");
}

int DriftField::aborted_cells() const {
  int n = 0;
  for (CellStatus s : status)
    if (s == CellStatus::aborted_near_node) ++n;
  return n;
}

DriftField compute_drift_field(const AngularState& state, const GridSpec& grid,
                               const IntegratorConfig& cfg, double T0) {
  grid.validate();
  const GuidanceField field(state, cfg.node_floor_factor);

  DriftField out;
  out.grid = grid;
  out.T0 = T0;
  out.d_eta.assign(grid.cells(), 0.0);
  out.d_phi.assign(grid.cells(), 0.0);
  out.status.assign(grid.cells(), CellStatus::ok);

  parallel_for(static_cast<std::size_t>(grid.cells()), [&](std::size_t cell) {
    const int i = static_cast<int>(cell) / grid.n_phi;
    const int j = static_cast<int>(cell) % grid.n_phi;
    const double eta0 = grid.eta(i);
    const double phi0 = grid.phi(j);
    const CartesianPoint q0 = to_cartesian({eta0, phi0});

    double phi_prev = phi0, phi_acc = 0.0, eta_end = eta0;
    const TrajectoryStatus st = evolve_with_sink(
        field, q0, T0, T0 + kTwoPi, cfg, [&](double, const CartesianPoint& q) {
          const double a = std::atan2(q.y, q.x);
          phi_acc += wrap_angle(a - phi_prev);
          phi_prev = a;
          eta_end = std::hypot(q.x, q.y);
        });
    if (st == TrajectoryStatus::completed) {
      out.d_eta[cell] = eta_end - eta0;
      out.d_phi[cell] = phi_acc;
    } else {
      out.status[cell] = CellStatus::aborted_near_node;
    }
  });
  return out;
}

DriftDecomposition decompose(const DriftField& field) {
  DriftDecomposition d;
  int inward = 0;
  for (int c = 0; c < field.grid.cells(); ++c) {
    if (field.status[c] != CellStatus::ok) {
      ++d.aborted_cells;
      continue;
    }
    ++d.completed_cells;
    d.max_abs_d_eta = std::max(d.max_abs_d_eta, std::abs(field.d_eta[c]));
    d.max_abs_d_phi = std::max(d.max_abs_d_phi, std::abs(field.d_phi[c]));
    if (field.d_eta[c] < 0.0) ++inward;
  }
  d.inward_fraction = d.completed_cells > 0 ? static_cast<double>(inward) / d.completed_cells : 0.0;
  return d;
}

const char* to_string(DriftKind kind) {
  switch (kind) {
    case DriftKind::Type0: return "Type0";
    case DriftKind::Type1: return "Type1";
    case DriftKind::Type2: return "Type2";
    default: return "Unclassified";
  }
}

namespace {

struct Crossing {
  double angle;   // interpolated zero of d_phi
  double d_eta;   // radial drift interpolated at the crossing
  bool descending;  // + -> -
};

struct RingPattern {
  int sign_changes = 0;
  std::vector<Crossing> crossings;
  bool aligned = true;
};

// Cyclic sign-change pattern of d_phi on one grid row, with |d_phi| below
// dead_zone * ring max suppressed.
std::optional<RingPattern> ring_pattern(const DriftField& field, int row, double dead_zone) {
  const int n = field.grid.n_phi;
  std::vector<int> ok;
  for (int j = 0; j < n; ++j)
    if (field.status[field.index(row, j)] == CellStatus::ok) ok.push_back(j);
  if (n - static_cast<int>(ok.size()) > n / 20) return std::nullopt;  // > 5% aborted

  double ring_max = 0.0;
  for (int j : ok) ring_max = std::max(ring_max, std::abs(field.d_phi[field.index(row, j)]));
  const double dz = dead_zone * ring_max;

  struct Cell {
    double phi, d_phi, d_eta;
  };
  std::vector<Cell> kept;
  for (int j : ok) {
    const int c = field.index(row, j);
    if (std::abs(field.d_phi[c]) > dz)
      kept.push_back({field.grid.phi(j), field.d_phi[c], field.d_eta[c]});
  }

  RingPattern pat;
  if (kept.size() < 2) return pat;  // flat ring: no sign structure

  for (std::size_t a = 0; a < kept.size(); ++a) {
    const Cell& c1 = kept[a];
    const Cell& c2 = kept[(a + 1) % kept.size()];
    if ((c1.d_phi > 0) == (c2.d_phi > 0)) continue;
    ++pat.sign_changes;
    const double gap = wrap_positive(c2.phi - c1.phi);
    const double w = std::abs(c1.d_phi) / (std::abs(c1.d_phi) + std::abs(c2.d_phi));
    Crossing x;
    x.angle = wrap_positive(c1.phi + w * gap);
    x.d_eta = c1.d_eta + w * (c2.d_eta - c1.d_eta);
    x.descending = c1.d_phi > 0;
    pat.crossings.push_back(x);
    if (x.descending ? x.d_eta >= 0.0 : x.d_eta <= 0.0) pat.aligned = false;
  }
  return pat;
}

// Average axis directions (mod pi) that agree within tol.
std::vector<double> cluster_axes(std::vector<double> angles, double tol = 0.35) {
  if (angles.empty()) return {};
  for (double& a : angles) a = wrap_axis(a);
  std::sort(angles.begin(), angles.end());

  // split at the largest cyclic gap, then group by adjacent gaps
  const int n = static_cast<int>(angles.size());
  int split = 0;
  double widest = -1.0;
  for (int i = 0; i < n; ++i) {
    const double gap = (i + 1 < n) ? angles[i + 1] - angles[i] : angles[0] + kPi - angles[n - 1];
    if (gap > widest) {
      widest = gap;
      split = (i + 1) % n;
    }
  }

  std::vector<double> out;
  double sum = 0.0, ref = 0.0;
  int count = 0;
  for (int k = 0; k < n; ++k) {
    double a = angles[(split + k) % n];
    if (count == 0) {
      ref = a;
      sum = a;
      count = 1;
      continue;
    }
    if (a < ref) a += kPi;  // unwrap across the pi boundary
    if (a - (sum / count) <= tol) {
      sum += a;
      ++count;
    } else {
      out.push_back(wrap_axis(sum / count));
      ref = wrap_axis(a);
      sum = ref;
      count = 1;
    }
  }
  if (count > 0) out.push_back(wrap_axis(sum / count));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

DriftClass classify(const DriftField& field, const std::vector<double>& probe_radii,
                    double dead_zone) {
  if (probe_radii.empty()) throw std::invalid_argument("classification needs probe radii");

  DriftClass cls;
  std::vector<RingPattern> rings;
  for (double rho : probe_radii) {
    const double step = (field.grid.eta_max - field.grid.eta_min) / (field.grid.n_eta - 1);
    int row = static_cast<int>(std::lround((rho - field.grid.eta_min) / step));
    row = std::clamp(row, 0, field.grid.n_eta - 1);
    auto pat = ring_pattern(field, row, dead_zone);
    if (!pat) continue;  // ring unusable: too many aborted cells
    rings.push_back(std::move(*pat));
    cls.probe_radii_used.push_back(field.grid.eta(row));
    cls.ring_sign_changes.push_back(rings.back().sign_changes);
  }

  if (rings.empty()) {
    cls.kind = DriftKind::Unclassified;
    return cls;
  }

  const int changes = rings.front().sign_changes;
  for (const RingPattern& r : rings)
    if (r.sign_changes != changes) {
      // probe rings disagree
      cls.kind = DriftKind::Unclassified;
      cls.sign_changes = changes;
      return cls;
    }
  cls.sign_changes = changes;

  std::vector<double> attractive, repulsive;
  bool aligned = true;
  for (const RingPattern& r : rings) {
    aligned = aligned && r.aligned;
    for (const Crossing& x : r.crossings)
      (x.descending ? attractive : repulsive).push_back(x.angle);
  }
  cls.attractive_axes = cluster_axes(std::move(attractive));
  cls.repulsive_axes = cluster_axes(std::move(repulsive));

  switch (changes) {
    case 0: cls.kind = DriftKind::Type0; break;
    case 4: cls.kind = DriftKind::Type1; break;
    case 8: cls.kind = DriftKind::Type2; break;
    default: cls.kind = DriftKind::Unclassified; break;
  }
  cls.mechanism_aligned =
      (cls.kind == DriftKind::Type1 || cls.kind == DriftKind::Type2) && aligned;
  return cls;
}

RadialDriftResult radial_drift_experiment(const AngularState& state, int n_trajectories,
                                          double eta_lo, double eta_hi, int n_periods,
                                          std::uint64_t seed, const IntegratorConfig& cfg) {
  if (n_trajectories <= 0) throw std::invalid_argument("need at least one trajectory");
  if (!(eta_hi > eta_lo) || !(eta_lo > 0.0))
    throw std::invalid_argument("need 0 < eta_lo < eta_hi");
  if (n_periods <= 0) throw std::invalid_argument("need at least one period");

  const GuidanceField field(state, cfg.node_floor_factor);
  RadialDriftResult res;
  res.rows.assign(n_trajectories, {});

  parallel_for(static_cast<std::size_t>(n_trajectories), [&](std::size_t i) {
    std::mt19937_64 eng(rng::derive_seed(seed, i));
    const double u = rng::uniform01(eng);
    const double eta0 = std::sqrt(eta_lo * eta_lo + u * (eta_hi * eta_hi - eta_lo * eta_lo));
    const double phi0 = kTwoPi * rng::uniform01(eng);

    RadialDriftRow& row = res.rows[i];
    row.eta_initial = eta0;
    row.phi_initial = phi0;
    row.eta_final = eta0;
    CartesianPoint last = to_cartesian({eta0, phi0});
    row.status = evolve_with_sink(field, last, 0.0, n_periods * kTwoPi, cfg,
                                  [&](double, const CartesianPoint& q) { last = q; });
    row.eta_final = std::hypot(last.x, last.y);
  });

  std::vector<double> deltas;
  for (const RadialDriftRow& row : res.rows) {
    if (row.status == TrajectoryStatus::completed) {
      ++res.completed;
      deltas.push_back(row.eta_final - row.eta_initial);
    } else {
      ++res.aborted;
    }
  }
  if (!deltas.empty()) {
    std::sort(deltas.begin(), deltas.end());
    const auto quantile = [&](double p) {
      const double h = p * (deltas.size() - 1);
      const std::size_t lo = static_cast<std::size_t>(h);
      const std::size_t hi = std::min(lo + 1, deltas.size() - 1);
      return deltas[lo] + (h - lo) * (deltas[hi] - deltas[lo]);
    };
    res.q1_d_eta = quantile(0.25);
    res.median_d_eta = quantile(0.5);
    res.q3_d_eta = quantile(0.75);
  }
  return res;
}

void write_field_csv(const DriftField& field, std::ostream& os) {
  os << "eta,phi,d_eta,d_phi,status\n";
  os << std::setprecision(17);
  for (int i = 0; i < field.grid.n_eta; ++i) {
    for (int j = 0; j < field.grid.n_phi; ++j) {
      const int c = field.index(i, j);
      os << field.grid.eta(i) << ',' << field.grid.phi(j) << ',' << field.d_eta[c] << ','
         << field.d_phi[c] << ','
         << (field.status[c] == CellStatus::ok ? "ok" : "aborted_near_node") << '\n';
    }
  }
}

DriftField read_field_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("eta,phi,d_eta,d_phi,status", 0) != 0)
    throw SchemaError("drift field CSV: missing header");

  struct Row {
    double eta, phi, d_eta, d_phi;
    CellStatus status;
  };
  std::vector<Row> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    Row r;
    std::string status;
    char comma;
    if (!(ss >> r.eta >> comma >> r.phi >> comma >> r.d_eta >> comma >> r.d_phi >> comma) ||
        !std::getline(ss, status))
      throw SchemaError("drift field CSV: malformed row '" + line + "'");
    if (status == "ok")
      r.status = CellStatus::ok;
    else if (status == "aborted_near_node")
      r.status = CellStatus::aborted_near_node;
    else
      throw SchemaError("drift field CSV: unknown status '" + status + "'");
    rows.push_back(r);
  }
  if (rows.empty()) throw SchemaError("drift field CSV: no data rows");

  int n_phi = 0;
  while (n_phi < static_cast<int>(rows.size()) && rows[n_phi].eta == rows[0].eta) ++n_phi;
  const int n_eta = static_cast<int>(rows.size()) / std::max(n_phi, 1);
  if (n_phi < 1 || n_eta * n_phi != static_cast<int>(rows.size()))
    throw SchemaError("drift field CSV: rows do not form a full grid");

  DriftField field;
  field.grid = {rows.front().eta, rows.back().eta, n_eta, n_phi};
  try {
    field.grid.validate();
  } catch (const std::invalid_argument& e) {
    throw SchemaError(std::string("drift field CSV: ") + e.what());
  }
  field.d_eta.resize(rows.size());
  field.d_phi.resize(rows.size());
  field.status.resize(rows.size());
  for (std::size_t c = 0; c < rows.size(); ++c) {
    field.d_eta[c] = rows[c].d_eta;
    field.d_phi[c] = rows[c].d_phi;
    field.status[c] = rows[c].status;
  }
  return field;
}

std::string classification_json(const DriftClass& cls) {
  nlohmann::json j;
  j["kind"] = to_string(cls.kind);
  j["sign_changes"] = cls.sign_changes;
  j["attractive_axes"] = cls.attractive_axes;
  j["repulsive_axes"] = cls.repulsive_axes;
  j["mechanism_aligned"] = cls.mechanism_aligned;
  j["probe_radii_used"] = cls.probe_radii_used;
  j["ring_sign_changes"] = cls.ring_sign_changes;
  return j.dump(2);
}

}  // namespace qrelax
