#include "qrelax/survey.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "qrelax/errors.hpp"
#include "qrelax/nodes.hpp"
#include "qrelax/parallel.hpp"

namespace qrelax {

namespace {

struct Sampled {
  AngularState state;
  std::uint64_t seed;
  int vorticity;
};

// Deterministic per-slot rejection: keep drawing until the predicate accepts,
// tolerating margin failures of the theorem route.
template <class Accept>
Sampled sample_state(int m, std::uint64_t slot, long long budget, Accept&& accept) {
  for (long long attempt = 0; attempt < budget; ++attempt) {
    const std::uint64_t s = rng::derive_seed(slot, attempt);
    AngularState st = random_state(m, s);
    try {
      const int n = total_vorticity_theorem(st).n;
      if (accept(n)) return {std::move(st), s, n};
    } catch (const ZeroNearCircleError&) {
    } catch (const EmptyShellError&) {
    }
  }
  throw AttemptsExhaustedError("state sampling budget exhausted at shell " + std::to_string(m));
}

}  // namespace

std::optional<std::string> type0_window_objection(const AngularState& state, int n_theorem,
                                                  double outer_ring) {
  // Monotone flow is the expected global structure whenever n != 0 (every M=3
  // state is Type0 no matter where its node roams), so only zero-vorticity
  // verdicts need the census.
  if (n_theorem != 0) return std::nullopt;
  NodeSearchStats stats;
  const std::vector<Node> nodes = find_nodes(state, 0.0, {}, 60, 1e-12, &stats);
  if (stats.closure_checked && !stats.closure_passed)
    return "node census failed winding closure; monotone verdict not certified";
  int enclosed = 0;
  double outermost = 0.0;
  for (const Node& node : nodes) {
    const double r = std::hypot(node.position.x, node.position.y);
    outermost = std::max(outermost, r);
    if (r < outer_ring) enclosed += node.winding;
  }
  if (enclosed == 0) return std::nullopt;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "monotone verdict unsound: probe rings enclose winding %+d of +0 total "
                "(outermost node at eta = %.1f)",
                enclosed, outermost);
  return std::string(buf);
}

namespace {

// Apply the window-soundness check to a freshly classified row.
template <class Row>
void veto_unsound_type0(Row& row, const AngularState& state, int n, double outer_ring) {
  if (row.kind != DriftKind::Type0) return;
  if (auto objection = type0_window_objection(state, n, outer_ring)) {
    row.kind = DriftKind::Unclassified;
    row.note = *objection;
  }
}

}  // namespace

int SurveyReport::count(int label, int vorticity, DriftKind kind) const {
  const auto it = crosstab.find({label, vorticity, kind});
  return it == crosstab.end() ? 0 : it->second;
}

int SurveyReport::count(int label, DriftKind kind) const {
  int total = 0;
  for (const auto& [key, n] : crosstab)
    if (std::get<0>(key) == label && std::get<2>(key) == kind) total += n;
  return total;
}

SurveyReport run_survey(const SurveyConfig& config) {
  config.grid.validate();
  if (config.states_per_label <= 0) throw std::invalid_argument("states_per_label must be > 0");

  struct Slot {
    int label, m, index;
  };
  std::vector<Slot> slots;
  for (int label : config.labels) {
    const int m = shell_for_basis_count(label);
    for (int i = 0; i < config.states_per_label; ++i) slots.push_back({label, m, i});
  }

  SurveyReport report;
  report.rows.assign(slots.size(), {});

  parallel_for(slots.size(), [&](std::size_t k) {
    const Slot& slot = slots[k];
    SurveyRow& row = report.rows[k];
    row.label = slot.label;
    row.m = slot.m;
    row.index = slot.index;
    try {
      const std::uint64_t base =
          rng::derive_seed(rng::derive_seed(config.seed, slot.label), slot.index);
      const Sampled draw = sample_state(slot.m, base, 1000, [](int) { return true; });
      row.state_seed = draw.seed;
      row.vorticity = draw.vorticity;
      const DriftField field = compute_drift_field(draw.state, config.grid, config.integrator, 0.0);
      const DriftClass cls = classify(field, config.probe_radii, config.dead_zone);
      row.kind = cls.kind;
      row.sign_changes = cls.sign_changes;
      row.mechanism_aligned = cls.mechanism_aligned;
      veto_unsound_type0(row, draw.state, draw.vorticity,
                         *std::max_element(config.probe_radii.begin(), config.probe_radii.end()));
    } catch (const Error& e) {
      row.ok = false;
      row.note = e.what();
    }
  });

  for (const SurveyRow& row : report.rows)
    if (row.ok) ++report.crosstab[{row.label, row.vorticity, row.kind}];
  return report;
}

void write_survey_csv(const SurveyReport& report, std::ostream& os) {
  os << "M,m,index,state_seed,vorticity,kind,sign_changes,mechanism_aligned,ok,note\n";
  for (const SurveyRow& r : report.rows) {
    os << r.label << ',' << r.m << ',' << r.index << ',' << r.state_seed << ',' << r.vorticity
       << ',' << to_string(r.kind) << ',' << r.sign_changes << ','
       << (r.mechanism_aligned ? 1 : 0) << ',' << (r.ok ? 1 : 0) << ',' << r.note << '\n';
  }
}

std::string survey_crosstab_json(const SurveyReport& report) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [key, n] : report.crosstab) {
    const auto& [label, vorticity, kind] = key;
    j[std::to_string(label)][std::to_string(vorticity)][to_string(kind)] = n;
  }
  return j.dump(2);
}

int ConjectureReport::violations(ConjectureId id) const {
  int n = 0;
  for (const ConjectureRow& r : rows)
    if (r.conjecture == id && r.violation) ++n;
  return n;
}

ConjectureReport run_conjecture_campaign(const ConjectureConfig& config) {
  config.grid.validate();
  if (config.states_per_class <= 0) throw std::invalid_argument("states_per_class must be > 0");

  struct Slot {
    ConjectureId id;
    int m, index;
  };
  std::vector<Slot> slots;
  for (int m : config.shells) {
    if (m < 1) throw std::invalid_argument("conjecture campaign needs shells m >= 1");
    for (int i = 0; i < config.states_per_class; ++i) {
      if (m % 2 == 0) slots.push_back({ConjectureId::zero_vorticity_never_type0, m, i});
      slots.push_back({ConjectureId::maximal_vorticity_always_type0, m, i});
    }
  }

  ConjectureReport report;
  report.rows.assign(slots.size(), {ConjectureId::zero_vorticity_never_type0});
  std::vector<std::optional<AngularState>> offenders(slots.size());

  parallel_for(slots.size(), [&](std::size_t k) {
    const Slot& slot = slots[k];
    ConjectureRow& row = report.rows[k];
    row.conjecture = slot.id;
    row.m = slot.m;

    const std::uint64_t base = rng::derive_seed(
        rng::derive_seed(config.seed, static_cast<std::uint64_t>(slot.id) * 64 + slot.m),
        slot.index);
    const bool want_zero = slot.id == ConjectureId::zero_vorticity_never_type0;
    const Sampled draw =
        sample_state(slot.m, base, config.max_attempts,
                     [&](int n) { return want_zero ? n == 0 : std::abs(n) == slot.m; });
    row.state_seed = draw.seed;
    row.vorticity = draw.vorticity;

    const DriftField field = compute_drift_field(draw.state, config.grid, config.integrator, 0.0);
    const DriftClass cls = classify(field, config.probe_radii, config.dead_zone);
    row.kind = cls.kind;
    veto_unsound_type0(row, draw.state, draw.vorticity,
                       *std::max_element(config.probe_radii.begin(), config.probe_radii.end()));
    row.violation = want_zero ? row.kind == DriftKind::Type0 : row.kind != DriftKind::Type0;
    if (row.violation) offenders[k] = draw.state;
  });

  for (auto& o : offenders)
    if (o) report.counterexamples.push_back(std::move(*o));
  return report;
}

void write_conjecture_csv(const ConjectureReport& report, std::ostream& os) {
  os << "conjecture,m,vorticity,state_seed,kind,violation,note\n";
  for (const ConjectureRow& r : report.rows) {
    os << static_cast<int>(r.conjecture) << ',' << r.m << ',' << r.vorticity << ','
       << r.state_seed << ',' << to_string(r.kind) << ',' << (r.violation ? 1 : 0) << ','
       << r.note << '\n';
  }
}

}  // namespace qrelax
