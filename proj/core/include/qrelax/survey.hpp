#pragma once

#include <optional>

#include "qrelax/drift.hpp"
#include "qrelax/vorticity.hpp"

namespace qrelax {

// Annulus just wide enough for the default probe rings; the probe radii land
// exactly on grid rows.
inline GridSpec classification_grid() { return {6.0, 13.0, 8, 64}; }

struct SurveyConfig {
  std::vector<int> labels = {3, 6, 10, 15};  // basis-count labels M
  int states_per_label = 100;
  std::uint64_t seed = 1;
  GridSpec grid = classification_grid();
  std::vector<double> probe_radii = {8.0, 10.0, 12.0};
  double dead_zone = 1e-3;
  IntegratorConfig integrator;
};

struct SurveyRow {
  int label = 0;  // M
  int m = 0;
  int index = 0;
  std::uint64_t state_seed = 0;
  int vorticity = 0;
  DriftKind kind = DriftKind::Unclassified;
  int sign_changes = 0;
  bool mechanism_aligned = false;
  bool ok = true;
  std::string note;
};

struct SurveyReport {
  std::vector<SurveyRow> rows;
  // crosstab[(label, vorticity, kind)] -> count, over ok rows
  std::map<std::tuple<int, int, DriftKind>, int> crosstab;

  int count(int label, int vorticity, DriftKind kind) const;
  int count(int label, DriftKind kind) const;
};

SurveyReport run_survey(const SurveyConfig& config);

void write_survey_csv(const SurveyReport& report, std::ostream& os);
std::string survey_crosstab_json(const SurveyReport& report);

struct ConjectureConfig {
  std::vector<int> shells = {1, 2, 3, 4};  // m values
  int states_per_class = 50;
  std::uint64_t seed = 1;
  GridSpec grid = classification_grid();
  std::vector<double> probe_radii = {8.0, 10.0, 12.0};
  double dead_zone = 1e-3;
  IntegratorConfig integrator;
  long long max_attempts = 1000000;  // rejection budget per sampled state
};

enum class ConjectureId { zero_vorticity_never_type0 = 1, maximal_vorticity_always_type0 = 2 };

struct ConjectureRow {
  ConjectureId conjecture;
  int m = 0;
  int vorticity = 0;
  std::uint64_t state_seed = 0;
  DriftKind kind = DriftKind::Unclassified;
  bool violation = false;
  std::string note;
};

struct ConjectureReport {
  std::vector<ConjectureRow> rows;
  std::vector<AngularState> counterexamples;  // states behind violating rows
  int violations(ConjectureId id) const;
  bool passed() const { return counterexamples.empty(); }
};

// Conjecture 1: zero total vorticity never yields a Type0 field (even m only).
// Conjecture 2: maximal |vorticity| = m always yields Type0.
ConjectureReport run_conjecture_campaign(const ConjectureConfig& config);

void write_conjecture_csv(const ConjectureReport& report, std::ostream& os);

// A Type0 (monotone) verdict for a zero-vorticity state is only sound when the
// probe rings enclose all of its nodes. A compensating node beyond the
// outermost ring forces a net rotation on every ring inside it (ring-averaged
// angular velocity winding/eta^2), which mimics monotone drift no matter how
// far out the window is pushed. Returns the objection when the verdict is such
// a window artifact, nullopt otherwise (always for n != 0, where monotone flow
// is the expected global structure). Both campaign runners downgrade objected
// Type0 rows to Unclassified with the note.
std::optional<std::string> type0_window_objection(const AngularState& state, int n_theorem,
                                                  double outer_ring);

}  // namespace qrelax
