// qrelax: command-line experiments with de Broglie trajectories in the 2-D
// isotropic harmonic oscillator.  Exit codes: 0 success, 1 usage error,
// 2 numerical failure, 3 counterexample found in conjecture mode.

#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <qrelax/drift.hpp>
#include <qrelax/dynamics.hpp>
#include <qrelax/errors.hpp>
#include <qrelax/nodes.hpp>
#include <qrelax/state.hpp>
#include <qrelax/state_io.hpp>
#include <qrelax/survey.hpp>
#include <qrelax/vorticity.hpp>

using nlohmann::json;
using namespace qrelax;

namespace {

void with_output(const std::string& path, const std::function<void(std::ostream&)>& fn) {
  if (path.empty()) {
    fn(std::cout);
    return;
  }
  std::ofstream f(path);
  if (!f) throw std::invalid_argument("cannot open output file: " + path);
  fn(f);
}

// "LO:HI" -> pair, as in --eta 10:20
std::pair<double, double> parse_range(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("expected a range LO:HI, got '" + text + "'");
  try {
    return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
  } catch (const std::exception&) {
    throw std::invalid_argument("expected a range LO:HI, got '" + text + "'");
  }
}

json state_summary(const AngularState& st) {
  json j;
  j["m"] = st.m;
  j["basis_count"] = st.basis_count();
  j["allowed_vorticities"] = allowed_vorticities(st.m);
  try {
    const VorticityReport rep = total_vorticity_theorem(st);
    j["vorticity"] = rep.n;
    j["zero_count"] = *rep.zero_count;
  } catch (const Error& e) {
    j["vorticity"] = nullptr;
    j["note"] = e.what();
  }
  try {
    j["node_exclusion_radius"] = node_exclusion_radius(st);
  } catch (const Error&) {
    j["node_exclusion_radius"] = nullptr;
  }
  return j;
}

void write_tracks_csv(const std::vector<NodeTrack>& tracks, std::ostream& os) {
  os << "track_id,T,Qx,Qy,winding\n" << std::setprecision(17);
  for (const NodeTrack& t : tracks)
    for (const TrackSample& s : t.samples)
      os << t.id << ',' << s.T << ',' << s.position.x << ',' << s.position.y << ','
         << t.winding << '\n';
}

json events_json(const std::vector<NodeTrack>& tracks) {
  json events = json::array();
  for (const NodeTrack& t : tracks) {
    if (t.birth)
      events.push_back(
          {{"type", "birth"}, {"track", t.id}, {"T", t.birth->T}, {"partner", t.birth->partner}});
    if (t.death)
      events.push_back(
          {{"type", "death"}, {"track", t.id}, {"T", t.death->T}, {"partner", t.death->partner}});
  }
  std::sort(events.begin(), events.end(),
            [](const json& a, const json& b) { return a["T"] < b["T"]; });
  return events;
}

const char* status_name(TrajectoryStatus s) {
  switch (s) {
    case TrajectoryStatus::completed: return "completed";
    case TrajectoryStatus::aborted_near_node: return "aborted_near_node";
    default: return "step_underflow";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trajectory, node, vorticity, and drift-field experiments in the "
               "2-D isotropic harmonic oscillator"};
  app.set_version_flag("--version", "qrelax 1.0.0");
  app.require_subcommand(1);
  int exit_code = 0;

  // ---- shared option state -------------------------------------------------
  std::string state_path, output, events_path;
  bool renormalize = false;
  bool paper_scale = false;
  std::uint64_t seed = 0;
  int m = 0;
  IntegratorConfig integrator;

  const auto add_state_arg = [&](CLI::App* cmd) {
    cmd->add_option("state", state_path, "state JSON file")->required()->check(CLI::ExistingFile);
    cmd->add_flag("--renormalize", renormalize, "accept non-normalized input and rescale");
  };
  const auto add_output = [&](CLI::App* cmd) {
    cmd->add_option("-o,--output", output, "output file (default: stdout)");
  };
  const auto add_integrator = [&](CLI::App* cmd) {
    cmd->add_option("--rel-tol", integrator.rel_tol, "integrator relative tolerance");
    cmd->add_option("--abs-tol", integrator.abs_tol, "integrator absolute tolerance");
    cmd->add_option("--max-step", integrator.max_step, "integrator maximum step in T");
  };

  // ---- state ---------------------------------------------------------------
  CLI::App* state_cmd = app.add_subcommand("state", "generate and inspect quantum states");
  state_cmd->require_subcommand(1);

  CLI::App* state_random = state_cmd->add_subcommand("random", "Born-weighted random superposition");
  state_random->add_option("--m", m, "maximum energy shell")->required();
  state_random->add_option("--seed", seed, "RNG seed")->required();
  add_output(state_random);
  state_random->callback([&] {
    with_output(output, [&](std::ostream& os) { save_state(random_state(m, seed), os); });
  });

  int target_n = 0;
  long long max_attempts = 1000000;
  CLI::App* state_with = state_cmd->add_subcommand(
      "with-vorticity", "rejection-sample a state with prescribed total vorticity");
  state_with->add_option("--m", m, "maximum energy shell")->required();
  state_with->add_option("--n", target_n, "target total vorticity (units of 2*pi)")->required();
  state_with->add_option("--seed", seed, "RNG seed")->required();
  state_with->add_option("--max-attempts", max_attempts, "rejection budget");
  add_output(state_with);
  state_with->callback([&] {
    with_output(output, [&](std::ostream& os) {
      save_state(generate_state_with_vorticity(m, target_n, seed, max_attempts), os);
    });
  });

  CLI::App* state_info = state_cmd->add_subcommand("info", "summary of a state file");
  add_state_arg(state_info);
  add_output(state_info);
  state_info->callback([&] {
    const AngularState st = load_angular_state_file(state_path, renormalize);
    with_output(output, [&](std::ostream& os) { os << state_summary(st).dump(2) << '\n'; });
  });

  // ---- vorticity -----------------------------------------------------------
  std::string method = "theorem";
  CLI::App* vort = app.add_subcommand("vorticity", "total vorticity of a state");
  add_state_arg(vort);
  vort->add_option("--method", method, "theorem | brute | laurent")
      ->check(CLI::IsMember({"theorem", "brute", "laurent"}));
  add_output(vort);
  vort->callback([&] {
    const AngularState st = load_angular_state_file(state_path, renormalize);
    json j;
    j["method"] = method;
    if (method == "theorem") {
      const VorticityReport rep = total_vorticity_theorem(st);
      j["n"] = rep.n;
      j["zero_count"] = *rep.zero_count;
    } else if (method == "brute") {
      j["n"] = total_vorticity_bruteforce(st).n;
    } else {
      j["n"] = total_vorticity_laurent(st);
    }
    with_output(output, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  });

  // ---- abundance -----------------------------------------------------------
  long long samples = 100000;
  CLI::App* abundance = app.add_subcommand("abundance", "sampled vorticity histogram");
  abundance->add_option("--m", m, "maximum energy shell")->required();
  abundance->add_option("--samples", samples, "number of random states")->required();
  abundance->add_option("--seed", seed, "RNG seed")->required();
  add_output(abundance);
  abundance->callback([&] {
    const VorticityHistogram hist = sample_vorticity_distribution(m, samples, seed);
    json j;
    j["m"] = hist.m;
    j["samples"] = hist.samples;
    j["counts"] = json::object();
    for (const auto& [n, count] : hist.counts) j["counts"][std::to_string(n)] = count;
    with_output(output, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  });

  // ---- drift ---------------------------------------------------------------
  int grid_n = 64, grid_phi = 0;
  double eta_min = 5.0, eta_max = 20.0, T0 = 0.0;
  CLI::App* drift = app.add_subcommand("drift", "one-period displacement map on a polar grid");
  add_state_arg(drift);
  drift->add_option("--grid", grid_n, "rows (and columns unless --grid-phi) of the grid");
  drift->add_option("--grid-phi", grid_phi, "angular columns of the grid");
  drift->add_option("--eta-min", eta_min, "innermost radius");
  drift->add_option("--eta-max", eta_max, "outermost radius");
  drift->add_option("--T0", T0, "launch time");
  drift->add_flag("--paper-scale", paper_scale, "use the 100x100 grid");
  add_integrator(drift);
  add_output(drift);
  drift->callback([&] {
    const AngularState st = load_angular_state_file(state_path, renormalize);
    if (paper_scale) grid_n = 100;
    const GridSpec grid{eta_min, eta_max, grid_n, grid_phi > 0 ? grid_phi : grid_n};
    const DriftField field = compute_drift_field(st, grid, integrator, T0);
    with_output(output, [&](std::ostream& os) { write_field_csv(field, os); });
    const DriftDecomposition d = decompose(field);
    json j;
    j["completed_cells"] = d.completed_cells;
    j["aborted_cells"] = d.aborted_cells;
    j["max_abs_d_eta"] = d.max_abs_d_eta;
    j["max_abs_d_phi"] = d.max_abs_d_phi;
    j["inward_fraction"] = d.inward_fraction;
    std::cerr << j.dump(2) << '\n';
  });

  // ---- classify ------------------------------------------------------------
  std::string field_path;
  std::vector<double> probe_radii{8.0, 10.0, 12.0};
  double dead_zone = 1e-3;
  CLI::App* classify_cmd = app.add_subcommand("classify", "drift-field class from a field CSV");
  classify_cmd->add_option("field", field_path, "drift field CSV file")
      ->required()
      ->check(CLI::ExistingFile);
  classify_cmd->add_option("--probe-radii", probe_radii, "probe ring radii")->delimiter(',');
  classify_cmd->add_option("--dead-zone", dead_zone, "relative |d_phi| suppression threshold");
  add_output(classify_cmd);
  classify_cmd->callback([&] {
    std::ifstream is(field_path);
    const DriftField field = read_field_csv(is);
    const DriftClass cls = classify(field, probe_radii, dead_zone);
    with_output(output, [&](std::ostream& os) { os << classification_json(cls) << '\n'; });
  });

  // ---- nodes ---------------------------------------------------------------
  bool track = false;
  double node_T = 0.0, track_T1 = kTwoPi, track_dt = kTwoPi / 2000.0, region_eta = 0.0;
  int seed_density = 60;
  CLI::App* nodes_cmd = app.add_subcommand("nodes", "find or track the zeros of psi");
  add_state_arg(nodes_cmd);
  nodes_cmd->add_option("--T", node_T, "time of the snapshot (or track start with --track)");
  nodes_cmd->add_flag("--track", track, "follow nodes over [T, T1] instead of one snapshot");
  nodes_cmd->add_option("--T1", track_T1, "track end time");
  nodes_cmd->add_option("--dt", track_dt, "frame spacing for tracking");
  nodes_cmd->add_option("--region", region_eta,
                        "search radius (default: certified enclosing radius)");
  nodes_cmd->add_option("--density", seed_density, "seed grid density");
  nodes_cmd->add_option("--events", events_path, "write pair events JSON here (tracking only)");
  add_output(nodes_cmd);
  nodes_cmd->callback([&] {
    const AngularState st = load_angular_state_file(state_path, renormalize);
    if (track) {
      const auto tracks = track_nodes(st, node_T, track_T1, track_dt, {region_eta}, seed_density);
      with_output(output, [&](std::ostream& os) { write_tracks_csv(tracks, os); });
      if (!events_path.empty())
        with_output(events_path,
                    [&](std::ostream& os) { os << events_json(tracks).dump(2) << '\n'; });
      return;
    }
    const auto nodes = find_nodes(st, node_T, {region_eta}, seed_density);
    json j;
    j["T"] = node_T;
    j["count"] = nodes.size();
    j["nodes"] = json::array();
    for (const Node& n : nodes)
      j["nodes"].push_back({{"Qx", n.position.x},
                            {"Qy", n.position.y},
                            {"winding", n.winding},
                            {"residual", n.residual}});
    with_output(output, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  });

  // ---- trajectory ----------------------------------------------------------
  double eta0 = 1.0, phi0 = 0.0, traj_T0 = 0.0, traj_T1 = kTwoPi;
  CLI::App* traj = app.add_subcommand("trajectory", "integrate one de Broglie trajectory");
  add_state_arg(traj);
  traj->add_option("--eta", eta0, "initial radius")->required();
  traj->add_option("--phi", phi0, "initial angle");
  traj->add_option("--T0", traj_T0, "start time");
  traj->add_option("--T1", traj_T1, "end time");
  add_integrator(traj);
  add_output(traj);
  traj->callback([&] {
    const AngularState st = load_angular_state_file(state_path, renormalize);
    const Trajectory tr = evolve(st, {eta0, phi0}, traj_T0, traj_T1, integrator);
    with_output(output, [&](std::ostream& os) {
      os << "T,eta,phi,Qx,Qy\n" << std::setprecision(17);
      for (const TrajectorySample& s : tr.samples) {
        const CartesianPoint q = to_cartesian(s.p);
        os << s.T << ',' << s.p.eta << ',' << s.p.phi << ',' << q.x << ',' << q.y << '\n';
      }
    });
    if (tr.status != TrajectoryStatus::completed)
      std::cerr << "trajectory " << status_name(tr.status) << " at T = "
                << (tr.samples.empty() ? traj_T0 : tr.samples.back().T) << '\n';
  });

  // ---- radial-drift --------------------------------------------------------
  int n_traj = 100, n_periods = 100;
  std::string eta_range = "10:20";
  CLI::App* radial = app.add_subcommand("radial-drift", "net radial displacement ensemble");
  add_state_arg(radial);
  radial->add_option("--trajectories", n_traj, "ensemble size");
  radial->add_option("--periods", n_periods, "integration length in common periods");
  radial->add_option("--eta", eta_range, "launch annulus LO:HI");
  radial->add_option("--seed", seed, "RNG seed")->required();
  radial->add_flag("--paper-scale", paper_scale, "1000 trajectories x 1000 periods");
  add_integrator(radial);
  add_output(radial);
  radial->callback([&] {
    const AngularState st = load_angular_state_file(state_path, renormalize);
    if (paper_scale) {
      n_traj = 1000;
      n_periods = 1000;
    }
    const auto [lo, hi] = parse_range(eta_range);
    const RadialDriftResult res =
        radial_drift_experiment(st, n_traj, lo, hi, n_periods, seed, integrator);
    with_output(output, [&](std::ostream& os) {
      os << "eta_initial,phi_initial,eta_final,status\n" << std::setprecision(17);
      for (const RadialDriftRow& r : res.rows)
        os << r.eta_initial << ',' << r.phi_initial << ',' << r.eta_final << ','
           << status_name(r.status) << '\n';
    });
    json j;
    j["completed"] = res.completed;
    j["aborted"] = res.aborted;
    j["median_d_eta"] = res.median_d_eta;
    j["q1_d_eta"] = res.q1_d_eta;
    j["q3_d_eta"] = res.q3_d_eta;
    std::cerr << j.dump(2) << '\n';
  });

  // ---- survey ----------------------------------------------------------------
  std::vector<int> labels{3, 6, 10, 15};
  int states_per = 20;
  std::string output_dir;
  CLI::App* survey_cmd = app.add_subcommand("survey", "drift-class survey over random states");
  survey_cmd->add_option("--labels", labels, "basis-count labels M")->delimiter(',');
  survey_cmd->add_option("--states", states_per, "states per label");
  survey_cmd->add_option("--seed", seed, "RNG seed")->required();
  survey_cmd->add_option("--output-dir", output_dir, "directory for survey.csv and crosstab.json")
      ->required();
  survey_cmd->add_flag("--paper-scale", paper_scale, "100 states per label on a 100x100 grid");
  add_integrator(survey_cmd);
  survey_cmd->callback([&] {
    SurveyConfig cfg;
    cfg.labels = labels;
    cfg.states_per_label = paper_scale ? 100 : states_per;
    cfg.seed = seed;
    cfg.integrator = integrator;
    if (paper_scale) cfg.grid = {5.0, 20.0, 100, 100};
    const SurveyReport report = run_survey(cfg);
    std::filesystem::create_directories(output_dir);
    std::ofstream csv(output_dir + "/survey.csv");
    if (!csv) throw std::invalid_argument("cannot write into " + output_dir);
    write_survey_csv(report, csv);
    std::ofstream cross(output_dir + "/crosstab.json");
    cross << survey_crosstab_json(report) << '\n';
    std::cout << survey_crosstab_json(report) << '\n';
  });

  // ---- conjectures -----------------------------------------------------------
  std::vector<int> shells{1, 2, 3, 4};
  CLI::App* conj = app.add_subcommand(
      "conjectures", "zero-vorticity / maximal-vorticity drift-class campaigns");
  conj->add_option("--shells", shells, "energy shells m")->delimiter(',');
  conj->add_option("--states", states_per, "states per class")->default_val(20);
  conj->add_option("--seed", seed, "RNG seed")->required();
  conj->add_flag("--paper-scale", paper_scale, "1000 states per class");
  add_integrator(conj);
  add_output(conj);
  conj->callback([&] {
    ConjectureConfig cfg;
    cfg.shells = shells;
    cfg.states_per_class = paper_scale ? 1000 : states_per;
    cfg.seed = seed;
    cfg.integrator = integrator;
    const ConjectureReport report = run_conjecture_campaign(cfg);
    with_output(output, [&](std::ostream& os) { write_conjecture_csv(report, os); });
    if (!report.passed()) {
      std::cerr << "counterexamples found: " << report.counterexamples.size() << '\n';
      for (const AngularState& st : report.counterexamples) save_state(st, std::cerr);
      exit_code = 3;
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return exit_code;
}
