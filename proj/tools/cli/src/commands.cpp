#include "tetra/cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <sstream>

#include <CLI11.hpp>

#include "tetra/cli/report.hpp"
#include "tetra/errors.hpp"

#ifndef TETRA_VERSION
#define TETRA_VERSION "0.0.0"
#endif

namespace tetra::cli {

namespace fs = std::filesystem;

namespace {

json envelope(const RunConfig& rc, json result, bool pass, int exit_code) {
  return {{"artifact", {{"name", "tetra"}, {"version", TETRA_VERSION}}},
          {"command", to_string(rc.command)},
          {"config", rc.echo},
          {"run", {{"threads", rc.threads}, {"seed", rc.seed}}},
          {"result", std::move(result)},
          {"summary", {{"pass", pass}, {"exit_code", exit_code}}}};
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

// wall-clock data lives beside the report so the report itself stays reproducible
void write_timing(const fs::path& report, const RunConfig& rc, const std::string& started,
                  double seconds, Outcome& out) {
  auto path = report;
  path.replace_extension(".timing.json");
  write_json(path, {{"report", report.filename().string()},
                    {"started_at", started},
                    {"wall_clock_seconds", seconds},
                    {"threads", rc.threads},
                    {"output_dir", rc.output_dir.string()}});
  out.files.push_back(path);
}

std::string describe(const ScenarioReport& r) {
  std::ostringstream os;
  os << to_string(r.id) << ": " << (r.pass ? "pass" : "FAIL");
  if (r.search.chord)
    os << " (time " << format_number(r.search.chord->time_length) << ", budget "
       << format_number(r.budget) << ")";
  else
    os << " (no chord within budget " << format_number(r.budget) << ")";
  return os.str();
}

void write_chord_artifacts(const fs::path& dir, const std::string& stem, const Chord& chord,
                           Outcome& out) {
  if (chord.segment.size() == 0) return;
  const auto csv = dir / (stem + "_trajectory.csv");
  write_text(csv, trajectory_csv(chord.segment));
  const auto plot = dir / (stem + "_plot.dat");
  write_text(plot, norm_plot_data(chord.segment));
  out.files.push_back(csv);
  out.files.push_back(plot);
}

Outcome run_scenarios(const RunConfig& rc) {
  Outcome out;
  const auto reports = run_batch(rc.scenarios, rc.batch ? rc.threads : 1);
  if (!rc.batch) {
    const auto& r = reports.front();
    out.exit_code = r.pass ? kExitPass : kExitScientificFail;
    out.report = rc.output_dir / (rc.name + ".json");
    write_json(out.report, envelope(rc, to_json(r), r.pass, out.exit_code));
    out.files.push_back(out.report);
    if (rc.scenario_trajectory.front() && r.search.chord)
      write_chord_artifacts(rc.output_dir, rc.name, *r.search.chord, out);
    out.summary = describe(r);
    return out;
  }
  json index = json::array();
  int passed = 0;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    const std::string stem = rc.name + "_" + std::to_string(i) + "_" + to_string(r.id);
    const auto path = rc.output_dir / (stem + ".json");
    const int code = r.pass ? kExitPass : kExitScientificFail;
    write_json(path, envelope(rc, to_json(r), r.pass, code));
    out.files.push_back(path);
    if (rc.scenario_trajectory[i] && r.search.chord)
      write_chord_artifacts(rc.output_dir, stem, *r.search.chord, out);
    index.push_back({{"index", i}, {"file", path.filename().string()},
                     {"scenario", to_string(r.id)}, {"pass", r.pass}});
    passed += r.pass ? 1 : 0;
    out.summary += (i ? "\n" : "") + describe(r);
  }
  const bool all = passed == static_cast<int>(reports.size());
  out.exit_code = all ? kExitPass : kExitScientificFail;
  out.report = rc.output_dir / (rc.name + "_index.json");
  write_json(out.report, envelope(rc, {{"reports", index}, {"passed", passed},
                                        {"total", reports.size()}},
                                  all, out.exit_code));
  out.files.push_back(out.report);
  return out;
}

Outcome run_pb4(const RunConfig& rc) {
  const auto& p = rc.pb4;
  const auto problem = prototype_problem(p.R0, p.R1, p.T, p.cells);
  const auto rep = p.optimizer.sign == BracketSign::kPlus
                       ? estimate_pb4_plus(problem, p.optimizer)
                       : estimate_pb4_minus(problem, p.optimizer);
  bool pass = true;
  std::vector<std::string> failures;
  if (p.expect_min && rep.estimate < *p.expect_min) failures.push_back("estimate below expect.min");
  if (p.expect_max && rep.estimate > *p.expect_max) failures.push_back("estimate above expect.max");
  if (p.max_two_grid_difference) {
    if (!rep.two_grid_difference)
      throw ConfigError("expect.max_two_grid_difference needs pb4.two_grid_cells > 0");
    if (*rep.two_grid_difference >= *p.max_two_grid_difference)
      failures.push_back("two-grid difference too large");
  }
  pass = failures.empty();

  Outcome out;
  out.exit_code = pass ? kExitPass : kExitScientificFail;
  auto result = to_json(rep);
  result["failures"] = failures;
  out.report = rc.output_dir / (rc.name + ".json");
  write_json(out.report, envelope(rc, result, pass, out.exit_code));
  const auto fcsv = rc.output_dir / (rc.name + "_F.csv");
  const auto gcsv = rc.output_dir / (rc.name + "_G.csv");
  const auto plot = rc.output_dir / (rc.name + "_plot.dat");
  write_text(fcsv, grid_csv(problem.window(), rep.f));
  write_text(gcsv, grid_csv(problem.window(), rep.g));
  write_text(plot, bracket_ridge_plot_data(problem.window(), rep.f, rep.g));
  out.files = {out.report, fcsv, gcsv, plot};
  out.summary = std::string("pb4 ") + (rep.sign == BracketSign::kPlus ? "plus" : "minus") +
                " estimate " + format_number(rep.estimate) + " at " + std::to_string(rep.cells_u) +
                "x" + std::to_string(rep.cells_s) + (pass ? "" : " FAIL");
  if (rep.two_grid_difference)
    out.summary += ", two-grid difference " + format_number(*rep.two_grid_difference);
  return out;
}

HamiltonianSpec chord_hamiltonian(const ChordSettings& c, const ContactModel& model) {
  const auto chart = model.ambient_chart();
  switch (c.hamiltonian) {
    case HamiltonianKind::kSaddle: return saddle_hamiltonian(chart);
    case HamiltonianKind::kCosine: return cosine_potential(model, c.shift);
    case HamiltonianKind::kMechanical:
      return mechanical_hamiltonian(chart, c.depth, c.R0, c.potential, c.modulation);
    case HamiltonianKind::kWallWitness:
      return wall_witness(c.R0, c.R1, c.delta1, c.delta2).hamiltonian(model);
    case HamiltonianKind::kConformalReeb:
      return conformal_reeb_hamiltonian(model, c.base, c.amplitude);
  }
  throw ConfigError("unknown hamiltonian");
}

Outcome run_chord(const RunConfig& rc) {
  const auto& c = rc.chord;
  const auto model = c.model.build();
  const auto tet = build_tetragon(model, c.R0, c.R1, c.T);
  const auto h = chord_hamiltonian(c, model);
  auto search = c.search;
  if (!std::isfinite(search.integrator.escape_bound))
    search.integrator.escape_bound = default_escape_bound(c.R1);
  const auto rep = find_chord(h, tet.region(c.from), tet.region(c.to), c.budget, search);
  const bool pass = rep.found() == c.expect_chord;

  Outcome out;
  out.exit_code = pass ? kExitPass : kExitScientificFail;
  json result = {{"model", model.name()},
                 {"hamiltonian", h.name()},
                 {"from", to_string(c.from)},
                 {"to", to_string(c.to)},
                 {"budget", number(c.budget)},
                 {"expect_chord", c.expect_chord},
                 {"time_length", rep.chord ? number(rep.chord->time_length) : json(nullptr)},
                 {"pass", pass},
                 {"search", to_json(rep)},
                 {"tolerances", {{"chord_membership", number(search.tol)},
                                 {"integrator", number(search.integrator.tol)}}}};
  out.report = rc.output_dir / (rc.name + ".json");
  write_json(out.report, envelope(rc, result, pass, out.exit_code));
  out.files.push_back(out.report);
  if (c.trajectory && rep.chord) write_chord_artifacts(rc.output_dir, rc.name, *rep.chord, out);
  out.summary = "chord " + to_string(c.from) + " -> " + to_string(c.to) + ": " +
                (rep.chord ? "found, time " + format_number(rep.chord->time_length)
                           : std::string("none within ") + format_number(c.budget)) +
                (pass ? "" : " FAIL");
  return out;
}

Outcome run_tetragon(const RunConfig& rc) {
  const auto& t = rc.tetragon;
  const auto model = t.model.build();
  const auto tet = build_tetragon(model, t.R0, t.R1, t.T);

  std::string csv = "region,index";
  const int dim = model.ambient_chart().dim();
  for (int c = 0; c < dim; ++c) csv += "," + model.ambient_chart().label(c);
  csv += "\n";
  json regions = json::object();
  double worst = 0.0;
  for (auto kind : {RegionKind::kFloor, RegionKind::kCeiling, RegionKind::kLowWall, RegionKind::kHighWall}) {
    const auto& reg = tet.region(kind);
    double level = 0.0, dist = 0.0;
    const auto params = reg.seed_params(t.samples);
    for (std::size_t i = 0; i < params.size(); ++i) {
      const auto x = reg.point_at(params[i]);
      level = std::max(level, std::abs(reg.level(x)));
      dist = std::max(dist, reg.distance(x));
      csv += to_string(kind) + "," + std::to_string(i);
      for (double v : x) csv += "," + format_number(v);
      csv += "\n";
    }
    worst = std::max({worst, level, dist});
    json kinds = json::array();
    for (const auto& p : reg.params())
      kinds.push_back(p.kind == ParamKind::kInterval   ? "interval"
                      : p.kind == ParamKind::kPeriodic ? "periodic"
                                                       : "discrete");
    regions[to_string(kind)] = {{"name", reg.name()},
                                {"params", kinds},
                                {"samples", params.size()},
                                {"max_level_residual", number(level)},
                                {"max_distance_residual", number(dist)}};
  }
  const double tol = 1e-8;
  bool pass = worst <= tol;
  json result = {{"model", model.name()},
                 {"R0", number(t.R0)},
                 {"R1", number(t.R1)},
                 {"T", number(t.T)},
                 {"rectangle_area", number(tet.rectangle_area())},
                 {"regions", regions},
                 {"smoothed", nullptr},
                 {"tolerances", {{"membership", tol}, {"lagrangian", tol}}}};

  std::string plot = "# s t\n";
  if (t.smoothing_eps) {
    const auto sm = smooth_tetragon(tet, *t.smoothing_eps);
    const auto res = sm.residual(t.residual_samples);
    pass = pass && res.max_abs <= tol;
    result["smoothed"] = {{"eps", number(sm.eps())},
                          {"area", number(sm.area())},
                          {"perimeter", number(sm.perimeter())},
                          {"lagrangian_residual", number(res.max_abs)},
                          {"samples", res.samples},
                          {"pairs", res.pairs}};
    for (int i = 0; i <= 256; ++i) {
      const auto p = sm.loop_point(std::fmod(i / 256.0, 1.0));
      plot += format_number(p[0]) + " " + format_number(p[1]) + "\n";
    }
  } else {
    for (auto [s, tt] : {std::pair{t.R0, 0.0}, {t.R1, 0.0}, {t.R1, t.T}, {t.R0, t.T}, {t.R0, 0.0}})
      plot += format_number(s) + " " + format_number(tt) + "\n";
  }
  result["pass"] = pass;

  Outcome out;
  out.exit_code = pass ? kExitPass : kExitScientificFail;
  out.report = rc.output_dir / (rc.name + ".json");
  write_json(out.report, envelope(rc, result, pass, out.exit_code));
  const auto csv_path = rc.output_dir / (rc.name + "_regions.csv");
  const auto plot_path = rc.output_dir / (rc.name + "_plot.dat");
  write_text(csv_path, csv);
  write_text(plot_path, plot);
  out.files = {out.report, csv_path, plot_path};
  out.summary = "tetragon " + model.name() + ": " + (pass ? "ok" : "FAIL") +
                ", max membership residual " + format_number(worst);
  return out;
}

}  // namespace

Outcome execute(const RunConfig& rc) {
  std::error_code ec;
  fs::create_directories(rc.output_dir, ec);
  if (ec) throw Error("cannot create output directory " + rc.output_dir.string() + ": " + ec.message());
  const auto started = utc_now();
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  switch (rc.command) {
    case Command::kScenario: out = run_scenarios(rc); break;
    case Command::kPb4: out = run_pb4(rc); break;
    case Command::kChord: out = run_chord(rc); break;
    case Command::kTetragon: out = run_tetragon(rc); break;
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_timing(out.report, rc, started, seconds, out);
  return out;
}

void check_preconditions(const RunConfig& rc) {
  switch (rc.command) {
    case Command::kScenario:
      for (const auto& c : rc.scenarios) {
        if (c.id == ScenarioId::kReebChord) continue;
        if (c.id == ScenarioId::kSuperconductivity) {
          if (c.k < 1 || c.k > 2) throw ConfigError("superconductivity supports k = 1 or 2");
          build_tetragon(c.k == 1 ? ContactModel::circle() : ContactModel::unit_cotangent_torus(c.k),
                         c.R0, c.R1, c.T);
        } else {
          if (c.k < 1 || c.k > 2) throw ConfigError("sphere scenarios support k = 1 or 2");
          build_tetragon(ContactModel::contact_sphere(c.k), c.R0, c.R1, c.T);
        }
      }
      break;
    case Command::kPb4:
      prototype_problem(rc.pb4.R0, rc.pb4.R1, rc.pb4.T, rc.pb4.cells);
      break;
    case Command::kChord: {
      const auto model = rc.chord.model.build();
      build_tetragon(model, rc.chord.R0, rc.chord.R1, rc.chord.T);
      if (rc.chord.hamiltonian == HamiltonianKind::kWallWitness)
        wall_witness(rc.chord.R0, rc.chord.R1, rc.chord.delta1, rc.chord.delta2);
      break;
    }
    case Command::kTetragon:
      build_tetragon(rc.tetragon.model.build(), rc.tetragon.R0, rc.tetragon.R1, rc.tetragon.T);
      break;
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"tetra: chord searches, separation budgets and pb4 estimates on model tetragons"};
  app.require_subcommand(1);

  fs::path config_path;
  CommandLine cl;
  std::string output_dir;
  int threads = 0;
  bool quiet = false;

  struct Verb {
    std::optional<Command> command;  // empty for validate
    CLI::App* app;
  };
  std::vector<Verb> verbs;
  auto add = [&](const char* group, const char* verb, const char* help, std::optional<Command> cmd) {
    auto* v = app.add_subcommand(group, std::string(verb) + ": " + help)->require_subcommand(1)->add_subcommand(verb, help);
    v->add_option("config", config_path, "JSON config file")->required()->check(CLI::ExistingFile);
    v->add_option("--set", cl.overrides, "override a leaf key: dotted.path=value")->take_all();
    if (cmd) {
      v->add_option("-o,--output-dir", output_dir, "output directory (else config, TETRA_OUTPUT_DIR)");
      v->add_option("-j,--threads", threads, "worker threads (else config, TETRA_THREADS)")
          ->check(CLI::PositiveNumber);
      v->add_flag("-q,--quiet", quiet, "no summary on stdout");
    }
    verbs.push_back({cmd, v});
  };
  add("scenario", "run", "run one scenario or a batch", Command::kScenario);
  add("pb4", "estimate", "estimate pb4 on the prototype grid", Command::kPb4);
  add("chord", "find", "search a chord between two tetragon regions", Command::kChord);
  add("tetragon", "build", "build a tetragon and check its regions", Command::kTetragon);
  add("validate", "config", "parse and check a config without running it", std::nullopt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitError;
  }

  const Verb* chosen = nullptr;
  for (const auto& v : verbs)
    if (v.app->parsed()) chosen = &v;
  if (!output_dir.empty()) cl.output_dir = output_dir;
  if (threads > 0) cl.threads = threads;

  try {
    if (!chosen->command) {
      const auto rc = load_config(config_path, cl);
      check_preconditions(rc);
      out << "config ok: " << to_string(rc.command) << "\n";
      return kExitPass;
    }
    const auto rc = load_config(config_path, cl, chosen->command);
    const auto result = execute(rc);
    if (!quiet) out << result.summary << "\nreport: " << result.report.string() << "\n";
    return result.exit_code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
  } catch (const ParameterError& e) {
    err << "parameter error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitError;
}

}  // namespace tetra::cli
