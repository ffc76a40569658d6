#include "tetra/cli/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "tetra/errors.hpp"

namespace tetra::cli {

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

namespace {

json numbers(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

json optional_number(const std::optional<double>& v) { return v ? number(*v) : json(nullptr); }

}  // namespace

json to_json(const Chord& c) {
  return {{"seed_params", numbers(c.seed_params)},
          {"seed_index", c.seed_index},
          {"t0", number(c.t0)},
          {"t1", number(c.t1)},
          {"time_length", number(c.time_length)},
          {"start", numbers(c.start)},
          {"end", numbers(c.end)},
          {"start_distance", number(c.start_distance)},
          {"end_distance", number(c.end_distance)},
          {"refined", c.refined},
          {"recorded_states", c.segment.size()}};
}

json to_json(const ChordSearchReport& r) {
  return {{"found", r.found()},
          {"chord", r.chord ? to_json(*r.chord) : json(nullptr)},
          {"time_budget", number(r.time_budget)},
          {"tol", number(r.tol)},
          {"best_distance", number(r.best_distance)},
          {"best_point", numbers(r.best_point)},
          {"shots", r.shots},
          {"hits", r.hits},
          {"failures", r.failures},
          {"failure_messages", r.failure_messages},
          {"steps", r.steps},
          {"max_error_estimate", number(r.max_error_estimate)}};
}

json to_json(const ScenarioReport& r) {
  const auto& ch = r.search.chord;
  return {{"scenario", to_string(r.id)},
          {"model", r.model},
          {"R0", number(r.R0)},
          {"R1", number(r.R1)},
          {"T", number(r.T)},
          {"kappa", number(r.kappa)},
          {"gamma", number(r.gamma)},
          {"delta", number(r.delta)},
          {"combined_delta", number(r.combined_delta)},
          {"perturbation_amplitude", number(r.perturbation_amplitude)},
          {"budget", number(r.budget)},
          {"time_length", ch ? number(ch->time_length) : json(nullptr)},
          {"increment", optional_number(r.increment)},
          {"expected_increment", optional_number(r.expected_increment)},
          {"reference_time", optional_number(r.reference_time)},
          {"certified", r.certified},
          {"notes", r.notes},
          {"pass", r.pass},
          {"search", to_json(r.search)},
          {"tolerances",
           {{"time", number(r.time_tol)},
            {"chord_membership", number(r.search.tol)},
            {"increment", number(r.increment_tol)},
            {"separation_refinement", number(r.separation_tol)}}}};
}

json to_json(const Pb4Report& r) {
  json traces = json::array();
  for (const auto& t : r.traces)
    traces.push_back({{"start", t.start},
                      {"warm", t.warm},
                      {"initial_value", number(t.initial_value)},
                      {"final_value", number(t.final_value)},
                      {"best_value", number(t.best_value)},
                      {"iterations", t.iterations},
                      {"evaluations", t.evaluations},
                      {"diverged", t.diverged},
                      {"level_best", numbers(t.level_best)}});
  return {{"estimate", number(r.estimate)},
          {"sign", r.sign == BracketSign::kPlus ? "plus" : "minus"},
          {"best_start", r.best_start},
          {"best_is_warm", r.best_is_warm},
          {"converged", r.converged},
          {"cells_u", r.cells_u},
          {"cells_s", r.cells_s},
          {"temperatures", numbers(r.temperatures)},
          {"traces", traces},
          {"reference_cells", r.reference_cells ? json(*r.reference_cells) : json(nullptr)},
          {"reference_estimate", optional_number(r.reference_estimate)},
          {"two_grid_difference", optional_number(r.two_grid_difference)},
          // the estimate is the exact discrete max of the validated pair
          {"tolerances", {{"feasibility", 1e-12}}}};
}

std::string trajectory_csv(const Trajectory& tr) {
  const auto& chart = tr.chart();
  std::string out = "t";
  for (int c = 0; c < chart.dim(); ++c) out += "," + chart.label(c);
  out += '\n';
  for (std::size_t i = 0; i < tr.size(); ++i) {
    out += format_number(tr.time(i));
    for (double x : tr.state(i)) out += "," + format_number(x);
    out += '\n';
  }
  return out;
}

std::string norm_plot_data(const Trajectory& tr) {
  const auto n = static_cast<std::size_t>(tr.chart().dim_pairs());
  std::string out = "# t |p|\n";
  for (std::size_t i = 0; i < tr.size(); ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) acc += tr.state(i)[k] * tr.state(i)[k];
    out += format_number(tr.time(i)) + " " + format_number(std::sqrt(acc)) + "\n";
  }
  return out;
}

std::string grid_csv(const GridWindow& w, const GridField& f) {
  std::string out = "i,j,u,s,value\n";
  for (int j = 0; j < f.ns(); ++j)
    for (int i = 0; i < f.nu(); ++i)
      out += std::to_string(i) + "," + std::to_string(j) + "," + format_number(w.u(i)) + "," +
             format_number(w.s(j)) + "," + format_number(f(i, j)) + "\n";
  return out;
}

std::string bracket_ridge_plot_data(const GridWindow& w, const GridField& f, const GridField& g) {
  const auto j = bracket_field(w, f, g);
  std::string out = "# s u\n";
  for (int row = 0; row < j.ns(); ++row) {
    int best = -1;
    double peak = 0.0;
    for (int i = 0; i < j.nu(); ++i)
      if (j(i, row) > peak) {
        peak = j(i, row);
        best = i;
      }
    if (best >= 0) out += format_number(w.s(row)) + " " + format_number(w.u(best)) + "\n";
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  out.close();
  if (!out) throw Error("write failed for " + path.string());
}

void write_json(const std::filesystem::path& path, const json& doc) {
  write_text(path, doc.dump(2) + "\n");
}

}  // namespace tetra::cli
