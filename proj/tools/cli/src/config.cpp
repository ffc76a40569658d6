#include "tetra/cli/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "tetra/errors.hpp"

namespace tetra::cli {

namespace fs = std::filesystem;

std::string to_string(Command c) {
  switch (c) {
    case Command::kScenario: return "scenario";
    case Command::kPb4: return "pb4";
    case Command::kChord: return "chord";
    case Command::kTetragon: return "tetragon";
  }
  return "?";
}

Command command_from_string(const std::string& name) {
  if (name == "scenario") return Command::kScenario;
  if (name == "pb4") return Command::kPb4;
  if (name == "chord") return Command::kChord;
  if (name == "tetragon") return Command::kTetragon;
  throw ConfigError("unknown command '" + name + "' (expected scenario, pb4, chord, tetragon)");
}

// ---- key locations ---------------------------------------------------------

KeyLocator KeyLocator::scan(const std::string& text) {
  // the text is already known to be valid JSON, so only structure matters here
  struct Frame {
    bool object;
    std::string key;
    int index = 0;
    bool expect_key = true;
  };
  KeyLocator loc;
  std::vector<Frame> stack;
  int line = 1;
  auto path_of = [&](std::size_t depth) {
    std::string p;
    for (std::size_t d = 0; d < depth; ++d) {
      if (!p.empty()) p += '.';
      p += stack[d].object ? stack[d].key : std::to_string(stack[d].index);
    }
    return p;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
    } else if (c == '"') {
      std::string s;
      for (++i; i < text.size() && text[i] != '"'; ++i) {
        if (text[i] == '\\' && i + 1 < text.size()) ++i;
        s += text[i];
      }
      if (!stack.empty() && stack.back().object && stack.back().expect_key) {
        stack.back().key = s;
        stack.back().expect_key = false;
        const auto p = path_of(stack.size());
        if (loc.lines_.count(p))
          throw ConfigError("duplicate key '" + p + "' at line " + std::to_string(line));
        loc.lines_[p] = line;
      }
    } else if (c == '{' || c == '[') {
      if (!stack.empty()) loc.lines_.emplace(path_of(stack.size()), line);
      stack.push_back({c == '{', {}, 0, true});
    } else if (c == '}' || c == ']') {
      stack.pop_back();
    } else if (c == ',') {
      if (stack.back().object) {
        stack.back().expect_key = true;
      } else {
        ++stack.back().index;
        loc.lines_.emplace(path_of(stack.size()), line);
      }
    } else if (!stack.empty() && !stack.back().object && stack.back().index == 0 &&
               !std::isspace(static_cast<unsigned char>(c))) {
      loc.lines_.emplace(path_of(stack.size()), line);
    }
  }
  return loc;
}

void KeyLocator::mark_override(const std::string& path) { overridden_[path] = true; }

std::string KeyLocator::where(const std::string& path) const {
  // the closest recorded ancestor wins
  std::string p = path;
  for (;;) {
    if (overridden_.count(p)) return "--set override";
    if (auto it = lines_.find(p); it != lines_.end()) return "line " + std::to_string(it->second);
    const auto dot = p.rfind('.');
    if (dot == std::string::npos) return "top level";
    p.erase(dot);
  }
}

void apply_override(json& doc, const std::string& assignment, KeyLocator& locator) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override '" + assignment + "' must look like key.path=value");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json* node = &doc;
  std::size_t start = 0;
  for (;;) {
    const auto dot = path.find('.', start);
    const std::string part = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError("override path '" + path + "' has an empty component");
    json* next = nullptr;
    if (node->is_array()) {
      char* end = nullptr;
      const long idx = std::strtol(part.c_str(), &end, 10);
      if (*end != '\0' || idx < 0 || static_cast<std::size_t>(idx) >= node->size())
        throw ConfigError("override path '" + path + "': '" + part + "' is not a valid index");
      next = &(*node)[static_cast<std::size_t>(idx)];
    } else {
      if (node->is_null()) *node = json::object();
      if (!node->is_object())
        throw ConfigError("override path '" + path + "': '" + part + "' is below a leaf value");
      next = &(*node)[part];
    }
    if (dot == std::string::npos) {
      if (next->is_object() || next->is_array())
        throw ConfigError("override path '" + path + "' names a section, not a leaf key");
      *next = value;
      break;
    }
    node = next;
    start = dot + 1;
  }
  locator.mark_override(path);
}

// ---- strict section reader -------------------------------------------------

namespace {

class Section {
 public:
  Section(const json* j, std::string path, const KeyLocator& loc, std::string origin)
      : j_(j), path_(std::move(path)), loc_(&loc), origin_(std::move(origin)) {
    if (j_ && !j_->is_object()) fail_at(path_, "must be an object");
  }

  bool has(const std::string& key) const { return j_ && j_->contains(key); }

  const json* raw(const std::string& key) {
    used_.insert(key);
    if (!has(key)) return nullptr;
    return &(*j_)[key];
  }

  Section object(const std::string& key) { return Section(raw(key), full(key), *loc_, origin_); }

  template <class T>
  void get(const std::string& key, T& out) {
    const json* v = raw(key);
    if (!v) return;
    if constexpr (std::is_same_v<T, bool>) {
      if (!v->is_boolean()) fail(key, "expects true or false");
      out = v->get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v->is_string()) fail(key, "expects a string");
      out = v->get<std::string>();
    } else if constexpr (std::is_same_v<T, std::uint64_t>) {
      if (!v->is_number_unsigned()) fail(key, "expects a non-negative integer");
      out = v->get<std::uint64_t>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v->is_number_integer()) fail(key, "expects an integer");
      out = v->get<T>();
    } else if constexpr (std::is_same_v<T, std::optional<double>>) {
      if (!v->is_number()) fail(key, "expects a number");
      out = v->get<double>();
    } else {
      if (!v->is_number()) fail(key, "expects a number");
      out = v->get<T>();
    }
  }

  template <class T>
  void get_positive(const std::string& key, T& out) {
    get(key, out);
    if (!(out > T{0})) fail(key, "must be positive");
  }

  // rejects keys that no reader asked for
  void finish() const {
    if (!j_) return;
    for (const auto& item : j_->items())
      if (!used_.count(item.key())) fail(item.key(), "is not a recognized key");
  }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    fail_at(full(key), msg);
  }

  const std::string& path() const { return path_; }

 private:
  std::string full(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  [[noreturn]] void fail_at(const std::string& path, const std::string& msg) const {
    throw ConfigError(origin_ + " " + loc_->where(path) + ": key '" + path + "' " + msg);
  }

  const json* j_;
  std::string path_;
  const KeyLocator* loc_;
  std::string origin_;
  std::set<std::string> used_;
};

ModelSpec read_model(Section& parent) {
  ModelSpec m;
  const json* v = parent.raw("model");
  if (!v) return m;
  std::string kind;
  if (v->is_string()) {
    kind = v->get<std::string>();
  } else {
    auto s = parent.object("model");
    s.get("kind", kind);
    s.get("k", m.k);
    s.finish();
  }
  if (kind == "circle") {
    m.kind = ModelKind::kCircle;
  } else if (kind == "torus") {
    m.kind = ModelKind::kUnitCotangentTorus;
  } else if (kind == "sphere") {
    m.kind = ModelKind::kContactSphere;
  } else {
    parent.fail("model", "kind must be circle, torus or sphere (got '" + kind + "')");
  }
  if (m.k < 1) parent.fail("model", "k must be at least 1");
  if (m.kind == ModelKind::kCircle && m.k != 1) parent.fail("model", "the circle model has k = 1");
  return m;
}

RegionKind read_region(Section& s, const std::string& key, RegionKind fallback) {
  std::string name;
  s.get(key, name);
  if (name.empty()) return fallback;
  if (name == "floor") return RegionKind::kFloor;
  if (name == "ceiling") return RegionKind::kCeiling;
  if (name == "low_wall") return RegionKind::kLowWall;
  if (name == "high_wall") return RegionKind::kHighWall;
  s.fail(key, "must be floor, ceiling, low_wall or high_wall (got '" + name + "')");
}

void read_integrator(Section s, IntegratorConfig& c) {
  s.get_positive("tol", c.tol);
  s.get_positive("initial_step", c.initial_step);
  s.get_positive("min_step", c.min_step);
  s.get_positive("max_step", c.max_step);
  s.get_positive("escape_bound", c.escape_bound);
  s.get_positive("max_steps", c.max_steps);
  s.finish();
}

void read_search(Section s, ChordSearchConfig& c) {
  s.get_positive("seeds", c.seeds);
  s.get_positive("phases", c.phases);
  s.get_positive("tol", c.tol);
  s.get("refine_evaluations", c.refine_evaluations);
  if (c.refine_evaluations < 0) s.fail("refine_evaluations", "must be non-negative");
  s.get("refine_candidates", c.refine_candidates);
  if (c.refine_candidates < 0) s.fail("refine_candidates", "must be non-negative");
  s.get("minimize_time", c.minimize_time);
  read_integrator(s.object("integrator"), c.integrator);
  s.finish();
}

void read_separation(Section s, SeparationConfig& c) {
  s.get_positive("samples", c.samples);
  s.get_positive("time_samples", c.time_samples);
  s.get("refine_starts", c.refine_starts);
  if (c.refine_starts < 0) s.fail("refine_starts", "must be non-negative");
  s.get_positive("refine_tol", c.refine_tol);
  s.get("max_sweeps", c.max_sweeps);
  if (c.max_sweeps < 0) s.fail("max_sweeps", "must be non-negative");
  s.finish();
}

ScenarioConfig read_scenario(Section s, std::uint64_t seed, bool& trajectory) {
  std::string name;
  s.get("name", name);
  if (name.empty()) s.fail("name", "is required (superconductivity, unstable_equilibrium, mechanical, reeb_chord)");
  ScenarioConfig c;
  try {
    c = default_scenario_config(scenario_from_string(name));
  } catch (const ConfigError& e) {
    s.fail("name", e.what());
  }
  c.seed = seed;
  s.get("k", c.k);
  s.get("m", c.m);
  s.get("R0", c.R0);
  s.get("R1", c.R1);
  s.get("T", c.T);
  s.get("potential_shift", c.potential_shift);
  s.get("coupling", c.coupling);
  s.get("beta", c.beta);
  s.get("potential_depth", c.potential_depth);
  std::string potential;
  s.get("potential", potential);
  if (!potential.empty()) {
    try {
      c.potential = potential_from_string(potential);
    } catch (const ConfigError& e) {
      s.fail("potential", e.what());
    }
  }
  s.get("potential_modulation", c.potential_modulation);
  std::string reeb;
  s.get("reeb_model", reeb);
  if (reeb == "circle") {
    c.reeb_model = ReebModel::kCircle;
  } else if (reeb == "sphere") {
    c.reeb_model = ReebModel::kSphere;
  } else if (!reeb.empty()) {
    s.fail("reeb_model", "must be circle or sphere");
  }
  s.get("conformal_base", c.conformal_base);
  s.get("conformal_amplitude", c.conformal_amplitude);
  {
    auto p = s.object("perturbation");
    p.get("delta", c.perturbation.delta);
    if (c.perturbation.delta < 0.0) p.fail("delta", "must be non-negative");
    p.get_positive("tube_radius", c.perturbation.tube_radius);
    p.get("far_factor", c.perturbation.far_factor);
    if (c.perturbation.far_factor < 0.0) p.fail("far_factor", "must be non-negative");
    p.get("modulation", c.perturbation.modulation);
    p.finish();
  }
  read_search(s.object("search"), c.search);
  read_separation(s.object("separation"), c.separation);
  s.get("trajectory", trajectory);
  if (!(c.R0 > 0.0 && c.R1 > c.R0)) s.fail("R1", "needs 0 < R0 < R1");
  s.finish();
  return c;
}

void read_pb4(Section s, Pb4Settings& p, std::uint64_t seed, int threads) {
  s.get("R0", p.R0);
  s.get("R1", p.R1);
  s.get("T", p.T);
  s.get("cells", p.cells);
  if (p.cells < 8) s.fail("cells", "must be at least 8");
  auto& o = p.optimizer;
  o.seed = seed;
  o.threads = threads;
  s.get_positive("starts", o.starts);
  s.get_positive("temperature_start", o.temperature_start);
  s.get_positive("temperature_end", o.temperature_end);
  s.get_positive("temperature_factor", o.temperature_factor);
  if (o.temperature_factor >= 1.0) s.fail("temperature_factor", "must lie in (0, 1)");
  s.get("iterations_per_level", o.iterations_per_level);
  if (o.iterations_per_level < 0) s.fail("iterations_per_level", "must be non-negative");
  s.get("perturbation", o.perturbation);
  std::string sign = "plus";
  s.get("sign", sign);
  if (sign == "plus") {
    o.sign = BracketSign::kPlus;
  } else if (sign == "minus") {
    o.sign = BracketSign::kMinus;
  } else {
    s.fail("sign", "must be plus or minus");
  }
  s.get("two_grid_cells", o.two_grid_cells);
  if (o.two_grid_cells < 0 || (o.two_grid_cells > 0 && o.two_grid_cells < 8))
    s.fail("two_grid_cells", "must be 0 (off) or at least 8");
  auto e = s.object("expect");
  e.get("min", p.expect_min);
  e.get("max", p.expect_max);
  e.get("max_two_grid_difference", p.max_two_grid_difference);
  e.finish();
  if (!(p.R0 > 0.0 && p.R1 > p.R0)) s.fail("R1", "needs 0 < R0 < R1");
  if (!(p.T > 0.0 && p.T < 1.0)) s.fail("T", "must lie in (0, 1)");
  s.finish();
}

void read_chord(Section s, ChordSettings& c, int threads) {
  c.model = read_model(s);
  s.get("R0", c.R0);
  s.get("R1", c.R1);
  s.get("T", c.T);
  {
    auto h = s.object("hamiltonian");
    std::string kind = "saddle";
    h.get("kind", kind);
    if (kind == "saddle") {
      c.hamiltonian = HamiltonianKind::kSaddle;
    } else if (kind == "cosine") {
      c.hamiltonian = HamiltonianKind::kCosine;
      h.get("shift", c.shift);
    } else if (kind == "mechanical") {
      c.hamiltonian = HamiltonianKind::kMechanical;
      h.get("depth", c.depth);
      h.get("modulation", c.modulation);
      std::string potential;
      h.get("potential", potential);
      if (!potential.empty()) {
        try {
          c.potential = potential_from_string(potential);
        } catch (const ConfigError& e) {
          h.fail("potential", e.what());
        }
      }
    } else if (kind == "wall_witness") {
      c.hamiltonian = HamiltonianKind::kWallWitness;
      h.get_positive("delta1", c.delta1);
      h.get_positive("delta2", c.delta2);
    } else if (kind == "conformal_reeb") {
      c.hamiltonian = HamiltonianKind::kConformalReeb;
      h.get("base", c.base);
      h.get("amplitude", c.amplitude);
    } else {
      h.fail("kind", "must be saddle, cosine, mechanical, wall_witness or conformal_reeb");
    }
    h.finish();
  }
  c.from = read_region(s, "from", RegionKind::kFloor);
  c.to = read_region(s, "to", RegionKind::kCeiling);
  s.get_positive("budget", c.budget);
  s.get("expect_chord", c.expect_chord);
  c.search.threads = threads;
  read_search(s.object("search"), c.search);
  s.get("trajectory", c.trajectory);
  if (!(c.R0 > 0.0 && c.R1 > c.R0)) s.fail("R1", "needs 0 < R0 < R1");
  s.finish();
}

void read_tetragon(Section s, TetragonSettings& t) {
  t.model = read_model(s);
  s.get("R0", t.R0);
  s.get("R1", t.R1);
  s.get("T", t.T);
  s.get_positive("samples", t.samples);
  s.get("smoothing_eps", t.smoothing_eps);
  if (t.smoothing_eps && !(*t.smoothing_eps > 0.0)) s.fail("smoothing_eps", "must be positive");
  s.get_positive("residual_samples", t.residual_samples);
  if (!(t.R0 > 0.0 && t.R1 > t.R0)) s.fail("R1", "needs 0 < R0 < R1");
  s.finish();
}

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (!v || !*v) return std::nullopt;
  return std::string(v);
}

}  // namespace

ContactModel ModelSpec::build() const {
  switch (kind) {
    case ModelKind::kCircle: return ContactModel::circle();
    case ModelKind::kUnitCotangentTorus: return ContactModel::unit_cotangent_torus(k);
    case ModelKind::kContactSphere: return ContactModel::contact_sphere(k);
  }
  throw ConfigError("unknown model");
}

RunConfig parse_config(const std::string& text, const std::string& origin, const CommandLine& cli,
                       std::optional<Command> expected) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // nlohmann reports "parse error at line L, column C: ..."
    std::string msg = e.what();
    if (const auto p = msg.find("parse error"); p != std::string::npos) msg = msg.substr(p);
    throw ConfigError(origin + ": " + msg);
  }
  if (!doc.is_object()) throw ConfigError(origin + ": the config must be a JSON object");
  KeyLocator locator = KeyLocator::scan(text);
  for (const auto& o : cli.overrides) apply_override(doc, o, locator);

  RunConfig rc;
  Section top(&doc, "", locator, origin);
  std::string command;
  top.get("command", command);
  if (command.empty()) {
    if (!expected) top.fail("command", "is required");
    command = to_string(*expected);
  }
  try {
    rc.command = command_from_string(command);
  } catch (const ConfigError& e) {
    top.fail("command", e.what());
  }
  if (expected && *expected != rc.command)
    top.fail("command", "is '" + command + "' but the subcommand runs '" + to_string(*expected) + "'");

  top.get("name", rc.name);
  if (rc.name.empty() || rc.name.find_first_of("/\\") != std::string::npos)
    top.fail("name", "must be a non-empty file stem without path separators");
  std::string out;
  top.get("output_dir", out);
  std::optional<int> file_threads;
  if (top.has("threads")) {
    int t = 1;
    top.get_positive("threads", t);
    file_threads = t;
  }
  top.get("seed", rc.seed);
  top.get("verbosity", rc.verbosity);

  // thread count: flag, then file, then TETRA_THREADS
  if (cli.threads) {
    rc.threads = *cli.threads;
  } else if (file_threads) {
    rc.threads = *file_threads;
  } else if (auto e = env("TETRA_THREADS")) {
    char* end = nullptr;
    const long t = std::strtol(e->c_str(), &end, 10);
    if (*end != '\0' || t < 1) throw ConfigError("TETRA_THREADS must be a positive integer (got '" + *e + "')");
    rc.threads = static_cast<int>(t);
  }
  if (rc.threads < 1) throw ConfigError("thread count must be at least 1");

  // output directory: flag, then file, then TETRA_OUTPUT_DIR, then ./tetra_out
  fs::path dir = "tetra_out";
  if (cli.output_dir) {
    dir = *cli.output_dir;
  } else if (!out.empty()) {
    dir = out;
  } else if (auto e = env("TETRA_OUTPUT_DIR")) {
    dir = *e;
  }
  rc.output_dir = fs::absolute(dir).lexically_normal();

  switch (rc.command) {
    case Command::kScenario: {
      const json* sec = top.raw("scenario");
      if (!sec) top.fail("scenario", "section is required");
      if (sec->is_array()) {
        rc.batch = true;
        if (sec->empty()) top.fail("scenario", "batch must not be empty");
        for (std::size_t i = 0; i < sec->size(); ++i) {
          bool traj = false;
          rc.scenarios.push_back(read_scenario(
              Section(&(*sec)[i], "scenario." + std::to_string(i), locator, origin), rc.seed, traj));
          rc.scenario_trajectory.push_back(traj);
        }
      } else {
        bool traj = true;
        rc.scenarios.push_back(read_scenario(top.object("scenario"), rc.seed, traj));
        rc.scenario_trajectory.push_back(traj);
      }
      // a single run parallelizes its search, a batch parallelizes across runs
      for (auto& c : rc.scenarios) c.search.threads = rc.batch ? 1 : rc.threads;
      break;
    }
    case Command::kPb4:
      if (!top.raw("pb4")) top.fail("pb4", "section is required");
      read_pb4(top.object("pb4"), rc.pb4, rc.seed, rc.threads);
      break;
    case Command::kChord:
      if (!top.raw("chord")) top.fail("chord", "section is required");
      read_chord(top.object("chord"), rc.chord, rc.threads);
      break;
    case Command::kTetragon:
      if (!top.raw("tetragon")) top.fail("tetragon", "section is required");
      read_tetragon(top.object("tetragon"), rc.tetragon);
      break;
  }
  top.finish();
  rc.echo = doc;
  return rc;
}

RunConfig load_config(const fs::path& file, const CommandLine& cli, std::optional<Command> expected) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), file.string(), cli, expected);
}

}  // namespace tetra::cli
