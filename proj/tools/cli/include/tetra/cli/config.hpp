#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tetra/dynamics.hpp"
#include "tetra/pb4.hpp"
#include "tetra/scenarios.hpp"
#include "tetra/tetragon.hpp"

namespace tetra::cli {

using json = nlohmann::json;

enum class Command { kScenario, kPb4, kChord, kTetragon };

std::string to_string(Command c);
Command command_from_string(const std::string& name);

// Line of every key in a JSON text, addressed by dotted path ("scenario.search.seeds",
// array elements by index).  Keys introduced by --set are tagged instead.
class KeyLocator {
 public:
  static KeyLocator scan(const std::string& text);

  void mark_override(const std::string& path);
  // "line 7", "--set override" or "top level"
  std::string where(const std::string& path) const;

 private:
  std::map<std::string, int> lines_;
  std::map<std::string, bool> overridden_;
};

// Parses "a.b.c=value"; the value is read as JSON when it parses, otherwise as a string.
void apply_override(json& doc, const std::string& assignment, KeyLocator& locator);

struct ModelSpec {
  ModelKind kind = ModelKind::kCircle;
  int k = 1;
  ContactModel build() const;
};

struct Pb4Settings {
  double R0 = 1.0, R1 = 2.0, T = 0.25;
  int cells = 128;
  Pb4OptimizerConfig optimizer;
  std::optional<double> expect_min, expect_max, max_two_grid_difference;
};

enum class HamiltonianKind { kSaddle, kCosine, kMechanical, kWallWitness, kConformalReeb };

struct ChordSettings {
  ModelSpec model;
  double R0 = 1.0, R1 = 2.0, T = 0.25;
  HamiltonianKind hamiltonian = HamiltonianKind::kSaddle;
  double shift = 0.0;                       // cosine
  double depth = 0.5, modulation = 0.5;     // mechanical
  PotentialKind potential = PotentialKind::kBump;
  double delta1 = 0.005, delta2 = 0.01;     // wall witness
  double base = 1.5, amplitude = 0.3;       // conformal Reeb
  RegionKind from = RegionKind::kFloor;
  RegionKind to = RegionKind::kCeiling;
  double budget = 1.0;
  bool expect_chord = true;  // false: the run passes when no chord exists within the budget
  ChordSearchConfig search;
  bool trajectory = true;
};

struct TetragonSettings {
  ModelSpec model;
  double R0 = 1.0, R1 = 2.0, T = 0.25;
  int samples = 16;                        // seed points per region
  std::optional<double> smoothing_eps;     // also checks the rounded surface
  int residual_samples = 1000;
};

struct RunConfig {
  Command command = Command::kScenario;
  std::string name = "run";
  std::filesystem::path output_dir;  // absolute once resolved
  int threads = 1;
  std::uint64_t seed = 1;
  int verbosity = 0;

  bool batch = false;
  std::vector<ScenarioConfig> scenarios;
  std::vector<bool> scenario_trajectory;
  Pb4Settings pb4;
  ChordSettings chord;
  TetragonSettings tetragon;

  json echo;  // the document after overrides, as executed
};

// values given on the command line win over the file, which wins over the environment
struct CommandLine {
  std::optional<std::filesystem::path> output_dir;
  std::optional<int> threads;
  std::vector<std::string> overrides;
};

// Reads, overrides and validates a config file; throws ConfigError with
// line and key context.  `expected` rejects a file written for another command.
RunConfig load_config(const std::filesystem::path& file, const CommandLine& cli,
                      std::optional<Command> expected = std::nullopt);
RunConfig parse_config(const std::string& text, const std::string& origin, const CommandLine& cli,
                       std::optional<Command> expected = std::nullopt);

}  // namespace tetra::cli
