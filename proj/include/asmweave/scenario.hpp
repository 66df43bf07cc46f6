#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "asmweave/multiagent.hpp"

namespace asmweave {

// Environment input for one step.
struct ScenarioStep {
  std::map<Location, Value> monitored;
  std::vector<Resolution> resolutions;
};

struct ScenarioAssertion {
  std::size_t line = 0;
  // Step after which the term is checked; nothing for final assertions.
  std::optional<std::size_t> step;
  std::string text;
  TermPtr term;
};

// Line-oriented scenario file:
//   scenario <name>
//   machine <path>
//   seed <n>
//   max_steps <n>
//   scheduler sync|interleave
//   init f(args) := value
//   step <k>: m(args) := value; choose <label> = value; draw f(args) = value; schedule <agent>
//   assert <k>: <term>
//   final: <term>
// Steps count from 1; "assert 0" checks the initial state. Lines starting
// with "//" are comments.
struct Scenario {
  std::string name;
  std::filesystem::path machine_file;
  MachineDef machine;
  std::uint64_t seed = 0;
  std::size_t max_steps = 0;
  AgentMode mode = AgentMode::Interleaving;
  std::map<Location, Value> init;
  std::map<std::size_t, ScenarioStep> steps;
  std::vector<ScenarioAssertion> assertions;
};

// Throws ScenarioError (with the line) or IoError.
Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir);
Scenario load_scenario(const std::filesystem::path& file);

struct AssertionResult {
  ScenarioAssertion assertion;
  bool passed = false;
  Value value;
  // "f(args) = value" for each location the term reads.
  std::vector<std::string> witness;
  std::string error;
};

struct ScenarioReport {
  std::string name;
  std::vector<AssertionResult> results;
  std::optional<Trace> trace;
  // Runtime error that ended the run early, with position.
  std::string run_error;
  std::vector<std::string> warnings;

  bool passed() const;
};

// Runs the scenario and checks every assertion; never stops at the first
// failure.
ScenarioReport run_scenario(const Scenario& sc);

struct SuiteEntry {
  std::filesystem::path file;
  std::optional<ScenarioReport> report;
  std::string load_error;
};

struct SuiteReport {
  std::vector<SuiteEntry> entries;
  std::vector<std::string> warnings;

  std::size_t failures() const;
  bool load_failed() const;
  // 0 all pass, 1 some scenario failed, 2 some file could not be loaded.
  int exit_status() const;
  std::string to_json() const;
};

// Runs every *.scn file under `dir`, in name order.
SuiteReport run_suite(const std::filesystem::path& dir);

// Scenario template for a machine file: its Monitored and Abstract
// functions, choice labels and agents, and an empty assertion block.
std::string skeleton(const std::filesystem::path& machine_file);

std::string format_report(const ScenarioReport& report);

}  // namespace asmweave
