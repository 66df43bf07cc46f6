#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "asmweave/core.hpp"
#include "asmweave/resolver.hpp"

namespace asmweave {

enum class RunOutcome { Stalled, Inconsistent, MaxSteps, ScheduleExhausted };

std::string_view to_string(RunOutcome outcome);

struct TraceStep {
  std::uint64_t pre_digest = 0;
  std::uint64_t post_digest = 0;
  UpdateSet fired;
  std::vector<Resolution> resolutions;
  // Agents whose update sets were fired; empty for single-agent runs.
  std::vector<std::string> agents;
  State state;  // post-state
};

// The replayable record of a run.
struct Trace {
  explicit Trace(State init) : initial(init), final_state(std::move(init)) {}

  std::string machine;
  std::string provenance;
  State initial;
  std::vector<TraceStep> steps;
  State final_state;
  RunOutcome outcome = RunOutcome::MaxSteps;
  // Set when the run ended on an inconsistent update set.
  std::vector<Conflict> conflicts;
  // Picks of the final step that stalled or was inconsistent; replaying
  // them reproduces the same ending.
  std::vector<Resolution> terminal_resolutions;

  // The resolutions of every step, usable as a Scripted resolver input.
  Script script() const;
  // Pre-state digests of each step followed by the final digest.
  std::vector<std::uint64_t> digests() const;
  // State after `k` steps (0 = initial).
  const State& state_at(std::size_t k) const { return k == 0 ? initial : steps[k - 1].state; }
};

// JSON-lines export: one object per step,
//   {"step":k, "updates":[{"f":..,"args":[..],"val":..}], "resolutions":[..],
//    "digest":hex, "post_digest":hex[, "schedule":[..]]}
// A run that stalled after picks, or ended inconsistent, gets one more line
// with "outcome" and the resolutions of that last step.
// `digest` is the pre-state digest. Values map to JSON as: Int -> number (or
// {"int":"digits"} beyond 64 bits), Bool -> bool, Undef -> null, Str ->
// string, Sym -> {"sym":name}, Set -> {"set":[..]}, Tuple -> {"tuple":[..]}.
void write_jsonl(const Trace& trace, std::ostream& os, bool with_schedule = false);

// Reads the resolutions back from a JSON-lines trace.
Script read_script_jsonl(std::istream& is);

std::string value_to_json(const Value& v);
Value value_from_json(const std::string& text);

}  // namespace asmweave
