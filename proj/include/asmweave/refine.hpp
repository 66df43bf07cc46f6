#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "asmweave/multiagent.hpp"

namespace asmweave {

enum class Side { Abstract, Refined };

// One observed quantity: a term over each machine's signature.
struct Observation {
  std::string label;
  TermPtr abstract_term;
  TermPtr refined_term;
};

// Overrides one location of a side's initial state.
struct InitLink {
  Side side = Side::Abstract;
  TermPtr target;
  TermPtr value;
};

struct RefinementBounds {
  std::size_t abstract_steps = 3;
  std::size_t refined_steps = 3;
  std::size_t branch_budget = 10000;
};

struct RefinementSpec {
  std::string name;
  MachineDef abstract;
  MachineDef refined;
  std::vector<Observation> observations;
  std::vector<InitLink> init_link;
  RefinementBounds bounds;
  AgentMode mode = AgentMode::Interleaving;
};

// How an observed run ended.
enum class Marker { Stalled, Budget, Inconsistent };

std::string_view to_string(Marker marker);

// Observed values per state with consecutive repeats collapsed.
struct ObservationSeq {
  std::vector<std::vector<Value>> items;
  Marker marker = Marker::Budget;

  std::string to_string() const;
  friend bool operator==(const ObservationSeq&, const ObservationSeq&) = default;
};

// Initial state of one side with its init links applied.
State linked_initial_state(const RefinementSpec& spec, Side side);

// Observation terms of one side evaluated in every state of the trace,
// starting with the initial state.
ObservationSeq observe(const Trace& trace, const RefinementSpec& spec, Side side);

struct RefinementStats {
  std::size_t abstract_runs = 0;
  std::size_t refined_runs = 0;
  std::size_t abstract_sequences = 0;
  bool abstract_complete = true;
  bool refined_complete = true;
};

struct RefinementVerdict {
  enum class Kind { Pass, Fail, BudgetExhausted };

  Kind kind = Kind::Pass;
  RefinementStats stats;
  // Fail: the refined run whose observations the abstract machine cannot
  // produce, and the abstract sequences closest to it.
  std::optional<Trace> counterexample;
  ObservationSeq violating;
  std::vector<ObservationSeq> nearest;
  std::string reason;
};

std::string_view to_string(RefinementVerdict::Kind kind);

// Bounded check that every refined run is observed like some abstract run,
// after stuttering compression. A refined run cut off by the step bound must
// match a prefix of an abstract run; one that stalls must match an abstract
// run that stalls, likewise for inconsistency. Fail is reported only when
// the abstract side was enumerated completely; otherwise the result is
// BudgetExhausted.
RefinementVerdict check_refinement(const RefinementSpec& spec);

// Re-runs a refined counterexample from its own resolutions.
Trace replay(const RefinementSpec& spec, const Trace& trace);

// Observations of every 0-ary Controlled function and every Controlled
// location set in the initial state, the same term on both sides.
std::vector<Observation> identity_observations(const MachineDef& m);

// A refinement chain manifest:
//   step <name>
//   abstract <file>
//   refined <file>
//   observe <label> : <abstract term> ~ <refined term>
//   bounds <abstract steps> <refined steps> <branch budget>
//   init_link abstract|refined <location> := <term>
//   agents sync|interleave
// Paths are relative to `base_dir`. Lines starting with "//" are comments.
struct ChainStep {
  std::string name;
  std::filesystem::path abstract_file;
  std::filesystem::path refined_file;
  RefinementSpec spec;
};

// Throws ManifestError, IoError or ParseError.
std::vector<ChainStep> parse_manifest(std::string_view text, const std::filesystem::path& base_dir);
std::vector<ChainStep> load_manifest(const std::filesystem::path& file);

std::vector<std::pair<std::string, RefinementVerdict>> check_chain(const std::vector<ChainStep>& steps);

}  // namespace asmweave
