#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "asmweave/ast.hpp"
#include "asmweave/core.hpp"

namespace support {

using namespace asmweave;

std::filesystem::path models_dir();
std::filesystem::path model(const std::string& name);
std::filesystem::path fixtures_dir();
std::string cli_path();

// Every *.asm under models/, sorted.
std::vector<std::filesystem::path> bundled_machines();

// Runs a shell command, returns its exit status; stdout/stderr are captured.
struct CommandResult {
  int status = -1;
  std::string out;
};
CommandResult run_command(const std::string& cmd);

// Signature shared by generated rules:
//   controlled x0, x1, x2 over {0, 1, 2}
//   controlled b0, b1 over {false, true}
//   controlled f/1
//   rule Aux(p) = x0 := p
MachineDef random_base();

// Random rules over random_base(). Guards are always Bool in states from
// random_state(), so generated rules never raise evaluation errors.
class RuleGen {
 public:
  explicit RuleGen(std::uint64_t seed) : rng_(seed) {}

  TermPtr int_term(int depth, const std::vector<std::string>& vars);
  TermPtr bool_term(int depth, const std::vector<std::string>& vars);
  // Any of the seven constructs, nested at most `depth` deep.
  RulePtr rule(int depth, const std::vector<std::string>& vars = {});
  // Assign, par and if only, over x0..x2 and b0..b1.
  RulePtr pga_rule(int depth);
  // par with 2..4 children of depth at most depth - 1.
  RulePtr top_par(int depth);

  State random_state(const MachineDef& m);
  std::mt19937_64& rng() { return rng_; }
  int pick(int n) { return static_cast<int>(rng_() % static_cast<std::uint64_t>(n)); }

 private:
  std::mt19937_64 rng_;
};

// Reference semantics for PGA rules over 0-ary locations with int/bool
// terms, written independently of the library evaluator. Returns false in
// `ok` when the rule steps outside that fragment.
struct OracleResult {
  bool ok = true;
  bool error = false;  // a guard was not Bool
  std::map<std::string, std::vector<Value>> updates;  // location -> assigned values

  friend bool operator==(const OracleResult&, const OracleResult&) = default;
};
OracleResult oracle_pga(const Rule& r, const std::map<std::string, Value>& state);

// The oracle's update map as a library update set (0-ary locations).
UpdateSet to_update_set(const OracleResult& r);

}  // namespace support
