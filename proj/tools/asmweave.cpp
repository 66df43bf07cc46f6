// asmweave: run, inspect, normalize and check abstract state machines.
//
// Exit status: 0 success, 1 semantic failure (assertion, refinement,
// inconsistency, runtime error), 2 usage or parse error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "asmweave/multiagent.hpp"
#include "asmweave/normalform.hpp"
#include "asmweave/parser.hpp"
#include "asmweave/refine.hpp"
#include "asmweave/scenario.hpp"

namespace fs = std::filesystem;
using namespace asmweave;

namespace {

constexpr int kOk = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

// Error codes that mean the input could not be read or understood.
bool is_input_error(ErrorCode c) {
  switch (c) {
    case ErrorCode::SyntaxError:
    case ErrorCode::ResolveError:
    case ErrorCode::UnknownFunction:
    case ErrorCode::ArityMismatch:
    case ErrorCode::ManifestError:
    case ErrorCode::ScenarioError:
    case ErrorCode::IoError:
      return true;
    default:
      return false;
  }
}

int report_error(const std::string& file, const Error& e) {
  if (auto* pe = dynamic_cast<const ParseError*>(&e)) {
    for (const auto& d : pe->diagnostics()) std::cerr << file << ":" << d.to_string() << "\n";
    return kUsage;
  }
  std::cerr << file << ":" << (e.pos().known() ? "" : " ") << e.what() << "\n";
  return is_input_error(e.code()) ? kUsage : kFail;
}

std::uint64_t default_seed() {
  if (const char* s = std::getenv("ASMWEAVE_SEED")) {
    try {
      return std::stoull(s);
    } catch (...) {
      std::cerr << "warning: ignoring non-numeric ASMWEAVE_SEED\n";
    }
  }
  return 0;
}

AgentMode parse_mode(const std::string& s) { return s == "sync" ? AgentMode::Synchronous : AgentMode::Interleaving; }

bool write_trace(const Trace& t, const std::string& path, bool with_schedule) {
  std::ofstream out(path);
  if (!out) {
    std::cerr << "cannot write " << path << "\n";
    return false;
  }
  write_jsonl(t, out, with_schedule);
  return true;
}

void print_trace(const Trace& t) {
  for (std::size_t k = 0; k < t.steps.size(); ++k) {
    const auto& st = t.steps[k];
    std::cout << "step " << k + 1;
    if (!st.agents.empty()) {
      std::cout << " [";
      for (std::size_t i = 0; i < st.agents.size(); ++i) std::cout << (i ? " " : "") << st.agents[i];
      std::cout << "]";
    }
    std::cout << ": " << st.fired.to_string() << "\n";
  }
}

struct RunArgs {
  std::string machine;
  std::size_t steps = 100;
  std::uint64_t seed = 0;
  std::string agents = "interleave";
  std::string trace;
  std::string script;
};

int cmd_run(const RunArgs& a) {
  try {
    MachineDef m = load_machine(a.machine);
    RunConfig config;
    config.max_steps = a.steps;
    if (!a.script.empty()) {
      std::ifstream in(a.script);
      if (!in) throw Error(ErrorCode::IoError, "cannot read " + a.script);
      config.resolver = Resolver::scripted(read_script_jsonl(in));
    } else {
      config.resolver = Resolver::seeded(a.seed);
    }
    Trace t = ma_run(m, Scheduler::from_mode(parse_mode(a.agents)), std::move(config));
    if (!a.trace.empty() && !write_trace(t, a.trace, m.multi_agent())) return kUsage;
    std::cout << t.final_state.dump();
    std::cerr << to_string(t.outcome) << " after " << t.steps.size() << " steps\n";
    if (t.outcome == RunOutcome::Inconsistent) {
      for (const auto& c : t.conflicts) std::cerr << "conflict: " << c.to_string() << "\n";
      return kFail;
    }
    return kOk;
  } catch (const Error& e) {
    return report_error(a.machine, e);
  }
}

int cmd_normalize(const std::string& file, std::string rule) {
  try {
    MachineDef m = load_machine(file);
    if (rule.empty()) rule = m.main;
    PgaVerdict v = classify_pga(m, rule);
    if (!v.is_pga) {
      std::cout << rule << " is not PGA\n";
      for (const auto& [pos, what] : v.offending) std::cout << "  " << file << ":" << pos.to_string() << ": " << what << "\n";
      return kFail;
    }
    std::cout << rule << " is PGA\n";
    NormalForm nf = normalize(m, rule);
    std::cout << print_rule(nf.to_rule()) << "\n";
    StateSpace space = default_space(m);
    EquivalenceResult eq = equivalence_check(m, m.rule(rule).body, nf.to_rule(), space);
    if (eq.equivalent) {
      std::cout << "equivalent on " << eq.states_checked << " states\n";
      return kOk;
    }
    std::cout << "NOT equivalent\nwitness state:\n" << eq.witness->dump();
    std::cout << "original:   " << eq.left.to_string() << "\nnormalized: " << eq.right.to_string() << "\n";
    return kFail;
  } catch (const Error& e) {
    return report_error(file, e);
  }
}

int cmd_check_refine(const std::string& manifest, const std::string& trace_out) {
  try {
    auto steps = load_manifest(manifest);
    auto results = check_chain(steps);
    if (results.empty()) std::cout << "no refinement steps\n";
    int status = kOk;
    bool trace_written = false;
    for (const auto& [name, v] : results) {
      std::cout << to_string(v.kind) << "  " << name << "  (abstract runs " << v.stats.abstract_runs
                << ", refined runs " << v.stats.refined_runs << ")\n";
      if (v.kind == RefinementVerdict::Kind::Pass) continue;
      status = kFail;
      std::cout << "    " << v.reason << "\n";
      if (v.kind != RefinementVerdict::Kind::Fail) continue;
      std::cout << "    counterexample:\n";
      std::ostringstream os;
      write_jsonl(*v.counterexample, os, true);
      std::istringstream lines(os.str());
      for (std::string line; std::getline(lines, line);) std::cout << "      " << line << "\n";
      for (const auto& n : v.nearest) std::cout << "    nearest abstract: " << n.to_string() << "\n";
      if (!trace_out.empty() && !trace_written) {
        if (!write_trace(*v.counterexample, trace_out, true)) return kUsage;
        trace_written = true;
      }
    }
    return status;
  } catch (const Error& e) {
    return report_error(manifest, e);
  }
}

int cmd_scenario(const std::string& path, bool json, const std::string& trace_out) {
  try {
    if (fs::is_directory(path)) {
      SuiteReport suite = run_suite(path);
      for (const auto& w : suite.warnings) std::cerr << "warning: " << w << "\n";
      if (json) {
        std::cout << suite.to_json() << "\n";
      } else {
        for (const auto& e : suite.entries) {
          if (e.report)
            std::cout << format_report(*e.report);
          else
            std::cout << "ERROR " << e.file.string() << "\n  " << e.load_error << "\n";
        }
        std::cout << suite.entries.size() << (suite.entries.size() == 1 ? " scenario, " : " scenarios, ")
                  << suite.failures() << " failed\n";
      }
      return suite.exit_status();
    }
    ScenarioReport r = run_scenario(load_scenario(path));
    if (json) {
      SuiteReport one;
      one.entries.push_back(SuiteEntry{path, r, {}});
      std::cout << one.to_json() << "\n";
    } else {
      std::cout << format_report(r);
    }
    if (!trace_out.empty() && r.trace && !write_trace(*r.trace, trace_out, true)) return kUsage;
    return r.passed() ? kOk : kFail;
  } catch (const Error& e) {
    return report_error(path, e);
  }
}

int cmd_explore(const std::string& file, std::size_t depth, const std::string& assertion, const std::string& agents,
                std::size_t budget, const std::string& trace_out) {
  try {
    MachineDef m = load_machine(file);
    ExploreConfig config;
    config.depth = depth;
    config.mode = parse_mode(agents);
    config.branch_budget = budget;
    if (!assertion.empty()) config.assertion = parse_term_for(assertion, m);
    ExploreReport r = explore(m, config);
    std::cout << "states " << r.states_visited << ", depth " << r.depth_reached << ", inconsistent branches "
              << r.inconsistent_branches << "\n";
    if (!r.counterexample) {
      std::cout << (config.assertion ? "no counterexample" : "no assertion given") << " up to depth " << depth << "\n";
      return kOk;
    }
    std::cout << "counterexample in " << r.counterexample->steps.size() << " steps:\n";
    print_trace(*r.counterexample);
    std::cout << "violating state:\n" << r.counterexample->final_state.dump();
    if (!trace_out.empty() && !write_trace(*r.counterexample, trace_out, m.multi_agent())) return kUsage;
    return kFail;
  } catch (const Error& e) {
    return report_error(file, e);
  }
}

int cmd_fmt(const std::string& file, bool to_stdout, bool check) {
  try {
    std::string text = read_file(file);
    std::string pretty = pretty_print(parse_machine(text));
    if (to_stdout) {
      std::cout << pretty;
      return kOk;
    }
    if (check) {
      if (pretty == text) return kOk;
      std::cerr << file << ": not formatted\n";
      return kFail;
    }
    if (pretty != text) {
      std::ofstream out(file, std::ios::binary | std::ios::trunc);
      if (!out) throw Error(ErrorCode::IoError, "cannot write " + file);
      out << pretty;
    }
    return kOk;
  } catch (const Error& e) {
    return report_error(file, e);
  }
}

int cmd_skeleton(const std::string& file) {
  try {
    std::cout << skeleton(file);
    return kOk;
  } catch (const Error& e) {
    return report_error(file, e);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"asmweave: executable abstract state machines"};
  app.require_subcommand(1);

  RunArgs run_args;
  run_args.seed = default_seed();
  auto* run = app.add_subcommand("run", "Run a machine and print its final state");
  run->add_option("machine", run_args.machine, "Machine file")->required();
  run->add_option("--steps", run_args.steps, "Maximum number of steps");
  run->add_option("--seed", run_args.seed, "Seed for choices (default $ASMWEAVE_SEED or 0)");
  run->add_option("--agents", run_args.agents, "Agent scheduling")->check(CLI::IsMember({"sync", "interleave"}));
  run->add_option("--trace", run_args.trace, "Write the trace as JSON lines");
  run->add_option("--script", run_args.script, "Replay the resolutions of a JSON-lines trace");

  std::string norm_file, norm_rule;
  auto* norm = app.add_subcommand("normalize", "Classify a rule and print its normal form");
  norm->add_option("machine", norm_file, "Machine file")->required();
  norm->add_option("--rule", norm_rule, "Rule name (default: main rule)");

  std::string manifest, refine_trace;
  auto* refine = app.add_subcommand("check-refine", "Check a refinement chain manifest");
  refine->add_option("manifest", manifest, "Manifest file")->required();
  refine->add_option("--trace", refine_trace, "Write the first counterexample as JSON lines");

  std::string sc_path, sc_trace;
  bool sc_json = false;
  auto* scen = app.add_subcommand("scenario", "Run a scenario file or every scenario in a directory");
  scen->add_option("path", sc_path, "Scenario file or directory")->required();
  scen->add_flag("--json", sc_json, "Print a machine-readable summary");
  scen->add_option("--trace", sc_trace, "Write the run as JSON lines (single scenario)");

  std::string ex_file, ex_assert, ex_agents = "interleave", ex_trace;
  std::size_t ex_depth = 10, ex_budget = 10000;
  auto* expl = app.add_subcommand("explore", "Search all runs up to a depth for a violated assertion");
  expl->add_option("machine", ex_file, "Machine file")->required();
  expl->add_option("--depth", ex_depth, "Maximum number of steps");
  expl->add_option("--assert", ex_assert, "Safety assertion, a Bool term");
  expl->add_option("--agents", ex_agents, "Agent scheduling")->check(CLI::IsMember({"sync", "interleave"}));
  expl->add_option("--budget", ex_budget, "Branch budget per step");
  expl->add_option("--trace", ex_trace, "Write the counterexample as JSON lines");

  std::string fmt_file;
  bool fmt_stdout = false, fmt_check = false;
  auto* fmt = app.add_subcommand("fmt", "Rewrite a machine file in canonical form");
  fmt->add_option("machine", fmt_file, "Machine file")->required();
  fmt->add_flag("--stdout", fmt_stdout, "Print instead of rewriting");
  fmt->add_flag("--check", fmt_check, "Fail if the file is not canonical");

  std::string skel_file;
  auto* skel = app.add_subcommand("skeleton", "Print a scenario template for a machine");
  skel->add_option("machine", skel_file, "Machine file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  if (*run) return cmd_run(run_args);
  if (*norm) return cmd_normalize(norm_file, norm_rule);
  if (*refine) return cmd_check_refine(manifest, refine_trace);
  if (*scen) return cmd_scenario(sc_path, sc_json, sc_trace);
  if (*expl) return cmd_explore(ex_file, ex_depth, ex_assert, ex_agents, ex_budget, ex_trace);
  if (*fmt) return cmd_fmt(fmt_file, fmt_stdout, fmt_check);
  if (*skel) return cmd_skeleton(skel_file);
  return kUsage;
}
