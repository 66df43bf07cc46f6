#include "asmweave/scenario.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "asmweave/parser.hpp"
#include "json.hpp"

namespace asmweave {
namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void scenario_error(std::size_t line, const std::string& msg) {
  throw Error(ErrorCode::ScenarioError, msg, SourcePos{static_cast<int>(line), 1});
}

std::string error_text(const Error& e) {
  if (auto* pe = dynamic_cast<const ParseError*>(&e)) {
    std::string out;
    for (const auto& d : pe->diagnostics()) out += (out.empty() ? "" : "; ") + d.to_string();
    return out;
  }
  return e.what();
}

// Splits on ';' outside string literals.
std::vector<std::string> split_items(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (in_string && c == '\\' && i + 1 < s.size()) {
      cur += c;
      cur += s[++i];
      continue;
    }
    if (c == '"') in_string = !in_string;
    if (c == ';' && !in_string) {
      out.push_back(trim(cur));
      cur.clear();
      continue;
    }
    cur += c;
  }
  out.push_back(trim(cur));
  out.erase(std::remove(out.begin(), out.end(), std::string()), out.end());
  return out;
}

std::size_t parse_index(const std::string& s, std::size_t line) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); }))
    scenario_error(line, "expected a step number, got '" + s + "'");
  return std::stoul(s);
}

class ScenarioParser {
 public:
  ScenarioParser(const std::filesystem::path& base_dir) : base_dir_(base_dir) {}

  Scenario parse(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t lineno = 0;
    std::vector<std::pair<std::size_t, std::string>> deferred;
    while (std::getline(in, raw)) {
      ++lineno;
      std::string line = trim(raw);
      if (line.empty() || line.rfind("//", 0) == 0 || line[0] == '#') continue;
      auto sp = line.find_first_of(" \t:");
      std::string head = line.substr(0, sp);
      std::string rest = sp == std::string::npos ? "" : trim(line.substr(sp));
      if (head == "scenario") {
        sc_.name = rest;
      } else if (head == "machine") {
        if (machine_loaded_) scenario_error(lineno, "machine given twice");
        sc_.machine_file = base_dir_ / rest;
        try {
          sc_.machine = load_machine(sc_.machine_file);
        } catch (const Error& e) {
          scenario_error(lineno, sc_.machine_file.string() + ": " + error_text(e));
        }
        machine_loaded_ = true;
      } else if (head == "seed") {
        sc_.seed = parse_index(rest, lineno);
      } else if (head == "max_steps") {
        sc_.max_steps = parse_index(rest, lineno);
      } else if (head == "scheduler") {
        if (rest == "sync")
          sc_.mode = AgentMode::Synchronous;
        else if (rest == "interleave")
          sc_.mode = AgentMode::Interleaving;
        else
          scenario_error(lineno, "scheduler must be sync or interleave");
      } else if (head == "init" || head == "step" || head == "assert" || head == "final") {
        deferred.emplace_back(lineno, line);
      } else {
        scenario_error(lineno, "unknown directive '" + head + "'");
      }
    }
    if (!machine_loaded_) scenario_error(lineno, "no machine given");
    if (sc_.name.empty()) sc_.name = sc_.machine.name;
    for (const auto& [line, text] : deferred) directive(line, text);

    std::size_t highest = 0, highest_line = 0;
    for (const auto& [k, line] : step_lines_)
      if (k > highest) highest = k, highest_line = line;
    for (const auto& a : sc_.assertions)
      if (a.step && *a.step > highest) highest = *a.step, highest_line = a.line;
    if (sc_.max_steps == 0) {
      sc_.max_steps = highest == 0 ? 100 : highest;
    } else if (highest > sc_.max_steps) {
      scenario_error(highest_line, "step " + std::to_string(highest) + " is beyond max_steps " + std::to_string(sc_.max_steps));
    }
    return std::move(sc_);
  }

 private:
  TermPtr term(const std::string& text, std::size_t line) {
    try {
      return parse_term_for(text, sc_.machine);
    } catch (const Error& e) {
      scenario_error(line, "in '" + text + "': " + error_text(e));
    }
  }

  Value constant(const std::string& text, std::size_t line) {
    TermPtr t = term(text, line);
    State s = initial_state(sc_.machine);
    Resolver r = Resolver::seeded(0);
    EvalContext ctx{sc_.machine, s, r, std::nullopt, "", {}};
    try {
      return eval_term(*t, ctx);
    } catch (const Error& e) {
      scenario_error(line, "in '" + text + "': " + error_text(e));
    }
  }

  Location location(const std::string& text, std::size_t line, std::initializer_list<FunctionKind> kinds) {
    TermPtr t = term(text, line);
    const FunctionInfo* info = t->kind == Term::Kind::App ? sc_.machine.sig->find(t->name) : nullptr;
    if (!info || std::find(kinds.begin(), kinds.end(), info->kind) == kinds.end())
      scenario_error(line, "'" + text + "' is not a location of the right kind");
    Location loc{t->name, {}};
    for (const auto& a : t->args) loc.args.push_back(constant(print_term(a), line));
    return loc;
  }

  std::pair<std::string, std::string> split_once(const std::string& s, const std::string& sep, std::size_t line) {
    auto p = s.find(sep);
    if (p == std::string::npos) scenario_error(line, "expected '" + sep + "' in '" + s + "'");
    return {trim(s.substr(0, p)), trim(s.substr(p + sep.size()))};
  }

  void directive(std::size_t line, const std::string& text) {
    if (text.rfind("init", 0) == 0) {
      auto [lhs, rhs] = split_once(trim(text.substr(4)), ":=", line);
      sc_.init[location(lhs, line, {FunctionKind::Static, FunctionKind::Controlled, FunctionKind::Monitored})] =
          constant(rhs, line);
      return;
    }
    if (text.rfind("final", 0) == 0) {
      std::string rest = trim(text.substr(5));
      if (rest.empty() || rest[0] != ':') scenario_error(line, "expected 'final: <term>'");
      std::string body = trim(rest.substr(1));
      sc_.assertions.push_back(ScenarioAssertion{line, std::nullopt, body, term(body, line)});
      return;
    }
    bool is_step = text.rfind("step", 0) == 0;
    auto [idx, body] = split_once(trim(text.substr(is_step ? 4 : 6)), ":", line);
    std::size_t k = parse_index(idx, line);
    if (!is_step) {
      sc_.assertions.push_back(ScenarioAssertion{line, k, body, term(body, line)});
      return;
    }
    if (k == 0) scenario_error(line, "steps count from 1");
    ScenarioStep& st = sc_.steps[k];
    step_lines_.emplace(k, line);
    for (const auto& item : split_items(body)) {
      if (item.rfind("choose ", 0) == 0) {
        auto [label, val] = split_once(trim(item.substr(7)), "=", line);
        st.resolutions.push_back(Resolution{ResolutionKind::Choose, label, label, constant(val, line)});
      } else if (item.rfind("draw ", 0) == 0) {
        auto [lhs, val] = split_once(trim(item.substr(5)), "=", line);
        std::string key = location(lhs, line, {FunctionKind::Abstract}).to_string();
        st.resolutions.push_back(Resolution{ResolutionKind::Abstract, key, key, constant(val, line)});
      } else if (item.rfind("schedule ", 0) == 0) {
        std::string agent = trim(item.substr(9));
        bool known = std::any_of(sc_.machine.agents.begin(), sc_.machine.agents.end(),
                                 [&](const AgentDecl& a) { return a.id == agent; });
        if (!known) scenario_error(line, "no agent named '" + agent + "'");
        st.resolutions.push_back(Resolution{ResolutionKind::Schedule, "schedule", "schedule", Value::sym(agent)});
      } else {
        auto [lhs, rhs] = split_once(item, ":=", line);
        st.monitored[location(lhs, line, {FunctionKind::Monitored})] = constant(rhs, line);
      }
    }
  }

  std::filesystem::path base_dir_;
  Scenario sc_;
  std::map<std::size_t, std::size_t> step_lines_;
  bool machine_loaded_ = false;
};

std::vector<std::string> witness_of(const Term& t, const MachineDef& m, const State& s) {
  std::vector<TermPtr> apps;
  collect_apps(std::make_shared<Term>(t), apps);
  std::vector<std::string> out;
  std::set<std::string> seen;
  Resolver r = Resolver::seeded(0);
  EvalContext ctx{m, s, r, std::nullopt, "", {}};
  for (const auto& a : apps) {
    const FunctionInfo* info = m.sig->find(a->name);
    if (!info || info->kind == FunctionKind::Abstract) continue;
    try {
      Location loc{a->name, {}};
      for (const auto& arg : a->args) loc.args.push_back(eval_term(*arg, ctx));
      std::string line = loc.to_string() + " = " + eval_term(*a, ctx).to_string();
      if (seen.insert(line).second) out.push_back(line);
    } catch (const Error&) {
    }
  }
  return out;
}

}  // namespace

Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir) {
  return ScenarioParser(base_dir).parse(text);
}

Scenario load_scenario(const std::filesystem::path& file) {
  return parse_scenario(read_file(file), file.parent_path());
}

bool ScenarioReport::passed() const {
  if (!run_error.empty()) return false;
  return std::all_of(results.begin(), results.end(), [](const AssertionResult& r) { return r.passed; });
}

ScenarioReport run_scenario(const Scenario& sc) {
  ScenarioReport report;
  report.name = sc.name;
  if (sc.assertions.empty()) report.warnings.push_back("scenario has no assertions");

  Script script(sc.max_steps);
  MonitoredInputs inputs(sc.max_steps);
  for (const auto& [k, st] : sc.steps) {
    if (k > sc.max_steps) continue;
    script[k - 1] = st.resolutions;
    inputs[k - 1] = st.monitored;
  }
  Resolver r = Resolver::scripted(std::move(script), sc.seed);
  r.set_monitored(std::move(inputs));

  std::optional<Trace> trace;
  // Set when the run stopped on an error or an inconsistent update set.
  bool broken = false;
  try {
    State s = initial_state(sc.machine);
    for (const auto& [loc, v] : sc.init) s.assign(loc, v);
    trace.emplace(s);
    trace->machine = sc.machine.name;
    trace->provenance = "scenario seed=" + std::to_string(sc.seed);
    Scheduler scheduler = Scheduler::from_mode(sc.mode);
    for (std::size_t k = 0; k < sc.max_steps; ++k) {
      std::optional<MaStepResult> step;
      try {
        step = ma_step(sc.machine, s, scheduler, r, k);
      } catch (const Error& e) {
        report.run_error = "step " + std::to_string(k + 1) + ": " + e.what();
        broken = true;
        break;
      }
      MaStepResult& res = *step;
      if (res.result.status == StepResult::Status::Stalled) {
        trace->outcome = RunOutcome::Stalled;
        break;
      }
      if (res.result.status == StepResult::Status::Inconsistent) {
        trace->outcome = RunOutcome::Inconsistent;
        trace->conflicts = res.result.conflicts;
        trace->terminal_resolutions = res.result.resolutions;
        std::string cs;
        for (const auto& c : res.result.conflicts) cs += (cs.empty() ? "" : "; ") + c.to_string();
        report.run_error = "step " + std::to_string(k + 1) + ": inconsistent update set: " + cs;
        broken = true;
        break;
      }
      trace->steps.push_back(TraceStep{s.digest(), res.result.next.digest(), res.result.fired,
                                       res.result.resolutions, res.scheduled, res.result.next});
      s = res.result.next;
    }
    trace->final_state = s;
  } catch (const Error& e) {
    report.run_error = std::string("initial state: ") + e.what();
    broken = true;
  }

  for (const auto& a : sc.assertions) {
    AssertionResult res{a, false, Value::undef(), {}, {}};
    std::size_t k = a.step.value_or(trace ? trace->steps.size() : 0);
    if (!trace || (a.step && k > trace->steps.size() && broken)) {
      res.error = "run ended before step " + std::to_string(k);
      report.results.push_back(std::move(res));
      continue;
    }
    // A stalled run keeps its last state.
    const State& s = k <= trace->steps.size() ? trace->state_at(k) : trace->final_state;
    try {
      Resolver er = Resolver::seeded(0);
      EvalContext ctx{sc.machine, s, er, std::nullopt, "", {}};
      res.value = eval_term(*a.term, ctx);
      res.passed = res.value.is_true();
    } catch (const Error& e) {
      res.error = e.what();
    }
    if (!res.passed) res.witness = witness_of(*a.term, sc.machine, s);
    report.results.push_back(std::move(res));
  }
  report.trace = std::move(trace);
  return report;
}

std::size_t SuiteReport::failures() const {
  std::size_t n = 0;
  for (const auto& e : entries)
    if (!e.report || !e.report->passed()) ++n;
  return n;
}

bool SuiteReport::load_failed() const {
  return std::any_of(entries.begin(), entries.end(), [](const SuiteEntry& e) { return !e.report; });
}

int SuiteReport::exit_status() const {
  if (load_failed()) return 2;
  return failures() == 0 ? 0 : 1;
}

std::string SuiteReport::to_json() const {
  using nlohmann::json;
  json scenarios = json::array();
  for (const auto& e : entries) {
    json j{{"file", e.file.string()}};
    if (!e.report) {
      j["status"] = "error";
      j["error"] = e.load_error;
    } else {
      j["name"] = e.report->name;
      j["status"] = e.report->passed() ? "pass" : "fail";
      json asserts = json::array();
      for (const auto& r : e.report->results) {
        json a{{"line", r.assertion.line},
               {"term", r.assertion.text},
               {"passed", r.passed},
               {"value", r.value.to_string()},
               {"witness", r.witness}};
        a["step"] = r.assertion.step ? json(*r.assertion.step) : json("final");
        if (!r.error.empty()) a["error"] = r.error;
        asserts.push_back(std::move(a));
      }
      j["assertions"] = std::move(asserts);
      if (!e.report->run_error.empty()) j["run_error"] = e.report->run_error;
      j["warnings"] = e.report->warnings;
    }
    scenarios.push_back(std::move(j));
  }
  json out{{"scenarios", scenarios},
           {"total", entries.size()},
           {"failures", failures()},
           {"warnings", warnings},
           {"status", exit_status()}};
  return out.dump(2);
}

SuiteReport run_suite(const std::filesystem::path& dir) {
  SuiteReport suite;
  std::vector<std::filesystem::path> files;
  std::error_code ec;
  for (std::filesystem::recursive_directory_iterator it(dir, ec), end; !ec && it != end; it.increment(ec))
    if (it->is_regular_file() && it->path().extension() == ".scn") files.push_back(it->path());
  if (ec) throw Error(ErrorCode::IoError, "cannot list " + dir.string() + ": " + ec.message());
  std::sort(files.begin(), files.end());
  if (files.empty()) suite.warnings.push_back("no scenario files in " + dir.string());
  for (const auto& f : files) {
    SuiteEntry entry{f, std::nullopt, {}};
    try {
      entry.report = run_scenario(load_scenario(f));
    } catch (const Error& e) {
      entry.load_error = e.what();
    }
    suite.entries.push_back(std::move(entry));
  }
  return suite;
}

std::string skeleton(const std::filesystem::path& machine_file) {
  MachineDef m = load_machine(machine_file);
  std::ostringstream os;
  os << "scenario " << m.name << "\n";
  os << "machine " << machine_file.filename().string() << "\n";
  os << "seed 0\n";
  os << "max_steps 10\n";

  std::vector<std::string> monitored, abstract, controlled;
  for (const auto& name : m.sig->names()) {
    const FunctionInfo& info = m.sig->at(name);
    std::string lhs = name;
    if (info.arity > 0) {
      lhs += "(";
      for (std::size_t i = 0; i < info.arity; ++i) lhs += (i ? ", " : "") + std::string("x") + std::to_string(i + 1);
      lhs += ")";
    }
    if (info.kind == FunctionKind::Monitored) monitored.push_back(lhs);
    if (info.kind == FunctionKind::Abstract) abstract.push_back(lhs);
    if (info.kind == FunctionKind::Controlled) controlled.push_back(lhs);
  }

  os << "\n// init overrides\n";
  for (const auto& c : controlled) os << "// init " << c << " := <value>\n";

  os << "\n// bindings, one line per step\n";
  std::vector<std::string> items;
  for (const auto& f : monitored) items.push_back(f + " := <value>");
  for (const auto& f : abstract) items.push_back("draw " + f + " = <value>");
  std::set<std::string> labels;
  std::vector<const Rule*> stack;
  for (const auto& d : m.rules) stack.push_back(d.body.get());
  while (!stack.empty()) {
    const Rule* r = stack.back();
    stack.pop_back();
    if (r->kind == Rule::Kind::Choose) labels.insert(r->choice_label());
    for (const auto& c : r->children) stack.push_back(c.get());
    for (const RulePtr& c : {r->then_branch, r->else_branch, r->body})
      if (c) stack.push_back(c.get());
  }
  for (const auto& l : labels) items.push_back("choose " + l + " = <value>");
  if (m.multi_agent()) items.push_back("schedule <" + m.agents.front().id + "|...>");
  if (items.empty()) {
    os << "step 1:\n";
  } else {
    os << "// step 1: ";
    for (std::size_t i = 0; i < items.size(); ++i) os << (i ? "; " : "") << items[i];
    os << "\n";
  }

  os << "\n// assertions\n";
  os << "// assert 1: <term>\n";
  os << "// final: <term>\n";
  return os.str();
}

std::string format_report(const ScenarioReport& report) {
  std::ostringstream os;
  os << (report.passed() ? "PASS" : "FAIL") << " " << report.name << "\n";
  for (const auto& w : report.warnings) os << "  warning: " << w << "\n";
  if (!report.run_error.empty()) os << "  run error: " << report.run_error << "\n";
  for (const auto& r : report.results) {
    os << "  " << (r.passed ? "ok  " : "FAIL") << " ";
    os << (r.assertion.step ? "after step " + std::to_string(*r.assertion.step) : std::string("final"));
    os << " (line " << r.assertion.line << "): " << r.assertion.text;
    if (!r.passed) {
      os << "\n       got " << r.value.to_string();
      if (!r.error.empty()) os << "; " << r.error;
      for (const auto& w : r.witness) os << "\n       " << w;
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace asmweave
