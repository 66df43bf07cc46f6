#include "asmweave/refine.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "asmweave/parser.hpp"

namespace asmweave {
namespace {

using Items = std::vector<std::vector<Value>>;

std::vector<TermPtr> side_terms(const RefinementSpec& spec, Side side) {
  std::vector<TermPtr> out;
  for (const auto& o : spec.observations) out.push_back(side == Side::Abstract ? o.abstract_term : o.refined_term);
  return out;
}

std::vector<Value> observe_state(const MachineDef& m, const std::vector<TermPtr>& terms, const State& s) {
  Resolver r = Resolver::seeded(0);
  EvalContext ctx{m, s, r, std::nullopt, "", {}};
  std::vector<Value> out;
  for (const auto& t : terms) out.push_back(eval_term(*t, ctx));
  return out;
}

void push_compressed(Items& items, std::vector<Value> obs) {
  if (items.empty() || items.back() != obs) items.push_back(std::move(obs));
}

std::string items_to_string(const Items& items) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < items.size(); ++i) {
    os << (i ? ", " : "") << "(";
    for (std::size_t j = 0; j < items[i].size(); ++j) os << (j ? ", " : "") << items[i][j].to_string();
    os << ")";
  }
  os << "]";
  return os.str();
}

Marker marker_of(RunOutcome outcome) {
  switch (outcome) {
    case RunOutcome::Stalled: return Marker::Stalled;
    case RunOutcome::Inconsistent: return Marker::Inconsistent;
    default: return Marker::Budget;
  }
}

using MemoKey = std::tuple<std::size_t, std::map<Location, Value>, Items>;

// Every abstract observation sequence reachable within the bounds.
struct AbstractRuns {
  std::set<Items> prefixes;
  std::set<Items> stalled;
  std::set<Items> open;
  std::set<Items> inconsistent;
  std::size_t runs = 0;
  bool complete = true;
};

class AbstractEnumerator {
 public:
  AbstractEnumerator(const RefinementSpec& spec, AbstractRuns& out)
      : spec_(spec), terms_(side_terms(spec, Side::Abstract)), out_(out) {}

  void run() {
    State init = linked_initial_state(spec_, Side::Abstract);
    Items items;
    push_compressed(items, observe_state(spec_.abstract, terms_, init));
    visit(init, items, 0);
  }

 private:
  void visit(const State& s, const Items& items, std::size_t depth) {
    if (!seen_.insert(MemoKey{depth, s.content(), items}).second) return;
    out_.prefixes.insert(items);
    if (depth >= spec_.bounds.abstract_steps) {
      out_.open.insert(items);
      ++out_.runs;
      return;
    }
    std::vector<Successor> succs;
    try {
      succs = successors(spec_.abstract, s, spec_.mode, spec_.bounds.branch_budget);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::BranchBudgetExceeded) throw;
      out_.complete = false;
      out_.open.insert(items);
      ++out_.runs;
      return;
    }
    if (succs.empty()) {
      out_.stalled.insert(items);
      ++out_.runs;
      return;
    }
    for (const auto& succ : succs) {
      if (succ.result.status == StepResult::Status::Inconsistent) {
        out_.inconsistent.insert(items);
        ++out_.runs;
        continue;
      }
      Items next = items;
      push_compressed(next, observe_state(spec_.abstract, terms_, succ.result.next));
      visit(succ.result.next, next, depth + 1);
    }
  }

  const RefinementSpec& spec_;
  std::vector<TermPtr> terms_;
  AbstractRuns& out_;
  std::set<MemoKey> seen_;
};

std::size_t common_prefix(const Items& a, const Items& b) {
  std::size_t n = 0;
  while (n < a.size() && n < b.size() && a[n] == b[n]) ++n;
  return n;
}

class RefinedChecker {
 public:
  RefinedChecker(const RefinementSpec& spec, const AbstractRuns& abs, RefinementVerdict& verdict)
      : spec_(spec), terms_(side_terms(spec, Side::Refined)), abs_(abs), verdict_(verdict) {}

  void run() {
    State init = linked_initial_state(spec_, Side::Refined);
    init_ = init;
    Items items;
    push_compressed(items, observe_state(spec_.refined, terms_, init));
    visit(init, items, 0);
  }

  bool failed() const { return failed_; }
  bool undecided() const { return undecided_; }

 private:
  struct Edge {
    UpdateSet fired;
    std::vector<Resolution> resolutions;
    std::vector<std::string> agents;
    State state;
  };

  void visit(const State& s, const Items& items, std::size_t depth) {
    if (failed_) return;
    if (!seen_.insert(MemoKey{depth, s.content(), items}).second) return;
    if (depth >= spec_.bounds.refined_steps) {
      finish(items, Marker::Budget, {});
      return;
    }
    std::vector<Successor> succs;
    try {
      succs = successors(spec_.refined, s, spec_.mode, spec_.bounds.branch_budget);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::BranchBudgetExceeded) throw;
      verdict_.stats.refined_complete = false;
      finish(items, Marker::Budget, {});
      return;
    }
    if (succs.empty()) {
      finish(items, Marker::Stalled, {});
      return;
    }
    for (const auto& succ : succs) {
      if (failed_) return;
      if (succ.result.status == StepResult::Status::Inconsistent) {
        finish(items, Marker::Inconsistent, succ);
        continue;
      }
      Items next = items;
      push_compressed(next, observe_state(spec_.refined, terms_, succ.result.next));
      path_.push_back(Edge{succ.result.fired, succ.result.resolutions, succ.agents, succ.result.next});
      visit(succ.result.next, next, depth + 1);
      path_.pop_back();
    }
  }

  // Decides one maximal refined run.
  void finish(const Items& items, Marker marker, const std::optional<Successor>& terminal) {
    ++verdict_.stats.refined_runs;
    bool ok = false;
    switch (marker) {
      case Marker::Budget: ok = abs_.prefixes.count(items) != 0; break;
      case Marker::Stalled: ok = abs_.stalled.count(items) != 0; break;
      case Marker::Inconsistent: ok = abs_.inconsistent.count(items) != 0; break;
    }
    if (ok) return;
    if (marker != Marker::Budget && abs_.open.count(items)) {
      // The abstract run with these observations was cut off; it might
      // still end the same way.
      undecided_ = true;
      return;
    }
    if (!abs_.complete) {
      undecided_ = true;
      return;
    }
    failed_ = true;
    verdict_.violating = ObservationSeq{items, marker};
    verdict_.counterexample = build_trace(marker, terminal);
    verdict_.nearest = nearest(items);
  }

  Trace build_trace(Marker marker, const std::optional<Successor>& terminal) const {
    Trace t(init_);
    t.machine = spec_.refined.name;
    t.provenance = "refinement";
    State prev = init_;
    for (const auto& e : path_) {
      t.steps.push_back(TraceStep{prev.digest(), e.state.digest(), e.fired, e.resolutions, e.agents, e.state});
      prev = e.state;
    }
    t.final_state = prev;
    switch (marker) {
      case Marker::Budget: t.outcome = RunOutcome::MaxSteps; break;
      case Marker::Stalled: t.outcome = RunOutcome::Stalled; break;
      case Marker::Inconsistent:
        t.outcome = RunOutcome::Inconsistent;
        if (terminal) {
          t.conflicts = terminal->result.conflicts;
          t.terminal_resolutions = terminal->result.resolutions;
        }
        break;
    }
    return t;
  }

  std::vector<ObservationSeq> nearest(const Items& items) const {
    std::vector<std::pair<std::size_t, const Items*>> ranked;
    for (const auto& a : abs_.prefixes) ranked.emplace_back(common_prefix(a, items), &a);
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
      if (x.first != y.first) return x.first > y.first;
      return x.second->size() < y.second->size();
    });
    std::vector<ObservationSeq> out;
    for (std::size_t i = 0; i < ranked.size() && out.size() < 3; ++i) {
      const Items& a = *ranked[i].second;
      Marker m = abs_.stalled.count(a) ? Marker::Stalled : abs_.inconsistent.count(a) ? Marker::Inconsistent : Marker::Budget;
      out.push_back(ObservationSeq{a, m});
    }
    return out;
  }

  const RefinementSpec& spec_;
  std::vector<TermPtr> terms_;
  const AbstractRuns& abs_;
  RefinementVerdict& verdict_;
  State init_{std::make_shared<const Signature>()};
  std::vector<Edge> path_;
  std::set<MemoKey> seen_;
  bool failed_ = false;
  bool undecided_ = false;
};

// Manifest parsing.

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void manifest_error(std::size_t line, const std::string& msg) {
  throw Error(ErrorCode::ManifestError, msg, SourcePos{static_cast<int>(line), 1});
}

std::string error_text(const Error& e) {
  if (auto* pe = dynamic_cast<const ParseError*>(&e)) {
    std::string out;
    for (const auto& d : pe->diagnostics()) out += (out.empty() ? "" : "; ") + d.to_string();
    return out;
  }
  return e.what();
}

struct PendingStep {
  std::size_t line = 0;
  std::string name;
  std::string abstract_file;
  std::string refined_file;
  std::vector<std::pair<std::size_t, std::string>> observes;
  std::vector<std::pair<std::size_t, std::string>> links;
  RefinementBounds bounds;
  AgentMode mode = AgentMode::Interleaving;
};

}  // namespace

std::string_view to_string(Marker marker) {
  switch (marker) {
    case Marker::Stalled: return "stalled";
    case Marker::Budget: return "budget";
    case Marker::Inconsistent: return "inconsistent";
  }
  return "?";
}

std::string_view to_string(RefinementVerdict::Kind kind) {
  switch (kind) {
    case RefinementVerdict::Kind::Pass: return "PASS";
    case RefinementVerdict::Kind::Fail: return "FAIL";
    case RefinementVerdict::Kind::BudgetExhausted: return "BUDGET-EXHAUSTED";
  }
  return "?";
}

std::string ObservationSeq::to_string() const {
  return items_to_string(items) + " " + std::string(asmweave::to_string(marker));
}

State linked_initial_state(const RefinementSpec& spec, Side side) {
  const MachineDef& m = side == Side::Abstract ? spec.abstract : spec.refined;
  State s = initial_state(m);
  for (const auto& link : spec.init_link) {
    if (link.side != side) continue;
    Resolver r = Resolver::seeded(0);
    EvalContext ctx{m, s, r, std::nullopt, "", {}};
    std::vector<Value> args;
    for (const auto& a : link.target->args) args.push_back(eval_term(*a, ctx));
    Value v = eval_term(*link.value, ctx);
    s.assign(Location{link.target->name, std::move(args)}, std::move(v));
  }
  return s;
}

ObservationSeq observe(const Trace& trace, const RefinementSpec& spec, Side side) {
  const MachineDef& m = side == Side::Abstract ? spec.abstract : spec.refined;
  auto terms = side_terms(spec, side);
  ObservationSeq out;
  push_compressed(out.items, observe_state(m, terms, trace.initial));
  for (const auto& step : trace.steps) push_compressed(out.items, observe_state(m, terms, step.state));
  out.marker = marker_of(trace.outcome);
  return out;
}

RefinementVerdict check_refinement(const RefinementSpec& spec) {
  RefinementVerdict verdict;
  AbstractRuns abs;
  AbstractEnumerator(spec, abs).run();
  verdict.stats.abstract_runs = abs.runs;
  verdict.stats.abstract_sequences = abs.prefixes.size();
  verdict.stats.abstract_complete = abs.complete;

  RefinedChecker checker(spec, abs, verdict);
  checker.run();
  if (checker.failed()) {
    verdict.kind = RefinementVerdict::Kind::Fail;
    verdict.reason = "refined observations " + verdict.violating.to_string() + " not produced by the abstract machine";
  } else if (checker.undecided() || !verdict.stats.refined_complete) {
    verdict.kind = RefinementVerdict::Kind::BudgetExhausted;
    verdict.reason = checker.undecided() ? "abstract enumeration cut off before a decision"
                                         : "refined enumeration exceeded the branch budget";
  } else {
    verdict.kind = RefinementVerdict::Kind::Pass;
  }
  return verdict;
}

Trace replay(const RefinementSpec& spec, const Trace& trace) {
  RunConfig config;
  config.resolver = Resolver::scripted(trace.script(), 0);
  config.initial = linked_initial_state(spec, Side::Refined);
  config.max_steps = trace.steps.size() + (trace.outcome == RunOutcome::MaxSteps ? 0 : 1);
  return ma_run(spec.refined, Scheduler::from_mode(spec.mode), std::move(config),
                MaOptions{{}, spec.bounds.branch_budget});
}

std::vector<Observation> identity_observations(const MachineDef& m) {
  std::vector<Observation> out;
  std::set<std::string> seen;
  auto add = [&](const Location& loc) {
    std::string label = loc.to_string();
    if (!seen.insert(label).second) return;
    std::vector<TermPtr> args;
    for (const auto& a : loc.args) args.push_back(Term::lit(a));
    TermPtr t = Term::app(loc.fname, std::move(args));
    out.push_back(Observation{label, t, t});
  };
  for (const auto& name : m.sig->names()) {
    const FunctionInfo& info = m.sig->at(name);
    if (info.kind == FunctionKind::Controlled && info.arity == 0) add(Location{name, {}});
  }
  State init = initial_state(m);
  for (const auto& [loc, val] : init.content())
    if (m.sig->at(loc.fname).kind == FunctionKind::Controlled) add(loc);
  return out;
}

std::vector<ChainStep> parse_manifest(std::string_view text, const std::filesystem::path& base_dir) {
  std::vector<PendingStep> pending;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = trim(raw);
    if (line.empty() || line.rfind("//", 0) == 0 || line[0] == '#') continue;
    auto sp = line.find_first_of(" \t");
    std::string head = line.substr(0, sp);
    std::string rest = sp == std::string::npos ? "" : trim(line.substr(sp));
    if (head == "step") {
      if (rest.empty()) manifest_error(lineno, "step needs a name");
      pending.push_back(PendingStep{});
      pending.back().line = lineno;
      pending.back().name = rest;
      continue;
    }
    if (head == "chain") continue;
    if (pending.empty()) manifest_error(lineno, "'" + head + "' before the first step");
    PendingStep& st = pending.back();
    if (head == "abstract") {
      st.abstract_file = rest;
    } else if (head == "refined") {
      st.refined_file = rest;
    } else if (head == "observe") {
      st.observes.emplace_back(lineno, rest);
    } else if (head == "init_link") {
      st.links.emplace_back(lineno, rest);
    } else if (head == "bounds") {
      std::istringstream bs(rest);
      RefinementBounds b;
      if (!(bs >> b.abstract_steps >> b.refined_steps)) manifest_error(lineno, "bounds needs two step counts");
      if (!(bs >> b.branch_budget)) b.branch_budget = RefinementBounds{}.branch_budget;
      st.bounds = b;
    } else if (head == "agents") {
      if (rest == "sync")
        st.mode = AgentMode::Synchronous;
      else if (rest == "interleave")
        st.mode = AgentMode::Interleaving;
      else
        manifest_error(lineno, "agents must be sync or interleave");
    } else {
      manifest_error(lineno, "unknown directive '" + head + "'");
    }
  }

  std::map<std::filesystem::path, MachineDef> cache;
  auto machine = [&](const std::string& file, std::size_t line) -> const MachineDef& {
    std::filesystem::path p = base_dir / file;
    auto it = cache.find(p);
    if (it != cache.end()) return it->second;
    try {
      return cache.emplace(p, load_machine(p)).first->second;
    } catch (const Error& e) {
      manifest_error(line, p.string() + ": " + error_text(e));
    }
  };

  std::vector<ChainStep> out;
  for (auto& st : pending) {
    if (st.abstract_file.empty() || st.refined_file.empty())
      manifest_error(st.line, "step '" + st.name + "' needs abstract and refined files");
    if (st.observes.empty()) manifest_error(st.line, "step '" + st.name + "' observes nothing");
    RefinementSpec spec{st.name, machine(st.abstract_file, st.line), machine(st.refined_file, st.line), {}, {},
                        st.bounds, st.mode};
    for (const auto& [line, text] : st.observes) {
      auto colon = text.find(':');
      auto tilde = text.find('~', colon == std::string::npos ? 0 : colon);
      if (colon == std::string::npos || tilde == std::string::npos)
        manifest_error(line, "expected: observe <label> : <abstract term> ~ <refined term>");
      try {
        spec.observations.push_back(Observation{trim(text.substr(0, colon)),
                                                parse_term_for(trim(text.substr(colon + 1, tilde - colon - 1)), spec.abstract),
                                                parse_term_for(trim(text.substr(tilde + 1)), spec.refined)});
      } catch (const Error& e) {
        manifest_error(line, error_text(e));
      }
    }
    for (const auto& [line, text] : st.links) {
      auto sp = text.find_first_of(" \t");
      std::string side = text.substr(0, sp);
      if (side != "abstract" && side != "refined") manifest_error(line, "init_link side must be abstract or refined");
      std::string rest = sp == std::string::npos ? "" : text.substr(sp);
      auto assign = rest.find(":=");
      if (assign == std::string::npos) manifest_error(line, "expected: init_link <side> <location> := <term>");
      Side s = side == "abstract" ? Side::Abstract : Side::Refined;
      const MachineDef& m = s == Side::Abstract ? spec.abstract : spec.refined;
      try {
        TermPtr target = parse_term_for(trim(rest.substr(0, assign)), m);
        if (target->kind != Term::Kind::App || !m.sig->find(target->name))
          manifest_error(line, "init_link target must be a location");
        spec.init_link.push_back(InitLink{s, target, parse_term_for(trim(rest.substr(assign + 2)), m)});
      } catch (const Error& e) {
        if (e.code() == ErrorCode::ManifestError) throw;
        manifest_error(line, error_text(e));
      }
    }
    out.push_back(ChainStep{st.name, base_dir / st.abstract_file, base_dir / st.refined_file, std::move(spec)});
  }
  return out;
}

std::vector<ChainStep> load_manifest(const std::filesystem::path& file) {
  return parse_manifest(read_file(file), file.parent_path());
}

std::vector<std::pair<std::string, RefinementVerdict>> check_chain(const std::vector<ChainStep>& steps) {
  std::vector<std::pair<std::string, RefinementVerdict>> out;
  for (const auto& st : steps) out.emplace_back(st.name, check_refinement(st.spec));
  return out;
}

}  // namespace asmweave
