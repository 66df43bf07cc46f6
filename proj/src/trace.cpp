#include "asmweave/trace.hpp"

#include <istream>
#include <limits>
#include <ostream>

#include "json.hpp"

namespace asmweave {
namespace {

using nlohmann::json;

json to_json(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Undef: return nullptr;
    case Value::Kind::Bool: return v.as_bool();
    case Value::Kind::Int: {
      const BigInt& i = v.as_int();
      if (i >= std::numeric_limits<std::int64_t>::min() && i <= std::numeric_limits<std::int64_t>::max())
        return static_cast<std::int64_t>(i);
      return json{{"int", i.str()}};
    }
    case Value::Kind::Str: return v.text();
    case Value::Kind::Sym: return json{{"sym", v.text()}};
    case Value::Kind::Set:
    case Value::Kind::Tuple: {
      json elems = json::array();
      for (const auto& e : v.elements()) elems.push_back(to_json(e));
      return json{{v.is_set() ? "set" : "tuple", elems}};
    }
  }
  return nullptr;
}

Value from_json(const json& j) {
  if (j.is_null()) return Value::undef();
  if (j.is_boolean()) return Value::boolean(j.get<bool>());
  if (j.is_number_integer()) return Value::integer(static_cast<long long>(j.get<std::int64_t>()));
  if (j.is_string()) return Value::str(j.get<std::string>());
  if (j.is_object() && j.size() == 1) {
    if (j.contains("int")) return Value::integer(BigInt(j["int"].get<std::string>()));
    if (j.contains("sym")) return Value::sym(j["sym"].get<std::string>());
    if (j.contains("set") || j.contains("tuple")) {
      bool is_set = j.contains("set");
      std::vector<Value> elems;
      for (const auto& e : j[is_set ? "set" : "tuple"]) elems.push_back(from_json(e));
      return is_set ? Value::set(std::move(elems)) : Value::tuple(std::move(elems));
    }
  }
  throw Error(ErrorCode::IoError, "not a value: " + j.dump());
}

json to_json(const Resolution& r) {
  return json{{"kind", std::string(to_string(r.kind))}, {"key", r.key}, {"label", r.label}, {"value", to_json(r.value)}};
}

ResolutionKind kind_from(const std::string& s) {
  if (s == "choose") return ResolutionKind::Choose;
  if (s == "abstract") return ResolutionKind::Abstract;
  if (s == "schedule") return ResolutionKind::Schedule;
  throw Error(ErrorCode::IoError, "unknown resolution kind '" + s + "'");
}

json updates_json(const UpdateSet& us) {
  json out = json::array();
  for (const auto& u : us) {
    json args = json::array();
    for (const auto& a : u.loc.args) args.push_back(to_json(a));
    out.push_back(json{{"f", u.loc.fname}, {"args", args}, {"val", to_json(u.val)}});
  }
  return out;
}

json resolutions_json(const std::vector<Resolution>& rs) {
  json out = json::array();
  for (const auto& r : rs) out.push_back(to_json(r));
  return out;
}

}  // namespace

std::string_view to_string(RunOutcome outcome) {
  switch (outcome) {
    case RunOutcome::Stalled: return "stalled";
    case RunOutcome::Inconsistent: return "inconsistent";
    case RunOutcome::MaxSteps: return "max-steps";
    case RunOutcome::ScheduleExhausted: return "schedule-exhausted";
  }
  return "?";
}

Script Trace::script() const {
  Script s;
  for (const auto& step : steps) s.push_back(step.resolutions);
  if (!terminal_resolutions.empty()) s.push_back(terminal_resolutions);
  return s;
}

std::vector<std::uint64_t> Trace::digests() const {
  std::vector<std::uint64_t> out;
  for (const auto& step : steps) out.push_back(step.pre_digest);
  out.push_back(final_state.digest());
  return out;
}

void write_jsonl(const Trace& trace, std::ostream& os, bool with_schedule) {
  std::size_t k = 0;
  for (const auto& step : trace.steps) {
    json line{{"step", ++k},
              {"updates", updates_json(step.fired)},
              {"resolutions", resolutions_json(step.resolutions)},
              {"digest", to_hex(step.pre_digest)},
              {"post_digest", to_hex(step.post_digest)}};
    if (with_schedule) line["schedule"] = step.agents;
    os << line.dump() << "\n";
  }
  if (trace.outcome == RunOutcome::Inconsistent) {
    json conflicts = json::array();
    for (const auto& c : trace.conflicts) {
      json values = json::array();
      for (const auto& v : c.values) values.push_back(to_json(v));
      conflicts.push_back(json{{"location", c.loc.to_string()}, {"values", values}, {"agents", c.agents}});
    }
    json line{{"step", ++k},
              {"outcome", "inconsistent"},
              {"conflicts", conflicts},
              {"resolutions", resolutions_json(trace.terminal_resolutions)},
              {"digest", to_hex(trace.final_state.digest())}};
    os << line.dump() << "\n";
  } else if (trace.outcome == RunOutcome::Stalled && !trace.terminal_resolutions.empty()) {
    json line{{"step", ++k},
              {"outcome", "stalled"},
              {"resolutions", resolutions_json(trace.terminal_resolutions)},
              {"digest", to_hex(trace.final_state.digest())}};
    os << line.dump() << "\n";
  }
}

Script read_script_jsonl(std::istream& is) {
  Script script;
  std::string line;
  while (std::getline(is, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::IoError, std::string("malformed trace line: ") + e.what());
    }
    std::vector<Resolution> step;
    for (const auto& r : j.value("resolutions", json::array()))
      step.push_back(Resolution{kind_from(r.at("kind").get<std::string>()), r.at("key").get<std::string>(),
                                r.value("label", r.at("key").get<std::string>()), from_json(r.at("value"))});
    script.push_back(std::move(step));
  }
  return script;
}

std::string value_to_json(const Value& v) { return to_json(v).dump(); }

Value value_from_json(const std::string& text) {
  try {
    return from_json(json::parse(text));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::IoError, std::string("malformed JSON value: ") + e.what());
  }
}

}  // namespace asmweave
