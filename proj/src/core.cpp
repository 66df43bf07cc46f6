#include "asmweave/core.hpp"

#include <sstream>

namespace asmweave {

std::string_view to_string(FunctionKind kind) {
  switch (kind) {
    case FunctionKind::Static: return "static";
    case FunctionKind::Controlled: return "controlled";
    case FunctionKind::Monitored: return "monitored";
    case FunctionKind::Abstract: return "abstract";
  }
  return "?";
}

void Signature::declare(const std::string& name, FunctionInfo info) {
  if (entries_.count(name))
    throw Error(ErrorCode::ResolveError, "function '" + name + "' declared twice");
  entries_.emplace(name, std::move(info));
  order_.push_back(name);
}

const FunctionInfo* Signature::find(const std::string& name) const {
  auto it = entries_.find(name);
  return it == entries_.end() ? nullptr : &it->second;
}

const FunctionInfo& Signature::at(const std::string& name) const {
  if (const auto* info = find(name)) return *info;
  throw Error(ErrorCode::UnknownFunction, "unknown function '" + name + "'");
}

std::string Location::to_string() const {
  if (args.empty()) return fname;
  std::string out = fname + "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ", ";
    out += args[i].to_string();
  }
  return out + ")";
}

std::string UpdateSet::to_string() const {
  std::string out = "{";
  bool first = true;
  for (const auto& u : updates_) {
    if (!first) out += ", ";
    first = false;
    out += "(" + u.loc.to_string() + ", " + u.val.to_string() + ")";
  }
  return out + "}";
}

std::string Conflict::to_string() const {
  std::string out = loc.to_string() + " <- {";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += values[i].to_string();
  }
  out += "}";
  if (!agents.empty()) {
    out += " by";
    for (const auto& a : agents) out += " " + a;
  }
  return out;
}

std::vector<Conflict> conflicts(const UpdateSet& us) {
  std::vector<Conflict> out;
  // Updates are ordered by location first, so clashes are adjacent.
  auto it = us.begin();
  while (it != us.end()) {
    auto next = it;
    std::vector<Value> values;
    while (next != us.end() && next->loc == it->loc) {
      values.push_back(next->val);
      ++next;
    }
    if (values.size() > 1) out.push_back(Conflict{it->loc, std::move(values), {}});
    it = next;
  }
  return out;
}

namespace {

std::string conflict_message(const std::vector<Conflict>& cs) {
  std::string out = "inconsistent update set:";
  for (const auto& c : cs) out += " " + c.to_string() + ";";
  return out;
}

}  // namespace

InconsistentError::InconsistentError(std::vector<Conflict> cs)
    : Error(ErrorCode::InconsistentUpdateSet, conflict_message(cs)), conflicts_(std::move(cs)) {}

State::State(std::shared_ptr<const Signature> sig) : sig_(std::move(sig)) {
  if (!sig_) sig_ = std::make_shared<const Signature>();
}

void State::check(const Location& loc) const {
  const FunctionInfo& info = sig_->at(loc.fname);
  if (info.arity != loc.args.size())
    throw Error(ErrorCode::ArityMismatch, "'" + loc.fname + "' expects " + std::to_string(info.arity) +
                                              " argument(s), got " + std::to_string(loc.args.size()));
}

Value State::lookup(const Location& loc) const {
  check(loc);
  FunctionKind kind = sig_->at(loc.fname).kind;
  if (kind != FunctionKind::Controlled && kind != FunctionKind::Monitored)
    throw Error(ErrorCode::KindViolation,
                "'" + loc.fname + "' is " + std::string(to_string(kind)) + ", not a dynamic function");
  auto it = content_.find(loc);
  return it == content_.end() ? Value::undef() : it->second;
}

Value State::static_value(const Location& loc) const {
  check(loc);
  auto it = statics_.find(loc);
  return it == statics_.end() ? Value::undef() : it->second;
}

void State::assign(const Location& loc, Value val) {
  check(loc);
  FunctionKind kind = sig_->at(loc.fname).kind;
  if (kind == FunctionKind::Abstract)
    throw Error(ErrorCode::KindViolation, "abstract function '" + loc.fname + "' cannot be assigned");
  auto& table = kind == FunctionKind::Static ? statics_ : content_;
  if (val.is_undef())
    table.erase(loc);
  else
    table[loc] = std::move(val);
}

State State::with(const Location& loc, Value val) const {
  State next = *this;
  next.assign(loc, std::move(val));
  return next;
}

std::uint64_t State::digest() const {
  std::uint64_t h = fnv1a("state");
  for (const auto& [loc, val] : content_) {
    if (sig_->at(loc.fname).kind != FunctionKind::Controlled) continue;
    h = fnv1a(loc.to_string(), h);
    h = fnv1a("=", h);
    h = fnv1a(val.to_string(), h);
    h = fnv1a(";", h);
  }
  return h;
}

std::string State::dump() const {
  std::ostringstream os;
  for (const auto& [loc, val] : content_) os << loc.to_string() << " = " << val.to_string() << "\n";
  return os.str();
}

State fire(const State& state, const UpdateSet& us) {
  auto cs = conflicts(us);
  if (!cs.empty()) throw InconsistentError(std::move(cs));
  State next = state;
  for (const auto& u : us) {
    const FunctionInfo& info = state.signature().at(u.loc.fname);
    if (info.kind != FunctionKind::Controlled)
      throw Error(ErrorCode::KindViolation, "update targets " + std::string(to_string(info.kind)) +
                                                " function '" + u.loc.fname + "'");
    next.assign(u.loc, u.val);
  }
  return next;
}

}  // namespace asmweave
