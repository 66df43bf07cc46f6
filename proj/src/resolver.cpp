#include "asmweave/resolver.hpp"

#include <algorithm>

namespace asmweave {

std::string_view to_string(ResolutionKind kind) {
  switch (kind) {
    case ResolutionKind::Choose: return "choose";
    case ResolutionKind::Abstract: return "abstract";
    case ResolutionKind::Schedule: return "schedule";
  }
  return "?";
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

Resolver Resolver::seeded(std::uint64_t seed) {
  Resolver r;
  r.mode_ = Mode::Seeded;
  r.seed_ = seed;
  return r;
}

Resolver Resolver::scripted(Script script, std::optional<std::uint64_t> fallback_seed) {
  Resolver r;
  r.mode_ = Mode::Scripted;
  r.has_fallback_ = fallback_seed.has_value();
  r.seed_ = fallback_seed.value_or(0);
  for (const auto& step : script) r.consumed_.emplace_back(step.size(), false);
  r.script_ = std::move(script);
  return r;
}

Resolver Resolver::exhaustive() {
  Resolver r;
  r.mode_ = Mode::Exhaustive;
  return r;
}

std::string Resolver::provenance() const {
  switch (mode_) {
    case Mode::Seeded: return "seed=" + std::to_string(seed_);
    case Mode::Scripted: return has_fallback_ ? "script+seed=" + std::to_string(seed_) : "script";
    case Mode::Exhaustive: return "exhaustive";
  }
  return "";
}

const std::map<Location, Value>* Resolver::monitored_for(std::size_t step) const {
  return step < monitored_.size() ? &monitored_[step] : nullptr;
}

void Resolver::begin_step(std::size_t step) {
  step_ = step;
  taken_.clear();
  draws_.clear();
  cursor_ = 0;
}

const Value* Resolver::drawn(const Location& loc) const {
  auto it = draws_.find(loc);
  return it == draws_.end() ? nullptr : &it->second;
}

std::vector<Resolution> Resolver::take_resolutions() {
  std::vector<Resolution> out = std::move(taken_);
  taken_.clear();
  return out;
}

std::size_t Resolver::seeded_index(const std::string& key, std::size_t n) const {
  std::uint64_t h = splitmix64(seed_ ^ splitmix64(step_ + 1) ^ fnv1a(key));
  return static_cast<std::size_t>(h % n);
}

Value Resolver::pick(ResolutionKind kind, const std::string& key, const std::string& label,
                     std::span<const Value> candidates, bool open) {
  Value chosen;
  bool found = false;
  if (mode_ == Mode::Scripted && step_ < script_.size()) {
    auto& entries = script_[step_];
    auto& used = consumed_[step_];
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (used[i] || entries[i].kind != kind) continue;
      if (entries[i].key != key && entries[i].key != label) continue;
      chosen = entries[i].value;
      if (!candidates.empty() && !std::binary_search(candidates.begin(), candidates.end(), chosen))
        throw Error(ErrorCode::ScriptViolation, "scripted value " + chosen.to_string() + " for " + label +
                                                    " at step " + std::to_string(step_ + 1) +
                                                    " is not admissible");
      used[i] = true;
      found = true;
      break;
    }
  }
  if (!found) {
    if (mode_ == Mode::Scripted && !has_fallback_)
      throw Error(ErrorCode::ScriptViolation,
                  "script has no entry for " + label + " at step " + std::to_string(step_ + 1));
    if (candidates.empty()) {
      if (open) throw Error(ErrorCode::UnboundedAbstract, "no finite set of values to draw " + label + " from");
      throw Error(ErrorCode::ScriptViolation, "nothing to pick for " + label);
    }
    std::size_t idx = 0;
    if (mode_ == Mode::Exhaustive) {
      if (candidates.size() > 1) {
        if (cursor_ < forced_.size()) {
          idx = std::min(forced_[cursor_], candidates.size() - 1);
        } else {
          forced_.push_back(0);
          widths_.push_back(candidates.size());
        }
        ++cursor_;
      }
    } else {
      idx = seeded_index(key, candidates.size());
    }
    chosen = candidates[idx];
  }
  taken_.push_back(Resolution{kind, key, label, chosen});
  return chosen;
}

bool Resolver::next_branch() {
  while (!forced_.empty() && forced_.back() + 1 >= widths_.back()) {
    forced_.pop_back();
    widths_.pop_back();
  }
  if (forced_.empty()) return false;
  ++forced_.back();
  cursor_ = 0;
  return true;
}

}  // namespace asmweave
