#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cdbc/circuit.hpp"

namespace cdbc {

/// Signal inhabits control variables; B0/B1 inhabit Boolean ones.
enum class Value : std::uint8_t { Signal, B0, B1 };

inline std::string_view to_string(Value v) {
  switch (v) {
    case Value::Signal: return "*";
    case Value::B0: return "0";
    case Value::B1: return "1";
  }
  return "?";
}

inline std::optional<Value> parse_value(std::string_view s) {
  if (s == "*") return Value::Signal;
  if (s == "0") return Value::B0;
  if (s == "1") return Value::B1;
  return std::nullopt;
}

inline Value from_bit(bool b) { return b ? Value::B1 : Value::B0; }

inline bool fits(TypeTag t, Value v) {
  return (t == TypeTag::Ctrl) == (v == Value::Signal);
}

struct State {
  std::size_t time = 0;
  std::map<Id, Value> values;
  friend bool operator==(const State&, const State&) = default;
};

/// splitmix64; the whole draw sequence is fixed by the seed on every platform.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, n) by rejection, so no residue class is favoured.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      std::uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }

private:
  std::uint64_t state_;
};

struct ExecConfig {
  std::uint64_t seed = 0;
  std::size_t max_steps = 10'000;
};

enum class Outcome : std::uint8_t { Final, Deadlock, StepLimit, WriteConflict };

inline std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::Final: return "Final";
    case Outcome::Deadlock: return "Deadlock";
    case Outcome::StepLimit: return "StepLimit";
    case Outcome::WriteConflict: return "WriteConflict";
  }
  return "?";
}

struct TraceStep {
  State state;
  IdSet enabled;
  IdSet ready;
  std::map<Id, Value> reductions;  // per ready unit
};

struct Trace {
  std::vector<TraceStep> steps;  // the last entry is the state the run stopped in
  Outcome outcome = Outcome::Deadlock;
  std::optional<Id> conflict;

  const State& last() const { return steps.back().state; }
  std::size_t transitions() const { return steps.empty() ? 0 : steps.size() - 1; }
};

/// Result of one transition.
struct StepResult {
  State state;
  IdSet ready;
  std::map<Id, Value> reductions;
  std::optional<Id> conflict;  // set iff the transition is a write conflict
};

/// A circuit compiled for repeated execution. Units whose pre-sets coincide
/// form a competition class; the classes are fixed by the structure.
class Executor {
public:
  explicit Executor(Circuit c) : c_(std::move(c)) {
    std::map<IdSet, std::vector<Id>> by_pre;
    for (const auto& u : c_.units()) by_pre[c_.pre_set(u)].push_back(u);
    for (auto& [pre, members] : by_pre) classes_.push_back({pre, members});
    // Draw order: by least member id.
    std::sort(classes_.begin(), classes_.end(),
              [](const Class& a, const Class& b) { return a.members.front() < b.members.front(); });
  }

  const Circuit& circuit() const noexcept { return c_; }

  State initial_state(const std::map<Id, Value>& inputs) const {
    for (const auto& v : c_.invars())
      if (!inputs.count(v)) throw ExecutionError("missing-input", "no value for invar " + v);
    for (const auto& [v, x] : inputs) {
      if (!c_.invars().count(v)) throw ExecutionError("unexpected-input", v + " is not an invar");
      if (!fits(c_.tag(v), x))
        throw ExecutionError("tag-mismatch", std::string(to_string(x)) + " cannot inhabit " + v);
    }
    return State{0, inputs};
  }

  void check_state(const State& st) const {
    for (const auto& [v, x] : st.values) {
      if (!c_.has_var(v)) throw ExecutionError("unknown-variable", v);
      if (!fits(c_.tag(v), x))
        throw ExecutionError("tag-mismatch", std::string(to_string(x)) + " cannot inhabit " + v);
    }
  }

  bool is_final(const State& st) const {
    if (st.values.size() != c_.outvars().size()) return false;
    for (const auto& v : c_.outvars())
      if (!st.values.count(v)) return false;
    return true;
  }

  bool is_initial(const State& st) const {
    if (st.values.size() != c_.invars().size()) return false;
    for (const auto& v : c_.invars())
      if (!st.values.count(v)) return false;
    return true;
  }

  IdSet enabled(const State& st) const {
    IdSet out;
    for (const auto& k : classes_)
      if (assigned(k.pre, st)) out.insert(k.members.begin(), k.members.end());
    return out;
  }

  IdSet ready(const State& st, SplitMix64& rng) const {
    IdSet out;
    for (const auto& k : classes_) {
      if (!assigned(k.pre, st)) continue;
      if (k.members.size() == 1) out.insert(k.members.front());
      else out.insert(k.members[rng.below(k.members.size())]);
    }
    return out;
  }

  Value reduce(const Id& u, const State& st) const {
    bool all_one = true, any_bool = false;
    for (const auto& v : c_.pre_set(u)) {
      auto it = st.values.find(v);
      if (it == st.values.end())
        throw ExecutionError("unit-not-enabled", u + " is missing input " + v);
      if (c_.tag(v) != TypeTag::Bool) continue;
      any_bool = true;
      all_one &= it->second == Value::B1;
    }
    if (!any_bool) return Value::B1;
    return all_one ? Value::B0 : Value::B1;
  }

  /// Fires the given ready set.
  StepResult fire(const State& st, const IdSet& ready) const {
    StepResult r;
    r.ready = ready;
    r.state.time = st.time + 1;
    r.state.values = st.values;
    for (const auto& u : ready) r.reductions.emplace(u, reduce(u, st));
    for (const auto& u : ready)
      for (const auto& v : c_.pre_set(u)) r.state.values.erase(v);
    std::map<Id, Value> written;
    for (const auto& u : ready) {
      for (const auto& v : c_.post_set(u)) {
        const Value x = c_.tag(v) == TypeTag::Ctrl ? Value::Signal : r.reductions.at(u);
        auto [it, fresh] = written.emplace(v, x);
        if (!fresh && it->second != x) {
          r.conflict = v;
          return r;
        }
        r.state.values[v] = x;
      }
    }
    return r;
  }

  StepResult step(const State& st, SplitMix64& rng) const { return fire(st, ready(st, rng)); }

  Trace run(const State& initial, const ExecConfig& cfg) const {
    check_state(initial);
    SplitMix64 rng(cfg.seed);
    Trace tr;
    State cur = initial;
    for (;;) {
      TraceStep rec{cur, enabled(cur), {}, {}};
      if (is_final(cur)) {
        tr.outcome = Outcome::Final;
        tr.steps.push_back(std::move(rec));
        break;
      }
      if (rec.enabled.empty()) {
        tr.outcome = Outcome::Deadlock;
        tr.steps.push_back(std::move(rec));
        break;
      }
      if (tr.steps.size() >= cfg.max_steps) {
        tr.outcome = Outcome::StepLimit;
        tr.steps.push_back(std::move(rec));
        break;
      }
      StepResult next = step(cur, rng);
      rec.ready = next.ready;
      rec.reductions = next.reductions;
      tr.steps.push_back(std::move(rec));
      if (next.conflict) {
        tr.outcome = Outcome::WriteConflict;
        tr.conflict = next.conflict;
        break;
      }
      cur = std::move(next.state);
    }
    return tr;
  }

private:
  struct Class {
    IdSet pre;
    std::vector<Id> members;  // sorted
  };

  static bool assigned(const IdSet& pre, const State& st) {
    for (const auto& v : pre)
      if (!st.values.count(v)) return false;
    return true;
  }

  Circuit c_;
  std::vector<Class> classes_;
};

inline State initial_state(const Circuit& c, const std::map<Id, Value>& inputs) {
  return Executor(c).initial_state(inputs);
}
inline IdSet enabled_units(const Circuit& c, const State& st) { return Executor(c).enabled(st); }
inline IdSet ready_units(const Circuit& c, const State& st, SplitMix64& rng) {
  return Executor(c).ready(st, rng);
}
inline Value reduce_unit(const Circuit& c, const Id& u, const State& st) {
  return Executor(c).reduce(u, st);
}
inline StepResult step(const Circuit& c, const State& st, SplitMix64& rng) {
  return Executor(c).step(st, rng);
}
inline Trace run(const Circuit& c, const State& initial, const ExecConfig& cfg = {}) {
  return Executor(c).run(initial, cfg);
}

inline std::string format_state(const State& st) {
  std::string out = "{";
  bool first = true;
  for (const auto& [v, x] : st.values) {
    if (!first) out += ",";
    first = false;
    out += v + "=" + std::string(to_string(x));
  }
  return out + "}";
}

/// One line per state, then the outcome line.
inline std::string format_trace(const Trace& tr) {
  std::ostringstream os;
  for (const auto& s : tr.steps) {
    os << "t=" << s.state.time << " state=" << format_state(s.state) << " ready={";
    bool first = true;
    for (const auto& u : s.ready) {
      os << (first ? "" : ",") << u;
      first = false;
    }
    os << "}\n";
  }
  os << "outcome=" << to_string(tr.outcome) << " steps=" << tr.transitions();
  if (tr.conflict) os << " conflict=" << *tr.conflict;
  os << "\n";
  return os.str();
}

}  // namespace cdbc
