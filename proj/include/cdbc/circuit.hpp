#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cdbc/errors.hpp"

namespace cdbc {

/// Ctrl is the unit type (carries only the control signal), Bool carries 0/1.
enum class TypeTag : std::uint8_t { Ctrl, Bool };

inline std::string_view to_string(TypeTag t) { return t == TypeTag::Ctrl ? "ctrl" : "bool"; }

using Id = std::string;
using IdSet = std::set<Id>;

/// Input flow: from a variable (s) to a unit (tau).
struct InFlow {
  Id var;
  Id unit;
  friend bool operator==(const InFlow&, const InFlow&) = default;
};

/// Output flow: from a unit (sigma) to a variable (t).
struct OutFlow {
  Id unit;
  Id var;
  friend bool operator==(const OutFlow&, const OutFlow&) = default;
};

/// Unvalidated circuit data, e.g. fresh from a file or a builder.
struct RawCircuit {
  std::map<Id, TypeTag> vars;
  IdSet units;
  std::map<Id, InFlow> in_flows;
  std::map<Id, OutFlow> out_flows;
  // Optional declared type set; when present it must equal the range of the typing.
  std::optional<std::set<TypeTag>> sigma;
  friend bool operator==(const RawCircuit&, const RawCircuit&) = default;
};

struct Interface {
  IdSet invars;
  IdSet outvars;
  IdSet inoutvars;
};

enum class CircuitClass : std::uint8_t { Trivial, Primitive, UnitCircuit, General };

inline std::string_view to_string(CircuitClass c) {
  switch (c) {
    case CircuitClass::Trivial: return "trivial";
    case CircuitClass::Primitive: return "primitive";
    case CircuitClass::UnitCircuit: return "unit";
    case CircuitClass::General: return "general";
  }
  return "general";
}

class Circuit;
Validated<Circuit> validate_circuit(const RawCircuit& raw);

/// A validated control-driven circuit. Immutable; copies share storage.
class Circuit {
public:
  const std::map<Id, TypeTag>& vars() const noexcept { return d_->raw.vars; }
  const IdSet& units() const noexcept { return d_->raw.units; }
  const std::map<Id, InFlow>& in_flows() const noexcept { return d_->raw.in_flows; }
  const std::map<Id, OutFlow>& out_flows() const noexcept { return d_->raw.out_flows; }
  const std::set<TypeTag>& sigma_set() const noexcept { return d_->sigma; }
  const RawCircuit& raw() const noexcept { return d_->raw; }

  bool has_var(const Id& v) const { return vars().count(v) != 0; }
  bool has_unit(const Id& u) const { return units().count(u) != 0; }
  TypeTag tag(const Id& v) const { return vars().at(v); }

  /// Variables feeding unit u.
  const IdSet& pre_set(const Id& u) const { return lookup(d_->pre, u); }
  /// Variables fed by unit u.
  const IdSet& post_set(const Id& u) const { return lookup(d_->post, u); }
  /// Units reading variable v.
  const IdSet& consumers(const Id& v) const { return lookup(d_->consumers, v); }
  /// Units writing variable v.
  const IdSet& producers(const Id& v) const { return lookup(d_->producers, v); }

  const Interface& interface() const noexcept { return d_->iface; }
  const IdSet& invars() const noexcept { return d_->iface.invars; }
  const IdSet& outvars() const noexcept { return d_->iface.outvars; }

  std::size_t size() const noexcept {
    return vars().size() + units().size() + in_flows().size() + out_flows().size();
  }

  friend bool operator==(const Circuit& a, const Circuit& b) {
    if (a.d_ == b.d_) return true;
    const auto& x = a.d_->raw;
    const auto& y = b.d_->raw;
    return x.vars == y.vars && x.units == y.units && x.in_flows == y.in_flows &&
           x.out_flows == y.out_flows;
  }

private:
  struct Data {
    RawCircuit raw;
    std::set<TypeTag> sigma;
    std::map<Id, IdSet> pre, post, consumers, producers;
    Interface iface;
  };

  explicit Circuit(std::shared_ptr<const Data> d) : d_(std::move(d)) {}

  static const IdSet& lookup(const std::map<Id, IdSet>& m, const Id& k) {
    static const IdSet empty;
    auto it = m.find(k);
    return it == m.end() ? empty : it->second;
  }

  friend Validated<Circuit> validate_circuit(const RawCircuit& raw);

  std::shared_ptr<const Data> d_;
};

/// Checks every clause of the circuit definition. Dangling flow endpoints are
/// reported as structural violations and short-circuit the constraint checks.
inline Validated<Circuit> validate_circuit(const RawCircuit& raw) {
  ValidationReport report;
  for (const auto& [id, f] : raw.in_flows) {
    if (!raw.vars.count(f.var))
      report.add("dangling-in-flow-source", id + " -> " + f.var, true);
    if (!raw.units.count(f.unit))
      report.add("dangling-in-flow-target", id + " -> " + f.unit, true);
  }
  for (const auto& [id, f] : raw.out_flows) {
    if (!raw.units.count(f.unit))
      report.add("dangling-out-flow-source", id + " -> " + f.unit, true);
    if (!raw.vars.count(f.var))
      report.add("dangling-out-flow-target", id + " -> " + f.var, true);
  }
  if (!report.ok()) return report;

  auto d = std::make_shared<Circuit::Data>();
  d->raw = raw;
  d->raw.sigma.reset();
  for (const auto& [v, t] : raw.vars) d->sigma.insert(t);
  for (const auto& [id, f] : raw.in_flows) {
    d->pre[f.unit].insert(f.var);
    d->consumers[f.var].insert(f.unit);
  }
  for (const auto& [id, f] : raw.out_flows) {
    d->post[f.unit].insert(f.var);
    d->producers[f.var].insert(f.unit);
  }
  for (const auto& [v, t] : raw.vars) {
    const bool in = !d->producers.count(v);
    const bool out = !d->consumers.count(v);
    if (in) d->iface.invars.insert(v);
    if (out) d->iface.outvars.insert(v);
    if (in && out) d->iface.inoutvars.insert(v);
  }

  if (raw.vars.empty()) report.add("no-variables", "");

  IdSet fed, feeding, fed_ctrl, feeding_ctrl;
  for (const auto& [id, f] : raw.in_flows) {
    fed.insert(f.unit);
    if (raw.vars.at(f.var) == TypeTag::Ctrl) fed_ctrl.insert(f.unit);
  }
  for (const auto& [id, f] : raw.out_flows) {
    feeding.insert(f.unit);
    if (raw.vars.at(f.var) == TypeTag::Ctrl) feeding_ctrl.insert(f.unit);
  }
  auto missing = [&](const IdSet& hit) {
    std::string out;
    for (const auto& u : raw.units)
      if (!hit.count(u)) out += (out.empty() ? "" : ",") + u;
    return out;
  };
  if (fed.size() != raw.units.size()) report.add("tau-not-surjective", missing(fed));
  if (feeding.size() != raw.units.size()) report.add("sigma-not-surjective", missing(feeding));
  if (feeding_ctrl.size() != raw.units.size())
    report.add("sigma-ctrl-restriction-not-surjective", missing(feeding_ctrl));
  if (fed_ctrl.size() != raw.units.size())
    report.add("tau-ctrl-restriction-not-surjective", missing(fed_ctrl));

  bool ctrl_in = false, ctrl_out = false;
  for (const auto& v : d->iface.invars) ctrl_in |= raw.vars.at(v) == TypeTag::Ctrl;
  for (const auto& v : d->iface.outvars) ctrl_out |= raw.vars.at(v) == TypeTag::Ctrl;
  if (!ctrl_in) report.add("no-control-invar", "");
  if (!ctrl_out) report.add("no-control-outvar", "");

  if (raw.sigma && *raw.sigma != d->sigma) report.add("sigma-set-mismatch", "");

  if (!report.ok()) return report;
  return Circuit(std::move(d));
}

inline Circuit make_circuit(const RawCircuit& raw) { return validate_circuit(raw).value(); }

inline Interface interface(const Circuit& c) { return c.interface(); }

/// True iff every flow source and every invar reaches an outvar along at least
/// one variable -> unit -> variable hop. Cyclic circuits are handled by a
/// fixpoint over the set of variables known to reach an outvar.
inline bool is_sound(const Circuit& c) {
  IdSet reaches;  // variables with a path of length >= 1 into V-
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [v, t] : c.vars()) {
      if (reaches.count(v)) continue;
      bool ok = false;
      for (const auto& u : c.consumers(v)) {
        for (const auto& w : c.post_set(u)) {
          if (c.outvars().count(w) || reaches.count(w)) {
            ok = true;
            break;
          }
        }
        if (ok) break;
      }
      if (ok) {
        reaches.insert(v);
        changed = true;
      }
    }
  }
  for (const auto& [id, f] : c.in_flows())
    if (!reaches.count(f.var)) return false;
  for (const auto& v : c.invars())
    if (!reaches.count(v)) return false;
  return true;
}

inline bool is_trivial(const Circuit& c) {
  return c.units().empty() && c.in_flows().empty() && c.out_flows().empty();
}

inline CircuitClass classify(const Circuit& c) {
  if (is_trivial(c)) return c.vars().size() == 1 ? CircuitClass::UnitCircuit : CircuitClass::Trivial;
  if (c.units().size() == 1) {
    IdSet sources, targets;
    for (const auto& [id, f] : c.in_flows()) sources.insert(f.var);
    for (const auto& [id, f] : c.out_flows()) targets.insert(f.var);
    bool symmetric_difference = true;
    for (const auto& [v, t] : c.vars())
      symmetric_difference &= (sources.count(v) != 0) != (targets.count(v) != 0);
    if (symmetric_difference) return CircuitClass::Primitive;
  }
  return CircuitClass::General;
}

/// Trivial circuit with the given named variables.
inline Circuit make_trivial(const std::vector<std::pair<Id, TypeTag>>& vars) {
  RawCircuit raw;
  for (const auto& [id, t] : vars) raw.vars.emplace(id, t);
  if (raw.vars.size() != vars.size())
    throw CompositionError("duplicate-variable", "trivial circuit variables must be distinct");
  auto result = validate_circuit(raw);
  if (!result) throw CompositionError("trivial-needs-control", "a trivial circuit needs a ctrl variable");
  return result.value();
}

/// One fresh variable per tag, named v1..vn.
inline Circuit mk_trivial(const std::vector<TypeTag>& tags) {
  std::vector<std::pair<Id, TypeTag>> vars;
  for (std::size_t k = 0; k < tags.size(); ++k) vars.emplace_back("v" + std::to_string(k + 1), tags[k]);
  return make_trivial(vars);
}

/// The unit circuit: one control inoutvar.
inline Circuit unit_circuit() { return mk_trivial({TypeTag::Ctrl}); }

/// Single-unit circuit with disjoint invars and outvars, one flow per variable.
/// Variables are named ci1.., bi1.., co1.., bo1..; the unit is `u`.
inline Circuit mk_primitive(std::size_t ctrl_in, std::size_t bool_in, std::size_t ctrl_out,
                            std::size_t bool_out) {
  if (ctrl_in == 0 || ctrl_out == 0)
    throw CompositionError("primitive-needs-control",
                           "a primitive needs at least one control invar and one control outvar");
  RawCircuit raw;
  raw.units.insert("u");
  auto add_in = [&](const std::string& prefix, std::size_t n, TypeTag t) {
    for (std::size_t k = 1; k <= n; ++k) {
      Id v = prefix + std::to_string(k);
      raw.vars.emplace(v, t);
      raw.in_flows.emplace("i:" + v, InFlow{v, "u"});
    }
  };
  auto add_out = [&](const std::string& prefix, std::size_t n, TypeTag t) {
    for (std::size_t k = 1; k <= n; ++k) {
      Id v = prefix + std::to_string(k);
      raw.vars.emplace(v, t);
      raw.out_flows.emplace("o:" + v, OutFlow{"u", v});
    }
  };
  add_in("ci", ctrl_in, TypeTag::Ctrl);
  add_in("bi", bool_in, TypeTag::Bool);
  add_out("co", ctrl_out, TypeTag::Ctrl);
  add_out("bo", bool_out, TypeTag::Bool);
  return make_circuit(raw);
}

/// Renames variables and units; ids absent from the maps are kept. Flow ids
/// are kept. Throws if the renaming merges two elements.
inline Circuit relabel(const Circuit& c, const std::map<Id, Id>& var_names,
                       const std::map<Id, Id>& unit_names = {}) {
  auto rv = [&](const Id& v) {
    auto it = var_names.find(v);
    return it == var_names.end() ? v : it->second;
  };
  auto ru = [&](const Id& u) {
    auto it = unit_names.find(u);
    return it == unit_names.end() ? u : it->second;
  };
  RawCircuit raw;
  for (const auto& [v, t] : c.vars()) raw.vars.emplace(rv(v), t);
  for (const auto& u : c.units()) raw.units.insert(ru(u));
  if (raw.vars.size() != c.vars().size() || raw.units.size() != c.units().size())
    throw CompositionError("relabel-not-injective", "relabelling merges elements");
  for (const auto& [id, f] : c.in_flows()) raw.in_flows.emplace(id, InFlow{rv(f.var), ru(f.unit)});
  for (const auto& [id, f] : c.out_flows()) raw.out_flows.emplace(id, OutFlow{ru(f.unit), rv(f.var)});
  return make_circuit(raw);
}

inline std::size_t count_tag(const Circuit& c, const IdSet& vars, TypeTag t) {
  std::size_t n = 0;
  for (const auto& v : vars) n += c.tag(v) == t;
  return n;
}

}  // namespace cdbc
