#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cdbc/circuit.hpp"

namespace cdbc {

/// The four set-level components of a circuit morphism. The type component
/// is always the inclusion and is checked through the variable typing.
struct ComponentMaps {
  std::map<Id, Id> vars;
  std::map<Id, Id> units;
  std::map<Id, Id> in_flows;
  std::map<Id, Id> out_flows;
  friend bool operator==(const ComponentMaps&, const ComponentMaps&) = default;
};

struct RawMorphism {
  Circuit src;
  Circuit dst;
  ComponentMaps maps;
};

class CircuitMorphism;
Validated<CircuitMorphism> validate_morphism(const RawMorphism& raw);

class CircuitMorphism {
public:
  const Circuit& src() const noexcept { return src_; }
  const Circuit& dst() const noexcept { return dst_; }
  const ComponentMaps& maps() const noexcept { return maps_; }

  const Id& var(const Id& v) const { return maps_.vars.at(v); }
  const Id& unit(const Id& u) const { return maps_.units.at(u); }
  const Id& in_flow(const Id& i) const { return maps_.in_flows.at(i); }
  const Id& out_flow(const Id& o) const { return maps_.out_flows.at(o); }

  IdSet image_vars(const IdSet& vs) const {
    IdSet out;
    for (const auto& v : vs) out.insert(var(v));
    return out;
  }
  IdSet var_image() const {
    IdSet out;
    for (const auto& [a, b] : maps_.vars) out.insert(b);
    return out;
  }

  friend bool operator==(const CircuitMorphism& a, const CircuitMorphism& b) {
    return a.maps_ == b.maps_ && a.src_ == b.src_ && a.dst_ == b.dst_;
  }

private:
  CircuitMorphism(Circuit src, Circuit dst, ComponentMaps maps)
      : src_(std::move(src)), dst_(std::move(dst)), maps_(std::move(maps)) {}

  friend Validated<CircuitMorphism> validate_morphism(const RawMorphism& raw);

  Circuit src_;
  Circuit dst_;
  ComponentMaps maps_;
};

namespace detail {

template <class V>
IdSet keys(const std::map<Id, V>& m) {
  IdSet out;
  for (const auto& [k, v] : m) out.insert(k);
  return out;
}

inline IdSet map_set(const std::map<Id, Id>& f, const IdSet& xs) {
  IdSet out;
  for (const auto& x : xs) out.insert(f.at(x));
  return out;
}

inline bool contains_all(const IdSet& big, const IdSet& small) {
  for (const auto& x : small)
    if (!big.count(x)) return false;
  return true;
}

/// Variables v of the source whose image has producers (extra_producers) or
/// consumers (extra_consumers) in the target that are not images of v's own.
inline IdSet boundary_defects(const Circuit& src, const Circuit& dst, const ComponentMaps& m,
                              bool producers) {
  IdSet out;
  for (const auto& [v, t] : src.vars()) {
    const Id& w = m.vars.at(v);
    const IdSet& there = producers ? dst.producers(w) : dst.consumers(w);
    if (there.empty()) continue;
    const IdSet here = map_set(m.units, producers ? src.producers(v) : src.consumers(v));
    if (!contains_all(here, there)) out.insert(v);
  }
  return out;
}

}  // namespace detail

/// Source variables whose image gains producing units outside the image.
inline IdSet extra_producer_vars(const CircuitMorphism& m) {
  return detail::boundary_defects(m.src(), m.dst(), m.maps(), true);
}

/// Source variables whose image gains consuming units outside the image.
inline IdSet extra_consumer_vars(const CircuitMorphism& m) {
  return detail::boundary_defects(m.src(), m.dst(), m.maps(), false);
}

/// Checks totality, the five commuting squares and the boundary condition.
/// Violations are listed in checking order, so the first entry names the first
/// failing square.
inline Validated<CircuitMorphism> validate_morphism(const RawMorphism& raw) {
  ValidationReport report;
  const Circuit& a = raw.src;
  const Circuit& b = raw.dst;
  const ComponentMaps& m = raw.maps;

  auto check_total = [&](const IdSet& domain, const IdSet& codomain, const std::map<Id, Id>& f,
                         const char* what) {
    for (const auto& x : domain) {
      auto it = f.find(x);
      if (it == f.end())
        report.add("map-not-total", std::string(what) + " " + x, true);
      else if (!codomain.count(it->second))
        report.add("map-target-missing", std::string(what) + " " + x + " -> " + it->second, true);
    }
    for (const auto& [x, y] : f)
      if (!domain.count(x)) report.add("map-source-missing", std::string(what) + " " + x, true);
  };
  check_total(detail::keys(a.vars()), detail::keys(b.vars()), m.vars, "var");
  check_total(a.units(), b.units(), m.units, "unit");
  check_total(detail::keys(a.in_flows()), detail::keys(b.in_flows()), m.in_flows, "in-flow");
  check_total(detail::keys(a.out_flows()), detail::keys(b.out_flows()), m.out_flows, "out-flow");
  if (!report.ok()) return report;

  for (const auto& [v, t] : a.vars())
    if (b.tag(m.vars.at(v)) != t) report.add("type-change-forbidden", v);
  for (const auto& [i, f] : a.in_flows())
    if (b.in_flows().at(m.in_flows.at(i)).var != m.vars.at(f.var)) report.add("s-square-fails", i);
  for (const auto& [i, f] : a.in_flows())
    if (b.in_flows().at(m.in_flows.at(i)).unit != m.units.at(f.unit))
      report.add("tau-square-fails", i);
  for (const auto& [o, f] : a.out_flows())
    if (b.out_flows().at(m.out_flows.at(o)).unit != m.units.at(f.unit))
      report.add("sigma-square-fails", o);
  for (const auto& [o, f] : a.out_flows())
    if (b.out_flows().at(m.out_flows.at(o)).var != m.vars.at(f.var))
      report.add("t-square-fails", o);
  if (!report.ok()) return report;

  // A trivial source has only inoutvars, so the boundary condition holds.
  if (!is_trivial(a)) {
    auto in_or_out = [&](const Id& v) { return a.invars().count(v) || a.outvars().count(v); };
    for (const auto& v : detail::boundary_defects(a, b, m, true))
      if (!in_or_out(v)) report.add("boundary-condition", "extra producers at " + v);
    for (const auto& v : detail::boundary_defects(a, b, m, false))
      if (!in_or_out(v)) report.add("boundary-condition", "extra consumers at " + v);
  }
  if (!report.ok()) return report;
  return CircuitMorphism(a, b, m);
}

inline CircuitMorphism make_morphism(const Circuit& src, const Circuit& dst, ComponentMaps maps) {
  return validate_morphism(RawMorphism{src, dst, std::move(maps)}).value();
}

inline CircuitMorphism identity(const Circuit& c) {
  ComponentMaps m;
  for (const auto& [v, t] : c.vars()) m.vars.emplace(v, v);
  for (const auto& u : c.units()) m.units.emplace(u, u);
  for (const auto& [i, f] : c.in_flows()) m.in_flows.emplace(i, i);
  for (const auto& [o, f] : c.out_flows()) m.out_flows.emplace(o, o);
  return make_morphism(c, c, std::move(m));
}

/// g after f.
inline CircuitMorphism compose_morphisms(const CircuitMorphism& g, const CircuitMorphism& f) {
  if (!(f.dst() == g.src()))
    throw CompositionError("domain-mismatch", "composed morphisms do not meet");
  auto after = [](const std::map<Id, Id>& outer, const std::map<Id, Id>& inner) {
    std::map<Id, Id> out;
    for (const auto& [x, y] : inner) out.emplace(x, outer.at(y));
    return out;
  };
  ComponentMaps m{after(g.maps().vars, f.maps().vars), after(g.maps().units, f.maps().units),
                  after(g.maps().in_flows, f.maps().in_flows),
                  after(g.maps().out_flows, f.maps().out_flows)};
  return make_morphism(f.src(), g.dst(), std::move(m));
}

inline bool is_mono(const CircuitMorphism& m) {
  auto injective = [](const std::map<Id, Id>& f) {
    IdSet seen;
    for (const auto& [x, y] : f)
      if (!seen.insert(y).second) return false;
    return true;
  };
  const auto& c = m.maps();
  return injective(c.vars) && injective(c.units) && injective(c.in_flows) && injective(c.out_flows);
}

inline bool is_iso(const CircuitMorphism& m) {
  const auto& d = m.dst();
  return is_mono(m) && m.maps().vars.size() == d.vars().size() &&
         m.maps().units.size() == d.units().size() &&
         m.maps().in_flows.size() == d.in_flows().size() &&
         m.maps().out_flows.size() == d.out_flows().size();
}

inline CircuitMorphism inverse(const CircuitMorphism& m) {
  if (!is_iso(m)) throw CompositionError("not-invertible", "morphism is not an isomorphism");
  auto inv = [](const std::map<Id, Id>& f) {
    std::map<Id, Id> out;
    for (const auto& [x, y] : f) out.emplace(y, x);
    return out;
  };
  const auto& c = m.maps();
  return make_morphism(m.dst(), m.src(),
                       {inv(c.vars), inv(c.units), inv(c.in_flows), inv(c.out_flows)});
}

enum class AdjointKind : std::uint8_t { In, Out };

/// A mono from a trivial circuit onto exactly the invars (In) or outvars (Out).
struct Adjoint {
  AdjointKind kind;
  CircuitMorphism morphism;
  const Circuit& domain() const noexcept { return morphism.src(); }
};

/// Embedding of a trivial circuit whose variables are given by `assignment`
/// (domain variable -> target variable). The domain takes the target's tags.
inline CircuitMorphism embed_trivial(const Circuit& target,
                                     const std::vector<std::pair<Id, Id>>& assignment) {
  std::vector<std::pair<Id, TypeTag>> vars;
  ComponentMaps m;
  for (const auto& [d, v] : assignment) {
    vars.emplace_back(d, target.tag(v));
    m.vars.emplace(d, v);
  }
  return make_morphism(make_trivial(vars), target, std::move(m));
}

namespace detail {
inline Adjoint make_adjoint(const Circuit& c, AdjointKind kind) {
  const IdSet& side = kind == AdjointKind::In ? c.invars() : c.outvars();
  const std::string prefix = kind == AdjointKind::In ? "in/" : "out/";
  std::vector<std::pair<Id, Id>> assignment;
  for (const auto& v : side) assignment.emplace_back(prefix + v, v);
  return Adjoint{kind, embed_trivial(c, assignment)};
}
}  // namespace detail

/// Canonical in-adjoint: domain variable "in/<id>" for each invar <id>.
inline Adjoint in_adjoint(const Circuit& c) { return detail::make_adjoint(c, AdjointKind::In); }
/// Canonical out-adjoint: domain variable "out/<id>" for each outvar <id>.
inline Adjoint out_adjoint(const Circuit& c) { return detail::make_adjoint(c, AdjointKind::Out); }

/// Whether m is an adjoint of its codomain of the given kind.
inline bool is_adjoint(const CircuitMorphism& m, AdjointKind kind) {
  const IdSet& side = kind == AdjointKind::In ? m.dst().invars() : m.dst().outvars();
  return is_trivial(m.src()) && is_mono(m) && m.var_image() == side;
}

inline std::vector<TypeTag> domain_tags(const Adjoint& a) {
  std::vector<TypeTag> out;
  for (const auto& [v, t] : a.domain().vars()) out.push_back(t);
  return out;
}

}  // namespace cdbc
