#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cdbc/morphism.hpp"

namespace cdbc {

/// left <- apex -> right
struct Span {
  CircuitMorphism left;
  CircuitMorphism right;
  const Circuit& apex() const noexcept { return left.src(); }
};

/// left -> result <- right
struct Cospan {
  Circuit result;
  CircuitMorphism left_leg;
  CircuitMorphism right_leg;
};

/// Union-find over the tagged disjoint union of two id sets. Members are named
/// "L/<id>" and "R/<id>"; the representative of a class is its least name.
class QuotientMap {
public:
  void add(const Id& tagged) {
    if (parent_.emplace(tagged, tagged).second) order_.push_back(tagged);
  }

  Id find(const Id& x) {
    Id root = x;
    while (parent_.at(root) != root) root = parent_.at(root);
    for (Id cur = x; cur != root;) {
      Id next = parent_.at(cur);
      parent_[cur] = root;
      cur = std::move(next);
    }
    return root;
  }

  void unite(const Id& a, const Id& b) {
    Id ra = find(a);
    Id rb = find(b);
    if (ra == rb) return;
    // Least name wins, so the root is always the class minimum.
    if (rb < ra) std::swap(ra, rb);
    parent_[rb] = ra;
  }

  /// Representative -> members, in first-insertion order within each class.
  std::map<Id, std::vector<Id>> classes() {
    std::map<Id, std::vector<Id>> out;
    for (const auto& x : order_) out[find(x)].push_back(x);
    return out;
  }

  std::size_t size() const noexcept { return parent_.size(); }

private:
  std::map<Id, Id> parent_;
  std::vector<Id> order_;
};

namespace detail {

inline Id left_name(const Id& x) { return "L/" + x; }
inline Id right_name(const Id& x) { return "R/" + x; }

inline bool in_interface(const Circuit& c, const Id& v) {
  return c.invars().count(v) || c.outvars().count(v);
}

/// Builds the circuit whose four carriers are the classes of the given
/// quotients, with ids "<tag>/<representative>".
struct Glued {
  RawCircuit raw;
  std::map<Id, Id> var_of, unit_of, in_of, out_of;  // tagged member -> result id
};

inline Glued glue(std::string_view tag, const Circuit& l, const Circuit& r, QuotientMap& vq,
                  QuotientMap& uq, QuotientMap& iq, QuotientMap& oq) {
  Glued g;
  const std::string prefix = std::string(tag) + "/";
  auto name_classes = [&](QuotientMap& q, std::map<Id, Id>& of) {
    for (const auto& [rep, members] : q.classes())
      for (const auto& m : members) of.emplace(m, prefix + rep);
  };
  name_classes(vq, g.var_of);
  name_classes(uq, g.unit_of);
  name_classes(iq, g.in_of);
  name_classes(oq, g.out_of);

  auto side = [&](const Id& tagged) -> std::pair<const Circuit*, Id> {
    return {tagged[0] == 'L' ? &l : &r, tagged.substr(2)};
  };
  for (const auto& [m, id] : g.var_of) {
    auto [c, orig] = side(m);
    auto [it, fresh] = g.raw.vars.emplace(id, c->tag(orig));
    if (!fresh && it->second != c->tag(orig))
      throw CompositionError("pushout-ill-defined", "variable class mixes tags: " + id);
  }
  for (const auto& [m, id] : g.unit_of) g.raw.units.insert(id);
  for (const auto& [m, id] : g.in_of) {
    auto [c, orig] = side(m);
    const auto& f = c->in_flows().at(orig);
    const char s = m[0];
    InFlow flow{g.var_of.at(std::string(1, s) + "/" + f.var),
                g.unit_of.at(std::string(1, s) + "/" + f.unit)};
    auto [it, fresh] = g.raw.in_flows.emplace(id, flow);
    if (!fresh && !(it->second == flow))
      throw CompositionError("pushout-ill-defined", "input flow class has two endpoints: " + id);
  }
  for (const auto& [m, id] : g.out_of) {
    auto [c, orig] = side(m);
    const auto& f = c->out_flows().at(orig);
    const char s = m[0];
    OutFlow flow{g.unit_of.at(std::string(1, s) + "/" + f.unit),
                 g.var_of.at(std::string(1, s) + "/" + f.var)};
    auto [it, fresh] = g.raw.out_flows.emplace(id, flow);
    if (!fresh && !(it->second == flow))
      throw CompositionError("pushout-ill-defined", "output flow class has two endpoints: " + id);
  }
  return g;
}

inline ComponentMaps leg_maps(const Circuit& c, char s, const Glued& g) {
  const std::string p = std::string(1, s) + "/";
  ComponentMaps m;
  for (const auto& [v, t] : c.vars()) m.vars.emplace(v, g.var_of.at(p + v));
  for (const auto& u : c.units()) m.units.emplace(u, g.unit_of.at(p + u));
  for (const auto& [i, f] : c.in_flows()) m.in_flows.emplace(i, g.in_of.at(p + i));
  for (const auto& [o, f] : c.out_flows()) m.out_flows.emplace(o, g.out_of.at(p + o));
  return m;
}

inline Cospan finish(const Glued& g, const Circuit& l, const Circuit& r) {
  auto result = validate_circuit(g.raw);
  if (!result)
    throw CompositionError("pushout-result-invalid",
                           "glued structure is not a circuit: " + result.report().summary());
  const Circuit& out = result.value();
  return Cospan{out, make_morphism(l, out, leg_maps(l, 'L', g)),
                make_morphism(r, out, leg_maps(r, 'R', g))};
}

}  // namespace detail

/// Whether the pushout of the span exists: variables of the apex that gain
/// producers or consumers along one leg must land on interface variables
/// through the other leg.
inline bool pushout_exists(const Span& sp, std::string* why = nullptr) {
  auto check = [&](const CircuitMorphism& along, const CircuitMorphism& other) {
    IdSet touched = extra_producer_vars(along);
    for (const auto& v : extra_consumer_vars(along)) touched.insert(v);
    for (const auto& v : touched) {
      if (!detail::in_interface(other.dst(), other.var(v))) {
        if (why) *why = "apex variable " + v + " lands on internal " + other.var(v);
        return false;
      }
    }
    return true;
  };
  return check(sp.right, sp.left) && check(sp.left, sp.right);
}

/// Componentwise quotient of left + right by the identifications the span
/// induces. Result ids are "<tag>/L/<id>" or "<tag>/R/<id>" after the least
/// member of each class.
inline Cospan pushout(const Span& sp, std::string_view tag = "po") {
  if (!(sp.left.src() == sp.right.src()))
    throw CompositionError("span-not-joined", "span legs have different sources");
  std::string why;
  if (!pushout_exists(sp, &why)) throw CompositionError("pushout-does-not-exist", why);

  const Circuit& l = sp.left.dst();
  const Circuit& r = sp.right.dst();
  QuotientMap vq, uq, iq, oq;
  for (const auto& [v, t] : l.vars()) vq.add(detail::left_name(v));
  for (const auto& [v, t] : r.vars()) vq.add(detail::right_name(v));
  for (const auto& u : l.units()) uq.add(detail::left_name(u));
  for (const auto& u : r.units()) uq.add(detail::right_name(u));
  for (const auto& [i, f] : l.in_flows()) iq.add(detail::left_name(i));
  for (const auto& [i, f] : r.in_flows()) iq.add(detail::right_name(i));
  for (const auto& [o, f] : l.out_flows()) oq.add(detail::left_name(o));
  for (const auto& [o, f] : r.out_flows()) oq.add(detail::right_name(o));

  const auto& a = sp.left.maps();
  const auto& b = sp.right.maps();
  for (const auto& [x, y] : a.vars) vq.unite(detail::left_name(y), detail::right_name(b.vars.at(x)));
  for (const auto& [x, y] : a.units)
    uq.unite(detail::left_name(y), detail::right_name(b.units.at(x)));
  for (const auto& [x, y] : a.in_flows)
    iq.unite(detail::left_name(y), detail::right_name(b.in_flows.at(x)));
  for (const auto& [x, y] : a.out_flows)
    oq.unite(detail::left_name(y), detail::right_name(b.out_flows.at(x)));

  return detail::finish(detail::glue(tag, l, r, vq, uq, iq, oq), l, r);
}

/// Disjoint union with ids "<tag>/L/<id>" and "<tag>/R/<id>".
inline Cospan coproduct(const Circuit& a, const Circuit& b, std::string_view tag = "par") {
  QuotientMap vq, uq, iq, oq;
  for (const auto& [v, t] : a.vars()) vq.add(detail::left_name(v));
  for (const auto& [v, t] : b.vars()) vq.add(detail::right_name(v));
  for (const auto& u : a.units()) uq.add(detail::left_name(u));
  for (const auto& u : b.units()) uq.add(detail::right_name(u));
  for (const auto& [i, f] : a.in_flows()) iq.add(detail::left_name(i));
  for (const auto& [i, f] : b.in_flows()) iq.add(detail::right_name(i));
  for (const auto& [o, f] : a.out_flows()) oq.add(detail::left_name(o));
  for (const auto& [o, f] : b.out_flows()) oq.add(detail::right_name(o));
  return detail::finish(detail::glue(tag, a, b, vq, uq, iq, oq), a, b);
}

/// The map out of a coproduct determined by one map per summand.
inline CircuitMorphism copair(const Cospan& sum, const CircuitMorphism& f,
                              const CircuitMorphism& g) {
  if (!(sum.left_leg.src() == f.src()) || !(sum.right_leg.src() == g.src()) ||
      !(f.dst() == g.dst()))
    throw CompositionError("copair-mismatch", "maps do not fit the coproduct");
  ComponentMaps m;
  auto add = [](std::map<Id, Id>& out, const std::map<Id, Id>& inj, const std::map<Id, Id>& h) {
    for (const auto& [x, y] : inj) out.emplace(y, h.at(x));
  };
  for (const auto* leg : {&sum.left_leg, &sum.right_leg}) {
    const auto& h = leg == &sum.left_leg ? f.maps() : g.maps();
    add(m.vars, leg->maps().vars, h.vars);
    add(m.units, leg->maps().units, h.units);
    add(m.in_flows, leg->maps().in_flows, h.in_flows);
    add(m.out_flows, leg->maps().out_flows, h.out_flows);
  }
  return make_morphism(sum.result, f.dst(), std::move(m));
}

}  // namespace cdbc
