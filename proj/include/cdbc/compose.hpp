#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cdbc/colimits.hpp"

namespace cdbc {

/// (left variable, right variable) identifications.
using Pairing = std::vector<std::pair<Id, Id>>;

/// Result of an operator plus, for every operand role, the morphism carrying
/// each operand element to its final representative.
struct Composite {
  Circuit circuit;
  std::map<std::string, CircuitMorphism> legs;
  bool total = false;  // sequencing only: the pairing covered both interfaces

  const CircuitMorphism& leg(const std::string& role) const {
    auto it = legs.find(role);
    if (it == legs.end()) throw CompositionError("unknown-role", "no operand named " + role);
    return it->second;
  }
};

namespace detail {

inline std::vector<std::pair<Id, Id>> numbered_onto(const std::string& prefix,
                                                    const std::vector<Id>& targets) {
  std::vector<std::pair<Id, Id>> out;
  for (std::size_t k = 0; k < targets.size(); ++k)
    out.emplace_back(prefix + std::to_string(k + 1), targets[k]);
  return out;
}

inline void require_bijection(const Pairing& p, const Circuit& a, const IdSet& a_side,
                              const Circuit& b, const IdSet& b_side, const std::string& code) {
  IdSet seen_a, seen_b;
  for (const auto& [x, y] : p) {
    if (!a_side.count(x) || !b_side.count(y))
      throw InterfaceMismatchError(code, "pair (" + x + ", " + y + ") is not on the interface");
    if (a.tag(x) != b.tag(y))
      throw InterfaceMismatchError(code, "pair (" + x + ", " + y + ") mixes tags");
    if (!seen_a.insert(x).second || !seen_b.insert(y).second)
      throw InterfaceMismatchError(code, "pairing repeats a variable");
  }
  if (seen_a != a_side || seen_b != b_side)
    throw InterfaceMismatchError(code, "pairing does not cover both interfaces");
}

}  // namespace detail

/// Checks that `pairing` is a legal sequencing span for (left, right).
inline void check_sequencing(const Circuit& left, const Circuit& right, const Pairing& pairing) {
  IdSet seen_l, seen_r;
  bool has_ctrl = false;
  for (const auto& [l, r] : pairing) {
    if (!left.outvars().count(l))
      throw CompositionError("pairing-not-outvar", l + " is not an outvar of the left operand");
    if (!right.invars().count(r))
      throw CompositionError("pairing-not-invar", r + " is not an invar of the right operand");
    if (left.tag(l) != right.tag(r))
      throw CompositionError("pairing-tag-mismatch", l + " and " + r + " have different tags");
    if (!seen_l.insert(l).second || !seen_r.insert(r).second)
      throw CompositionError("pairing-not-injective", "pairing repeats " + l + " or " + r);
    has_ctrl |= left.tag(l) == TypeTag::Ctrl;
  }
  if (!has_ctrl)
    throw CompositionError("pairing-needs-control", "a sequencing apex needs a control variable");
}

/// Glues outvars of `left` to invars of `right`. The composite is total when
/// the pairing covers every outvar of left and every invar of right.
inline Composite sequence(const Circuit& left, const Circuit& right, const Pairing& pairing) {
  check_sequencing(left, right, pairing);
  std::vector<std::pair<Id, Id>> to_left, to_right;
  for (std::size_t k = 0; k < pairing.size(); ++k) {
    const Id s = "s" + std::to_string(k + 1);
    to_left.emplace_back(s, pairing[k].first);
    to_right.emplace_back(s, pairing[k].second);
  }
  Cospan po = pushout(Span{embed_trivial(left, to_left), embed_trivial(right, to_right)}, "seq");
  const bool total =
      pairing.size() == left.outvars().size() && pairing.size() == right.invars().size();
  return Composite{po.result, {{"left", po.left_leg}, {"right", po.right_leg}}, total};
}

/// Pairs left outvars with right invars tag by tag in id order, stopping when
/// either side runs out. A convenience; not canonical.
inline Pairing auto_pairing(const Circuit& left, const Circuit& right) {
  Pairing out;
  for (TypeTag t : {TypeTag::Ctrl, TypeTag::Bool}) {
    std::vector<Id> ls, rs;
    for (const auto& v : left.outvars())
      if (left.tag(v) == t) ls.push_back(v);
    for (const auto& v : right.invars())
      if (right.tag(v) == t) rs.push_back(v);
    for (std::size_t k = 0; k < std::min(ls.size(), rs.size()); ++k) out.emplace_back(ls[k], rs[k]);
  }
  return out;
}

inline Composite parallel(const Circuit& a, const Circuit& b) {
  Cospan sum = coproduct(a, b, "par");
  return Composite{sum.result, {{"left", sum.left_leg}, {"right", sum.right_leg}}, false};
}

/// Alternative composition: invars of a and b are shared through in_pairing,
/// outvars through out_pairing; both must be tag-preserving bijections.
inline Composite branch(const Circuit& a, const Circuit& b, const Pairing& in_pairing,
                        const Pairing& out_pairing) {
  detail::require_bijection(in_pairing, a, a.invars(), b, b.invars(), "branch-interface-mismatch");
  detail::require_bijection(out_pairing, a, a.outvars(), b, b.outvars(),
                            "branch-interface-mismatch");
  std::vector<Id> a_in, b_in, a_out, b_out;
  for (const auto& [x, y] : in_pairing) a_in.push_back(x), b_in.push_back(y);
  for (const auto& [x, y] : out_pairing) a_out.push_back(x), b_out.push_back(y);

  auto ins_a = embed_trivial(a, detail::numbered_onto("in", a_in));
  auto outs_a = embed_trivial(a, detail::numbered_onto("out", a_out));
  auto ins_b = embed_trivial(b, detail::numbered_onto("in", b_in));
  auto outs_b = embed_trivial(b, detail::numbered_onto("out", b_out));
  Cospan sum = coproduct(ins_a.src(), outs_a.src(), "sum");
  Cospan po = pushout(Span{copair(sum, ins_a, outs_a), copair(sum, ins_b, outs_b)}, "branch");
  return Composite{po.result, {{"left", po.left_leg}, {"right", po.right_leg}}, false};
}

/// One variable of a shared iteration domain: operand role -> variable id.
using Slot = std::map<std::string, Id>;

/// Operands of an iteration and the two trivial domains they share. Roles are
/// "entry", "body", "end" and "exit". `before_body` is glued onto the loop
/// head, `after_body` onto the body's outvars.
struct IterationWiring {
  Circuit entry;
  Circuit body;
  Circuit end;
  Circuit exit;
  std::vector<Slot> before_body;
  std::vector<Slot> after_body;

  const Circuit& operand(const std::string& role) const {
    if (role == "entry") return entry;
    if (role == "body") return body;
    if (role == "end") return end;
    if (role == "exit") return exit;
    throw CompositionError("unknown-role", "no operand named " + role);
  }
};

enum class Side : std::uint8_t { In, Out };

namespace detail {

using RoleSides = std::vector<std::pair<std::string, Side>>;

/// Head: before_body = {entry out, end out, body in, exit in};
///       after_body  = {body out, end in}.
inline const RoleSides& head_before() {
  static const RoleSides r{{"entry", Side::Out}, {"end", Side::Out}, {"body", Side::In},
                           {"exit", Side::In}};
  return r;
}
inline const RoleSides& head_after() {
  static const RoleSides r{{"body", Side::Out}, {"end", Side::In}};
  return r;
}
/// Tail: the exit guard reads what the body produced, next to end.
inline const RoleSides& tail_before() {
  static const RoleSides r{{"entry", Side::Out}, {"end", Side::Out}, {"body", Side::In}};
  return r;
}
inline const RoleSides& tail_after() {
  static const RoleSides r{{"body", Side::Out}, {"end", Side::In}, {"exit", Side::In}};
  return r;
}

struct SharedDomain {
  std::map<std::string, CircuitMorphism> into;  // role -> embedding of the domain
  const Circuit& circuit() const { return into.begin()->second.src(); }
};

inline SharedDomain share(const IterationWiring& w, const std::vector<Slot>& slots,
                          const RoleSides& roles, const std::string& prefix) {
  const std::string code = "iteration-interface-mismatch";
  if (slots.empty()) throw InterfaceMismatchError(code, prefix + " domain is empty");
  for (const auto& slot : slots) {
    if (slot.size() != roles.size())
      throw InterfaceMismatchError(code, prefix + " slot has the wrong roles");
    std::optional<TypeTag> tag;
    for (const auto& [role, side] : roles) {
      auto it = slot.find(role);
      if (it == slot.end())
        throw InterfaceMismatchError(code, prefix + " slot lacks role " + role);
      const Circuit& c = w.operand(role);
      if (!c.has_var(it->second))
        throw InterfaceMismatchError(code, role + " has no variable " + it->second);
      if (tag && *tag != c.tag(it->second))
        throw InterfaceMismatchError(code, prefix + " slot mixes tags at " + role);
      tag = c.tag(it->second);
    }
  }
  SharedDomain d;
  for (const auto& [role, side] : roles) {
    const Circuit& c = w.operand(role);
    const IdSet& want = side == Side::In ? c.invars() : c.outvars();
    std::vector<Id> targets;
    for (const auto& slot : slots) targets.push_back(slot.at(role));
    IdSet got(targets.begin(), targets.end());
    if (got.size() != targets.size() || got != want)
      throw InterfaceMismatchError(code, prefix + " domain is not in bijection with the " +
                                             (side == Side::In ? "invars" : "outvars") +
                                             " of " + role);
    d.into.emplace(role, embed_trivial(c, numbered_onto(prefix, targets)));
  }
  return d;
}

inline void require_sound(const IterationWiring& w) {
  for (const char* role : {"entry", "body", "end", "exit"})
    if (!is_sound(w.operand(role)))
      throw CompositionError("operand-not-sound", std::string(role) + " is not sound");
}

}  // namespace detail

/// Loop that checks its exit guard before each body run:
/// (exit +_{before} body) +_{before+after} (entry +_{before} end).
inline Composite iterate_head(const IterationWiring& w) {
  detail::require_sound(w);
  auto before = detail::share(w, w.before_body, detail::head_before(), "b");
  auto after = detail::share(w, w.after_body, detail::head_after(), "a");

  Cospan guard = pushout(Span{before.into.at("exit"), before.into.at("body")}, "head");
  Cospan front = pushout(Span{before.into.at("entry"), before.into.at("end")}, "head");
  Cospan sum = coproduct(before.circuit(), after.circuit(), "sum");
  auto into_guard = copair(sum, compose_morphisms(guard.right_leg, before.into.at("body")),
                           compose_morphisms(guard.right_leg, after.into.at("body")));
  auto into_front = copair(sum, compose_morphisms(front.left_leg, before.into.at("entry")),
                           compose_morphisms(front.right_leg, after.into.at("end")));
  Cospan all = pushout(Span{into_guard, into_front}, "head");

  return Composite{all.result,
                   {{"exit", compose_morphisms(all.left_leg, guard.left_leg)},
                    {"body", compose_morphisms(all.left_leg, guard.right_leg)},
                    {"entry", compose_morphisms(all.right_leg, front.left_leg)},
                    {"end", compose_morphisms(all.right_leg, front.right_leg)}},
                   false};
}

/// Loop that runs the body first and decides afterwards:
/// ((entry +_{before} end) +_{end} (end +_{after} exit)) +_{before+after} body.
inline Composite iterate_tail(const IterationWiring& w) {
  detail::require_sound(w);
  auto before = detail::share(w, w.before_body, detail::tail_before(), "b");
  auto after = detail::share(w, w.after_body, detail::tail_after(), "a");

  Cospan front = pushout(Span{before.into.at("entry"), before.into.at("end")}, "tail");
  Cospan back = pushout(Span{after.into.at("end"), after.into.at("exit")}, "tail");
  Cospan frame = pushout(Span{front.right_leg, back.left_leg}, "tail");
  Cospan sum = coproduct(before.circuit(), after.circuit(), "sum");
  auto to_front = compose_morphisms(frame.left_leg, front.left_leg);
  auto to_back = compose_morphisms(frame.right_leg, back.left_leg);
  auto into_frame = copair(sum, compose_morphisms(to_front, before.into.at("entry")),
                           compose_morphisms(to_back, after.into.at("end")));
  auto into_body = copair(sum, before.into.at("body"), after.into.at("body"));
  Cospan all = pushout(Span{into_frame, into_body}, "tail");

  return Composite{
      all.result,
      {{"entry", compose_morphisms(all.left_leg, to_front)},
       {"end", compose_morphisms(all.left_leg, compose_morphisms(frame.left_leg, front.right_leg))},
       {"exit", compose_morphisms(all.left_leg, compose_morphisms(frame.right_leg, back.right_leg))},
       {"body", all.right_leg}},
      false};
}

}  // namespace cdbc
