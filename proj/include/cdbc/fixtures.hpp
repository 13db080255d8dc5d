#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cdbc/compose.hpp"
#include "cdbc/dynamics.hpp"

/// Named circuits from the worked examples, each assembled by operator calls.
namespace cdbc::fixtures {

/// A circuit together with names for the variables callers care about.
struct Block {
  Circuit circuit;
  std::map<std::string, Id> port;

  const Id& at(const std::string& name) const {
    auto it = port.find(name);
    if (it == port.end()) throw CompositionError("unknown-port", "no port named " + name);
    return it->second;
  }
};

namespace detail {

/// Ports of an operand, carried along a composite leg.
inline std::map<std::string, Id> carry(const CircuitMorphism& leg,
                                       const std::map<std::string, Id>& ports) {
  std::map<std::string, Id> out;
  for (const auto& [name, v] : ports) out.emplace(name, leg.var(v));
  return out;
}

inline std::map<std::string, Id> primitive_ports(std::size_t ci, std::size_t bi, std::size_t co,
                                                 std::size_t bo) {
  std::map<std::string, Id> p;
  auto add = [&](const char* prefix, std::size_t n) {
    for (std::size_t k = 1; k <= n; ++k) p.emplace(prefix + std::to_string(k), prefix + std::to_string(k));
  };
  add("ci", ci);
  add("bi", bi);
  add("co", co);
  add("bo", bo);
  return p;
}

inline Block primitive_block(std::size_t ci, std::size_t bi, std::size_t co, std::size_t bo) {
  return Block{mk_primitive(ci, bi, co, bo), primitive_ports(ci, bi, co, bo)};
}

/// Sequences two blocks; `left_keep`/`right_keep` name the ports to carry,
/// prefixed "l." and "r." unless the caller renames them.
inline Block seq_blocks(const Block& l, const Block& r,
                        const std::vector<std::pair<std::string, std::string>>& pairs,
                        const std::map<std::string, std::string>& rename) {
  Pairing p;
  for (const auto& [a, b] : pairs) p.emplace_back(l.at(a), r.at(b));
  Composite c = sequence(l.circuit, r.circuit, p);
  Block out{c.circuit, {}};
  for (const auto& [name, v] : l.port) out.port.emplace("l." + name, c.leg("left").var(v));
  for (const auto& [name, v] : r.port) out.port.emplace("r." + name, c.leg("right").var(v));
  for (const auto& [from, to] : rename) out.port.emplace(to, out.at(from));
  return out;
}

inline Block par_blocks(const Block& l, const Block& r) {
  Composite c = parallel(l.circuit, r.circuit);
  Block out{c.circuit, {}};
  for (const auto& [name, v] : l.port) out.port.emplace("l." + name, c.leg("left").var(v));
  for (const auto& [name, v] : r.port) out.port.emplace("r." + name, c.leg("right").var(v));
  return out;
}

/// Keeps only the named ports, under new names.
inline Block expose(Block b, const std::map<std::string, std::string>& keep) {
  std::map<std::string, Id> ports;
  for (const auto& [to, from] : keep) ports.emplace(to, b.at(from));
  b.port = std::move(ports);
  return b;
}

}  // namespace detail

/// NOT: invars v1 (ctrl), v2; outvars v3 (ctrl), v4.
inline Circuit not_gate() {
  return relabel(mk_primitive(1, 1, 1, 1), {{"ci1", "v1"}, {"bi1", "v2"}, {"co1", "v3"}, {"bo1", "v4"}});
}

inline Block not_block() {
  return Block{not_gate(), {{"c", "v1"}, {"b", "v2"}, {"c_out", "v3"}, {"b_out", "v4"}}};
}

inline Circuit nand2() { return mk_primitive(1, 2, 1, 1); }

/// NAND then NOT; invars v1 (ctrl), v2, v3, internal v4 (ctrl), v5, outvars v6 (ctrl), v7.
inline Circuit and_gate() {
  Composite c = sequence(nand2(), mk_primitive(1, 1, 1, 1), {{"co1", "ci1"}, {"bo1", "bi1"}});
  const auto& l = c.leg("left");
  const auto& r = c.leg("right");
  return relabel(c.circuit,
                 {{l.var("ci1"), "v1"}, {l.var("bi1"), "v2"}, {l.var("bi2"), "v3"},
                  {l.var("co1"), "v4"}, {l.var("bo1"), "v5"}, {r.var("co1"), "v6"},
                  {r.var("bo1"), "v7"}},
                 {{l.unit("u"), "u1"}, {r.unit("u"), "u2"}});
}

inline Block and_block() {
  return Block{and_gate(), {{"c", "v1"}, {"a", "v2"}, {"b", "v3"}, {"c_out", "v6"}, {"b_out", "v7"}}};
}

/// Two NOTs side by side feeding a 2-ary NAND: a or b = not(not a and not b).
inline Block or_block() {
  Block pair = detail::par_blocks(not_block(), not_block());
  Block nand = detail::primitive_block(2, 2, 1, 1);
  Block c = detail::seq_blocks(pair, nand,
                               {{"l.c_out", "ci1"}, {"r.c_out", "ci2"}, {"l.b_out", "bi1"}, {"r.b_out", "bi2"}},
                               {});
  return detail::expose(c, {{"c1", "l.l.c"}, {"a", "l.l.b"}, {"c2", "l.r.c"}, {"b", "l.r.b"},
                            {"c_out", "r.co1"}, {"b_out", "r.bo1"}});
}

inline Circuit or_gate() { return or_block().circuit; }

/// Two NOTs in a row: echoes its Boolean input.
inline Block buffer_block() {
  Block c = detail::seq_blocks(not_block(), not_block(), {{"c_out", "c"}, {"b_out", "b"}}, {});
  return detail::expose(c, {{"c", "l.c"}, {"b", "l.b"}, {"c_out", "r.c_out"}, {"b_out", "r.b_out"}});
}

inline Circuit buffer() { return buffer_block().circuit; }

/// One control signal in, n out.
inline Circuit fork(std::size_t n = 2) { return mk_primitive(1, 0, n, 0); }
/// n control signals in, one out.
inline Circuit join(std::size_t n = 2) { return mk_primitive(n, 0, 1, 0); }
/// Swallows k Boolean values, passing control on.
inline Circuit eater(std::size_t k = 1) { return mk_primitive(1, k, 1, 0); }
/// Passes one control signal on.
inline Circuit relay() { return mk_primitive(1, 0, 1, 0); }

// ---- p53 / Mdm2 branching ------------------------------------------------

/// Four alternatives with a shared interface: ctrl, p53, mdm2 -> ctrl_next, p53_next.
struct P53 {
  Circuit circuit;
  std::array<IdSet, 4> alternative_units;
};

namespace detail {

/// fork -> (unit on p53 || eater on mdm2) -> join
inline Block fork_join_alternative(const Block& on_p53) {
  Block f = primitive_block(1, 0, 2, 0);
  Block e = primitive_block(1, 1, 1, 0);
  Block mid = par_blocks(on_p53, e);
  Block a = seq_blocks(f, mid, {{"co1", "l.c"}, {"co2", "r.ci1"}}, {});
  Block j = primitive_block(2, 0, 1, 0);
  Block b = seq_blocks(a, j, {{"r.l.c_out", "ci1"}, {"r.r.co1", "ci2"}}, {});
  return expose(b, {{"ctrl", "l.l.ci1"}, {"p53", "l.r.l.b"}, {"mdm2", "l.r.r.bi1"},
                    {"ctrl_next", "r.co1"}, {"p53_next", "l.r.l.b_out"}});
}

/// relay -> NOT (forking control) -> OR, with the negated input on OR's first
/// operand and the other input straight into OR's second operand.
inline Block not_or_alternative(bool negate_p53) {
  Block r = primitive_block(1, 0, 1, 0);
  Block lead = primitive_block(1, 1, 2, 1);
  Block a = seq_blocks(r, lead, {{"co1", "ci1"}}, {});
  Block b = seq_blocks(a, or_block(), {{"r.co1", "c1"}, {"r.bo1", "a"}, {"r.co2", "c2"}}, {});
  return expose(b, {{"ctrl", "l.l.ci1"},
                    {negate_p53 ? "p53" : "mdm2", "l.r.bi1"},
                    {negate_p53 ? "mdm2" : "p53", "r.b"},
                    {"ctrl_next", "r.c_out"},
                    {"p53_next", "r.b_out"}});
}

}  // namespace detail

inline P53 p53() {
  const std::array<Block, 4> alts{detail::fork_join_alternative(not_block()),
                                  detail::not_or_alternative(true),
                                  detail::not_or_alternative(false),
                                  detail::fork_join_alternative(buffer_block())};
  auto by_role = [](const Block& a, const Block& b, std::initializer_list<const char*> roles) {
    Pairing p;
    for (const char* r : roles) p.emplace_back(a.at(r), b.at(r));
    return p;
  };
  Block acc = alts[0];
  std::array<IdSet, 4> units;
  units[0] = acc.circuit.units();
  for (std::size_t k = 1; k < alts.size(); ++k) {
    Composite c = branch(acc.circuit, alts[k].circuit, by_role(acc, alts[k], {"ctrl", "p53", "mdm2"}),
                         by_role(acc, alts[k], {"ctrl_next", "p53_next"}));
    for (std::size_t j = 0; j < k; ++j) {
      IdSet moved;
      for (const auto& u : units[j]) moved.insert(c.leg("left").unit(u));
      units[j] = std::move(moved);
    }
    for (const auto& u : alts[k].circuit.units()) units[k].insert(c.leg("right").unit(u));
    acc = Block{c.circuit, detail::carry(c.leg("left"), acc.port)};
  }
  std::map<Id, Id> names;
  for (const auto& [name, v] : acc.port) names.emplace(v, name);
  return P53{relabel(acc.circuit, names), units};
}

/// Index of the alternative whose units fired in the trace, if exactly one did.
inline std::optional<std::size_t> fired_alternative(const P53& p, const Trace& tr) {
  std::optional<std::size_t> hit;
  for (std::size_t k = 0; k < p.alternative_units.size(); ++k) {
    bool any = false;
    for (const auto& s : tr.steps)
      for (const auto& u : s.ready) any |= p.alternative_units[k].count(u) != 0;
    if (!any) continue;
    if (hit) return std::nullopt;
    hit = k;
  }
  return hit;
}

// ---- SR flip-flop toggle -------------------------------------------------

/// fork -> three buffers -> join. Echoes R, Qn, S.
inline Block entry_block() {
  Block three = detail::par_blocks(detail::par_blocks(buffer_block(), buffer_block()), buffer_block());
  Block f = detail::primitive_block(1, 0, 3, 0);
  Block a = detail::seq_blocks(f, three, {{"co1", "l.l.c"}, {"co2", "l.r.c"}, {"co3", "r.c"}}, {});
  Block j = detail::primitive_block(3, 0, 1, 0);
  Block b = detail::seq_blocks(a, j, {{"r.l.l.c_out", "ci1"}, {"r.l.r.c_out", "ci2"}, {"r.r.c_out", "ci3"}}, {});
  return detail::expose(b, {{"ctrl", "l.l.ci1"},
                            {"R", "l.r.l.l.b"},
                            {"Qn", "l.r.l.r.b"},
                            {"S", "l.r.r.b"},
                            {"ctrl_out", "r.co1"},
                            {"R_out", "l.r.l.l.b_out"},
                            {"Qn_out", "l.r.l.r.b_out"},
                            {"S_out", "l.r.r.b_out"}});
}

/// Q' = S or (not R and Qn). A NOT on R that forks control feeds AND (with
/// Qn) and lends its second control signal to OR, whose other operand is S.
inline Block action_block() {
  Block lead = detail::primitive_block(1, 1, 2, 1);
  Block a = detail::seq_blocks(lead, and_block(), {{"co1", "c"}, {"bo1", "a"}}, {});
  Block b = detail::seq_blocks(a, or_block(), {{"r.c_out", "c1"}, {"r.b_out", "a"}, {"l.co2", "c2"}}, {});
  return detail::expose(b, {{"ctrl", "l.l.ci1"},
                            {"R", "l.l.bi1"},
                            {"Qn", "l.r.b"},
                            {"S", "r.b"},
                            {"ctrl_out", "r.c_out"},
                            {"Q_out", "r.b_out"}});
}

/// NOT then NOT; the first NOT also emits not Q as S', the second emits Q as
/// both R' and Q'.
inline Block next_block() {
  Block n1 = detail::primitive_block(1, 1, 1, 2);
  Block n2 = detail::primitive_block(1, 1, 1, 2);
  Block b = detail::seq_blocks(n1, n2, {{"co1", "ci1"}, {"bo1", "bi1"}}, {});
  return detail::expose(b, {{"ctrl", "l.ci1"},
                            {"Q", "l.bi1"},
                            {"ctrl_out", "r.co1"},
                            {"R_out", "r.bo1"},
                            {"Q_out", "r.bo2"},
                            {"S_out", "l.bo2"}});
}

/// Iterative toggle. Ports: inputs ctrl, R, Qn, S; output done; loop head
/// loop/ctrl, loop/R, loop/Q, loop/S; body result step/ctrl, step/Q.
struct FlipFlop {
  Circuit circuit;
  std::map<std::string, Id> port;
};

namespace detail {

inline FlipFlop finish_flipflop(const Composite& c, const Block& entry, const Block& body,
                                const Block& exit_guard, const std::string& body_ctrl_out,
                                const std::string& body_q_out) {
  std::map<Id, Id> names;
  const auto& e = c.leg("entry");
  const auto& b = c.leg("body");
  const auto& x = c.leg("exit");
  names[e.var(entry.at("ctrl"))] = "ctrl";
  names[e.var(entry.at("R"))] = "R";
  names[e.var(entry.at("Qn"))] = "Qn";
  names[e.var(entry.at("S"))] = "S";
  names[e.var(entry.at("ctrl_out"))] = "loop/ctrl";
  names[e.var(entry.at("R_out"))] = "loop/R";
  names[e.var(entry.at("Qn_out"))] = "loop/Q";
  names[e.var(entry.at("S_out"))] = "loop/S";
  names[b.var(body.at(body_ctrl_out))] = "step/ctrl";
  names[b.var(body.at(body_q_out))] = "step/Q";
  names[x.var(exit_guard.at("done"))] = "done";
  FlipFlop out{relabel(c.circuit, names), {}};
  for (const auto& [from, to] : names) out.port.emplace(to, to);
  return out;
}

}  // namespace detail

/// Tail-iterative toggle: after each body run, the exit eater and Next
/// compete for the body's outputs.
inline FlipFlop flipflop() {
  Block entry = entry_block(), body = action_block(), end = next_block();
  Block exit_guard = detail::expose(detail::primitive_block(1, 1, 1, 0),
                                    {{"ctrl", "ci1"}, {"Q", "bi1"}, {"done", "co1"}});
  IterationWiring w{entry.circuit, body.circuit, end.circuit, exit_guard.circuit, {}, {}};
  const std::vector<std::array<std::string, 3>> head{
      {"ctrl_out", "ctrl_out", "ctrl"}, {"R_out", "R_out", "R"}, {"Qn_out", "Q_out", "Qn"}, {"S_out", "S_out", "S"}};
  for (const auto& [e, n, b] : head)
    w.before_body.push_back({{"entry", entry.at(e)}, {"end", end.at(n)}, {"body", body.at(b)}});
  w.after_body.push_back({{"body", body.at("ctrl_out")}, {"end", end.at("ctrl")}, {"exit", exit_guard.at("ctrl")}});
  w.after_body.push_back({{"body", body.at("Q_out")}, {"end", end.at("Q")}, {"exit", exit_guard.at("Q")}});
  return detail::finish_flipflop(iterate_tail(w), entry, body, exit_guard, "ctrl_out", "Q_out");
}

/// Head-iterative toggle: the exit decision is taken at the loop head. A relay
/// in front of both the body and the exit eater gives them the same pre-set so
/// that they compete.
inline FlipFlop flipflop_head() {
  Block entry = entry_block(), end = next_block();
  Block body = detail::seq_blocks(detail::primitive_block(1, 0, 1, 0), action_block(), {{"co1", "ctrl"}}, {});
  body = detail::expose(body, {{"ctrl", "l.ci1"}, {"R", "r.R"}, {"Qn", "r.Qn"}, {"S", "r.S"},
                               {"ctrl_out", "r.ctrl_out"}, {"Q_out", "r.Q_out"}});
  Block exit_guard = detail::seq_blocks(detail::primitive_block(1, 0, 1, 0),
                                        detail::primitive_block(1, 3, 1, 0), {{"co1", "ci1"}}, {});
  exit_guard = detail::expose(exit_guard, {{"ctrl", "l.ci1"}, {"R", "r.bi1"}, {"Qn", "r.bi2"},
                                           {"S", "r.bi3"}, {"done", "r.co1"}});
  IterationWiring w{entry.circuit, body.circuit, end.circuit, exit_guard.circuit, {}, {}};
  const std::vector<std::array<std::string, 3>> head{
      {"ctrl_out", "ctrl_out", "ctrl"}, {"R_out", "R_out", "R"}, {"Qn_out", "Q_out", "Qn"}, {"S_out", "S_out", "S"}};
  for (const auto& [e, n, b] : head)
    w.before_body.push_back(
        {{"entry", entry.at(e)}, {"end", end.at(n)}, {"body", body.at(b)}, {"exit", exit_guard.at(b)}});
  w.after_body.push_back({{"body", body.at("ctrl_out")}, {"end", end.at("ctrl")}});
  w.after_body.push_back({{"body", body.at("Q_out")}, {"end", end.at("Q")}});
  return detail::finish_flipflop(iterate_head(w), entry, body, exit_guard, "ctrl_out", "Q_out");
}

/// Smallest executable head loop: buffers for entry, body and end, and an
/// eater as exit guard competing with the body.
inline Composite buffer_loop() {
  Block entry = buffer_block(), body = buffer_block(), end = buffer_block();
  Block exit_guard = detail::expose(detail::primitive_block(1, 1, 1, 0),
                                    {{"c", "ci1"}, {"b", "bi1"}, {"done", "co1"}});
  IterationWiring w{entry.circuit, body.circuit, end.circuit, exit_guard.circuit, {}, {}};
  for (const char* p : {"c", "b"}) {
    const std::string out = std::string(p) + "_out";
    w.before_body.push_back(
        {{"entry", entry.at(out)}, {"end", end.at(out)}, {"body", body.at(p)}, {"exit", exit_guard.at(p)}});
    w.after_body.push_back({{"body", body.at(out)}, {"end", end.at(p)}});
  }
  return iterate_head(w);
}

// ---- characteristic table --------------------------------------------------

struct FlipFlopRow {
  bool s = false, r = false, q = false;
  bool q_next = false, s_next = false, r_next = false;
  bool echoed_q = false;  // Q' as seen again at the loop head
  std::uint64_t seed = 0;
};

/// Runs each (S, R, Qn) row until some seed takes the loop once more, then
/// reads Q' behind the body and S', R', Q' back at the loop head. Rows with no
/// such seed are absent from the result.
inline std::vector<FlipFlopRow> run_flipflop_table(const FlipFlop& ff,
                                                   const std::vector<std::uint64_t>& seeds,
                                                   std::size_t max_steps = 1000) {
  Executor ex(ff.circuit);
  const IdSet head{"loop/ctrl", "loop/R", "loop/Q", "loop/S"};
  const IdSet after{"step/ctrl", "step/Q"};
  auto domain = [](const State& st) {
    IdSet d;
    for (const auto& [v, x] : st.values) d.insert(v);
    return d;
  };
  std::vector<FlipFlopRow> rows;
  for (int row = 0; row < 8; ++row) {
    const bool s = row & 4, r = row & 2, q = row & 1;
    const std::map<Id, Value> inputs{
        {"ctrl", Value::Signal}, {"R", from_bit(r)}, {"Qn", from_bit(q)}, {"S", from_bit(s)}};
    for (auto seed : seeds) {
      Trace tr = ex.run(ex.initial_state(inputs), {seed, max_steps});
      std::optional<bool> q_next;
      std::optional<State> second_head;
      std::size_t heads = 0;
      for (const auto& st : tr.steps) {
        const IdSet d = domain(st.state);
        if (d == head && ++heads == 2) {
          second_head = st.state;
          break;
        }
        if (d == after && !q_next) q_next = st.state.values.at("step/Q") == Value::B1;
      }
      if (!second_head || !q_next) continue;
      const auto& v = second_head->values;
      rows.push_back({s, r, q, *q_next, v.at("loop/S") == Value::B1, v.at("loop/R") == Value::B1,
                      v.at("loop/Q") == Value::B1, seed});
      break;
    }
  }
  return rows;
}

// ---- catalogue ---------------------------------------------------------------

inline std::vector<std::string> names() {
  return {"not", "nand2", "and", "or", "buffer", "fork", "join", "eater", "relay",
          "p53", "entry", "action", "next", "flipflop", "flipflop-head", "buffer-loop"};
}

inline Circuit by_name(const std::string& name) {
  if (name == "not") return not_gate();
  if (name == "nand2") return nand2();
  if (name == "and") return and_gate();
  if (name == "or") return or_gate();
  if (name == "buffer") return buffer();
  if (name == "fork") return fork();
  if (name == "join") return join();
  if (name == "eater") return eater();
  if (name == "relay") return relay();
  if (name == "p53") return p53().circuit;
  if (name == "entry") return entry_block().circuit;
  if (name == "action") return action_block().circuit;
  if (name == "next") return next_block().circuit;
  if (name == "flipflop") return flipflop().circuit;
  if (name == "flipflop-head") return flipflop_head().circuit;
  if (name == "buffer-loop") return buffer_loop().circuit;
  throw CompositionError("unknown-fixture", "no fixture named " + name);
}

}  // namespace cdbc::fixtures
