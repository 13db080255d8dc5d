#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cdbc/compose.hpp"
#include "cdbc/dynamics.hpp"

namespace cdbc {

enum class NodeKind : std::uint8_t { Input, Output, Gate };

inline std::string_view to_string(NodeKind k) {
  switch (k) {
    case NodeKind::Input: return "input";
    case NodeKind::Output: return "output";
    case NodeKind::Gate: return "gate";
  }
  return "?";
}

inline std::optional<NodeKind> parse_node_kind(std::string_view s) {
  if (s == "input") return NodeKind::Input;
  if (s == "output") return NodeKind::Output;
  if (s == "gate") return NodeKind::Gate;
  return std::nullopt;
}

/// Edges are a list, so the same pair may occur twice (NAND(x, x)).
struct RawDag {
  std::map<Id, NodeKind> nodes;
  std::vector<std::pair<Id, Id>> edges;
};

class NandDag;
Validated<NandDag> validate_dag(const RawDag& raw);

/// A validated fan-in-2 fan-out-1 NAND circuit. Edge k is named "e<k>".
class NandDag {
public:
  const std::map<Id, NodeKind>& nodes() const noexcept { return raw_.nodes; }
  const std::vector<std::pair<Id, Id>>& edges() const noexcept { return raw_.edges; }
  const RawDag& raw() const noexcept { return raw_; }
  NodeKind kind(const Id& n) const { return raw_.nodes.at(n); }

  const std::vector<std::size_t>& in_edges(const Id& n) const { return in_.at(n); }
  const std::vector<std::size_t>& out_edges(const Id& n) const { return out_.at(n); }
  /// Nodes in a topological order (ties by id).
  const std::vector<Id>& topo_order() const noexcept { return topo_; }

  std::vector<Id> nodes_of(NodeKind k) const {
    std::vector<Id> out;
    for (const auto& [n, kind] : raw_.nodes)
      if (kind == k) out.push_back(n);
    return out;
  }
  std::vector<Id> inputs() const { return nodes_of(NodeKind::Input); }
  std::vector<Id> outputs() const { return nodes_of(NodeKind::Output); }
  std::vector<Id> gates() const { return nodes_of(NodeKind::Gate); }

  static Id edge_name(std::size_t k) { return "e" + std::to_string(k); }

  /// Gates on the longest input-to-output path.
  std::size_t depth() const {
    std::map<Id, std::size_t> d;
    std::size_t best = 0;
    for (const auto& n : topo_) {
      std::size_t here = 0;
      for (auto e : in_.at(n)) here = std::max(here, d.at(raw_.edges[e].first));
      if (kind(n) == NodeKind::Gate) ++here;
      d[n] = here;
      best = std::max(best, here);
    }
    return best;
  }

private:
  NandDag() = default;
  friend Validated<NandDag> validate_dag(const RawDag& raw);

  RawDag raw_;
  std::map<Id, std::vector<std::size_t>> in_, out_;
  std::vector<Id> topo_;
};

inline Validated<NandDag> validate_dag(const RawDag& raw) {
  ValidationReport report;
  if (raw.edges.empty()) report.add("empty-edges", "");
  for (const auto& [a, b] : raw.edges)
    if (!raw.nodes.count(a) || !raw.nodes.count(b))
      report.add("dangling-edge", a + " -> " + b, true);
  if (!report.ok()) return report;

  NandDag d;
  d.raw_ = raw;
  for (const auto& [n, k] : raw.nodes) d.in_[n], d.out_[n];
  for (std::size_t k = 0; k < raw.edges.size(); ++k) {
    d.out_[raw.edges[k].first].push_back(k);
    d.in_[raw.edges[k].second].push_back(k);
  }
  for (const auto& [a, b] : raw.edges) {
    const NodeKind ka = raw.nodes.at(a), kb = raw.nodes.at(b);
    if (ka == NodeKind::Output || kb == NodeKind::Input || (ka == NodeKind::Input && kb == NodeKind::Output))
      report.add("edge-kind", a + " -> " + b);
  }
  for (const auto& [n, k] : raw.nodes) {
    const auto fan_in = d.in_[n].size(), fan_out = d.out_[n].size();
    if (fan_in + fan_out == 0) report.add("isolated-node", n);
    if (k == NodeKind::Gate && fan_in != 2) report.add("gate-fan-in", n + " has " + std::to_string(fan_in));
    if (k == NodeKind::Gate && fan_out != 1)
      report.add("gate-fan-out", n + " has " + std::to_string(fan_out));
  }
  // Kahn's algorithm; leftovers lie on a cycle.
  std::map<Id, std::size_t> pending;
  std::set<Id> frontier;
  for (const auto& [n, k] : raw.nodes) {
    pending[n] = d.in_[n].size();
    if (pending[n] == 0) frontier.insert(n);
  }
  while (!frontier.empty()) {
    Id n = *frontier.begin();
    frontier.erase(frontier.begin());
    d.topo_.push_back(n);
    for (auto e : d.out_[n])
      if (--pending[raw.edges[e].second] == 0) frontier.insert(raw.edges[e].second);
  }
  if (d.topo_.size() != raw.nodes.size()) report.add("cycle", "");
  if (!report.ok()) return report;
  return d;
}

inline NandDag make_dag(const RawDag& raw) { return validate_dag(raw).value(); }

/// Direct evaluation: every gate outputs not(a and b). An output node fed by
/// several edges must see one value on all of them.
inline std::map<Id, bool> eval_dag(const NandDag& d, const std::map<Id, bool>& bits) {
  std::map<Id, bool> value;
  for (const auto& n : d.topo_order()) {
    switch (d.kind(n)) {
      case NodeKind::Input: {
        auto it = bits.find(n);
        if (it == bits.end()) throw ExecutionError("missing-input", "no bit for input " + n);
        value[n] = it->second;
        break;
      }
      case NodeKind::Gate: {
        const auto& in = d.in_edges(n);
        value[n] = !(value.at(d.edges()[in[0]].first) && value.at(d.edges()[in[1]].first));
        break;
      }
      case NodeKind::Output: {
        const auto& in = d.in_edges(n);
        const bool first = value.at(d.edges()[in.front()].first);
        for (auto e : in)
          if (value.at(d.edges()[e].first) != first)
            throw ExecutionError("replica-disagreement", "output " + n + " sees two values");
        value[n] = first;
        break;
      }
    }
  }
  std::map<Id, bool> out;
  for (const auto& n : d.outputs()) out[n] = value.at(n);
  return out;
}

/// A transformed DAG and where each of its elements came from.
struct ControlCircuit {
  Circuit circuit;
  std::map<Id, Id> origin;  // circuit element -> DAG edge or gate

  static Id ctrl_var(std::size_t edge) { return NandDag::edge_name(edge) + "#1"; }
  static Id bool_var(std::size_t edge) { return NandDag::edge_name(edge) + "#2"; }
};

/// Every edge becomes a control copy "e<k>#1" and a Boolean copy "e<k>#2".
/// Edges into a gate feed it through "in:" flows; edges out of a gate are fed
/// through "out:" flows. Gates become units with their own ids.
inline ControlCircuit to_control(const NandDag& d) {
  RawCircuit raw;
  ControlCircuit out{unit_circuit(), {}};
  for (std::size_t k = 0; k < d.edges().size(); ++k) {
    const auto& [src, dst] = d.edges()[k];
    const Id e = NandDag::edge_name(k);
    const Id vc = ControlCircuit::ctrl_var(k), vb = ControlCircuit::bool_var(k);
    raw.vars.emplace(vc, TypeTag::Ctrl);
    raw.vars.emplace(vb, TypeTag::Bool);
    out.origin[vc] = out.origin[vb] = e;
    if (d.kind(dst) == NodeKind::Gate) {
      for (const auto& v : {vc, vb}) {
        raw.in_flows.emplace("in:" + v, InFlow{v, dst});
        out.origin["in:" + v] = e;
      }
    }
    if (d.kind(src) == NodeKind::Gate) {
      for (const auto& v : {vc, vb}) {
        raw.out_flows.emplace("out:" + v, OutFlow{src, v});
        out.origin["out:" + v] = e;
      }
    }
  }
  for (const auto& g : d.gates()) {
    raw.units.insert(g);
    out.origin[g] = g;
  }
  auto validated = validate_circuit(raw);
  if (!validated)
    throw Error("transform-invalid", "transformed DAG is not a circuit: " + validated.report().summary());
  out.circuit = validated.value();
  if (!is_sound(out.circuit)) throw Error("transform-unsound", "transformed DAG is not sound");
  return out;
}

/// Signal on every control invar and the source input's bit on every Boolean
/// invar, one copy per outgoing edge.
inline State lift_inputs(const NandDag& d, const std::map<Id, bool>& bits) {
  for (const auto& [n, b] : bits)
    if (!d.nodes().count(n) || d.kind(n) != NodeKind::Input)
      throw ExecutionError("unexpected-input", n + " is not an input node");
  State st;
  for (const auto& n : d.inputs()) {
    auto it = bits.find(n);
    if (it == bits.end()) throw ExecutionError("missing-input", "no bit for input " + n);
    for (auto e : d.out_edges(n)) {
      st.values[ControlCircuit::ctrl_var(e)] = Value::Signal;
      st.values[ControlCircuit::bool_var(e)] = from_bit(it->second);
    }
  }
  return st;
}

/// Output bits from the Boolean copies of the edges entering each output node.
inline std::map<Id, bool> read_outputs(const NandDag& d, const Trace& tr) {
  if (tr.outcome != Outcome::Final)
    throw ExecutionError("non-final-trace", "run ended with " + std::string(to_string(tr.outcome)));
  const State& last = tr.last();
  std::map<Id, bool> out;
  for (const auto& n : d.outputs()) {
    std::optional<bool> seen;
    for (auto e : d.in_edges(n)) {
      auto it = last.values.find(ControlCircuit::bool_var(e));
      if (it == last.values.end() || it->second == Value::Signal)
        throw ExecutionError("missing-output", "no Boolean value for output " + n);
      const bool bit = it->second == Value::B1;
      if (seen && *seen != bit)
        throw ExecutionError("replica-disagreement", "output " + n + " sees two values");
      seen = bit;
    }
    out[n] = *seen;
  }
  return out;
}

/// lift, run, read.
inline std::map<Id, bool> run_dag(const NandDag& d, const Executor& ex,
                                  const std::map<Id, bool>& bits, const ExecConfig& cfg = {}) {
  return read_outputs(d, ex.run(lift_inputs(d, bits), cfg));
}

/// Bit i of `index` becomes the value of inputs[i].
inline std::map<Id, bool> assignment(const std::vector<Id>& inputs, std::uint64_t index) {
  std::map<Id, bool> out;
  for (std::size_t i = 0; i < inputs.size(); ++i) out[inputs[i]] = (index >> i) & 1u;
  return out;
}

namespace detail {

/// Emits NAND trees. Gates fan out once, so every use of a subformula is a
/// fresh copy; input nodes may be read any number of times.
class NandBuilder {
public:
  explicit NandBuilder(std::size_t arity) {
    for (std::size_t i = 0; i < arity; ++i) {
      inputs_.push_back("x" + std::to_string(i));
      raw_.nodes.emplace(inputs_.back(), NodeKind::Input);
    }
  }

  const Id& input(std::size_t i) const { return inputs_.at(i); }

  Id nand(const Id& a, const Id& b) {
    Id g = "g" + std::to_string(++gates_);
    raw_.nodes.emplace(g, NodeKind::Gate);
    raw_.edges.emplace_back(a, g);
    raw_.edges.emplace_back(b, g);
    return g;
  }
  bool is_input(const Id& n) const { return raw_.nodes.at(n) == NodeKind::Input; }

  /// Constant 1 tapped from input i: NAND(x, NAND(x, x)).
  Id one(std::size_t i = 0) { return nand(input(i), nand(input(i), input(i))); }
  Id negate(const Id& a) { return is_input(a) ? nand(a, a) : nand(a, one()); }
  Id conj(const Id& a, const Id& b) { return negate(nand(a, b)); }
  Id disj(const Id& a, const Id& b) { return nand(negate(a), negate(b)); }

  RawDag finish(Id result, const std::set<std::size_t>& used) {
    if (is_input(result)) result = negate(negate(result));
    for (std::size_t i = 0; i < inputs_.size(); ++i)
      if (!used.count(i)) result = conj(result, one(i));
    raw_.nodes.emplace("y", NodeKind::Output);
    raw_.edges.emplace_back(result, "y");
    return raw_;
  }

private:
  RawDag raw_;
  std::vector<Id> inputs_;
  std::size_t gates_ = 0;
};

}  // namespace detail

/// Truth table of a k-ary function: entry `index` is f(x) where bit i of
/// `index` is x_i.
using TruthTable = std::vector<bool>;

/// NAND-only DNF for a table over inputs x0..x{k-1} with output y; k >= 1.
inline NandDag synthesize_dag(std::size_t arity, const TruthTable& table) {
  if (arity == 0 || table.size() != (std::size_t{1} << arity))
    throw Error("malformed-table", "table for arity " + std::to_string(arity) + " has " +
                                       std::to_string(table.size()) + " entries");
  detail::NandBuilder b(arity);
  std::optional<Id> sum;
  std::set<std::size_t> used;
  for (std::size_t m = 0; m < table.size(); ++m) {
    if (!table[m]) continue;
    std::optional<Id> term;
    for (std::size_t i = 0; i < arity; ++i) {
      Id lit = (m >> i) & 1u ? b.input(i) : b.negate(b.input(i));
      term = term ? b.conj(*term, lit) : lit;
      used.insert(i);
    }
    sum = sum ? b.disj(*sum, *term) : *term;
  }
  if (!sum) {
    sum = b.nand(b.one(), b.one());  // constant 0
    used.insert(0);
  }
  return make_dag(b.finish(*sum, used));
}

struct FamilyMember {
  std::size_t arity = 0;
  TruthTable table;
  std::optional<NandDag> dag;  // absent for arity 0
  ControlCircuit control;
};

/// One circuit per input length.
struct CircuitFamily {
  std::map<std::size_t, FamilyMember> members;
};

/// Constant circuits for arity 0: a unit with no Boolean inputs emits 1, and a
/// NOT behind it turns that into 0.
inline Circuit constant_circuit(bool bit) {
  Circuit one = mk_primitive(1, 0, 1, 1);
  if (bit) return one;
  Circuit flip = mk_primitive(1, 1, 1, 1);
  return sequence(one, flip, {{"co1", "ci1"}, {"bo1", "bi1"}}).circuit;
}

inline FamilyMember synthesize_member(std::size_t arity, const TruthTable& table) {
  if (table.size() != (std::size_t{1} << arity))
    throw Error("malformed-table", "table for arity " + std::to_string(arity) + " has " +
                                       std::to_string(table.size()) + " entries");
  if (arity == 0) {
    Circuit c = constant_circuit(table[0]);
    return FamilyMember{0, table, std::nullopt, ControlCircuit{c, {}}};
  }
  NandDag d = synthesize_dag(arity, table);
  ControlCircuit cc = to_control(d);
  return FamilyMember{arity, table, d, std::move(cc)};
}

inline CircuitFamily synth_family(const std::map<std::size_t, TruthTable>& tables) {
  CircuitFamily fam;
  for (const auto& [k, t] : tables) fam.members.emplace(k, synthesize_member(k, t));
  return fam;
}

/// Runs member k on the input index (bit i = x_i) and returns the output bit.
inline bool eval_member(const FamilyMember& m, std::uint64_t index, const ExecConfig& cfg = {}) {
  Executor ex(m.control.circuit);
  if (!m.dag) {
    std::map<Id, Value> in;
    for (const auto& v : m.control.circuit.invars()) in[v] = Value::Signal;
    Trace tr = ex.run(ex.initial_state(in), cfg);
    if (tr.outcome != Outcome::Final)
      throw ExecutionError("non-final-trace", "constant circuit did not finish");
    for (const auto& [v, x] : tr.last().values)
      if (x != Value::Signal) return x == Value::B1;
    throw ExecutionError("missing-output", "constant circuit has no Boolean outvar");
  }
  std::vector<Id> names;
  for (std::size_t i = 0; i < m.arity; ++i) names.push_back("x" + std::to_string(i));
  auto out = run_dag(*m.dag, ex, assignment(names, index), cfg);
  return out.at("y");
}

}  // namespace cdbc
