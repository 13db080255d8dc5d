#pragma once

#include <sstream>
#include <string>

#include "cdbc/circuit.hpp"

namespace cdbc {

/// Letter describing what a unit does, read off its flows:
/// ¬ / ↑ NAND on one or more Boolean inputs, 1 for the constant,
/// E eats Booleans, F forks control, J joins control.
inline std::string unit_annotation(const Circuit& c, const Id& u) {
  const auto& pre = c.pre_set(u);
  const auto& post = c.post_set(u);
  const auto bool_in = count_tag(c, pre, TypeTag::Bool);
  const auto bool_out = count_tag(c, post, TypeTag::Bool);
  if (bool_out > 0) return bool_in == 0 ? "1" : bool_in == 1 ? "¬" : "↑";
  if (bool_in > 0) return "E";
  const auto ctrl_in = count_tag(c, pre, TypeTag::Ctrl);
  const auto ctrl_out = count_tag(c, post, TypeTag::Ctrl);
  if (ctrl_in > 1 && ctrl_out == 1) return "J";
  if (ctrl_in == 1 && ctrl_out > 1) return "F";
  return "·";
}

namespace detail {
inline std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + "\"";
}
}  // namespace detail

/// Graphviz rendering. Output depends only on the circuit.
inline std::string export_dot(const Circuit& c) {
  using detail::dot_quote;
  std::ostringstream os;
  os << "// legend: dashed edge = control flow, solid edge = Boolean flow\n"
     << "// legend: hollow node = invar, filled node = outvar, grey = inoutvar\n"
     << "// legend: circle = control variable, doublecircle = Boolean variable, box = unit\n"
     << "digraph circuit {\n"
     << "  rankdir=LR;\n";
  for (const auto& [v, t] : c.vars()) {
    const bool in = c.invars().count(v) != 0, out = c.outvars().count(v) != 0;
    std::string style;
    if (in && out) style = ", style=filled, fillcolor=grey";
    else if (out) style = ", style=filled, fillcolor=black, fontcolor=white";
    else if (in) style = ", style=solid";
    else style = ", style=filled, fillcolor=lightgrey";
    os << "  " << dot_quote("v:" + v) << " [label=" << dot_quote(v)
       << ", shape=" << (t == TypeTag::Ctrl ? "circle" : "doublecircle") << style << "];\n";
  }
  for (const auto& u : c.units())
    os << "  " << dot_quote("u:" + u) << " [label=" << dot_quote(unit_annotation(c, u) + " " + u)
       << ", shape=box];\n";
  auto edge_style = [&](const Id& v) { return c.tag(v) == TypeTag::Ctrl ? "dashed" : "solid"; };
  for (const auto& [id, f] : c.in_flows())
    os << "  " << dot_quote("v:" + f.var) << " -> " << dot_quote("u:" + f.unit)
       << " [style=" << edge_style(f.var) << ", tooltip=" << dot_quote(id) << "];\n";
  for (const auto& [id, f] : c.out_flows())
    os << "  " << dot_quote("u:" + f.unit) << " -> " << dot_quote("v:" + f.var)
       << " [style=" << edge_style(f.var) << ", tooltip=" << dot_quote(id) << "];\n";
  os << "}\n";
  return os.str();
}

}  // namespace cdbc
