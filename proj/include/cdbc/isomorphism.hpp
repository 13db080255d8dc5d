#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <vector>

#include "cdbc/morphism.hpp"

namespace cdbc {

namespace detail {

/// Variables and units as one bipartite multigraph, indexed densely.
struct FlowGraph {
  std::vector<Id> names;             // vars first, then units
  std::size_t n_vars = 0;
  std::vector<int> base;             // kind/tag code
  std::vector<std::map<int, int>> out, in;  // neighbour -> edge multiplicity

  explicit FlowGraph(const Circuit& c) {
    std::map<Id, int> var_ix, unit_ix;
    for (const auto& [v, t] : c.vars()) {
      var_ix.emplace(v, static_cast<int>(names.size()));
      names.push_back(v);
      base.push_back(t == TypeTag::Ctrl ? 0 : 1);
    }
    n_vars = names.size();
    for (const auto& u : c.units()) {
      unit_ix.emplace(u, static_cast<int>(names.size()));
      names.push_back(u);
      base.push_back(2);
    }
    out.resize(names.size());
    in.resize(names.size());
    for (const auto& [id, f] : c.in_flows()) {
      int a = var_ix.at(f.var), b = unit_ix.at(f.unit);
      ++out[a][b];
      ++in[b][a];
    }
    for (const auto& [id, f] : c.out_flows()) {
      int a = unit_ix.at(f.unit), b = var_ix.at(f.var);
      ++out[a][b];
      ++in[b][a];
    }
  }
  std::size_t size() const { return names.size(); }
};

/// Joint colour refinement of two graphs so that colours are comparable.
inline std::pair<std::vector<int>, std::vector<int>> refine_colours(const FlowGraph& a,
                                                                    const FlowGraph& b) {
  using Sig = std::tuple<int, std::vector<std::pair<int, int>>, std::vector<std::pair<int, int>>>;
  std::vector<int> ca(a.base), cb(b.base);
  auto distinct = [&] {
    std::set<int> s(ca.begin(), ca.end());
    s.insert(cb.begin(), cb.end());
    return s.size();
  };
  std::size_t count = distinct();
  for (;;) {
    std::map<Sig, int> dict;
    auto sig = [](const FlowGraph& g, const std::vector<int>& col, std::size_t x) {
      std::vector<std::pair<int, int>> o, i;
      for (const auto& [n, k] : g.out[x]) o.emplace_back(col[n], k);
      for (const auto& [n, k] : g.in[x]) i.emplace_back(col[n], k);
      std::sort(o.begin(), o.end());
      std::sort(i.begin(), i.end());
      return Sig{col[x], std::move(o), std::move(i)};
    };
    std::vector<Sig> sa, sb;
    for (std::size_t x = 0; x < a.size(); ++x) sa.push_back(sig(a, ca, x));
    for (std::size_t x = 0; x < b.size(); ++x) sb.push_back(sig(b, cb, x));
    for (const auto& s : sa) dict.emplace(s, 0);
    for (const auto& s : sb) dict.emplace(s, 0);
    int next = 0;
    for (auto& [s, c] : dict) c = next++;
    for (std::size_t x = 0; x < a.size(); ++x) ca[x] = dict.at(sa[x]);
    for (std::size_t x = 0; x < b.size(); ++x) cb[x] = dict.at(sb[x]);
    std::size_t now = distinct();
    if (now == count) break;
    count = now;
  }
  return {ca, cb};
}

class IsoSearch {
public:
  IsoSearch(const FlowGraph& a, const FlowGraph& b, std::vector<int> ca, std::vector<int> cb)
      : a_(a), b_(b), ca_(std::move(ca)), cb_(std::move(cb)),
        fwd_(a.size(), -1), bwd_(b.size(), -1) {
    std::map<int, std::size_t> class_size;
    for (int c : ca_) ++class_size[c];
    // Greedy order: most already-placed neighbours first, then rarest colour.
    std::vector<bool> placed(a.size(), false);
    std::vector<int> links(a.size(), 0);
    for (std::size_t k = 0; k < a.size(); ++k) {
      int best = -1;
      for (std::size_t x = 0; x < a.size(); ++x) {
        if (placed[x]) continue;
        if (best < 0 || links[x] > links[best] ||
            (links[x] == links[best] && class_size[ca_[x]] < class_size[ca_[best]]))
          best = static_cast<int>(x);
      }
      placed[best] = true;
      order_.push_back(best);
      for (const auto& [n, m] : a.out[best]) ++links[n];
      for (const auto& [n, m] : a.in[best]) ++links[n];
    }
  }

  std::optional<std::vector<int>> solve() {
    if (extend(0)) return fwd_;
    return std::nullopt;
  }

private:
  bool consistent(int x, int y) const {
    auto check = [&](const std::map<int, int>& na, const std::map<int, int>& nb) {
      for (const auto& [n, k] : na) {
        if (fwd_[n] < 0) continue;
        auto it = nb.find(fwd_[n]);
        if (it == nb.end() || it->second != k) return false;
      }
      for (const auto& [n, k] : nb) {
        if (bwd_[n] < 0) continue;
        if (!na.count(bwd_[n])) return false;
      }
      return true;
    };
    return check(a_.out[x], b_.out[y]) && check(a_.in[x], b_.in[y]);
  }

  bool extend(std::size_t depth) {
    if (depth == order_.size()) return true;
    const int x = order_[depth];
    std::vector<int> candidates;
    // Anchor on a placed neighbour when there is one.
    const std::map<int, int>* anchor = nullptr;
    for (const auto& [n, k] : a_.in[x])
      if (fwd_[n] >= 0) { anchor = &b_.out[fwd_[n]]; break; }
    if (!anchor)
      for (const auto& [n, k] : a_.out[x])
        if (fwd_[n] >= 0) { anchor = &b_.in[fwd_[n]]; break; }
    if (anchor) {
      for (const auto& [y, k] : *anchor) candidates.push_back(y);
    } else {
      for (std::size_t y = 0; y < b_.size(); ++y) candidates.push_back(static_cast<int>(y));
    }
    for (int y : candidates) {
      if (bwd_[y] >= 0 || cb_[y] != ca_[x] || !consistent(x, y)) continue;
      fwd_[x] = y;
      bwd_[y] = x;
      if (extend(depth + 1)) return true;
      fwd_[x] = -1;
      bwd_[y] = -1;
    }
    return false;
  }

  const FlowGraph& a_;
  const FlowGraph& b_;
  std::vector<int> ca_, cb_;
  std::vector<int> fwd_, bwd_;
  std::vector<int> order_;
};

}  // namespace detail

/// An isomorphism a -> b when one exists. Exhaustive backtracking over
/// variables and units, pruned by colour refinement; flows between the same
/// endpoints are interchangeable and are matched in id order.
inline std::optional<CircuitMorphism> is_isomorphic(const Circuit& a, const Circuit& b) {
  if (a.vars().size() != b.vars().size() || a.units().size() != b.units().size() ||
      a.in_flows().size() != b.in_flows().size() ||
      a.out_flows().size() != b.out_flows().size())
    return std::nullopt;
  detail::FlowGraph ga(a), gb(b);
  auto [ca, cb] = detail::refine_colours(ga, gb);
  {
    auto hist_a = ca, hist_b = cb;
    std::sort(hist_a.begin(), hist_a.end());
    std::sort(hist_b.begin(), hist_b.end());
    if (hist_a != hist_b) return std::nullopt;
  }
  auto found = detail::IsoSearch(ga, gb, ca, cb).solve();
  if (!found) return std::nullopt;

  ComponentMaps m;
  for (std::size_t x = 0; x < ga.size(); ++x) {
    const Id& target = gb.names[(*found)[x]];
    if (x < ga.n_vars) m.vars.emplace(ga.names[x], target);
    else m.units.emplace(ga.names[x], target);
  }
  std::map<std::pair<Id, Id>, std::vector<Id>> b_in, b_out;
  for (const auto& [id, f] : b.in_flows()) b_in[{f.var, f.unit}].push_back(id);
  for (const auto& [id, f] : b.out_flows()) b_out[{f.unit, f.var}].push_back(id);
  std::map<std::pair<Id, Id>, std::size_t> used_in, used_out;
  for (const auto& [id, f] : a.in_flows()) {
    std::pair<Id, Id> key{m.vars.at(f.var), m.units.at(f.unit)};
    m.in_flows.emplace(id, b_in.at(key).at(used_in[key]++));
  }
  for (const auto& [id, f] : a.out_flows()) {
    std::pair<Id, Id> key{m.units.at(f.unit), m.vars.at(f.var)};
    m.out_flows.emplace(id, b_out.at(key).at(used_out[key]++));
  }
  return make_morphism(a, b, std::move(m));
}

}  // namespace cdbc
