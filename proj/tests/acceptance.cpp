// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "cdbc/cdbc.hpp"
#include "cdbc/testing/laws.hpp"

using namespace cdbc;
using cdbc::testing::Gen;

namespace {

struct Verdict {
  bool ok = true;
  std::string detail;
  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

using Clock = std::chrono::steady_clock;

bool report(int id, const char* what, double budget_ms, const std::function<Verdict()>& body) {
  Verdict r;
  const auto t0 = Clock::now();
  try {
    r = body();
  } catch (const std::exception& e) {
    r.fail(std::string("exception: ") + e.what());
  }
  const double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  if (ms >= budget_ms) r.fail("over time budget");
  std::printf("%s %d %s (%.3f ms, budget %.0f ms)%s%s\n", r.ok ? "PASS" : "FAIL", id, what, ms, budget_ms,
              r.ok ? "" : ": ", r.detail.c_str());
  std::fflush(stdout);
  return r.ok;
}

Verdict and_worked_example() {
  Verdict r;
  Circuit a = fixtures::and_gate();
  Trace tr = run(a, initial_state(a, {{"v1", Value::Signal}, {"v2", Value::B1}, {"v3", Value::B0}}));
  if (tr.outcome != Outcome::Final) r.fail("outcome " + std::string(to_string(tr.outcome)));
  if (tr.transitions() != 2) r.fail("reached final at j=" + std::to_string(tr.transitions()));
  if (tr.last().values != std::map<Id, Value>{{"v6", Value::Signal}, {"v7", Value::B0}})
    r.fail("final state " + format_state(tr.last()));
  return r;
}

Verdict nand_equivalence() {
  Verdict r;
  Gen g(2024);
  for (int k = 0; k < 200 && r.ok; ++k) {
    NandDag d = cdbc::testing::random_dag(g, 6, 15);
    Executor ex(to_control(d).circuit);
    const auto inputs = d.inputs();
    for (std::uint64_t idx = 0; idx < (std::uint64_t{1} << inputs.size()); ++idx) {
      const auto bits = assignment(inputs, idx);
      Trace tr = ex.run(lift_inputs(d, bits), {idx, 10000});
      if (tr.outcome != Outcome::Final) {
        r.fail("dag " + std::to_string(k) + " ended " + std::string(to_string(tr.outcome)));
        break;
      }
      if (tr.transitions() > d.depth() + 1) r.fail("dag " + std::to_string(k) + " took too many steps");
      if (read_outputs(d, tr) != eval_dag(d, bits)) r.fail("dag " + std::to_string(k) + " disagrees");
    }
  }
  return r;
}

Verdict repeat_all(std::uint64_t seed, int n, std::initializer_list<std::pair<const char*, std::string (*)(Gen&)>> checks) {
  Verdict r;
  Gen g(seed);
  for (const auto& [name, check] : checks)
    for (int k = 0; k < n && r.ok; ++k)
      if (auto err = check(g); !err.empty()) r.fail(std::string(name) + " #" + std::to_string(k) + ": " + err);
  return r;
}

Verdict flipflop_table() {
  Verdict r;
  auto ff = fixtures::flipflop();
  std::vector<std::uint64_t> seeds(64);
  for (std::uint64_t k = 0; k < seeds.size(); ++k) seeds[k] = k;
  auto rows = fixtures::run_flipflop_table(ff, seeds);
  if (rows.size() != 8) r.fail(std::to_string(rows.size()) + " of 8 rows reproduced");
  for (const auto& row : rows) {
    const bool expect = row.s || (!row.r && row.q);
    if (row.q_next != expect || row.s_next != !row.q_next || row.r_next != row.q_next)
      r.fail("row S=" + std::to_string(row.s) + " R=" + std::to_string(row.r) + " Q=" + std::to_string(row.q));
  }
  return r;
}

Verdict p53_choice() {
  Verdict r;
  auto p = fixtures::p53();
  Executor ex(p.circuit);
  State st = ex.initial_state({{"ctrl", Value::Signal}, {"p53", Value::B1}, {"mdm2", Value::B0}});
  std::array<bool, 4> seen{};
  for (std::uint64_t seed = 0; seed < 1000 && r.ok; ++seed) {
    Trace tr = ex.run(st, {seed, 1000});
    if (tr.outcome != Outcome::Final) r.fail("seed " + std::to_string(seed) + " did not finish");
    std::size_t touched = 0;
    for (std::size_t a = 0; a < 4; ++a) {
      bool any = false;
      for (const auto& s : tr.steps)
        for (const auto& u : s.ready) any |= p.alternative_units[a].count(u) != 0;
      if (any) seen[a] = true;
      touched += any;
    }
    if (touched != 1) r.fail("seed " + std::to_string(seed) + " fired " + std::to_string(touched) + " alternatives");
    if (format_trace(ex.run(st, {seed, 1000})) != format_trace(tr))
      r.fail("seed " + std::to_string(seed) + " is not reproducible");
  }
  for (std::size_t a = 0; a < 4; ++a)
    if (!seen[a]) r.fail("alternative " + std::to_string(a + 1) + " never fired");
  return r;
}

Verdict interface_counts() {
  Verdict r;
  Gen g(7);
  for (int k = 0; k < 100; ++k) {
    NandDag d = cdbc::testing::random_dag(g);
    Circuit c = to_control(d).circuit;
    std::size_t in = 0, out = 0;
    for (const auto& n : d.inputs()) in += d.out_edges(n).size();
    for (const auto& n : d.outputs()) out += d.in_edges(n).size();
    if (count_tag(c, c.invars(), TypeTag::Ctrl) != in || count_tag(c, c.invars(), TypeTag::Bool) != in)
      r.fail("dag " + std::to_string(k) + " invar counts");
    if (count_tag(c, c.outvars(), TypeTag::Ctrl) != out || count_tag(c, c.outvars(), TypeTag::Bool) != out)
      r.fail("dag " + std::to_string(k) + " outvar counts");
  }
  return r;
}

}  // namespace

int main() {
  namespace t = cdbc::testing;
  bool ok = true;
  ok &= report(1, "AND worked example reaches final at j=2", 1, and_worked_example);
  ok &= report(2, "NAND DAG transform agrees with direct evaluation", 30000, nand_equivalence);
  ok &= report(3, "composition laws up to isomorphism", 60000, [] {
    return repeat_all(3, 50, {{"seq-identity", t::law_sequence_identity},
                              {"seq-assoc", t::law_total_sequence_associative},
                              {"par-comm", t::law_parallel_commutative},
                              {"par-assoc", t::law_parallel_associative},
                              {"branch-comm", t::law_branch_commutative},
                              {"branch-assoc", t::law_branch_associative}});
  });
  ok &= report(4, "structural propositions on random instances", 60000, [] {
    return repeat_all(4, 500, {{"primitive-sound", t::prop_primitive_sound},
                               {"interface-preservation", t::prop_interface_preservation},
                               {"sequencing-legs-mono", t::prop_sequencing_legs_mono},
                               {"sequencing-interface", t::prop_sequencing_interface},
                               {"branch-adjoints", t::prop_branch_adjoints},
                               {"transform-sound", t::prop_transform_sound}});
  });
  ok &= report(5, "flip-flop next-state table", 1000, flipflop_table);
  ok &= report(6, "p53 fires exactly one alternative per run", 10000, p53_choice);
  ok &= report(7, "transformed interface sizes follow DAG degrees", 60000, interface_counts);
  return ok ? 0 : 1;
}
