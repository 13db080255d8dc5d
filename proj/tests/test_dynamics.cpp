#include <gtest/gtest.h>

#include <functional>

#include "cdbc/cdbc.hpp"
#include "cdbc/testing/generators.hpp"

using namespace cdbc;
using cdbc::testing::Gen;

namespace {

const std::map<Id, Value> kAndInputs{{"v1", Value::Signal}, {"v2", Value::B1}, {"v3", Value::B0}};

RawCircuit raw_with(std::map<Id, TypeTag> vars, IdSet units,
                    std::vector<std::pair<Id, Id>> ins, std::vector<std::pair<Id, Id>> outs) {
  RawCircuit raw;
  raw.vars = std::move(vars);
  raw.units = std::move(units);
  for (const auto& [v, u] : ins) raw.in_flows.emplace("i:" + v + ">" + u, InFlow{v, u});
  for (const auto& [u, v] : outs) raw.out_flows.emplace("o:" + u + ">" + v, OutFlow{u, v});
  return raw;
}

// Two relays share the pre-set {c}; the join after them needs both.
Circuit competing_join() {
  const auto C = TypeTag::Ctrl;
  return make_circuit(raw_with({{"c", C}, {"a", C}, {"b", C}, {"out", C}}, {"p", "q", "x"},
                               {{"c", "p"}, {"c", "q"}, {"a", "x"}, {"b", "x"}},
                               {{"p", "a"}, {"q", "b"}, {"x", "out"}}));
}

// Two independent units write different bits into x in the same step.
Circuit conflicting_writers() {
  const auto C = TypeTag::Ctrl, B = TypeTag::Bool;
  return make_circuit(raw_with({{"c1", C}, {"c2", C}, {"b", B}, {"d", C}, {"e", C}, {"x", B}},
                               {"nand", "one"}, {{"c1", "nand"}, {"b", "nand"}, {"c2", "one"}},
                               {{"nand", "d"}, {"nand", "x"}, {"one", "e"}, {"one", "x"}}));
}

// m is consumed by `eat` and produced again by `relay` in the same step.
Circuit consume_and_produce() {
  const auto C = TypeTag::Ctrl;
  return make_circuit(raw_with({{"a", C}, {"m", C}, {"p", C}, {"z", C}}, {"start", "relay", "eat"},
                               {{"a", "start"}, {"p", "relay"}, {"m", "eat"}},
                               {{"start", "m"}, {"start", "p"}, {"relay", "m"}, {"eat", "z"}}));
}

std::map<Id, Value> default_inputs(const Circuit& c, Gen& g) {
  std::map<Id, Value> in;
  for (const auto& v : c.invars())
    in[v] = c.tag(v) == TypeTag::Ctrl ? Value::Signal : from_bit(g.coin());
  return in;
}

// Longest chain of units, computed from producer/consumer relations.
std::size_t unit_depth(const Circuit& c) {
  std::map<Id, std::size_t> depth;
  std::function<std::size_t(const Id&)> go = [&](const Id& u) -> std::size_t {
    if (auto it = depth.find(u); it != depth.end()) return it->second;
    std::size_t d = 1;
    for (const auto& v : c.pre_set(u))
      for (const auto& p : c.producers(v)) d = std::max(d, go(p) + 1);
    return depth[u] = d;
  };
  std::size_t best = 0;
  for (const auto& u : c.units()) best = std::max(best, go(u));
  return best;
}

}  // namespace

TEST(InitialState, AndExample) {
  Circuit a = fixtures::and_gate();
  State st = initial_state(a, kAndInputs);
  EXPECT_EQ(st.time, 0u);
  EXPECT_TRUE(Executor(a).is_initial(st));
}

TEST(InitialState, Errors) {
  Circuit a = fixtures::and_gate();
  auto code = [&](std::map<Id, Value> in) {
    try {
      initial_state(a, in);
    } catch (const ExecutionError& e) {
      return e.code();
    }
    return std::string("ok");
  };
  EXPECT_EQ(code({{"v1", Value::Signal}, {"v2", Value::B1}}), "missing-input");
  EXPECT_EQ(code({{"v1", Value::B1}, {"v2", Value::B1}, {"v3", Value::B0}}), "tag-mismatch");
  auto extra = kAndInputs;
  extra["v4"] = Value::Signal;
  EXPECT_EQ(code(extra), "unexpected-input");
}

TEST(Enabled, Examples) {
  Circuit a = fixtures::and_gate();
  EXPECT_EQ(enabled_units(a, initial_state(a, kAndInputs)), IdSet{"u1"});
  EXPECT_TRUE(enabled_units(a, State{2, {{"v6", Value::Signal}, {"v7", Value::B0}}}).empty());
  auto p = fixtures::p53();
  State st = initial_state(p.circuit, {{"ctrl", Value::Signal}, {"p53", Value::B1}, {"mdm2", Value::B0}});
  IdSet en = enabled_units(p.circuit, st);
  EXPECT_EQ(en.size(), 4u);
  for (const auto& units : p.alternative_units) {
    std::size_t hits = 0;
    for (const auto& u : en) hits += units.count(u);
    EXPECT_EQ(hits, 1u);
  }
}

TEST(Ready, SingletonClassesKeepEverything) {
  Circuit a = fixtures::and_gate();
  SplitMix64 rng(5);
  State st = initial_state(a, kAndInputs);
  EXPECT_EQ(ready_units(a, st, rng), enabled_units(a, st));
}

TEST(Ready, P53ChoosesOneEntryUnit) {
  auto p = fixtures::p53();
  State st = initial_state(p.circuit, {{"ctrl", Value::Signal}, {"p53", Value::B0}, {"mdm2", Value::B1}});
  Executor ex(p.circuit);
  std::array<int, 4> seen{};
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    SplitMix64 rng(seed);
    IdSet r = ex.ready(st, rng);
    ASSERT_EQ(r.size(), 1u);
    for (std::size_t k = 0; k < 4; ++k) seen[k] += p.alternative_units[k].count(*r.begin()) ? 1 : 0;
  }
  for (int n : seen) EXPECT_GT(n, 0);
}

TEST(Ready, RandomDrawIsUniformEnough) {
  // 4000 draws over a class of four: each member between 850 and 1150 times.
  SplitMix64 rng(99);
  std::array<int, 4> hist{};
  for (int k = 0; k < 4000; ++k) ++hist[rng.below(4)];
  for (int n : hist) {
    EXPECT_GT(n, 850);
    EXPECT_LT(n, 1150);
  }
}

TEST(Reduce, Examples) {
  Circuit relay = mk_primitive(1, 0, 1, 1);
  EXPECT_EQ(reduce_unit(relay, "u", State{0, {{"ci1", Value::Signal}}}), Value::B1);
  Circuit n = mk_primitive(1, 1, 1, 1);
  EXPECT_EQ(reduce_unit(n, "u", State{0, {{"ci1", Value::Signal}, {"bi1", Value::B1}}}), Value::B0);
  EXPECT_EQ(reduce_unit(n, "u", State{0, {{"ci1", Value::Signal}, {"bi1", Value::B0}}}), Value::B1);
  Circuit nand = mk_primitive(1, 2, 1, 1);
  EXPECT_EQ(reduce_unit(nand, "u", State{0, {{"ci1", Value::Signal}, {"bi1", Value::B1}, {"bi2", Value::B0}}}),
            Value::B1);
  EXPECT_EQ(reduce_unit(nand, "u", State{0, {{"ci1", Value::Signal}, {"bi1", Value::B1}, {"bi2", Value::B1}}}),
            Value::B0);
  EXPECT_THROW(reduce_unit(nand, "u", State{0, {{"ci1", Value::Signal}}}), ExecutionError);
}

TEST(Step, AndWorkedExample) {
  Circuit a = fixtures::and_gate();
  SplitMix64 rng(0);
  StepResult s1 = step(a, initial_state(a, kAndInputs), rng);
  EXPECT_EQ(s1.state.values, (std::map<Id, Value>{{"v4", Value::Signal}, {"v5", Value::B1}}));
  EXPECT_EQ(s1.state.time, 1u);
  StepResult s2 = step(a, s1.state, rng);
  EXPECT_EQ(s2.state.values, (std::map<Id, Value>{{"v6", Value::Signal}, {"v7", Value::B0}}));
}

TEST(Step, ProducedValueWinsOverConsumption) {
  Circuit c = consume_and_produce();
  Executor ex(c);
  SplitMix64 rng(0);
  StepResult s1 = ex.step(ex.initial_state({{"a", Value::Signal}}), rng);
  EXPECT_EQ(s1.state.values, (std::map<Id, Value>{{"m", Value::Signal}, {"p", Value::Signal}}));
  StepResult s2 = ex.step(s1.state, rng);
  EXPECT_EQ(s2.ready, (IdSet{"eat", "relay"}));
  EXPECT_EQ(s2.state.values, (std::map<Id, Value>{{"m", Value::Signal}, {"z", Value::Signal}}));
  Trace tr = ex.run(ex.initial_state({{"a", Value::Signal}}), {});
  EXPECT_EQ(tr.outcome, Outcome::Final);
}

TEST(Run, AndReachesFinalInTwoSteps) {
  Circuit a = fixtures::and_gate();
  Trace tr = run(a, initial_state(a, kAndInputs));
  EXPECT_EQ(tr.outcome, Outcome::Final);
  EXPECT_EQ(tr.transitions(), 2u);
  EXPECT_EQ(tr.last().values.at("v7"), Value::B0);
  EXPECT_EQ(tr.steps[0].ready, IdSet{"u1"});
}

TEST(Run, CompetingJoinDeadlocks) {
  Circuit c = competing_join();
  EXPECT_TRUE(is_sound(c));
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Trace tr = run(c, initial_state(c, {{"c", Value::Signal}}), {seed, 100});
    EXPECT_EQ(tr.outcome, Outcome::Deadlock);
    EXPECT_EQ(tr.transitions(), 1u);
  }
}

TEST(Run, InoutvarIsAlreadyFinal) {
  // An inoutvar is in both V+ and V-, so a run on Λ stops at once.
  Trace tr = run(unit_circuit(), initial_state(unit_circuit(), {{"v1", Value::Signal}}));
  EXPECT_EQ(tr.outcome, Outcome::Final);
  EXPECT_EQ(tr.transitions(), 0u);
}

TEST(Run, WriteConflictIsReported) {
  Circuit c = conflicting_writers();
  Trace tr = run(c, initial_state(c, {{"c1", Value::Signal}, {"c2", Value::Signal}, {"b", Value::B1}}));
  EXPECT_EQ(tr.outcome, Outcome::WriteConflict);
  ASSERT_TRUE(tr.conflict);
  EXPECT_EQ(*tr.conflict, "x");
  // Equal values are no conflict.
  Trace ok = run(c, initial_state(c, {{"c1", Value::Signal}, {"c2", Value::Signal}, {"b", Value::B0}}));
  EXPECT_EQ(ok.outcome, Outcome::Final);
}

TEST(Run, StepLimit) {
  auto ff = fixtures::flipflop();
  Executor ex(ff.circuit);
  State st = ex.initial_state({{"ctrl", Value::Signal}, {"R", Value::B0}, {"Qn", Value::B0}, {"S", Value::B1}});
  Trace tr = ex.run(st, {0, 3});
  EXPECT_EQ(tr.outcome, Outcome::StepLimit);
  EXPECT_EQ(tr.transitions(), 3u);
}

TEST(Run, FlipFlopSetRow) {
  auto ff = fixtures::flipflop();
  Executor ex(ff.circuit);
  State st = ex.initial_state({{"ctrl", Value::Signal}, {"R", Value::B0}, {"Qn", Value::B0}, {"S", Value::B1}});
  Trace tr = ex.run(st, {7, 1000});
  bool seen = false;
  for (const auto& s : tr.steps)
    if (auto it = s.state.values.find("step/Q"); it != s.state.values.end() && !seen) {
      EXPECT_EQ(it->second, Value::B1);
      seen = true;
    }
  EXPECT_TRUE(seen);
}

TEST(Run, FormattedTrace) {
  Circuit a = fixtures::and_gate();
  const std::string text = format_trace(run(a, initial_state(a, kAndInputs)));
  EXPECT_EQ(text,
            "t=0 state={v1=*,v2=1,v3=0} ready={u1}\n"
            "t=1 state={v4=*,v5=1} ready={u2}\n"
            "t=2 state={v6=*,v7=0} ready={}\n"
            "outcome=Final steps=2\n");
}

TEST(Properties, DeterministicPerSeed) {
  auto p = fixtures::p53();
  Executor ex(p.circuit);
  State st = ex.initial_state({{"ctrl", Value::Signal}, {"p53", Value::B1}, {"mdm2", Value::B1}});
  for (std::uint64_t seed = 0; seed < 50; ++seed)
    EXPECT_EQ(format_trace(ex.run(st, {seed, 100})), format_trace(ex.run(st, {seed, 100})));
}

TEST(Properties, TagDisciplineAndReplication) {
  Gen g(61);
  for (int k = 0; k < 200; ++k) {
    Circuit c = cdbc::testing::random_sound_circuit(g);
    Executor ex(c);
    Trace tr = ex.run(ex.initial_state(default_inputs(c, g)), {static_cast<std::uint64_t>(k), 200});
    for (std::size_t j = 0; j + 1 < tr.steps.size(); ++j) {
      const auto& next = tr.steps[j + 1].state;
      for (const auto& [v, x] : next.values) EXPECT_TRUE(fits(c.tag(v), x)) << v;
      for (const auto& u : tr.steps[j].ready) {
        const Value r = tr.steps[j].reductions.at(u);
        for (const auto& v : c.post_set(u)) {
          const Value expect = c.tag(v) == TypeTag::Ctrl ? Value::Signal : r;
          EXPECT_EQ(next.values.at(v), expect);
        }
      }
    }
  }
}

TEST(Properties, DistinctPreSetsMeanReadyEqualsEnabled) {
  Gen g(62);
  for (int k = 0; k < 200; ++k) {
    Circuit c = cdbc::testing::random_sound_circuit(g);
    Executor ex(c);
    Trace tr = ex.run(ex.initial_state(default_inputs(c, g)), {static_cast<std::uint64_t>(k), 200});
    for (std::size_t j = 0; j + 1 < tr.steps.size(); ++j) EXPECT_EQ(tr.steps[j].ready, tr.steps[j].enabled);
  }
}

TEST(Properties, ExecutionPatterns) {
  // Control-only units and Boolean eaters emit only the signal; control-only
  // inputs with Boolean outputs emit 1 everywhere.
  Circuit relay = mk_primitive(2, 0, 2, 0);
  Trace t1 = run(relay, initial_state(relay, {{"ci1", Value::Signal}, {"ci2", Value::Signal}}));
  EXPECT_EQ(t1.last().values, (std::map<Id, Value>{{"co1", Value::Signal}, {"co2", Value::Signal}}));
  Circuit eater = mk_primitive(1, 2, 1, 0);
  Trace t2 = run(eater, initial_state(eater, {{"ci1", Value::Signal}, {"bi1", Value::B0}, {"bi2", Value::B1}}));
  EXPECT_EQ(t2.last().values, (std::map<Id, Value>{{"co1", Value::Signal}}));
  Circuit one = mk_primitive(1, 0, 1, 3);
  Trace t3 = run(one, initial_state(one, {{"ci1", Value::Signal}}));
  for (const char* v : {"bo1", "bo2", "bo3"}) EXPECT_EQ(t3.last().values.at(v), Value::B1);
}

TEST(Properties, AcyclicCompositesFinishAtUnitDepth) {
  Gen g(63);
  for (int k = 0; k < 300; ++k) {
    Circuit c = cdbc::testing::random_sound_circuit(g, 6);
    Trace tr = run(c, initial_state(c, default_inputs(c, g)), {static_cast<std::uint64_t>(k), 1000});
    ASSERT_EQ(tr.outcome, Outcome::Final);
    EXPECT_EQ(tr.transitions(), unit_depth(c));
  }
}

TEST(Properties, ChainFinishesInUnitCount) {
  Circuit chain = fixtures::not_gate();
  for (int k = 0; k < 5; ++k) chain = sequence(chain, fixtures::not_gate(), auto_pairing(chain, fixtures::not_gate())).circuit;
  Gen g(64);
  Trace tr = run(chain, initial_state(chain, default_inputs(chain, g)));
  EXPECT_EQ(tr.outcome, Outcome::Final);
  EXPECT_EQ(tr.transitions(), chain.units().size());
}
