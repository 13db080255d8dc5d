#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "cdbc/cdbc.hpp"
#include "cdbc/testing/generators.hpp"

using namespace cdbc;
using cdbc::testing::Gen;

namespace {

// Exhaustive isomorphism check: try every tag-preserving variable bijection
// and every unit bijection, compare flow multisets.
bool brute_force_iso(const Circuit& a, const Circuit& b) {
  if (a.vars().size() != b.vars().size() || a.units().size() != b.units().size() ||
      a.in_flows().size() != b.in_flows().size() || a.out_flows().size() != b.out_flows().size())
    return false;
  std::vector<Id> av, bv, au(a.units().begin(), a.units().end()), bu(b.units().begin(), b.units().end());
  for (const auto& [v, t] : a.vars()) av.push_back(v);
  for (const auto& [v, t] : b.vars()) bv.push_back(v);
  std::multiset<std::pair<Id, Id>> b_in, b_out;
  for (const auto& [i, f] : b.in_flows()) b_in.emplace(f.var, f.unit);
  for (const auto& [o, f] : b.out_flows()) b_out.emplace(f.unit, f.var);
  std::sort(bv.begin(), bv.end());
  do {
    bool tags_ok = true;
    for (std::size_t k = 0; k < av.size(); ++k) tags_ok &= a.tag(av[k]) == b.tag(bv[k]);
    if (!tags_ok) continue;
    std::map<Id, Id> fv;
    for (std::size_t k = 0; k < av.size(); ++k) fv[av[k]] = bv[k];
    std::vector<Id> perm = bu;
    std::sort(perm.begin(), perm.end());
    do {
      std::map<Id, Id> fu;
      for (std::size_t k = 0; k < au.size(); ++k) fu[au[k]] = perm[k];
      std::multiset<std::pair<Id, Id>> in, out;
      for (const auto& [i, f] : a.in_flows()) in.emplace(fv.at(f.var), fu.at(f.unit));
      for (const auto& [o, f] : a.out_flows()) out.emplace(fu.at(f.unit), fv.at(f.var));
      if (in == b_in && out == b_out) return true;
    } while (std::next_permutation(perm.begin(), perm.end()));
  } while (std::next_permutation(bv.begin(), bv.end()));
  return false;
}

// Random valid circuit with at most six variables, built from raw flows.
std::optional<Circuit> random_small(Gen& g) {
  RawCircuit raw;
  const std::size_t n = g.range(2, 6), m = g.range(1, 2);
  std::vector<Id> vars;
  for (std::size_t k = 0; k < n; ++k) {
    vars.push_back("w" + std::to_string(k));
    raw.vars.emplace(vars.back(), k < 2 || g.coin() ? TypeTag::Ctrl : TypeTag::Bool);
  }
  std::size_t flow = 0;
  for (std::size_t u = 0; u < m; ++u) {
    const Id unit = "u" + std::to_string(u);
    raw.units.insert(unit);
    const std::size_t ins = g.range(1, 3), outs = g.range(1, 3);
    for (std::size_t k = 0; k < ins; ++k)
      raw.in_flows.emplace("f" + std::to_string(flow++), InFlow{vars[g.range(0, n - 1)], unit});
    for (std::size_t k = 0; k < outs; ++k)
      raw.out_flows.emplace("f" + std::to_string(flow++), OutFlow{unit, vars[g.range(0, n - 1)]});
  }
  auto v = validate_circuit(raw);
  if (!v) return std::nullopt;
  return v.value();
}

Circuit shuffle_names(Gen& g, const Circuit& c) {
  std::vector<Id> names;
  for (const auto& [v, t] : c.vars()) names.push_back(v);
  std::vector<Id> shuffled = names;
  g.shuffle(shuffled);
  std::map<Id, Id> vmap;
  for (std::size_t k = 0; k < names.size(); ++k) vmap[names[k]] = "n/" + shuffled[k];
  return relabel(c, vmap);
}

void expect_square_commutes(const Span& sp, const Cospan& co) {
  EXPECT_EQ(compose_morphisms(co.left_leg, sp.left).maps(), compose_morphisms(co.right_leg, sp.right).maps());
}

}  // namespace

TEST(Quotient, LeastNameRepresents) {
  QuotientMap q;
  for (const char* x : {"R/b", "L/z", "L/a", "R/c"}) q.add(x);
  q.unite("R/b", "L/z");
  q.unite("L/z", "R/c");
  EXPECT_EQ(q.find("R/c"), "L/z");  // "L/..." sorts before "R/..."
  q.unite("L/a", "R/c");
  EXPECT_EQ(q.find("R/b"), "L/a");
  EXPECT_EQ(q.classes().size(), 1u);
}

TEST(Pushout, UnitSpanIsIdentity) {
  Circuit lam = fixtures::and_gate();
  Circuit unit = unit_circuit();
  Span sp{identity(unit), embed_trivial(lam, {{"v1", "v1"}})};
  Cospan co = pushout(sp);
  EXPECT_TRUE(is_isomorphic(co.result, lam));
  expect_square_commutes(sp, co);
}

TEST(Pushout, AndFromNandAndNot) {
  Circuit nand = fixtures::nand2(), inv = mk_primitive(1, 1, 1, 1);
  Span sp{embed_trivial(nand, {{"s1", "co1"}, {"s2", "bo1"}}), embed_trivial(inv, {{"s1", "ci1"}, {"s2", "bi1"}})};
  Cospan co = pushout(sp);
  EXPECT_EQ(co.result.vars().size(), 7u);
  EXPECT_EQ(co.result.units().size(), 2u);
  EXPECT_TRUE(is_isomorphic(co.result, fixtures::and_gate()));
  expect_square_commutes(sp, co);
  EXPECT_TRUE(co.result.has_var("po/L/co1"));
}

TEST(Pushout, NonexistentWhenGluingInternals) {
  Circuit buf = fixtures::buffer(), inv = fixtures::not_gate();
  Id mid;
  for (const auto& [v, t] : buf.vars())
    if (t == TypeTag::Ctrl && !buf.invars().count(v) && !buf.outvars().count(v)) mid = v;
  Span sp{embed_trivial(buf, {{"s", mid}}), embed_trivial(inv, {{"s", "v1"}})};
  EXPECT_FALSE(pushout_exists(sp));
  try {
    pushout(sp);
    FAIL();
  } catch (const CompositionError& e) {
    EXPECT_EQ(e.code(), "pushout-does-not-exist");
  }
}

TEST(Pushout, MismatchedApexRejected) {
  Circuit a = fixtures::not_gate();
  Span sp{embed_trivial(a, {{"s", "v1"}}), embed_trivial(a, {{"t", "v1"}})};
  EXPECT_THROW(pushout(sp), CompositionError);
}

TEST(Pushout, CountsUnderInjectiveLegs) {
  Gen g(21);
  for (int k = 0; k < 300; ++k) {
    Circuit a = cdbc::testing::random_sound_circuit(g), b = cdbc::testing::random_sound_circuit(g);
    Pairing p = cdbc::testing::random_partial_pairing(g, a, b);
    Composite s = sequence(a, b, p);
    EXPECT_EQ(s.circuit.vars().size(), a.vars().size() + b.vars().size() - p.size());
    EXPECT_EQ(s.circuit.units().size(), a.units().size() + b.units().size());
    EXPECT_TRUE(is_mono(s.leg("left")));
    EXPECT_TRUE(is_mono(s.leg("right")));
  }
}

TEST(Pushout, SquareCommutesOnRandomSpans) {
  Gen g(22);
  for (int k = 0; k < 200; ++k) {
    Circuit a = cdbc::testing::random_sound_circuit(g), b = cdbc::testing::random_sound_circuit(g);
    Pairing p = cdbc::testing::random_partial_pairing(g, a, b);
    std::vector<std::pair<Id, Id>> l, r;
    for (std::size_t i = 0; i < p.size(); ++i) {
      l.emplace_back("s" + std::to_string(i), p[i].first);
      r.emplace_back("s" + std::to_string(i), p[i].second);
    }
    Span sp{embed_trivial(a, l), embed_trivial(b, r)};
    expect_square_commutes(sp, pushout(sp));
  }
}

TEST(Coproduct, Examples) {
  Cospan two = coproduct(unit_circuit(), unit_circuit());
  EXPECT_EQ(classify(two.result), CircuitClass::Trivial);
  EXPECT_EQ(two.result.vars().size(), 2u);
  Cospan nots = coproduct(fixtures::not_gate(), fixtures::not_gate());
  EXPECT_EQ(nots.result.units().size(), 2u);
  EXPECT_EQ(nots.result.invars().size(), 4u);
  EXPECT_TRUE(nots.result.has_var("par/L/v1"));
  EXPECT_TRUE(nots.result.has_var("par/R/v1"));
}

TEST(Coproduct, InjectionsMonoAndJointlySurjective) {
  Gen g(23);
  for (int k = 0; k < 300; ++k) {
    Circuit a = cdbc::testing::random_sound_circuit(g), b = cdbc::testing::random_sound_circuit(g);
    Cospan s = coproduct(a, b);
    EXPECT_EQ(s.result.vars().size(), a.vars().size() + b.vars().size());
    EXPECT_TRUE(is_mono(s.left_leg));
    EXPECT_TRUE(is_mono(s.right_leg));
    IdSet hit = s.left_leg.var_image();
    for (const auto& v : s.right_leg.var_image()) hit.insert(v);
    EXPECT_EQ(hit.size(), s.result.vars().size());
    std::set<TypeTag> sigma = a.sigma_set();
    sigma.insert(b.sigma_set().begin(), b.sigma_set().end());
    EXPECT_EQ(s.result.sigma_set(), sigma);
  }
}

TEST(Copair, RejectsForeignMaps) {
  Cospan s = coproduct(unit_circuit(), unit_circuit());
  auto f = identity(fixtures::not_gate());
  EXPECT_THROW(copair(s, f, f), CompositionError);
}

TEST(Isomorphism, Examples) {
  Circuit a = fixtures::and_gate();
  auto w = is_isomorphic(a, a);
  ASSERT_TRUE(w);
  EXPECT_TRUE(is_iso(*w));
  EXPECT_FALSE(is_isomorphic(parallel(unit_circuit(), unit_circuit()).circuit, unit_circuit()));
  EXPECT_FALSE(is_isomorphic(fixtures::nand2(), mk_primitive(2, 1, 1, 1)));
}

TEST(Isomorphism, ReflexiveAndSymmetric) {
  Gen g(24);
  for (int k = 0; k < 200; ++k) {
    Circuit c = cdbc::testing::random_sound_circuit(g);
    Circuit d = shuffle_names(g, c);
    auto w = is_isomorphic(c, d);
    ASSERT_TRUE(w);
    EXPECT_TRUE(is_iso(*w));
    auto back = is_isomorphic(d, c);
    ASSERT_TRUE(back);
    EXPECT_EQ(compose_morphisms(inverse(*w), *w), identity(c));
  }
}

TEST(Isomorphism, AgreesWithBruteForceOnSmallCircuits) {
  Gen g(25);
  int compared = 0, positives = 0;
  std::vector<Circuit> pool;
  while (pool.size() < 150) {
    if (auto c = random_small(g)) pool.push_back(*c);
  }
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const Circuit& a = pool[i];
    const Circuit b = g.coin() ? shuffle_names(g, a) : pool[g.range(0, pool.size() - 1)];
    const bool expect = brute_force_iso(a, b);
    EXPECT_EQ(is_isomorphic(a, b).has_value(), expect);
    ++compared;
    positives += expect;
  }
  EXPECT_EQ(compared, 150);
  EXPECT_GT(positives, 10);
  EXPECT_LT(positives, 150);
}
