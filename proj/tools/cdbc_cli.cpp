// Command-line front end for the circuit library.
//
// Exit codes: 0 ok, 1 validation/composition failure or usage error,
// 2 unreadable or malformed file, 3 non-Final run under --expect-final.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "cdbc/cdbc.hpp"

namespace fs = std::filesystem;
using namespace cdbc;

namespace {

enum Exit { kOk = 0, kInvalid = 1, kIo = 2, kNotFinal = 3 };

struct Options {
  std::string format = "text";
  bool json() const { return format == "json-lines"; }
};

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("io-error", "cannot write " + path);
  out << text;
}

Circuit load_circuit(const std::string& path) { return circuit_from_json(read_json_file(path)); }

// Paths inside wiring/morphism files are relative to the file itself.
std::string sibling(const std::string& file, const std::string& rel) {
  fs::path p(rel);
  return p.is_absolute() ? rel : (fs::path(file).parent_path() / p).string();
}

std::map<Id, Value> load_inputs(const std::string& path, const std::vector<std::string>& sets) {
  std::map<Id, Value> in;
  if (!path.empty()) in = values_from_json(read_json_file(path));
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw FormatError("bad-value", "--set expects var=value, got " + s);
    auto v = parse_value(s.substr(eq + 1));
    if (!v) throw FormatError("bad-value", "value of " + s.substr(0, eq) + " must be *, 0 or 1");
    in[s.substr(0, eq)] = *v;
  }
  return in;
}

std::uint64_t default_seed() {
  if (const char* s = std::getenv("CDBC_SEED")) return std::strtoull(s, nullptr, 10);
  return 0;
}

// ---- subcommands ------------------------------------------------------------

int cmd_validate(const Options& o, const std::string& file) {
  RawCircuit raw = raw_circuit_from_json(read_json_file(file));
  auto v = validate_circuit(raw);
  if (!v) {
    if (o.json()) {
      for (const auto& item : v.report().items())
        std::cout << Json{{"code", item.code}, {"detail", item.detail}, {"structural", item.structural}}.dump() << "\n";
    } else {
      std::cout << "invalid: " << v.report().summary() << "\n";
    }
    return kInvalid;
  }
  const Circuit& c = v.value();
  const bool sound = is_sound(c);
  if (o.json()) {
    std::cout << Json{{"valid", true}, {"sound", sound}, {"vars", c.vars().size()}, {"units", c.units().size()},
                      {"invars", c.invars()}, {"outvars", c.outvars()}, {"class", to_string(classify(c))}}
                     .dump()
              << "\n";
  } else {
    std::cout << "valid: " << c.vars().size() << " vars, " << c.units().size() << " units, "
              << (sound ? "sound" : "not sound") << "\n";
  }
  return kOk;
}

int cmd_classify(const Options& o, const std::string& file) {
  Circuit c = load_circuit(file);
  if (o.json()) std::cout << Json{{"class", to_string(classify(c))}}.dump() << "\n";
  else std::cout << to_string(classify(c)) << "\n";
  return kOk;
}

struct ComposeArgs {
  std::string op;
  std::vector<std::string> operands;
  std::string pairing, wiring, out, provenance;
  bool auto_pair = false;
};

IterationWiring load_wiring(const std::string& path) {
  Json j = read_json_file(path);
  detail::only_keys(j, {"entry", "body", "end", "exit", "before_body", "after_body"}, "wiring");
  auto part = [&](const char* role) {
    return load_circuit(sibling(path, detail::as_string(detail::require(j, role, "wiring"), role)));
  };
  return IterationWiring{part("entry"), part("body"), part("end"), part("exit"),
                         slots_from_json(detail::require(j, "before_body", "wiring"), "before_body"),
                         slots_from_json(detail::require(j, "after_body", "wiring"), "after_body")};
}

// {"src": apex file, "dst": circuit file, "vars": {...}, ...}
CircuitMorphism load_morphism(const std::string& path) {
  Json j = read_json_file(path);
  Circuit src = load_circuit(sibling(path, detail::as_string(detail::require(j, "src", "morphism"), "src")));
  Circuit dst = load_circuit(sibling(path, detail::as_string(detail::require(j, "dst", "morphism"), "dst")));
  return validate_morphism({src, dst, maps_from_json(j)}).value();
}

int cmd_compose(const Options& o, const ComposeArgs& a) {
  auto need = [&](std::size_t n) {
    if (a.operands.size() != n)
      throw CompositionError("operand-count", a.op + " takes " + std::to_string(n) + " operand file(s)");
  };
  auto build = [&]() -> Composite {
    if (a.op == "seq") {
      need(2);
      Circuit l = load_circuit(a.operands[0]), r = load_circuit(a.operands[1]);
      if (a.auto_pair == !a.pairing.empty())
        throw CompositionError("pairing-required", "seq needs exactly one of --pairing or --auto-pair");
      return sequence(l, r, a.auto_pair ? auto_pairing(l, r) : pairing_from_json(read_json_file(a.pairing)));
    } else if (a.op == "par") {
      need(2);
      return parallel(load_circuit(a.operands[0]), load_circuit(a.operands[1]));
    } else if (a.op == "branch") {
      need(2);
      if (a.pairing.empty()) throw CompositionError("pairing-required", "branch needs --pairing {in, out}");
      Json p = read_json_file(a.pairing);
      detail::only_keys(p, {"in", "out"}, "branch pairing");
      return branch(load_circuit(a.operands[0]), load_circuit(a.operands[1]),
                    pairing_from_json(detail::require(p, "in", "branch pairing")),
                    pairing_from_json(detail::require(p, "out", "branch pairing")));
    } else if (a.op == "iter-head" || a.op == "iter-tail") {
      need(0);
      if (a.wiring.empty()) throw CompositionError("wiring-required", a.op + " needs --wiring");
      IterationWiring w = load_wiring(a.wiring);
      return a.op == "iter-head" ? iterate_head(w) : iterate_tail(w);
    } else if (a.op == "pushout") {
      need(2);  // two morphism files sharing an apex
      CircuitMorphism l = load_morphism(a.operands[0]), r = load_morphism(a.operands[1]);
      Cospan co = pushout(Span{l, r});
      return Composite{co.result, {{"left", co.left_leg}, {"right", co.right_leg}}, false};
    } else {
      throw CompositionError("unknown-op", "unknown --op " + a.op);
    }
  };
  const Composite result = build();
  write_text(a.out, serialize(result.circuit));
  if (!a.provenance.empty()) write_text(a.provenance, dump(provenance_json(result)));
  if (!a.out.empty() && a.out != "-") {
    if (o.json())
      std::cout << Json{{"vars", result.circuit.vars().size()}, {"units", result.circuit.units().size()}}.dump() << "\n";
    else
      std::cout << a.op << ": " << result.circuit.vars().size() << " vars, " << result.circuit.units().size()
                << " units\n";
  }
  return kOk;
}

struct ExecArgs {
  std::string file, inputs, trace;
  std::vector<std::string> sets;
  std::uint64_t seed = 0;
  std::size_t max_steps = 10000, runs = 1;
  bool expect_final = false;
};

int cmd_exec(const Options& o, const ExecArgs& a) {
  Circuit c = load_circuit(a.file);
  Executor ex(c);
  State st = ex.initial_state(load_inputs(a.inputs, a.sets));
  if (a.runs > 1) {
    // Outcomes and which units fired, per run.
    std::map<std::string, std::size_t> outcomes, fired;
    bool all_final = true;
    for (std::size_t k = 0; k < a.runs; ++k) {
      Trace tr = ex.run(st, {a.seed + k, a.max_steps});
      all_final &= tr.outcome == Outcome::Final;
      ++outcomes[std::string(to_string(tr.outcome))];
      IdSet units;
      for (const auto& s : tr.steps) units.insert(s.ready.begin(), s.ready.end());
      std::string key;
      for (const auto& u : units) key += (key.empty() ? "" : ",") + u;
      ++fired[key];
    }
    if (o.json()) {
      std::cout << Json{{"runs", a.runs}, {"outcomes", outcomes}}.dump() << "\n";
      for (const auto& [units, n] : fired) std::cout << Json{{"fired", units}, {"count", n}}.dump() << "\n";
    } else {
      std::cout << "runs=" << a.runs;
      for (const auto& [name, n] : outcomes) std::cout << " " << name << "=" << n;
      std::cout << "\ndistinct fired-unit sets: " << fired.size() << "\n";
      for (const auto& [units, n] : fired) std::cout << "  " << n << " x {" << units << "}\n";
    }
    return a.expect_final && !all_final ? kNotFinal : kOk;
  }
  Trace tr = ex.run(st, {a.seed, a.max_steps});
  const std::string text = o.json() ? format_trace_json_lines(tr) : format_trace(tr);
  if (!a.trace.empty()) write_text(a.trace, text);
  if (o.json()) {
    if (a.trace.empty()) std::cout << text;
  } else {
    std::cout << "outcome=" << to_string(tr.outcome) << " steps=" << tr.transitions() << "\n";
    if (tr.conflict) std::cout << "conflict on " << *tr.conflict << "\n";
    std::cout << "final " << format_state(tr.last()) << "\n";
  }
  return a.expect_final && tr.outcome != Outcome::Final ? kNotFinal : kOk;
}

int cmd_iso(const Options& o, const std::string& a, const std::string& b, const std::string& witness) {
  auto w = is_isomorphic(load_circuit(a), load_circuit(b));
  if (o.json()) std::cout << Json{{"isomorphic", w.has_value()}}.dump() << "\n";
  else std::cout << (w ? "isomorphic" : "not isomorphic") << "\n";
  if (w && !witness.empty()) write_text(witness, dump(to_json(w->maps())));
  return w ? kOk : kInvalid;
}

int cmd_import_nand(const Options& o, const std::string& file, const std::string& out, const std::string& origin,
                    const std::string& assign, const std::string& inputs_out) {
  NandDag d = dag_from_json(read_json_file(file));
  ControlCircuit cc = to_control(d);
  write_text(out, serialize(cc.circuit));
  if (!origin.empty()) write_text(origin, dump(detail::id_map_json(cc.origin)));
  if (assign.empty()) return kOk;
  std::map<Id, bool> bits;
  for (const auto& [n, v] : values_from_json(read_json_file(assign))) {
    if (v == Value::Signal) throw FormatError("bad-value", "input " + n + " needs a bit");
    bits[n] = v == Value::B1;
  }
  if (!inputs_out.empty()) write_text(inputs_out, dump(to_json(lift_inputs(d, bits))));
  // Expected outputs by direct evaluation, keyed by output node.
  Json expect = Json::object();
  for (const auto& [n, b] : eval_dag(d, bits)) expect[n] = b ? "1" : "0";
  if (o.json()) std::cout << Json{{"eval", expect}}.dump() << "\n";
  else
    for (const auto& [n, b] : expect.items()) {
      std::cout << n << "=" << b.get<std::string>();
      for (auto e : d.in_edges(n)) std::cout << " " << ControlCircuit::bool_var(e);
      std::cout << "\n";
    }
  return kOk;
}

// {"<arity>": [bit, ...], ...}
int cmd_synth(const Options& o, const std::string& file, const std::string& dir, bool check) {
  Json j = read_json_file(file);
  if (!j.is_object()) throw FormatError("bad-type", "tables must be an object keyed by arity");
  std::map<std::size_t, TruthTable> tables;
  for (const auto& [k, t] : j.items()) {
    if (!t.is_array()) throw FormatError("bad-type", "table " + k + " must be an array");
    TruthTable tt;
    for (const auto& b : t) tt.push_back(b.is_boolean() ? b.get<bool>() : b.get<int>() != 0);
    tables[std::stoul(k)] = tt;
  }
  CircuitFamily fam = synth_family(tables);
  if (!dir.empty()) fs::create_directories(dir);
  bool ok = true;
  for (const auto& [k, m] : fam.members) {
    if (!dir.empty()) write_text((fs::path(dir) / ("arity-" + std::to_string(k) + ".json")).string(),
                                 serialize(m.control.circuit));
    std::size_t wrong = 0;
    if (check)
      for (std::uint64_t i = 0; i < m.table.size(); ++i) wrong += eval_member(m, i) != m.table[i];
    ok &= wrong == 0;
    if (o.json())
      std::cout << Json{{"arity", k}, {"vars", m.control.circuit.vars().size()},
                        {"units", m.control.circuit.units().size()}, {"mismatches", wrong}}
                       .dump()
                << "\n";
    else
      std::cout << "arity " << k << ": " << m.control.circuit.vars().size() << " vars, "
                << m.control.circuit.units().size() << " units" << (check ? wrong ? ", MISMATCH" : ", checked" : "")
                << "\n";
  }
  return ok ? kOk : kInvalid;
}

int cmd_fixtures(const Options& o, const std::string& action, const std::string& name, const std::string& out) {
  if (action == "list") {
    for (const auto& n : fixtures::names()) std::cout << n << "\n";
    return kOk;
  }
  if (action == "emit") {
    write_text(out, serialize(fixtures::by_name(name)));
    return kOk;
  }
  if (action == "flipflop-table") {
    std::vector<std::uint64_t> seeds(64);
    for (std::uint64_t k = 0; k < seeds.size(); ++k) seeds[k] = k;
    auto rows = fixtures::run_flipflop_table(fixtures::flipflop(), seeds);
    if (!o.json()) std::cout << "S R Q | Q' S' R'\n";
    for (const auto& r : rows) {
      if (o.json())
        std::cout << Json{{"S", r.s}, {"R", r.r}, {"Q", r.q}, {"Q_next", r.q_next}, {"S_next", r.s_next},
                          {"R_next", r.r_next}, {"seed", r.seed}}
                         .dump()
                  << "\n";
      else
        std::cout << r.s << " " << r.r << " " << r.q << " | " << r.q_next << "  " << r.s_next << "  " << r.r_next
                  << "\n";
    }
    return rows.size() == 8 ? kOk : kInvalid;
  }
  throw CompositionError("unknown-action", "fixtures action must be list, emit or flipflop-table");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Build, compose, run and export control-driven Boolean circuits"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"text", "json-lines"}));

  std::string file, file2, out, witness, origin, assign, inputs_out, action, name;
  bool check = false;

  auto* validate = app.add_subcommand("validate", "Check a circuit file and report soundness");
  validate->add_option("file", file)->required();
  auto* classify_cmd = app.add_subcommand("classify", "Print Trivial, Primitive, UnitCircuit or General");
  classify_cmd->add_option("file", file)->required();

  ComposeArgs ca;
  auto* compose = app.add_subcommand("compose", "Combine circuits with an operator");
  compose->add_option("--op", ca.op)->required()->check(
      CLI::IsMember({"seq", "par", "branch", "iter-head", "iter-tail", "pushout"}));
  compose->add_option("operands", ca.operands, "Circuit files (morphism files for pushout)");
  compose->add_option("--pairing", ca.pairing, "Pairing file: [[left, right], ...] or {in, out} for branch");
  compose->add_flag("--auto-pair", ca.auto_pair, "Pair by sorted tag order (non-canonical)");
  compose->add_option("--wiring", ca.wiring, "Iteration wiring file");
  compose->add_option("-o,--out", ca.out, "Result circuit file (default stdout)");
  compose->add_option("--provenance", ca.provenance, "Write the operand-to-result maps here");

  ExecArgs ea;
  ea.seed = default_seed();
  auto* exec = app.add_subcommand("exec", "Run a circuit from an input assignment");
  exec->add_option("file", ea.file)->required();
  exec->add_option("--inputs", ea.inputs, "JSON file {var: \"*\"|0|1}");
  exec->add_option("--set", ea.sets, "Inline input var=value, repeatable");
  exec->add_option("--seed", ea.seed, "Seed (default $CDBC_SEED or 0)");
  exec->add_option("--max-steps", ea.max_steps);
  exec->add_option("--trace", ea.trace, "Write the full trace here");
  exec->add_option("--runs", ea.runs, "Run K seeds starting at --seed and report statistics");
  exec->add_flag("--expect-final", ea.expect_final, "Exit 3 unless every run reaches Final");

  auto* iso = app.add_subcommand("iso", "Exit 0 when two circuits are isomorphic, 1 otherwise");
  iso->add_option("a", file)->required();
  iso->add_option("b", file2)->required();
  iso->add_option("--witness", witness, "Write the isomorphism's maps here");

  auto* import = app.add_subcommand("import-nand", "Transform a NAND DAG file into a circuit");
  import->add_option("file", file)->required();
  import->add_option("-o,--out", out);
  import->add_option("--origin", origin, "Write the element-to-edge/gate map here");
  import->add_option("--assign", assign, "Input bits {node: 0|1}; prints the expected outputs");
  import->add_option("--inputs-out", inputs_out, "With --assign, write the lifted initial state here");

  auto* synth = app.add_subcommand("synth-family", "Synthesize one circuit per truth table");
  synth->add_option("file", file, "JSON {arity: [bits]}")->required();
  synth->add_option("-o,--out-dir", out);
  synth->add_flag("--check", check, "Execute every row and compare with the table");

  auto* dot = app.add_subcommand("export-dot", "Render a circuit in Graphviz syntax");
  dot->add_option("file", file)->required();
  dot->add_option("-o,--out", out);

  auto* fix = app.add_subcommand("fixtures", "Built-in example circuits");
  fix->add_option("action", action, "list | emit | flipflop-table")->required();
  fix->add_option("name", name);
  fix->add_option("-o,--out", out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  }

  try {
    if (*validate) return cmd_validate(opt, file);
    if (*classify_cmd) return cmd_classify(opt, file);
    if (*compose) return cmd_compose(opt, ca);
    if (*exec) return cmd_exec(opt, ea);
    if (*iso) return cmd_iso(opt, file, file2, witness);
    if (*import) return cmd_import_nand(opt, file, out, origin, assign, inputs_out);
    if (*synth) return cmd_synth(opt, file, out, check);
    if (*dot) {
      write_text(out, export_dot(load_circuit(file)));
      return kOk;
    }
    if (*fix) return cmd_fixtures(opt, action, name, out);
  } catch (const FormatError& e) {
    std::cerr << "error[" << e.code() << "]: " << e.what() << "\n";
    return kIo;
  } catch (const Error& e) {
    std::cerr << "error[" << e.code() << "]: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  }
  return kInvalid;
}
