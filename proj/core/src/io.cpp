#include "mixgap/io.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

namespace mixgap::io {

namespace {

GateOp gate_op_from_name(const std::string& name) {
  if (name == "AND") return GateOp::And;
  if (name == "OR") return GateOp::Or;
  if (name == "NOT") return GateOp::Not;
  if (name == "XOR") return GateOp::Xor;
  if (name == "CONST0") return GateOp::Const0;
  if (name == "CONST1") return GateOp::Const1;
  throw std::invalid_argument("unknown gate op: " + name);
}

json gates_to_json(const GateList& body) {
  json gates = json::array();
  for (const Gate& g : body.gates()) {
    json jg;
    jg["op"] = gate_op_name(g.op);
    switch (g.op) {
      case GateOp::And:
      case GateOp::Or:
      case GateOp::Xor:
        jg["a"] = g.a;
        jg["b"] = g.b;
        break;
      case GateOp::Not:
        jg["a"] = g.a;
        break;
      default:
        break;
    }
    gates.push_back(jg);
  }
  return gates;
}

// Desugaring NAND / NOR / XNOR inserts extra wires, so every file wire index
// is remapped to its post-expansion position.
struct ParsedGates {
  std::vector<Gate> gates;
  std::vector<uint32_t> wire_map;  // file wire -> actual wire
};

ParsedGates gates_from_json(const json& jgates, uint32_t input_wires) {
  ParsedGates parsed;
  for (uint32_t i = 0; i < input_wires; ++i) parsed.wire_map.push_back(i);
  uint32_t next = input_wires;
  auto remap = [&](uint32_t w) {
    if (w >= parsed.wire_map.size())
      throw std::invalid_argument("circuit file: gate input references a later wire");
    return parsed.wire_map[w];
  };
  for (const auto& jg : jgates) {
    std::string op = jg.at("op").get<std::string>();
    uint32_t a = jg.contains("a") ? jg.at("a").get<uint32_t>() : 0;
    uint32_t b = jg.contains("b") ? jg.at("b").get<uint32_t>() : 0;
    if (op == "NAND" || op == "NOR" || op == "XNOR") {
      GateOp base = op == "NAND" ? GateOp::And : op == "NOR" ? GateOp::Or : GateOp::Xor;
      parsed.gates.push_back(Gate{base, remap(a), remap(b)});
      parsed.gates.push_back(Gate{GateOp::Not, next, 0});
      parsed.wire_map.push_back(next + 1);
      next += 2;
      continue;
    }
    GateOp g = gate_op_from_name(op);
    parsed.gates.push_back(Gate{g, remap(a), remap(b)});
    parsed.wire_map.push_back(next);
    ++next;
  }
  return parsed;
}

std::vector<uint32_t> outputs_from_json(const json& j, const ParsedGates& parsed) {
  std::vector<uint32_t> outs;
  for (const auto& o : j) {
    uint32_t w = o.get<uint32_t>();
    if (w >= parsed.wire_map.size())
      throw std::invalid_argument("circuit file: output references invalid wire");
    outs.push_back(parsed.wire_map[w]);
  }
  return outs;
}

}  // namespace

json chain_circuit_to_json(const ChainCircuit& c) {
  json j;
  j["n"] = c.state_bits;
  j["m"] = c.rand_bits;
  j["gates"] = gates_to_json(c.body);
  j["outputs"] = c.body.outputs();
  return j;
}

ChainCircuit chain_circuit_from_json(const json& j) {
  if (!j.contains("n") || !j.contains("m") || !j.contains("gates") || !j.contains("outputs"))
    throw std::invalid_argument("circuit file: requires fields n, m, gates, outputs");
  uint32_t n = j.at("n").get<uint32_t>();
  uint32_t m = j.at("m").get<uint32_t>();
  ParsedGates parsed = gates_from_json(j.at("gates"), n + m);
  std::vector<uint32_t> outs = outputs_from_json(j.at("outputs"), parsed);
  return make_chain_circuit(n, m, std::move(parsed.gates), std::move(outs));
}

json sampler_to_json(const SamplerCircuit& c) {
  json j;
  j["in"] = c.in_bits;
  j["out"] = c.out_bits;
  j["gates"] = gates_to_json(c.body);
  j["outputs"] = c.body.outputs();
  return j;
}

SamplerCircuit sampler_from_json(const json& j) {
  if (!j.contains("in") || !j.contains("out") || !j.contains("gates") || !j.contains("outputs"))
    throw std::invalid_argument("sampler file: requires fields in, out, gates, outputs");
  uint32_t in = j.at("in").get<uint32_t>();
  uint32_t out = j.at("out").get<uint32_t>();
  ParsedGates parsed = gates_from_json(j.at("gates"), in);
  std::vector<uint32_t> outs = outputs_from_json(j.at("outputs"), parsed);
  return make_sampler_circuit(in, out, std::move(parsed.gates), std::move(outs));
}

json write_u64(uint64_t v) {
  if (v <= (1ULL << 53)) return json(v);
  return json(std::to_string(v));
}

uint64_t read_u64(const json& j, const char* field) {
  const json& v = j.at(field);
  if (v.is_number_unsigned()) return v.get<uint64_t>();
  if (v.is_string()) return std::stoull(v.get<std::string>());
  throw std::invalid_argument(std::string("field ") + field + " must be an integer");
}

Rational read_rational(const json& j) {
  if (j.is_number_unsigned()) return Rational(j.get<uint64_t>());
  if (j.is_number_integer()) return Rational(j.get<int64_t>());
  if (j.is_string()) return parse_rational(j.get<std::string>());
  throw std::invalid_argument("expected an integer or a rational string");
}

namespace {

json bigint_json(const BigInt& v) {
  if (v >= 0 && v <= BigInt(1) << 53) return json(v.convert_to<uint64_t>());
  return json(v.str());
}

BigInt bigint_from_json(const json& j) {
  if (j.is_number_unsigned()) return BigInt(j.get<uint64_t>());
  if (j.is_number_integer()) return BigInt(j.get<int64_t>());
  if (j.is_string()) return BigInt(j.get<std::string>());
  throw std::invalid_argument("expected an integer or integer string");
}

}  // namespace

json matrix_to_json(const TransitionMatrix& m) {
  json j;
  json states = json::array();
  for (size_t i = 0; i < m.size(); ++i) states.push_back(m.space().pattern_string(i));
  j["states"] = states;
  if (m.has_weights()) {
    json weights = json::array();
    for (const auto& [a, b, w] : m.weights().edges()) {
      json e = json::array();
      e.push_back(m.space().pattern_string(a));
      e.push_back(m.space().pattern_string(b));
      e.push_back(rational_string(w));
      weights.push_back(e);
    }
    j["weights"] = weights;
  } else {
    json rows = json::array();
    const ScaledMatrix& s = m.scaled();
    for (size_t i = 0; i < m.size(); ++i) {
      json row = json::array();
      for (size_t k = 0; k < m.size(); ++k) {
        json entry = json::array();
        entry.push_back(bigint_json(s.at(i, k)));
        entry.push_back(bigint_json(s.den));
        row.push_back(entry);
      }
      rows.push_back(row);
    }
    j["rows"] = rows;
  }
  return j;
}

TransitionMatrix matrix_from_json(const json& j) {
  if (!j.contains("states"))
    throw std::invalid_argument("matrix file: missing field states");
  const json& jstates = j.at("states");
  if (jstates.empty()) throw std::invalid_argument("matrix file: empty state list");
  uint32_t width = static_cast<uint32_t>(jstates.at(0).get<std::string>().size());
  std::vector<uint64_t> patterns;
  for (const auto& s : jstates)
    patterns.push_back(StateSpace::parse_pattern(s.get<std::string>(), width));
  auto space = std::make_shared<StateSpace>(width, std::move(patterns));

  if (j.contains("weights")) {
    std::vector<std::tuple<uint32_t, uint32_t, Rational>> edges;
    for (const auto& e : j.at("weights")) {
      if (!e.is_array() || e.size() != 3)
        throw std::invalid_argument("matrix file: weight entries are [x, y, w]");
      uint32_t a = space->require_index(
          StateSpace::parse_pattern(e.at(0).get<std::string>(), width));
      uint32_t b = space->require_index(
          StateSpace::parse_pattern(e.at(1).get<std::string>(), width));
      edges.emplace_back(a, b, read_rational(e.at(2)));
    }
    return TransitionMatrix::from_weights(space, WeightedGraph(space->size(), edges));
  }
  if (!j.contains("rows"))
    throw std::invalid_argument("matrix file: requires rows or weights");
  const json& jrows = j.at("rows");
  std::vector<std::vector<Rational>> rows;
  for (const auto& jrow : jrows) {
    std::vector<Rational> row;
    for (const auto& e : jrow) {
      if (!e.is_array() || e.size() != 2)
        throw std::invalid_argument("matrix file: row entries are [numerator, denominator]");
      BigInt num = bigint_from_json(e.at(0));
      BigInt den = bigint_from_json(e.at(1));
      if (den <= 0) throw std::invalid_argument("matrix file: denominator must be positive");
      row.emplace_back(num, den);
    }
    rows.push_back(std::move(row));
  }
  return TransitionMatrix::from_rows(space, std::move(rows));
}

json instance_to_json(const PromiseInstance& inst) {
  json j;
  j["kind"] = promise_kind_name(inst.kind);
  json chain;
  if (inst.circuit) chain["circuit"] = chain_circuit_to_json(*inst.circuit);
  if (inst.matrix) chain["matrix"] = matrix_to_json(*inst.matrix);
  j["chain"] = chain;
  uint32_t width = inst.matrix ? inst.matrix->space().width()
                               : inst.circuit->state_bits;
  j["x"] = StateSpace::format_pattern(inst.start_pattern, width);
  j["t"] = write_u64(inst.t);
  if (inst.t_max) j["t_max"] = write_u64(*inst.t_max);
  j["c"] = rational_string(inst.gap_c);
  j["delta"] = rational_string(inst.delta);
  json prov;
  prov["gadget"] = inst.gadget;
  json params;
  for (const auto& [k, v] : inst.gadget_params) params[k] = v;
  prov["params"] = params;
  j["provenance"] = prov;
  return j;
}

PromiseInstance instance_from_json(const json& j) {
  PromiseInstance inst;
  inst.kind = promise_kind_from_name(j.at("kind").get<std::string>());
  if (!j.contains("chain"))
    throw std::invalid_argument("instance file: missing field chain");
  const json& chain = j.at("chain");
  if (chain.contains("circuit")) inst.circuit = chain_circuit_from_json(chain.at("circuit"));
  if (chain.contains("matrix")) {
    inst.matrix = matrix_from_json(chain.at("matrix"));
    if (inst.circuit && !inst.matrix->has_weights()) {
      // A chain with a circuit form can only hold dyadic probabilities.
      const ScaledMatrix& s = inst.matrix->scaled();
      if (!is_dyadic(Rational(1, s.den)))
        throw std::invalid_argument(
            "instance file: matrix entries with denominator " + s.den.str() +
            " are not dyadic; a circuit-backed chain needs denominators 2^m");
    }
  }
  if (!inst.circuit && !inst.matrix)
    throw std::invalid_argument("instance file: chain needs a circuit or a matrix");

  uint32_t width = inst.matrix ? inst.matrix->space().width() : inst.circuit->state_bits;
  inst.start_pattern = StateSpace::parse_pattern(j.at("x").get<std::string>(), width);
  inst.t = read_u64(j, "t");
  if (inst.kind != PromiseKind::Gtc) {
    if (!j.contains("t_max"))
      throw std::invalid_argument(std::string("instance file: ") +
                                  promise_kind_name(inst.kind) + " requires t_max");
    inst.t_max = read_u64(j, "t_max");
  } else if (j.contains("t_max")) {
    inst.t_max = read_u64(j, "t_max");
  }
  inst.gap_c = read_rational(j.at("c"));
  inst.delta = read_rational(j.at("delta"));
  if (inst.gap_c < 1) throw std::invalid_argument("instance file: c must be at least 1");
  if (inst.delta < 0 || inst.delta >= Rational(1, 4))
    throw std::invalid_argument("instance file: delta must lie in [0, 1/4)");
  if (j.contains("provenance")) {
    const json& prov = j.at("provenance");
    inst.gadget = prov.value("gadget", "");
    if (prov.contains("params"))
      for (auto it = prov.at("params").begin(); it != prov.at("params").end(); ++it)
        inst.gadget_params[it.key()] = it.value().get<std::string>();
  }
  return inst;
}

json number_json(const Rational& v) {
  json j;
  j["value"] = decimal15(v);
  j["exact"] = rational_string(v);
  return j;
}

json number_json(double v) {
  char buf[64];
  snprintf(buf, sizeof buf, "%.15g", v);
  json j;
  j["value"] = std::string(buf);
  return j;
}

std::string canonical_dump(const json& j) { return j.dump(2) + "\n"; }

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  return j;
}

void store_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << canonical_dump(j);
}

}  // namespace mixgap::io
