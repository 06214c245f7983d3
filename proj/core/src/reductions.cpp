#include "mixgap/reductions.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "mixgap/rng.hpp"

namespace mixgap {

const char* promise_kind_name(PromiseKind k) {
  switch (k) {
    case PromiseKind::Gptcs: return "GPTCS";
    case PromiseKind::Gptc: return "GPTC";
    case PromiseKind::Gtc: return "GTC";
  }
  return "?";
}

PromiseKind promise_kind_from_name(const std::string& name) {
  if (name == "GPTCS") return PromiseKind::Gptcs;
  if (name == "GPTC") return PromiseKind::Gptc;
  if (name == "GTC") return PromiseKind::Gtc;
  throw std::invalid_argument("unknown promise kind: " + name);
}

const TransitionMatrix& PromiseInstance::require_matrix() const {
  if (!matrix) throw std::logic_error("instance has no materialized matrix");
  return *matrix;
}

const TransitionMatrix& PromiseInstance::materialize_matrix(const ReachOptions& opts) {
  if (!matrix) {
    if (!circuit) throw std::invalid_argument("instance carries neither circuit nor matrix");
    auto space = std::make_shared<StateSpace>(reachable_states(*circuit, start_pattern, opts));
    matrix = TransitionMatrix::from_circuit(*circuit, std::move(space));
  }
  return *matrix;
}

uint32_t PromiseInstance::start_index() const {
  return require_matrix().space().require_index(start_pattern);
}

// ---------------------------------------------------------------------------
// sd_to_chain

Rational closed_form_distance(uint32_t m, uint64_t t, const Rational& delta_mu) {
  if (m < 3) throw std::invalid_argument("closed_form_distance: m must be at least 3");
  if (t < 1) throw std::invalid_argument("closed_form_distance: t must be at least 1");
  Rational decay = pow_rational(Rational(m - 2, m), static_cast<int64_t>(t - 1));
  return decay * delta_mu / 2;
}

SdChainGadget sd_to_chain(const SamplerCircuit& c, const SamplerCircuit& cp, uint32_t m,
                          uint64_t t, std::optional<uint64_t> t_max, const Rational& gap_c,
                          const Rational& delta) {
  if (m < 3) throw std::invalid_argument("sd_to_chain: m must be at least 3");
  if (c.out_bits != cp.out_bits)
    throw std::invalid_argument("sd_to_chain: sampler output widths differ");
  const uint32_t n = c.out_bits;
  uint32_t z_bits = 1;
  while ((1u << z_bits) < m) ++z_bits;

  SdChainGadget g;
  g.mu1 = circuit_distribution(c);
  g.mu2 = circuit_distribution(cp);
  g.delta_mu = tv_distance(g.mu1, g.mu2);

  // Reachable closure from (z=0, y=0).
  auto encode = [&](uint32_t z, uint64_t y) { return y | (static_cast<uint64_t>(z) << n); };
  std::vector<uint64_t> y_support;  // supp(mu1) u supp(mu2)
  for (uint64_t y = 0; y < g.mu1.mass.size(); ++y)
    if (g.mu1.mass[y] != 0 || g.mu2.mass[y] != 0) y_support.push_back(y);

  std::vector<uint64_t> patterns;
  patterns.push_back(encode(0, 0));
  bool zero_in_support =
      std::find(y_support.begin(), y_support.end(), 0) != y_support.end();
  for (uint32_t z = 0; z < m; ++z)
    for (uint64_t y : y_support) {
      if (z == 0 && y == 0) continue;  // start already placed
      patterns.push_back(encode(z, y));
    }
  if (!zero_in_support)  // states (z, 0^n) for z >= 1 stay unreachable
    ;                    // nothing to add: only the start carries y = 0^n
  auto space = std::make_shared<StateSpace>(n + z_bits, std::move(patterns));

  auto mu_of = [&](uint32_t z, uint64_t y) -> Rational {
    if (z == 0) return g.mu1.mass[y];
    if (z == 1) return g.mu2.mass[y];
    return 0;  // placeholder, unused
  };
  const size_t states = space->size();
  std::vector<std::vector<Rational>> rows(states, std::vector<Rational>(states, Rational(0)));
  Rational inv_m(1, m);
  for (size_t i = 0; i < states; ++i) {
    uint64_t pat = space->pattern(i);
    uint32_t z = static_cast<uint32_t>(pat >> n);
    uint64_t y = pat & ((1ULL << n) - 1);
    for (uint32_t z2 = 0; z2 < m; ++z2) {
      if (z <= 1) {
        for (uint64_t y2 : y_support) {
          Rational p = mu_of(z, y2);
          if (p == 0) continue;
          rows[i][space->require_index(encode(z2, y2))] += inv_m * p;
        }
      } else {
        rows[i][space->require_index(encode(z2, y))] += inv_m;
      }
    }
  }
  auto matrix = TransitionMatrix::from_rows(space, std::move(rows));

  g.pi.space = space;
  g.pi.mass.resize(states);
  for (size_t i = 0; i < states; ++i) {
    uint64_t pat = space->pattern(i);
    uint64_t y = pat & ((1ULL << n) - 1);
    g.pi.mass[i] = inv_m * (g.mu1.mass[y] + g.mu2.mass[y]) / 2;
  }

  PromiseInstance inst;
  inst.kind = PromiseKind::Gptcs;
  inst.matrix = std::move(matrix);
  inst.start_pattern = encode(0, 0);
  inst.t = t;
  inst.t_max = t_max;
  inst.gap_c = gap_c;
  inst.delta = delta;
  inst.gadget = "sd-chain";
  inst.gadget_params["m"] = std::to_string(m);
  inst.gadget_params["delta_mu"] = rational_string(g.delta_mu);

  // Exactly representable as a circuit when m is a power of two.
  if ((m & (m - 1)) == 0) {
    uint32_t block = std::max(c.in_bits, cp.in_bits);
    uint32_t state_w = n + z_bits;
    uint32_t rand_w = z_bits + block;
    CircuitBuilder b(state_w + rand_w);
    auto state_wire = [&](uint32_t i) { return i; };
    auto rand_wire = [&](uint32_t i) { return state_w + i; };

    std::vector<uint32_t> zw;
    for (uint32_t i = 0; i < z_bits; ++i) zw.push_back(state_wire(n + i));
    uint32_t sel0 = b.equals_const(zw, 0);
    uint32_t sel1 = b.equals_const(zw, 1);
    uint32_t hold = b.wand(b.wnot(sel0), b.wnot(sel1));

    auto splice = [&](const SamplerCircuit& s) {
      std::vector<uint32_t> wire_map(s.body.inputs() + s.body.gates().size());
      for (uint32_t i = 0; i < s.in_bits; ++i) wire_map[i] = rand_wire(z_bits + i);
      uint32_t w = s.in_bits;
      for (const Gate& gt : s.body.gates()) {
        uint32_t nw;
        switch (gt.op) {
          case GateOp::And: nw = b.wand(wire_map[gt.a], wire_map[gt.b]); break;
          case GateOp::Or: nw = b.wor(wire_map[gt.a], wire_map[gt.b]); break;
          case GateOp::Not: nw = b.wnot(wire_map[gt.a]); break;
          case GateOp::Xor: nw = b.wxor(wire_map[gt.a], wire_map[gt.b]); break;
          case GateOp::Const0: nw = b.constant(false); break;
          default: nw = b.constant(true); break;
        }
        wire_map[w++] = nw;
      }
      std::vector<uint32_t> outs;
      for (uint32_t o : s.body.outputs()) outs.push_back(wire_map[o]);
      return outs;
    };
    std::vector<uint32_t> yc = splice(c);
    std::vector<uint32_t> ycp = splice(cp);

    std::vector<uint32_t> outs(state_w);
    for (uint32_t bit = 0; bit < n; ++bit) {
      uint32_t v = b.wor(b.wand(sel0, yc[bit]), b.wand(sel1, ycp[bit]));
      outs[bit] = b.wor(v, b.wand(hold, state_wire(bit)));
    }
    for (uint32_t i = 0; i < z_bits; ++i) outs[n + i] = rand_wire(i);
    inst.circuit = ChainCircuit{state_w, rand_w, std::move(b).finish(std::move(outs))};
  }

  g.instance = std::move(inst);
  return g;
}

// ---------------------------------------------------------------------------
// CNF and the hypercube gadget

void CnfFormula::validate() const {
  if (variables == 0 || variables > 20)
    throw std::invalid_argument("cnf: variable count out of range");
  if (clauses.empty()) throw std::invalid_argument("cnf: no clauses");
  for (const auto& cl : clauses) {
    if (cl.empty()) throw std::invalid_argument("cnf: empty clause");
    for (int32_t lit : cl) {
      uint32_t v = static_cast<uint32_t>(lit < 0 ? -lit : lit);
      if (v == 0 || v > variables) throw std::invalid_argument("cnf: literal out of range");
    }
  }
}

bool CnfFormula::eval(uint64_t assignment) const {
  for (const auto& cl : clauses) {
    bool sat = false;
    for (int32_t lit : cl) {
      uint32_t v = static_cast<uint32_t>((lit < 0 ? -lit : lit) - 1);
      bool val = (assignment >> v) & 1;
      if (lit < 0 ? !val : val) {
        sat = true;
        break;
      }
    }
    if (!sat) return false;
  }
  return true;
}

uint64_t CnfFormula::count_satisfying() const {
  uint64_t count = 0;
  for (uint64_t a = 0; a < (1ULL << variables); ++a)
    if (eval(a)) ++count;
  return count;
}

std::optional<uint64_t> CnfFormula::first_satisfying() const {
  for (uint64_t a = 0; a < (1ULL << variables); ++a)
    if (eval(a)) return a;
  return std::nullopt;
}

PromiseInstance unsat_to_chain(const CnfFormula& psi, uint32_t d, const Rational& delta,
                               const Rational& gap_c) {
  psi.validate();
  if (d < 2) throw std::invalid_argument("unsat gadget: d must be at least 2");
  if (delta < 0 || delta >= Rational(1, 4))
    throw std::invalid_argument("unsat gadget: delta must lie in [0, 1/4)");
  const uint32_t n = psi.variables;
  if (n < 2) throw std::invalid_argument("unsat gadget: needs at least 2 variables");

  auto space = std::make_shared<StateSpace>(StateSpace::full_cube(n));
  std::vector<std::tuple<uint32_t, uint32_t, Rational>> edges;
  BigInt loop_sat = pow_bigint(n, d);
  for (uint32_t y = 0; y < (1u << n); ++y) {
    for (uint32_t b = 0; b < n; ++b) {
      uint32_t y2 = y ^ (1u << b);
      if (y < y2) edges.emplace_back(y, y2, Rational(1));
    }
    edges.emplace_back(y, y, psi.eval(y) ? Rational(loop_sat) : Rational(n));
  }
  auto matrix = TransitionMatrix::from_weights(space, WeightedGraph(space->size(), edges));

  double delta_d = to_double(delta);
  double t_real = n * (std::log(n) + std::log(4.0 / (1.0 - 4.0 * delta_d)));
  uint64_t t = static_cast<uint64_t>(std::ceil(t_real));
  BigInt t_max_big = 32 * pow_bigint(n, 2 * d + 1);
  if (t_max_big > BigInt(UINT64_MAX / 4))
    throw std::length_error("unsat gadget: t_max overflows the instance field");

  PromiseInstance inst;
  inst.kind = PromiseKind::Gptc;
  inst.matrix = std::move(matrix);
  inst.start_pattern = 0;
  inst.t = t;
  inst.t_max = t_max_big.convert_to<uint64_t>();
  inst.gap_c = gap_c;
  inst.delta = delta;
  inst.gadget = "unsat";
  inst.gadget_params["variables"] = std::to_string(n);
  inst.gadget_params["d"] = std::to_string(d);
  inst.gadget_params["clauses"] = std::to_string(psi.clauses.size());
  return inst;
}

// ---------------------------------------------------------------------------
// Toy machines

const ToyMachine::Rule& ToyMachine::rule(uint16_t q, uint8_t sym, bool at_left,
                                         bool at_right) const {
  size_t idx = ((static_cast<size_t>(q) * 2 + sym) * 2 + (at_left ? 1 : 0)) * 2 +
               (at_right ? 1 : 0);
  return rules.at(idx);
}

void ToyMachine::validate() const {
  if (num_states == 0 || tape_len == 0)
    throw std::invalid_argument("toy machine: empty control or tape");
  if (q_start >= num_states || q_acc >= num_states || q_rej >= num_states)
    throw std::invalid_argument("toy machine: designated state out of range");
  if (q_acc == q_rej || q_start == q_acc || q_start == q_rej)
    throw std::invalid_argument("toy machine: start/accept/reject must be distinct");
  if (rules.size() != static_cast<size_t>(num_states) * 8)
    throw std::invalid_argument("toy machine: rule table has the wrong size");
  for (const Rule& r : rules) {
    if (r.write > 1 || r.move < -1 || r.move > 1 || r.next >= num_states)
      throw std::invalid_argument("toy machine: malformed rule");
  }
  if (config_bits() > 20) throw std::length_error("toy machine: configuration space too wide");
}

uint32_t ToyMachine::head_bits() const {
  uint32_t b = 1;
  while ((1u << b) < tape_len) ++b;
  return b;
}

uint32_t ToyMachine::control_bits() const {
  uint32_t b = 1;
  while ((1u << b) < num_states) ++b;
  return b;
}

uint32_t ToyMachine::config_bits() const { return tape_len + head_bits() + control_bits(); }

namespace {

struct ConfigCodec {
  uint32_t tape_len, head_bits, control_bits;
  uint64_t encode(uint16_t q, uint32_t head, uint64_t tape) const {
    return tape | (static_cast<uint64_t>(head) << tape_len) |
           (static_cast<uint64_t>(q) << (tape_len + head_bits));
  }
  void decode(uint64_t cfg, uint16_t& q, uint32_t& head, uint64_t& tape) const {
    tape = cfg & ((1ULL << tape_len) - 1);
    head = static_cast<uint32_t>((cfg >> tape_len) & ((1ULL << head_bits) - 1));
    q = static_cast<uint16_t>(cfg >> (tape_len + head_bits));
  }
};

// One machine move; halting moves land on the canonical configuration.
uint64_t machine_step(const ToyMachine& m, const ConfigCodec& codec, uint64_t cfg) {
  uint16_t q;
  uint32_t head;
  uint64_t tape;
  codec.decode(cfg, q, head, tape);
  uint8_t sym = (tape >> head) & 1;
  const ToyMachine::Rule& r = m.rule(q, sym, head == 0, head + 1 == m.tape_len);
  uint64_t tape2 = (tape & ~(1ULL << head)) | (static_cast<uint64_t>(r.write) << head);
  int64_t h2 = static_cast<int64_t>(head) + r.move;
  if (h2 < 0) h2 = 0;
  if (h2 >= m.tape_len) h2 = m.tape_len - 1;
  if (r.next == m.q_acc || r.next == m.q_rej) return codec.encode(r.next, 0, 0);
  return codec.encode(r.next, static_cast<uint32_t>(h2), tape2);
}

}  // namespace

bool ToyMachine::accepts(uint64_t input_tape, uint64_t step_cap) const {
  validate();
  ConfigCodec codec{tape_len, head_bits(), control_bits()};
  uint64_t cfg = codec.encode(q_start, 0, input_tape);
  for (uint64_t s = 0; s < step_cap; ++s) {
    uint16_t q;
    uint32_t head;
    uint64_t tape;
    codec.decode(cfg, q, head, tape);
    if (q == q_acc) return true;
    if (q == q_rej) return false;
    cfg = machine_step(*this, codec, cfg);
  }
  throw std::runtime_error("toy machine: step cap exceeded (machine may not halt)");
}

namespace toy_machines {

namespace {
ToyMachine with_rules(std::string name, uint16_t num_states, uint16_t q_start,
                      uint16_t q_acc, uint16_t q_rej, uint32_t tape_len) {
  ToyMachine m;
  m.name = std::move(name);
  m.num_states = num_states;
  m.q_start = q_start;
  m.q_acc = q_acc;
  m.q_rej = q_rej;
  m.tape_len = tape_len;
  m.rules.assign(static_cast<size_t>(num_states) * 8, ToyMachine::Rule{0, 0, q_rej});
  return m;
}

void set_rule(ToyMachine& m, uint16_t q, uint8_t sym, bool at_left, bool at_right,
              ToyMachine::Rule r) {
  size_t idx = ((static_cast<size_t>(q) * 2 + sym) * 2 + (at_left ? 1 : 0)) * 2 +
               (at_right ? 1 : 0);
  m.rules.at(idx) = r;
}
}  // namespace

ToyMachine parity_checker(uint32_t tape_len) {
  // States 0/1 track the running parity while sweeping right.
  ToyMachine m = with_rules("parity" + std::to_string(tape_len), 4, 0, 2, 3, tape_len);
  for (uint16_t q = 0; q <= 1; ++q)
    for (uint8_t sym = 0; sym <= 1; ++sym) {
      uint16_t parity = q ^ sym;
      for (int left = 0; left <= 1; ++left) {
        set_rule(m, q, sym, left, false, {sym, +1, parity});
        set_rule(m, q, sym, left, true, {sym, 0, parity == 0 ? m.q_acc : m.q_rej});
      }
    }
  if (tape_len == 1) {  // at_left and at_right coincide
    for (uint16_t q = 0; q <= 1; ++q)
      for (uint8_t sym = 0; sym <= 1; ++sym)
        set_rule(m, q, sym, true, true, {sym, 0, (q ^ sym) == 0 ? m.q_acc : m.q_rej});
  }
  return m;
}

ToyMachine match_ends(uint32_t tape_len) {
  // State 0 reads the first cell; states 1/2 remember it; compare at the end.
  ToyMachine m = with_rules("match" + std::to_string(tape_len), 5, 0, 3, 4, tape_len);
  for (uint8_t sym = 0; sym <= 1; ++sym) {
    set_rule(m, 0, sym, true, false, {sym, +1, static_cast<uint16_t>(1 + sym)});
    set_rule(m, 0, sym, true, true, {sym, 0, m.q_acc});  // single cell matches itself
    for (uint16_t saw = 1; saw <= 2; ++saw) {
      uint8_t want = static_cast<uint8_t>(saw - 1);
      for (int left = 0; left <= 1; ++left) {
        set_rule(m, saw, sym, left, false, {sym, +1, saw});
        set_rule(m, saw, sym, left, true, {sym, 0, sym == want ? m.q_acc : m.q_rej});
      }
    }
  }
  return m;
}

ToyMachine single_step(uint32_t tape_len) {
  ToyMachine m = with_rules("step" + std::to_string(tape_len), 3, 0, 1, 2, tape_len);
  for (uint8_t sym = 0; sym <= 1; ++sym)
    for (int left = 0; left <= 1; ++left)
      for (int right = 0; right <= 1; ++right)
        set_rule(m, 0, sym, left, right, {sym, 0, m.q_acc});
  return m;
}

}  // namespace toy_machines

TmGadget tm_to_chain(const ToyMachine& machine, uint64_t input_tape, const Rational& gap_c,
                     const Rational& delta) {
  machine.validate();
  if (gap_c < 1) throw std::invalid_argument("tm gadget: c must be at least 1");
  if (delta < 0 || delta >= Rational(1, 4))
    throw std::invalid_argument("tm gadget: delta must lie in [0, 1/4)");
  if (machine.tape_len < 64 && input_tape >= (1ULL << machine.tape_len))
    throw std::invalid_argument("tm gadget: input wider than the tape");

  ConfigCodec codec{machine.tape_len, machine.head_bits(), machine.control_bits()};
  const uint32_t n = machine.config_bits();

  // All non-halting configurations plus the two canonical halting ones.
  std::vector<uint64_t> patterns;
  for (uint16_t q = 0; q < machine.num_states; ++q) {
    if (q == machine.q_acc || q == machine.q_rej) continue;
    for (uint32_t head = 0; head < machine.tape_len; ++head)
      for (uint64_t tape = 0; tape < (1ULL << machine.tape_len); ++tape)
        patterns.push_back(codec.encode(q, head, tape));
  }
  uint64_t acc_pat = codec.encode(machine.q_acc, 0, 0);
  uint64_t rej_pat = codec.encode(machine.q_rej, 0, 0);
  patterns.push_back(acc_pat);
  patterns.push_back(rej_pat);
  if (patterns.size() > (1u << 12))
    throw std::length_error("tm gadget: more than 2^12 configurations");
  auto space = std::make_shared<StateSpace>(n, patterns);

  // Machine-step edges (undirected, deduplicated).
  std::set<std::pair<uint32_t, uint32_t>> step_edges;
  for (uint64_t pat : patterns) {
    uint16_t q;
    uint32_t head;
    uint64_t tape;
    codec.decode(pat, q, head, tape);
    if (q == machine.q_acc || q == machine.q_rej) continue;
    uint64_t next = machine_step(machine, codec, pat);
    if (next == pat)
      throw std::invalid_argument("tm gadget: machine steps in place at a configuration");
    uint32_t a = space->require_index(pat), b = space->require_index(next);
    step_edges.emplace(std::min(a, b), std::max(a, b));
  }

  std::vector<uint32_t> degree(space->size(), 0);
  for (auto& [a, b] : step_edges) {
    ++degree[a];
    ++degree[b];
  }
  uint32_t max_deg = *std::max_element(degree.begin(), degree.end());
  uint32_t big_d = max_deg + 2;

  Rational one_minus = 1 - 4 * delta;
  BigInt pow3n = BigInt(1) << (3 * n);
  BigInt d3 = pow_bigint(big_d, 3);
  BigInt w = ceil_rational(Rational(1000 * d3 * pow3n) * gap_c / one_minus);
  BigInt t_big = ceil_rational(Rational(10 * d3 * pow3n) / one_minus);
  if (t_big > BigInt(1) << 62) throw std::length_error("tm gadget: t exceeds 2^62");

  uint32_t s_start = space->require_index(codec.encode(machine.q_start, 0, input_tape));
  uint32_t s_acc = space->require_index(acc_pat);
  uint32_t s_rej = space->require_index(rej_pat);

  std::vector<std::tuple<uint32_t, uint32_t, Rational>> edges;
  for (auto& [a, b] : step_edges) edges.emplace_back(a, b, Rational(w));
  {
    auto key = std::make_pair(std::min(s_rej, s_start), std::max(s_rej, s_start));
    if (s_rej != s_start && !step_edges.count(key)) edges.emplace_back(key.first, key.second, Rational(w));
  }
  edges.emplace_back(std::min(s_rej, s_acc), std::max(s_rej, s_acc), Rational(1));
  for (uint32_t v = 0; v < space->size(); ++v) edges.emplace_back(v, v, Rational(w));

  TmGadget g;
  g.degree_bound = big_d;
  g.w = w;
  g.s_start = s_start;
  g.s_acc = s_acc;
  g.s_rej = s_rej;
  g.machine_accepts = machine.accepts(input_tape);

  PromiseInstance inst;
  inst.kind = PromiseKind::Gtc;
  inst.matrix = TransitionMatrix::from_weights(space, WeightedGraph(space->size(), edges));
  inst.start_pattern = space->pattern(s_start);
  inst.t = t_big.convert_to<uint64_t>();
  inst.gap_c = gap_c;
  inst.delta = delta;
  inst.gadget = "tm";
  inst.gadget_params["machine"] = machine.name;
  inst.gadget_params["input"] = StateSpace::format_pattern(input_tape, machine.tape_len);
  inst.gadget_params["D"] = std::to_string(big_d);
  inst.gadget_params["w"] = w.str();
  inst.gadget_params["config_bits"] = std::to_string(n);
  g.instance = std::move(inst);
  return g;
}

// ---------------------------------------------------------------------------
// Dyadic rounding and circuit emission

uint32_t dyadic_bits_needed(const TransitionMatrix& p, uint32_t min_bits) {
  Rational p_min = 1;
  const ScaledMatrix& m = p.scaled();
  for (const BigInt& e : m.num)
    if (e != 0) p_min = std::min(p_min, Rational(e, m.den));
  uint32_t bits = min_bits;
  // Keep round(p 2^f) >= 16 for every nonzero entry.
  while (bits < 62 && Rational(BigInt(1) << bits) * p_min < 16) ++bits;
  return bits;
}

namespace {

// Round a stochastic row to f fractional bits; largest-remainder fixup keeps
// the sum exactly 2^f and preserves supports.
std::vector<BigInt> round_row(const ScaledMatrix& m, size_t i, uint32_t f) {
  const size_t n = m.n;
  BigInt target = BigInt(1) << f;
  std::vector<BigInt> out(n, 0);
  std::vector<std::pair<Rational, size_t>> rema;
  BigInt sum = 0;
  for (size_t j = 0; j < n; ++j) {
    const BigInt& e = m.at(i, j);
    if (e == 0) continue;
    // floor(e * 2^f / den), remainder fraction for the fixup.
    BigInt scaled = e << f;
    BigInt q = scaled / m.den;
    Rational frac = Rational(scaled - q * m.den, m.den);
    out[j] = q;
    sum += q;
    rema.emplace_back(frac, j);
  }
  BigInt leftover = target - sum;
  std::sort(rema.begin(), rema.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (size_t k = 0; leftover > 0; ++k, --leftover) out[rema.at(k % rema.size()).second] += 1;
  return out;
}

}  // namespace

TransitionMatrix rounded_chain(const TransitionMatrix& p, uint32_t frac_bits) {
  uint32_t f = frac_bits == 0 ? dyadic_bits_needed(p) : frac_bits;
  const size_t n = p.size();
  std::vector<std::vector<Rational>> rows(n, std::vector<Rational>(n, Rational(0)));
  BigInt den = BigInt(1) << f;
  for (size_t i = 0; i < n; ++i) {
    std::vector<BigInt> r = round_row(p.scaled(), i, f);
    for (size_t j = 0; j < n; ++j)
      if (r[j] != 0) rows[i][j] = Rational(r[j], den);
  }
  return TransitionMatrix::from_rows(p.space_ptr(), std::move(rows));
}

ChainCircuit compile_chain_circuit(const TransitionMatrix& p, uint32_t frac_bits) {
  uint32_t f = frac_bits == 0 ? dyadic_bits_needed(p) : frac_bits;
  if (f > 62) throw std::length_error("chain compiler: fractional width beyond 62 bits");
  const StateSpace& sp = p.space();
  const uint32_t width = sp.width();
  const size_t n = p.size();
  if (width + f > 64) throw std::length_error("chain compiler: state + randomness over 64 wires");

  CircuitBuilder b(width + f);
  std::vector<uint32_t> state_wires(width), rand_wires(f);
  for (uint32_t i = 0; i < width; ++i) state_wires[i] = i;
  for (uint32_t i = 0; i < f; ++i) rand_wires[i] = width + i;

  std::vector<std::vector<uint32_t>> bit_conds(width);
  std::vector<uint32_t> selectors;
  for (size_t i = 0; i < n; ++i) {
    uint32_t sel = b.equals_const(state_wires, sp.pattern(i));
    selectors.push_back(sel);
    std::vector<BigInt> row = round_row(p.scaled(), i, f);
    uint64_t cum = 0;
    for (size_t j = 0; j < n; ++j) {
      if (row[j] == 0) continue;
      uint64_t lo = cum;
      uint64_t hi = cum + row[j].convert_to<uint64_t>();
      cum = hi;
      uint32_t cond = sel;
      if (lo > 0) cond = b.wand(cond, b.wnot(b.less_const(rand_wires, lo)));
      if (hi < (1ULL << f)) cond = b.wand(cond, b.less_const(rand_wires, hi));
      uint64_t target = sp.pattern(j);
      for (uint32_t bit = 0; bit < width; ++bit)
        if ((target >> bit) & 1) bit_conds[bit].push_back(cond);
    }
  }
  // States outside the enumerated space stay put.
  uint32_t any_sel = b.wor_many(selectors);
  uint32_t outside = b.wnot(any_sel);
  std::vector<uint32_t> outs(width);
  for (uint32_t bit = 0; bit < width; ++bit) {
    uint32_t inside = b.wor_many(bit_conds[bit]);
    outs[bit] = b.wor(inside, b.wand(outside, state_wires[bit]));
  }
  return ChainCircuit{width, f, std::move(b).finish(std::move(outs))};
}

// ---------------------------------------------------------------------------
// Chain -> SD reduction

SamplerCircuit unroll_chain(const ChainCircuit& chain, uint64_t start, uint64_t steps) {
  const uint32_t n = chain.state_bits;
  const uint32_t m = chain.rand_bits;
  uint64_t in_width = std::max<uint64_t>(steps * m, 1);
  if (in_width > 64)
    throw std::length_error("unroll: " + std::to_string(steps) + " steps need " +
                            std::to_string(steps * m) + " input wires (cap 64)");
  CircuitBuilder b(static_cast<uint32_t>(in_width));
  uint32_t w_zero = b.constant(false);
  uint32_t w_one = b.constant(true);
  std::vector<uint32_t> state(n);
  for (uint32_t i = 0; i < n; ++i) state[i] = ((start >> i) & 1) ? w_one : w_zero;

  for (uint64_t s = 0; s < steps; ++s) {
    std::vector<uint32_t> wire_map(chain.body.inputs() + chain.body.gates().size());
    for (uint32_t i = 0; i < n; ++i) wire_map[i] = state[i];
    for (uint32_t i = 0; i < m; ++i) wire_map[n + i] = static_cast<uint32_t>(s * m + i);
    uint32_t w = n + m;
    for (const Gate& g : chain.body.gates()) {
      uint32_t nw;
      switch (g.op) {
        case GateOp::And: nw = b.wand(wire_map[g.a], wire_map[g.b]); break;
        case GateOp::Or: nw = b.wor(wire_map[g.a], wire_map[g.b]); break;
        case GateOp::Not: nw = b.wnot(wire_map[g.a]); break;
        case GateOp::Xor: nw = b.wxor(wire_map[g.a], wire_map[g.b]); break;
        case GateOp::Const0: nw = w_zero; break;
        default: nw = w_one; break;
      }
      wire_map[w++] = nw;
    }
    for (uint32_t i = 0; i < n; ++i) state[i] = wire_map[chain.body.outputs()[i]];
  }
  return SamplerCircuit{static_cast<uint32_t>(in_width), n, std::move(b).finish(std::move(state))};
}

SamplerCircuit pad_sampler_inputs(const SamplerCircuit& s, uint32_t in_bits) {
  if (in_bits < s.in_bits) throw std::invalid_argument("pad: target narrower than sampler");
  if (in_bits == s.in_bits) return s;
  return SamplerCircuit{in_bits, s.out_bits,
                        GateList(in_bits, s.body.gates(), s.body.outputs())};
}

SdFromChain gptcs_to_sd(PromiseInstance& instance, uint32_t k) {
  if (!instance.circuit)
    throw std::invalid_argument("gptcs_to_sd: instance must carry a chain circuit");
  if (k < 5) throw std::invalid_argument("gptcs_to_sd: k too small to be meaningful");
  const TransitionMatrix& p = instance.materialize_matrix();

  SdFromChain red;
  red.k = k;
  red.tau_used = tau(p, Rational(1, k), default_tau_cap(p));
  SamplerCircuit c_t = unroll_chain(*instance.circuit, instance.start_pattern, instance.t);
  SamplerCircuit c_tau =
      unroll_chain(*instance.circuit, instance.start_pattern, red.tau_used);
  uint32_t width = std::max(c_t.in_bits, c_tau.in_bits);
  red.c = pad_sampler_inputs(c_t, width);
  red.cp = pad_sampler_inputs(c_tau, width);

  uint32_t x = instance.start_index();
  Distribution start = Distribution::point(p.space_ptr(), x);
  red.dist_t = evolve(p, start, instance.t);
  red.dist_tau = evolve(p, start, red.tau_used);
  red.exact_distance = tv_distance(red.dist_t, red.dist_tau);

  red.s_thresh = Rational(1, 4) - instance.delta + Rational(1, k);
  red.c_thresh = Rational(1, 4) + instance.delta - Rational(1, k);
  red.szk_regime = red.c_thresh * red.c_thresh > red.s_thresh;
  return red;
}

// ---------------------------------------------------------------------------
// Composed round for worst-start convergence

GptcRound gptc_coam_round(const PromiseInstance& instance, uint64_t seed,
                          std::optional<std::pair<uint32_t, uint32_t>> forced_pair) {
  const TransitionMatrix& p = instance.require_matrix();
  const size_t n = p.size();
  if (n < 2) throw std::invalid_argument("gptc round: need at least two states");

  // Row distributions of P^t: exact powering for short horizons.
  std::vector<std::vector<double>> rows(n, std::vector<double>(n));
  std::vector<std::vector<Rational>> rows_exact;
  if (instance.t <= 64 && n <= 192) {
    ScaledMatrix pt = power(p.scaled(), instance.t);
    rows_exact.assign(n, std::vector<Rational>(n));
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) {
        rows_exact[i][j] = Rational(pt.at(i, j), pt.den);
        rows[i][j] = to_double(rows_exact[i][j]);
      }
  } else {
    Eigen::MatrixXd base = p.to_float();
    Eigen::MatrixXd acc = Eigen::MatrixXd::Identity(n, n);
    uint64_t t = instance.t;
    while (t != 0) {
      if (t & 1) acc = acc * base;
      t >>= 1;
      if (t != 0) base = base * base;
    }
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) rows[i][j] = acc(i, j);
  }

  GptcRound round;
  if (forced_pair) {
    round.pair_x = forced_pair->first;
    round.pair_y = forced_pair->second;
  } else {
    // Honest prover: the exact maximizing pair.
    double best = -1;
    for (uint32_t i = 0; i < n; ++i)
      for (uint32_t j = i + 1; j < n; ++j) {
        double d = tv_distance_float(rows[i], rows[j]);
        if (d > best) {
          best = d;
          round.pair_x = i;
          round.pair_y = j;
        }
      }
  }
  const auto& px = rows[round.pair_x];
  const auto& py = rows[round.pair_y];
  round.pair_distance = !rows_exact.empty()
                            ? [&] {
                                Rational s = 0;
                                for (size_t j = 0; j < n; ++j) {
                                  Rational d = rows_exact[round.pair_x][j] -
                                               rows_exact[round.pair_y][j];
                                  s += d < 0 ? -d : d;
                                }
                                return Rational(s / 2);
                              }()
                            : Rational(tv_distance_float(px, py));

  Stream64 rng(seed, /*stream=*/0x69f7);
  bool from_x = rng.next() & 1;
  const auto& src = from_x ? px : py;
  double u = rng.uniform();
  size_t z = n - 1;
  double cdf = 0;
  for (size_t j = 0; j < n; ++j) {
    cdf += src[j];
    if (u < cdf) {
      z = j;
      break;
    }
  }
  // Honest labeling: claim "x" when the x-row carries more mass at z.
  bool says_x = px[z] > py[z];
  round.accepted = says_x == from_x;
  return round;
}

// ---------------------------------------------------------------------------
// Exact decision oracle

const char* decision_name(Decision d) {
  switch (d) {
    case Decision::Yes: return "YES";
    case Decision::No: return "NO";
    case Decision::Gap: return "GAP";
    case Decision::PromiseViolated: return "PROMISE_VIOLATED";
  }
  return "?";
}

namespace {

// Exact powering cost grows with both the state count and the horizon;
// beyond this budget the search runs on doubles.
ArithMode pick_mode(const TransitionMatrix& p, uint64_t horizon) {
  if (p.size() <= 160 && horizon <= 8192) return ArithMode::Exact;
  return ArithMode::Float;
}

}  // namespace

DecideReport exact_decide(PromiseInstance& instance, std::optional<ArithMode> forced_mode) {
  const TransitionMatrix& p = instance.materialize_matrix();
  DecideReport rep;

  if (!check_ergodic(p)) {
    rep.decision = Decision::PromiseViolated;
    rep.reason = "chain is not ergodic";
    return rep;
  }

  Rational ct = instance.gap_c * instance.t;
  uint64_t ct_cap = floor_rational(ct).convert_to<uint64_t>() + 1;
  uint64_t horizon = std::max<uint64_t>({instance.t, ct_cap,
                                         instance.t_max ? *instance.t_max : 0});
  ArithMode mode = forced_mode ? *forced_mode : pick_mode(p, horizon);
  rep.mode = mode;

  if (instance.kind != PromiseKind::Gtc && instance.t_max) {
    try {
      rep.tau_quarter = tau(p, Rational(1, 4), *instance.t_max, mode);
    } catch (const UnresolvedError&) {
      rep.decision = Decision::PromiseViolated;
      rep.reason = "tau(1/4) exceeds t_max";
      return rep;
    }
  }

  Rational eps_lo = Rational(1, 4) - instance.delta;
  Rational eps_hi = Rational(1, 4) + instance.delta;
  bool from_start = instance.kind == PromiseKind::Gptcs;
  uint32_t x = from_start ? instance.start_index() : 0;

  auto tau_of = [&](const Rational& eps, uint64_t cap) -> std::optional<uint64_t> {
    try {
      return from_start ? tau_from(p, x, eps, cap, mode) : tau(p, eps, cap, mode);
    } catch (const UnresolvedError&) {
      return std::nullopt;
    }
  };

  std::optional<uint64_t> t_lo = tau_of(eps_lo, instance.t);
  rep.tau_low = t_lo;
  bool is_yes = t_lo && *t_lo < instance.t;

  std::optional<uint64_t> t_hi = tau_of(eps_hi, ct_cap);
  rep.tau_high = t_hi;
  bool is_no = !t_hi || Rational(*t_hi) > ct;

  if (is_yes && is_no) {
    rep.decision = Decision::Gap;
    rep.reason = "inconsistent thresholds (degenerate delta)";
    return rep;
  }
  if (is_yes) {
    rep.decision = Decision::Yes;
    rep.reason = "tau(1/4-delta) < t";
  } else if (is_no) {
    rep.decision = Decision::No;
    rep.reason = "tau(1/4+delta) > c t";
  } else {
    rep.decision = Decision::Gap;
    rep.reason = "neither the YES nor the NO condition holds";
  }
  return rep;
}

}  // namespace mixgap
