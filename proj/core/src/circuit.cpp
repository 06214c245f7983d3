#include "mixgap/circuit.hpp"

#include <stdexcept>

namespace mixgap {

const char* gate_op_name(GateOp op) {
  switch (op) {
    case GateOp::And: return "AND";
    case GateOp::Or: return "OR";
    case GateOp::Not: return "NOT";
    case GateOp::Xor: return "XOR";
    case GateOp::Const0: return "CONST0";
    case GateOp::Const1: return "CONST1";
  }
  return "?";
}

namespace {

bool gate_is_binary(GateOp op) {
  return op == GateOp::And || op == GateOp::Or || op == GateOp::Xor;
}

void validate(uint32_t inputs, const std::vector<Gate>& gates,
              const std::vector<uint32_t>& outputs) {
  if (inputs > 64) throw std::invalid_argument("circuit: more than 64 input wires");
  if (outputs.size() > 64) throw std::invalid_argument("circuit: more than 64 output bits");
  uint32_t wire = inputs;
  for (const Gate& g : gates) {
    if (gate_is_binary(g.op)) {
      if (g.a >= wire || g.b >= wire)
        throw std::invalid_argument("circuit: gate input references a later wire");
    } else if (g.op == GateOp::Not) {
      if (g.a >= wire)
        throw std::invalid_argument("circuit: gate input references a later wire");
    }
    ++wire;
  }
  for (uint32_t o : outputs)
    if (o >= wire) throw std::invalid_argument("circuit: output references invalid wire");
}

}  // namespace

GateList::GateList(uint32_t inputs, std::vector<Gate> gates, std::vector<uint32_t> outputs)
    : inputs_(inputs), gates_(std::move(gates)), outputs_(std::move(outputs)) {
  validate(inputs_, gates_, outputs_);
}

uint64_t GateList::eval(uint64_t input) const {
  // Wire values live in a flat bit vector; cheap for the sizes we run.
  thread_local std::vector<uint8_t> vals;
  vals.assign(inputs_ + gates_.size(), 0);
  for (uint32_t i = 0; i < inputs_; ++i) vals[i] = (input >> i) & 1;
  uint32_t w = inputs_;
  for (const Gate& g : gates_) {
    switch (g.op) {
      case GateOp::And: vals[w] = vals[g.a] & vals[g.b]; break;
      case GateOp::Or: vals[w] = vals[g.a] | vals[g.b]; break;
      case GateOp::Not: vals[w] = vals[g.a] ^ 1; break;
      case GateOp::Xor: vals[w] = vals[g.a] ^ vals[g.b]; break;
      case GateOp::Const0: vals[w] = 0; break;
      case GateOp::Const1: vals[w] = 1; break;
    }
    ++w;
  }
  uint64_t out = 0;
  for (size_t i = 0; i < outputs_.size(); ++i)
    out |= static_cast<uint64_t>(vals[outputs_[i]]) << i;
  return out;
}

void GateList::eval_batch(std::span<const uint64_t> in, std::span<uint64_t> out,
                          std::vector<uint64_t>& scratch) const {
  if (in.size() != inputs_ || out.size() != outputs_.size())
    throw std::invalid_argument("eval_batch: width mismatch");
  scratch.resize(inputs_ + gates_.size());
  uint64_t* v = scratch.data();
  for (uint32_t i = 0; i < inputs_; ++i) v[i] = in[i];
  uint32_t w = inputs_;
  for (const Gate& g : gates_) {
    switch (g.op) {
      case GateOp::And: v[w] = v[g.a] & v[g.b]; break;
      case GateOp::Or: v[w] = v[g.a] | v[g.b]; break;
      case GateOp::Not: v[w] = ~v[g.a]; break;
      case GateOp::Xor: v[w] = v[g.a] ^ v[g.b]; break;
      case GateOp::Const0: v[w] = 0; break;
      case GateOp::Const1: v[w] = ~0ULL; break;
    }
    ++w;
  }
  for (size_t i = 0; i < outputs_.size(); ++i) out[i] = v[outputs_[i]];
}

std::vector<uint64_t> GateList::truth_table(uint32_t cap_bits) const {
  if (inputs_ > cap_bits)
    throw std::length_error("truth_table: input width " + std::to_string(inputs_) +
                            " exceeds cap " + std::to_string(cap_bits));
  const uint64_t total = 1ULL << inputs_;
  std::vector<uint64_t> table(total);
  std::vector<uint64_t> in(inputs_), out(outputs_.size()), scratch;

  // Lane l of block `base` is input base+l; bits 0..5 of the lane index have
  // fixed 64-bit patterns, higher bits are constant within a block.
  static constexpr uint64_t kLanePattern[6] = {
      0xaaaaaaaaaaaaaaaaULL, 0xccccccccccccccccULL, 0xf0f0f0f0f0f0f0f0ULL,
      0xff00ff00ff00ff00ULL, 0xffff0000ffff0000ULL, 0xffffffff00000000ULL};

  for (uint64_t base = 0; base < total; base += 64) {
    for (uint32_t b = 0; b < inputs_; ++b) {
      if (b < 6)
        in[b] = kLanePattern[b];
      else
        in[b] = ((base >> b) & 1) ? ~0ULL : 0;
    }
    eval_batch(in, out, scratch);
    uint64_t lanes = total - base < 64 ? total - base : 64;
    for (uint64_t l = 0; l < lanes; ++l) {
      uint64_t y = 0;
      for (size_t i = 0; i < out.size(); ++i) y |= ((out[i] >> l) & 1) << i;
      table[base + l] = y;
    }
  }
  return table;
}

uint64_t ChainCircuit::eval(uint64_t state, uint64_t randomness) const {
  if (state_bits < 64 && state >= (1ULL << state_bits))
    throw std::invalid_argument("chain eval: state wider than n bits");
  if (rand_bits < 64 && randomness >= (1ULL << rand_bits))
    throw std::invalid_argument("chain eval: randomness wider than m bits");
  return body.eval(state | (randomness << state_bits));
}

ChainCircuit make_chain_circuit(uint32_t state_bits, uint32_t rand_bits,
                                std::vector<Gate> gates, std::vector<uint32_t> outputs) {
  if (outputs.size() != state_bits)
    throw std::invalid_argument("chain circuit: outputs must have n wires");
  return ChainCircuit{state_bits, rand_bits,
                      GateList(state_bits + rand_bits, std::move(gates), std::move(outputs))};
}

SamplerCircuit make_sampler_circuit(uint32_t in_bits, uint32_t out_bits,
                                    std::vector<Gate> gates, std::vector<uint32_t> outputs) {
  if (outputs.size() != out_bits)
    throw std::invalid_argument("sampler circuit: outputs must have out_bits wires");
  return SamplerCircuit{in_bits, out_bits,
                        GateList(in_bits, std::move(gates), std::move(outputs))};
}

uint32_t CircuitBuilder::push(GateOp op, uint32_t a, uint32_t b) {
  gates_.push_back(Gate{op, a, b});
  return next_wire_++;
}

uint32_t CircuitBuilder::constant(bool v) {
  return push(v ? GateOp::Const1 : GateOp::Const0, 0, 0);
}
uint32_t CircuitBuilder::wand(uint32_t a, uint32_t b) { return push(GateOp::And, a, b); }
uint32_t CircuitBuilder::wor(uint32_t a, uint32_t b) { return push(GateOp::Or, a, b); }
uint32_t CircuitBuilder::wnot(uint32_t a) { return push(GateOp::Not, a, 0); }
uint32_t CircuitBuilder::wxor(uint32_t a, uint32_t b) { return push(GateOp::Xor, a, b); }

uint32_t CircuitBuilder::wor_many(std::span<const uint32_t> ws) {
  if (ws.empty()) return constant(false);
  std::vector<uint32_t> level(ws.begin(), ws.end());
  while (level.size() > 1) {
    std::vector<uint32_t> next;
    for (size_t i = 0; i + 1 < level.size(); i += 2) next.push_back(wor(level[i], level[i + 1]));
    if (level.size() & 1) next.push_back(level.back());
    level = std::move(next);
  }
  return level[0];
}

uint32_t CircuitBuilder::wand_many(std::span<const uint32_t> ws) {
  if (ws.empty()) return constant(true);
  std::vector<uint32_t> level(ws.begin(), ws.end());
  while (level.size() > 1) {
    std::vector<uint32_t> next;
    for (size_t i = 0; i + 1 < level.size(); i += 2) next.push_back(wand(level[i], level[i + 1]));
    if (level.size() & 1) next.push_back(level.back());
    level = std::move(next);
  }
  return level[0];
}

uint32_t CircuitBuilder::equals_const(std::span<const uint32_t> ws, uint64_t value) {
  std::vector<uint32_t> terms;
  terms.reserve(ws.size());
  for (size_t i = 0; i < ws.size(); ++i) {
    bool bit = (value >> i) & 1;
    terms.push_back(bit ? ws[i] : wnot(ws[i]));
  }
  return wand_many(terms);
}

uint32_t CircuitBuilder::less_const(std::span<const uint32_t> ws, uint64_t value) {
  // MSB-first scan: lt |= eq_prefix & ~w_i at positions where value has a 1.
  uint32_t lt = constant(false);
  uint32_t eq = constant(true);
  for (size_t i = ws.size(); i-- > 0;) {
    bool bit = (value >> i) & 1;
    if (bit) lt = wor(lt, wand(eq, wnot(ws[i])));
    uint32_t match = bit ? ws[i] : wnot(ws[i]);
    eq = wand(eq, match);
  }
  return lt;
}

uint32_t CircuitBuilder::mux(uint32_t sel, uint32_t a, uint32_t b) {
  return wor(wand(sel, a), wand(wnot(sel), b));
}

GateList CircuitBuilder::finish(std::vector<uint32_t> outputs) && {
  return GateList(inputs_, std::move(gates_), std::move(outputs));
}

void transpose64(uint64_t m[64]) {
  // Hacker's Delight 7-3.
  uint64_t mask = 0x00000000ffffffffULL;
  for (int j = 32; j != 0; j >>= 1, mask ^= mask << j) {
    for (int k = 0; k < 64; k = (k + j + 1) & ~j) {
      uint64_t t = (m[k] ^ (m[k + j] >> j)) & mask;
      m[k] ^= t;
      m[k + j] ^= t << j;
    }
  }
}

namespace circuits {

ChainCircuit identity(uint32_t n, uint32_t m) {
  std::vector<uint32_t> outs(n);
  for (uint32_t i = 0; i < n; ++i) outs[i] = i;
  return make_chain_circuit(n, m, {}, std::move(outs));
}

ChainCircuit constant_zero(uint32_t n, uint32_t m) {
  CircuitBuilder b(n + m);
  uint32_t zero = b.constant(false);
  return ChainCircuit{n, m, std::move(b).finish(std::vector<uint32_t>(n, zero))};
}

ChainCircuit xor_walk() {
  return make_chain_circuit(1, 1, {Gate{GateOp::Xor, 0, 1}}, {2});
}

ChainCircuit and_walk() {
  return make_chain_circuit(1, 1, {Gate{GateOp::And, 0, 1}}, {2});
}

ChainCircuit lazy_cube_walk(uint32_t k) {
  if (k == 0) throw std::invalid_argument("lazy_cube_walk: k must be positive");
  uint32_t sel_bits = 0;
  while ((1u << sel_bits) < k) ++sel_bits;
  if (sel_bits == 0) sel_bits = 1;
  uint32_t m = sel_bits + 1;
  CircuitBuilder b(k + m);
  std::vector<uint32_t> sel(sel_bits);
  for (uint32_t i = 0; i < sel_bits; ++i) sel[i] = k + i;
  uint32_t coin = k + sel_bits;
  std::vector<uint32_t> outs(k);
  for (uint32_t i = 0; i < k; ++i) {
    uint32_t hit = b.equals_const(sel, i);
    outs[i] = b.wxor(i, b.wand(hit, coin));
  }
  return ChainCircuit{k, m, std::move(b).finish(std::move(outs))};
}

SamplerCircuit uniform_sampler(uint32_t n) {
  std::vector<uint32_t> outs(n);
  for (uint32_t i = 0; i < n; ++i) outs[i] = i;
  return make_sampler_circuit(n, n, {}, std::move(outs));
}

SamplerCircuit constant_sampler(uint32_t n, uint64_t value) {
  CircuitBuilder b(n);
  uint32_t zero = b.constant(false);
  uint32_t one = b.constant(true);
  std::vector<uint32_t> outs(n);
  for (uint32_t i = 0; i < n; ++i) outs[i] = ((value >> i) & 1) ? one : zero;
  return SamplerCircuit{n, n, std::move(b).finish(std::move(outs))};
}

}  // namespace circuits

}  // namespace mixgap
