#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mixgap {

enum class GateOp : uint8_t { And, Or, Not, Xor, Const0, Const1 };

const char* gate_op_name(GateOp op);

struct Gate {
  GateOp op;
  uint32_t a = 0;  // input wire (unused for consts)
  uint32_t b = 0;  // second input wire (And/Or/Xor only)
};

// Straight-line boolean program. Wires 0..inputs-1 are the inputs; each gate
// appends one wire. Inputs and outputs are packed LSB-first into uint64_t,
// so inputs <= 64 and outputs.size() <= 64.
class GateList {
 public:
  GateList() = default;
  GateList(uint32_t inputs, std::vector<Gate> gates, std::vector<uint32_t> outputs);

  uint32_t inputs() const { return inputs_; }
  uint32_t output_bits() const { return static_cast<uint32_t>(outputs_.size()); }
  const std::vector<Gate>& gates() const { return gates_; }
  const std::vector<uint32_t>& outputs() const { return outputs_; }

  uint64_t eval(uint64_t input) const;

  // Bitsliced: word i of `in` holds bit i of 64 independent inputs (one per
  // lane); same layout for the returned output words. Identical results to
  // 64 eval() calls.
  void eval_batch(std::span<const uint64_t> in, std::span<uint64_t> out,
                  std::vector<uint64_t>& scratch) const;

  // Output for every input value, indexed by input; requires inputs <= cap.
  std::vector<uint64_t> truth_table(uint32_t cap_bits = 24) const;

 private:
  uint32_t inputs_ = 0;
  std::vector<Gate> gates_;
  std::vector<uint32_t> outputs_;
};

// A Markov-chain rule: next = C(state, randomness). Wires are numbered
// state bits 0..n-1, randomness bits n..n+m-1.
struct ChainCircuit {
  uint32_t state_bits = 0;  // n
  uint32_t rand_bits = 0;   // m
  GateList body;

  uint64_t eval(uint64_t state, uint64_t randomness) const;
};

// A distribution sampler: out = C(r) with r uniform over {0,1}^in_bits.
// The induced distribution puts mass preimages(w)/2^in_bits on each output w.
struct SamplerCircuit {
  uint32_t in_bits = 0;
  uint32_t out_bits = 0;
  GateList body;

  uint64_t eval(uint64_t input) const { return body.eval(input); }
};

ChainCircuit make_chain_circuit(uint32_t state_bits, uint32_t rand_bits,
                                std::vector<Gate> gates, std::vector<uint32_t> outputs);
SamplerCircuit make_sampler_circuit(uint32_t in_bits, uint32_t out_bits,
                                    std::vector<Gate> gates, std::vector<uint32_t> outputs);

// Incremental construction with the usual helpers. Wire 0..inputs-1 are
// inputs; and/or/not/xor append gates and return the new wire index.
class CircuitBuilder {
 public:
  explicit CircuitBuilder(uint32_t inputs) : inputs_(inputs), next_wire_(inputs) {}

  uint32_t constant(bool v);
  uint32_t wand(uint32_t a, uint32_t b);
  uint32_t wor(uint32_t a, uint32_t b);
  uint32_t wnot(uint32_t a);
  uint32_t wxor(uint32_t a, uint32_t b);
  uint32_t wxnor(uint32_t a, uint32_t b) { return wnot(wxor(a, b)); }

  // OR / AND over a set of wires (balanced tree); empty set yields a constant.
  uint32_t wor_many(std::span<const uint32_t> ws);
  uint32_t wand_many(std::span<const uint32_t> ws);

  // wires == value (LSB-first over `ws`).
  uint32_t equals_const(std::span<const uint32_t> ws, uint64_t value);
  // unsigned comparison: (wires as integer) < value.
  uint32_t less_const(std::span<const uint32_t> ws, uint64_t value);
  // sel ? a : b
  uint32_t mux(uint32_t sel, uint32_t a, uint32_t b);

  uint32_t wire_count() const { return next_wire_; }
  GateList finish(std::vector<uint32_t> outputs) &&;

 private:
  uint32_t push(GateOp op, uint32_t a, uint32_t b);
  uint32_t inputs_;
  uint32_t next_wire_;
  std::vector<Gate> gates_;
};

// In-place transpose of a 64x64 bit matrix (m[i] bit j <-> m[j] bit i).
void transpose64(uint64_t m[64]);

// Handy chain circuits.
namespace circuits {
// next = state (fixed point everywhere).
ChainCircuit identity(uint32_t n, uint32_t m = 1);
// next = 0^n.
ChainCircuit constant_zero(uint32_t n, uint32_t m = 1);
// 1-bit chain: next = state XOR r0 (the fair coin chain).
ChainCircuit xor_walk();
// 1-bit chain: next = state AND r0.
ChainCircuit and_walk();
// Lazy walk on the k-cube: selector bits pick a coordinate (values >= k are
// no-ops), one coin bit gates the flip. Self-loop probability >= 1/2.
ChainCircuit lazy_cube_walk(uint32_t k);
// Sampler emitting the input unchanged (uniform distribution).
SamplerCircuit uniform_sampler(uint32_t n);
// Sampler emitting a fixed constant.
SamplerCircuit constant_sampler(uint32_t n, uint64_t value);
}  // namespace circuits

}  // namespace mixgap
