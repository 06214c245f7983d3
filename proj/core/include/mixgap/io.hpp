#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "mixgap/matrix.hpp"
#include "mixgap/reductions.hpp"

namespace mixgap::io {

using json = nlohmann::json;

// Chain circuit files: {"n":..,"m":..,"gates":[{"op":"XOR","a":0,"b":3},..],
// "outputs":[..]} with wires numbered state bits first. Richer operators
// (NAND, NOR, XNOR) desugar to the base gate set at load time.
json chain_circuit_to_json(const ChainCircuit& c);
ChainCircuit chain_circuit_from_json(const json& j);

// Sampler files: {"in":..,"out":..,"gates":[..],"outputs":[..]}.
json sampler_to_json(const SamplerCircuit& c);
SamplerCircuit sampler_from_json(const json& j);

// Matrix files: {"states":[bitstrings],"rows":[[[num,den],..],..]} for raw
// rows, {"states":[..],"weights":[[x,y,w],..]} for reversible walks.
json matrix_to_json(const TransitionMatrix& m);
TransitionMatrix matrix_from_json(const json& j);

// Instance files: {"kind":..,"chain":{..},"x":bits,"t":..,"t_max":..,
// "c":..,"delta":..,"provenance":{..}}.
json instance_to_json(const PromiseInstance& inst);
PromiseInstance instance_from_json(const json& j);

// Probabilities and distances are serialized as {"value": 15-significant-
// digit decimal string, "exact": "num/den"} (exact omitted for floats).
json number_json(const Rational& v);
json number_json(double v);

// Integers above 2^53 travel as strings; this reads both forms.
uint64_t read_u64(const json& j, const char* field);
json write_u64(uint64_t v);
Rational read_rational(const json& j);

std::string canonical_dump(const json& j);
json load_json_file(const std::string& path);
void store_json_file(const std::string& path, const json& j);

}  // namespace mixgap::io
