#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mixgap/circuit.hpp"

namespace mixgap {

// Enumerated state space over width-n bit patterns. Index 0 is the root when
// built by reachability.
class StateSpace {
 public:
  StateSpace() = default;
  StateSpace(uint32_t width, std::vector<uint64_t> states);

  uint32_t width() const { return width_; }
  size_t size() const { return states_.size(); }
  uint64_t pattern(size_t index) const { return states_[index]; }
  const std::vector<uint64_t>& patterns() const { return states_; }

  std::optional<uint32_t> index_of(uint64_t pattern) const;
  uint32_t require_index(uint64_t pattern) const;

  static StateSpace full_cube(uint32_t width);

  std::string pattern_string(size_t index) const;
  static std::string format_pattern(uint64_t pattern, uint32_t width);
  static uint64_t parse_pattern(const std::string& bits, uint32_t width);

 private:
  uint32_t width_ = 0;
  std::vector<uint64_t> states_;
  std::unordered_map<uint64_t, uint32_t> index_;
};

struct ReachOptions {
  uint32_t rand_bits_cap = 20;   // 2^m enumerations per state
  size_t state_cap = 1u << 14;   // |Omega| bound
};

// Breadth-first closure of root under all 2^m randomness strings.
StateSpace reachable_states(const ChainCircuit& circuit, uint64_t root,
                            const ReachOptions& opts = {});

// Distinct successors of one state under every randomness string.
std::vector<uint64_t> successor_set(const ChainCircuit& circuit, uint64_t state,
                                    uint32_t rand_bits_cap = 20);

}  // namespace mixgap
