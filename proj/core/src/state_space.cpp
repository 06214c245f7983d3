#include "mixgap/state_space.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace mixgap {

StateSpace::StateSpace(uint32_t width, std::vector<uint64_t> states)
    : width_(width), states_(std::move(states)) {
  index_.reserve(states_.size());
  for (size_t i = 0; i < states_.size(); ++i) {
    if (width_ < 64 && states_[i] >= (1ULL << width_))
      throw std::invalid_argument("state space: pattern wider than declared width");
    if (!index_.emplace(states_[i], static_cast<uint32_t>(i)).second)
      throw std::invalid_argument("state space: duplicate state " +
                                  format_pattern(states_[i], width_));
  }
}

std::optional<uint32_t> StateSpace::index_of(uint64_t pattern) const {
  auto it = index_.find(pattern);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

uint32_t StateSpace::require_index(uint64_t pattern) const {
  auto idx = index_of(pattern);
  if (!idx)
    throw std::out_of_range("state " + format_pattern(pattern, width_) +
                            " not in the enumerated space");
  return *idx;
}

StateSpace StateSpace::full_cube(uint32_t width) {
  if (width > 20) throw std::length_error("full_cube: width too large to enumerate");
  std::vector<uint64_t> all(1ULL << width);
  for (uint64_t i = 0; i < all.size(); ++i) all[i] = i;
  return StateSpace(width, std::move(all));
}

std::string StateSpace::pattern_string(size_t index) const {
  return format_pattern(states_[index], width_);
}

std::string StateSpace::format_pattern(uint64_t pattern, uint32_t width) {
  std::string s(width, '0');
  for (uint32_t i = 0; i < width; ++i)
    if ((pattern >> i) & 1) s[width - 1 - i] = '1';  // MSB first on the page
  return s;
}

uint64_t StateSpace::parse_pattern(const std::string& bits, uint32_t width) {
  if (bits.size() != width)
    throw std::invalid_argument("bit string '" + bits + "' is not " +
                                std::to_string(width) + " bits wide");
  uint64_t v = 0;
  for (uint32_t i = 0; i < width; ++i) {
    char c = bits[width - 1 - i];
    if (c != '0' && c != '1') throw std::invalid_argument("bit string has non-binary digit");
    if (c == '1') v |= 1ULL << i;
  }
  return v;
}

std::vector<uint64_t> successor_set(const ChainCircuit& circuit, uint64_t state,
                                    uint32_t rand_bits_cap) {
  const uint32_t n = circuit.state_bits;
  const uint32_t m = circuit.rand_bits;
  if (m > rand_bits_cap)
    throw std::length_error("randomness width " + std::to_string(m) +
                            " exceeds enumeration cap " + std::to_string(rand_bits_cap));
  const uint64_t total = 1ULL << m;
  std::vector<uint64_t> in(n + m), out(n), scratch;
  std::vector<uint64_t> successors;

  static constexpr uint64_t kLanePattern[6] = {
      0xaaaaaaaaaaaaaaaaULL, 0xccccccccccccccccULL, 0xf0f0f0f0f0f0f0f0ULL,
      0xff00ff00ff00ff00ULL, 0xffff0000ffff0000ULL, 0xffffffff00000000ULL};

  for (uint64_t base = 0; base < total; base += 64) {
    for (uint32_t b = 0; b < n; ++b) in[b] = ((state >> b) & 1) ? ~0ULL : 0;
    for (uint32_t b = 0; b < m; ++b) {
      if (b < 6)
        in[n + b] = kLanePattern[b];
      else
        in[n + b] = ((base >> b) & 1) ? ~0ULL : 0;
    }
    circuit.body.eval_batch(in, out, scratch);
    uint64_t lanes = total - base < 64 ? total - base : 64;
    for (uint64_t l = 0; l < lanes; ++l) {
      uint64_t y = 0;
      for (uint32_t b = 0; b < n; ++b) y |= ((out[b] >> l) & 1) << b;
      successors.push_back(y);
    }
  }
  std::sort(successors.begin(), successors.end());
  successors.erase(std::unique(successors.begin(), successors.end()), successors.end());
  return successors;
}

StateSpace reachable_states(const ChainCircuit& circuit, uint64_t root,
                            const ReachOptions& opts) {
  const uint32_t n = circuit.state_bits;
  if (n < 64 && root >= (1ULL << n))
    throw std::invalid_argument("root state wider than n bits");

  std::vector<uint64_t> order{root};
  std::unordered_map<uint64_t, uint32_t> seen{{root, 0}};
  std::deque<uint64_t> frontier{root};
  while (!frontier.empty()) {
    uint64_t cur = frontier.front();
    frontier.pop_front();
    for (uint64_t y : successor_set(circuit, cur, opts.rand_bits_cap)) {
      if (seen.emplace(y, static_cast<uint32_t>(order.size())).second) {
        if (order.size() >= opts.state_cap)
          throw std::length_error("reachable state count exceeds cap " +
                                  std::to_string(opts.state_cap));
        order.push_back(y);
        frontier.push_back(y);
      }
    }
  }
  return StateSpace(n, std::move(order));
}

}  // namespace mixgap
