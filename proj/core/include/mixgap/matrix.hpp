#pragma once

#include <memory>
#include <optional>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "mixgap/circuit.hpp"
#include "mixgap/errors.hpp"
#include "mixgap/rational.hpp"
#include "mixgap/state_space.hpp"

namespace mixgap {

using SpacePtr = std::shared_ptr<const StateSpace>;

// Row-stochastic matrix stored as integer numerators over one common
// denominator: entry(i,j) = num[i*n+j] / den, every row summing to den.
// Keeping a single denominator makes powering pure integer arithmetic.
struct ScaledMatrix {
  size_t n = 0;
  BigInt den = 1;
  std::vector<BigInt> num;

  static ScaledMatrix identity(size_t n);
  const BigInt& at(size_t i, size_t j) const { return num[i * n + j]; }
  BigInt& at(size_t i, size_t j) { return num[i * n + j]; }
  Rational entry(size_t i, size_t j) const { return Rational(at(i, j), den); }
  void check_stochastic() const;
  // Divide den and all entries by their common gcd.
  void reduce();
};

ScaledMatrix multiply(const ScaledMatrix& a, const ScaledMatrix& b);
ScaledMatrix power(const ScaledMatrix& p, uint64_t t);

// Symmetric edge weights (self loops allowed, stored once). Weights are
// positive rationals; an integer-scaled view is derived for exact work.
class WeightedGraph {
 public:
  WeightedGraph() = default;
  WeightedGraph(size_t vertices, std::vector<std::tuple<uint32_t, uint32_t, Rational>> edges);

  size_t vertices() const { return vertices_; }
  const std::vector<std::tuple<uint32_t, uint32_t, Rational>>& edges() const { return edges_; }

  // Weights multiplied by the lcm of their denominators.
  const std::vector<std::vector<std::pair<uint32_t, BigInt>>>& adjacency() const { return adj_; }
  const std::vector<BigInt>& degrees() const { return degrees_; }
  const BigInt& total_degree() const { return total_degree_; }
  BigInt weight_between(uint32_t i, uint32_t j) const;

 private:
  size_t vertices_ = 0;
  std::vector<std::tuple<uint32_t, uint32_t, Rational>> edges_;
  std::vector<std::vector<std::pair<uint32_t, BigInt>>> adj_;
  std::vector<BigInt> degrees_;
  BigInt total_degree_ = 0;
};

// Exact transition matrix over an enumerated space, with optional weighted
// provenance when the chain is a reversible walk.
class TransitionMatrix {
 public:
  TransitionMatrix() = default;

  // entries[i][j] = #{r : C(s_i, r) = s_j} / 2^m. Throws ClosureError if the
  // circuit leaves the space.
  static TransitionMatrix from_circuit(const ChainCircuit& circuit, SpacePtr space);
  // P(x,y) = w_xy / d_x.
  static TransitionMatrix from_weights(SpacePtr space, WeightedGraph weights);
  static TransitionMatrix from_rows(SpacePtr space, std::vector<std::vector<Rational>> rows);

  const StateSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  size_t size() const { return scaled_.n; }
  const ScaledMatrix& scaled() const { return scaled_; }
  Rational entry(size_t i, size_t j) const { return scaled_.entry(i, j); }

  bool has_weights() const { return weights_.has_value(); }
  const WeightedGraph& weights() const;

  Eigen::MatrixXd to_float() const;

 private:
  SpacePtr space_;
  ScaledMatrix scaled_;
  std::optional<WeightedGraph> weights_;
};

// Probability vector over a state space, exact.
struct Distribution {
  SpacePtr space;
  std::vector<Rational> mass;

  static Distribution point(SpacePtr space, uint32_t index);
  static Distribution from_scaled_row(SpacePtr space, const ScaledMatrix& m, size_t row);
  void validate() const;  // nonnegative, sums to exactly 1
};

bool same_space(const SpacePtr& a, const SpacePtr& b);

// True iff the support digraph is strongly connected and the gcd of its
// cycle lengths is 1.
bool check_ergodic(const TransitionMatrix& p);

// Stationary distribution. Weighted chains use pi(x) = d_x / sum_y d_y;
// otherwise pi P = pi is solved by exact elimination up to
// `exact_elimination_cap` states and in floating point beyond (residual
// checked against 1e-12). Throws PromiseViolation when P is not ergodic.
Distribution stationary(const TransitionMatrix& p, size_t exact_elimination_cap = 192);

// start . P^t by repeated squaring; exact.
Distribution evolve(const TransitionMatrix& p, const Distribution& start, uint64_t t);

}  // namespace mixgap
