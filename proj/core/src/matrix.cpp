#include "mixgap/matrix.hpp"

#include <algorithm>
#include <numeric>

#include "mixgap/parallel.hpp"

namespace mixgap {

ScaledMatrix ScaledMatrix::identity(size_t n) {
  ScaledMatrix m;
  m.n = n;
  m.den = 1;
  m.num.assign(n * n, 0);
  for (size_t i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

void ScaledMatrix::check_stochastic() const {
  if (den <= 0) throw std::invalid_argument("matrix: nonpositive denominator");
  for (size_t i = 0; i < n; ++i) {
    BigInt row_sum = 0;
    for (size_t j = 0; j < n; ++j) {
      const BigInt& e = at(i, j);
      if (e < 0 || e > den) throw std::invalid_argument("matrix: entry outside [0,1]");
      row_sum += e;
    }
    if (row_sum != den)
      throw std::invalid_argument("matrix: row " + std::to_string(i) +
                                  " does not sum to exactly 1");
  }
}

void ScaledMatrix::reduce() {
  BigInt g = den;
  for (const BigInt& e : num) {
    if (e == 0) continue;
    g = gcd(g, e);
    if (g == 1) return;
  }
  if (g == 1 || g == 0) return;
  den /= g;
  for (BigInt& e : num) e /= g;
}

ScaledMatrix multiply(const ScaledMatrix& a, const ScaledMatrix& b) {
  if (a.n != b.n) throw std::invalid_argument("matrix multiply: size mismatch");
  const size_t n = a.n;
  ScaledMatrix c;
  c.n = n;
  c.den = a.den * b.den;
  c.num.assign(n * n, 0);
  parallel_for(n, [&](size_t lo, size_t hi) {
    BigInt t;
    for (size_t i = lo; i < hi; ++i) {
      for (size_t k = 0; k < n; ++k) {
        const BigInt& aik = a.at(i, k);
        if (aik == 0) continue;
        const BigInt* brow = &b.num[k * n];
        BigInt* crow = &c.num[i * n];
        for (size_t j = 0; j < n; ++j) {
          if (brow[j] == 0) continue;
          t = aik;
          t *= brow[j];
          crow[j] += t;
        }
      }
    }
  });
  c.reduce();
  return c;
}

ScaledMatrix power(const ScaledMatrix& p, uint64_t t) {
  ScaledMatrix result = ScaledMatrix::identity(p.n);
  ScaledMatrix base = p;
  while (t != 0) {
    if (t & 1) result = multiply(result, base);
    t >>= 1;
    if (t != 0) base = multiply(base, base);
  }
  return result;
}

WeightedGraph::WeightedGraph(size_t vertices,
                             std::vector<std::tuple<uint32_t, uint32_t, Rational>> edges)
    : vertices_(vertices), edges_(std::move(edges)) {
  BigInt lcm_den = 1;
  for (auto& [i, j, w] : edges_) {
    if (i >= vertices_ || j >= vertices_)
      throw std::invalid_argument("weighted graph: edge endpoint out of range");
    if (w <= 0) throw std::invalid_argument("weighted graph: weights must be positive");
    if (i > j) std::swap(i, j);
    lcm_den = lcm(lcm_den, denominator(w));
  }
  std::sort(edges_.begin(), edges_.end(), [](const auto& x, const auto& y) {
    return std::tie(std::get<0>(x), std::get<1>(x)) < std::tie(std::get<0>(y), std::get<1>(y));
  });
  for (size_t k = 1; k < edges_.size(); ++k)
    if (std::get<0>(edges_[k]) == std::get<0>(edges_[k - 1]) &&
        std::get<1>(edges_[k]) == std::get<1>(edges_[k - 1]))
      throw std::invalid_argument("weighted graph: duplicate edge");

  adj_.assign(vertices_, {});
  degrees_.assign(vertices_, 0);
  for (const auto& [i, j, w] : edges_) {
    BigInt wi = numerator(w) * (lcm_den / denominator(w));
    adj_[i].emplace_back(j, wi);
    if (i != j) adj_[j].emplace_back(i, wi);
    degrees_[i] += wi;
    if (i != j) degrees_[j] += wi;
  }
  for (auto& row : adj_)
    std::sort(row.begin(), row.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
  for (const BigInt& d : degrees_) {
    if (d == 0)
      throw std::invalid_argument("weighted graph: isolated vertex has no stationary mass");
    total_degree_ += d;
  }
}

BigInt WeightedGraph::weight_between(uint32_t i, uint32_t j) const {
  for (const auto& [k, w] : adj_[i])
    if (k == j) return w;
  return 0;
}

TransitionMatrix TransitionMatrix::from_circuit(const ChainCircuit& circuit, SpacePtr space) {
  const uint32_t m = circuit.rand_bits;
  const size_t n = space->size();
  TransitionMatrix out;
  out.space_ = std::move(space);
  out.scaled_.n = n;
  out.scaled_.den = BigInt(1) << m;
  out.scaled_.num.assign(n * n, 0);

  std::vector<std::vector<uint64_t>> counts(n);
  const StateSpace& sp = *out.space_;
  parallel_for(n, [&](size_t lo, size_t hi) {
    for (size_t i = lo; i < hi; ++i) {
      std::vector<uint64_t> row(n, 0);
      uint64_t state = sp.pattern(i);
      const uint64_t total = 1ULL << m;
      std::vector<uint64_t> in(circuit.state_bits + m), outw(circuit.state_bits), scratch;
      static constexpr uint64_t kLanePattern[6] = {
          0xaaaaaaaaaaaaaaaaULL, 0xccccccccccccccccULL, 0xf0f0f0f0f0f0f0f0ULL,
          0xff00ff00ff00ff00ULL, 0xffff0000ffff0000ULL, 0xffffffff00000000ULL};
      for (uint64_t base = 0; base < total; base += 64) {
        for (uint32_t b = 0; b < circuit.state_bits; ++b)
          in[b] = ((state >> b) & 1) ? ~0ULL : 0;
        for (uint32_t b = 0; b < m; ++b)
          in[circuit.state_bits + b] = b < 6 ? kLanePattern[b]
                                             : (((base >> b) & 1) ? ~0ULL : 0);
        circuit.body.eval_batch(in, outw, scratch);
        uint64_t lanes = total - base < 64 ? total - base : 64;
        for (uint64_t l = 0; l < lanes; ++l) {
          uint64_t y = 0;
          for (uint32_t b = 0; b < circuit.state_bits; ++b) y |= ((outw[b] >> l) & 1) << b;
          auto idx = sp.index_of(y);
          if (!idx)
            throw ClosureError("circuit maps " + StateSpace::format_pattern(state, sp.width()) +
                               " outside the state space (to " +
                               StateSpace::format_pattern(y, sp.width()) + ")");
          ++row[*idx];
        }
      }
      counts[i] = std::move(row);
    }
  });
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) out.scaled_.at(i, j) = counts[i][j];
  out.scaled_.reduce();
  out.scaled_.check_stochastic();
  return out;
}

TransitionMatrix TransitionMatrix::from_weights(SpacePtr space, WeightedGraph weights) {
  const size_t n = space->size();
  if (weights.vertices() != n)
    throw std::invalid_argument("weights vertex count does not match state space");
  TransitionMatrix out;
  out.space_ = std::move(space);
  BigInt den = 1;
  for (const BigInt& d : weights.degrees()) den = lcm(den, d);
  out.scaled_.n = n;
  out.scaled_.den = den;
  out.scaled_.num.assign(n * n, 0);
  for (size_t i = 0; i < n; ++i) {
    BigInt mult = den / weights.degrees()[i];
    for (const auto& [j, w] : weights.adjacency()[i]) out.scaled_.at(i, j) = w * mult;
  }
  out.weights_ = std::move(weights);
  out.scaled_.reduce();
  out.scaled_.check_stochastic();
  return out;
}

TransitionMatrix TransitionMatrix::from_rows(SpacePtr space,
                                             std::vector<std::vector<Rational>> rows) {
  const size_t n = space->size();
  if (rows.size() != n) throw std::invalid_argument("matrix rows: row count mismatch");
  BigInt den = 1;
  for (const auto& row : rows) {
    if (row.size() != n) throw std::invalid_argument("matrix rows: column count mismatch");
    for (const Rational& e : row) den = lcm(den, denominator(e));
  }
  TransitionMatrix out;
  out.space_ = std::move(space);
  out.scaled_.n = n;
  out.scaled_.den = den;
  out.scaled_.num.assign(n * n, 0);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      out.scaled_.at(i, j) = numerator(rows[i][j]) * (den / denominator(rows[i][j]));
  out.scaled_.reduce();
  out.scaled_.check_stochastic();
  return out;
}

const WeightedGraph& TransitionMatrix::weights() const {
  if (!weights_) throw std::logic_error("transition matrix has no weight provenance");
  return *weights_;
}

Eigen::MatrixXd TransitionMatrix::to_float() const {
  const size_t n = scaled_.n;
  Eigen::MatrixXd m(n, n);
  double den = scaled_.den.convert_to<double>();
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          scaled_.at(i, j).convert_to<double>() / den;
  return m;
}

Distribution Distribution::point(SpacePtr space, uint32_t index) {
  Distribution d;
  d.mass.assign(space->size(), Rational(0));
  d.mass.at(index) = 1;
  d.space = std::move(space);
  return d;
}

Distribution Distribution::from_scaled_row(SpacePtr space, const ScaledMatrix& m, size_t row) {
  Distribution d;
  d.space = std::move(space);
  d.mass.resize(m.n);
  for (size_t j = 0; j < m.n; ++j) d.mass[j] = Rational(m.at(row, j), m.den);
  return d;
}

void Distribution::validate() const {
  Rational sum = 0;
  for (const Rational& p : mass) {
    if (p < 0) throw std::invalid_argument("distribution: negative mass");
    sum += p;
  }
  if (sum != 1) throw std::invalid_argument("distribution: mass does not sum to 1");
}

bool same_space(const SpacePtr& a, const SpacePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return a->width() == b->width() && a->patterns() == b->patterns();
}

bool check_ergodic(const TransitionMatrix& p) {
  const size_t n = p.size();
  if (n == 0) return false;
  std::vector<std::vector<uint32_t>> succ(n), pred(n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      if (p.scaled().at(i, j) != 0) {
        succ[i].push_back(static_cast<uint32_t>(j));
        pred[j].push_back(static_cast<uint32_t>(i));
      }

  // Strong connectivity: forward and backward reachability from state 0.
  auto bfs = [&](const std::vector<std::vector<uint32_t>>& g) {
    std::vector<char> seen(n, 0);
    std::vector<uint32_t> stack{0};
    seen[0] = 1;
    size_t found = 1;
    while (!stack.empty()) {
      uint32_t u = stack.back();
      stack.pop_back();
      for (uint32_t v : g[u])
        if (!seen[v]) {
          seen[v] = 1;
          ++found;
          stack.push_back(v);
        }
    }
    return found == n;
  };
  if (!bfs(succ) || !bfs(pred)) return false;

  // Aperiodicity: gcd of (level[u] + 1 - level[v]) over edges, via BFS levels.
  std::vector<int64_t> level(n, -1);
  std::vector<uint32_t> queue{0};
  level[0] = 0;
  for (size_t qi = 0; qi < queue.size(); ++qi) {
    uint32_t u = queue[qi];
    for (uint32_t v : succ[u])
      if (level[v] < 0) {
        level[v] = level[u] + 1;
        queue.push_back(v);
      }
  }
  int64_t g = 0;
  for (size_t u = 0; u < n; ++u)
    for (uint32_t v : succ[u]) {
      int64_t diff = level[u] + 1 - level[v];
      g = std::gcd(g, diff < 0 ? -diff : diff);
      if (g == 1) return true;
    }
  return g == 1;
}

namespace {

// Exact solve of pi P = pi with sum(pi) = 1 by Gaussian elimination on
// (P^T - I) with the last row replaced by the normalization constraint.
std::vector<Rational> stationary_exact(const ScaledMatrix& p) {
  const size_t n = p.n;
  std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n + 1, Rational(0)));
  for (size_t i = 0; i + 1 < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      a[i][j] = Rational(p.at(j, i), p.den);
      if (i == j) a[i][j] -= 1;
    }
  for (size_t j = 0; j < n; ++j) a[n - 1][j] = 1;
  a[n - 1][n] = 1;

  for (size_t col = 0; col < n; ++col) {
    size_t pivot = col;
    while (pivot < n && a[pivot][col] == 0) ++pivot;
    if (pivot == n) throw PromiseViolation("stationary: singular system (chain not ergodic)");
    std::swap(a[col], a[pivot]);
    Rational inv = 1 / a[col][col];
    for (size_t j = col; j <= n; ++j) a[col][j] *= inv;
    for (size_t i = 0; i < n; ++i) {
      if (i == col || a[i][col] == 0) continue;
      Rational f = a[i][col];
      for (size_t j = col; j <= n; ++j) a[i][j] -= f * a[col][j];
    }
  }
  std::vector<Rational> pi(n);
  for (size_t i = 0; i < n; ++i) pi[i] = a[i][n];
  return pi;
}

}  // namespace

Distribution stationary(const TransitionMatrix& p, size_t exact_elimination_cap) {
  if (!check_ergodic(p)) throw PromiseViolation("stationary: chain is not ergodic");
  const size_t n = p.size();
  Distribution d;
  d.space = p.space_ptr();
  if (p.has_weights()) {
    const auto& w = p.weights();
    d.mass.resize(n);
    for (size_t i = 0; i < n; ++i) d.mass[i] = Rational(w.degrees()[i], w.total_degree());
    return d;
  }
  if (n <= exact_elimination_cap) {
    d.mass = stationary_exact(p.scaled());
    return d;
  }
  // Float path with residual check.
  Eigen::MatrixXd m = p.to_float();
  Eigen::MatrixXd a = m.transpose() - Eigen::MatrixXd::Identity(n, n);
  a.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;
  Eigen::VectorXd pi = a.fullPivLu().solve(b);
  double residual = ((pi.transpose() * m).transpose() - pi).lpNorm<1>();
  if (!(residual <= 1e-12))
    throw PromiseViolation("stationary: residual " + std::to_string(residual) +
                           " exceeds 1e-12");
  d.mass.resize(n);
  for (size_t i = 0; i < n; ++i) d.mass[i] = Rational(pi(static_cast<Eigen::Index>(i)));
  return d;
}

Distribution evolve(const TransitionMatrix& p, const Distribution& start, uint64_t t) {
  if (!same_space(start.space, p.space_ptr()))
    throw std::invalid_argument("evolve: distribution is over a different space");
  if (t == 0) return start;
  ScaledMatrix pt = power(p.scaled(), t);
  const size_t n = pt.n;
  Distribution out;
  out.space = p.space_ptr();
  out.mass.assign(n, Rational(0));
  for (size_t i = 0; i < n; ++i) {
    if (start.mass[i] == 0) continue;
    for (size_t j = 0; j < n; ++j) {
      if (pt.at(i, j) == 0) continue;
      out.mass[j] += start.mass[i] * Rational(pt.at(i, j), pt.den);
    }
  }
  return out;
}

}  // namespace mixgap
