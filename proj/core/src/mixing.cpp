#include "mixgap/mixing.hpp"

#include <algorithm>
#include <cmath>

#include "mixgap/parallel.hpp"

namespace mixgap {

Rational tv_distance(const Distribution& mu, const Distribution& nu) {
  if (!same_space(mu.space, nu.space))
    throw std::invalid_argument("tv_distance: distributions over different spaces");
  Rational sum = 0;
  for (size_t i = 0; i < mu.mass.size(); ++i) {
    Rational diff = mu.mass[i] - nu.mass[i];
    if (diff < 0) diff = -diff;
    sum += diff;
  }
  return sum / 2;
}

double tv_distance_float(const std::vector<double>& mu, const std::vector<double>& nu) {
  double sum = 0;
  for (size_t i = 0; i < mu.size(); ++i) sum += std::abs(mu[i] - nu[i]);
  return sum / 2;
}

namespace {

// Max over row pairs of sum_j |a_ij - a_kj|, i.e. 2 den d(t). Ties resolved
// toward the smallest (x, y) pair so parallel scans stay deterministic.
BigInt max_pair_gap_exact(const ScaledMatrix& m, PairWitness* witness) {
  const size_t n = m.n;
  BigInt best = 0;
  PairWitness bw;
  std::vector<BigInt> chunk_best(n, 0);
  std::vector<PairWitness> chunk_wit(n);
  parallel_for(n, [&](size_t lo, size_t hi) {
    BigInt diff, sum;
    for (size_t i = lo; i < hi; ++i) {
      BigInt local = 0;
      PairWitness lw;
      for (size_t k = i + 1; k < n; ++k) {
        sum = 0;
        const BigInt* ri = &m.num[i * n];
        const BigInt* rk = &m.num[k * n];
        for (size_t j = 0; j < n; ++j) {
          diff = ri[j] - rk[j];
          if (diff < 0) diff = -diff;
          sum += diff;
        }
        if (sum > local) {
          local = sum;
          lw = {static_cast<uint32_t>(i), static_cast<uint32_t>(k)};
        }
      }
      chunk_best[i] = std::move(local);
      chunk_wit[i] = lw;
    }
  });
  for (size_t i = 0; i < n; ++i)
    if (chunk_best[i] > best) {
      best = chunk_best[i];
      bw = chunk_wit[i];
    }
  if (witness) *witness = bw;
  return best;
}

double max_pair_gap_float(const Eigen::MatrixXd& m, PairWitness* witness) {
  const auto n = m.rows();
  double best = 0;
  PairWitness bw;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = i + 1; k < n; ++k) {
      double sum = (m.row(i) - m.row(k)).lpNorm<1>();
      if (sum > best) {
        best = sum;
        bw = {static_cast<uint32_t>(i), static_cast<uint32_t>(k)};
      }
    }
  if (witness) *witness = bw;
  return best;
}

// Shared tau search: doubling scan, then a bit walk over the ladder of
// P^(2^i). Ops supplies the representation (full matrix or single row).
template <typename Ops>
uint64_t tau_driver(Ops& ops, const uint64_t t_cap) {
  if (t_cap == 0) throw std::invalid_argument("tau: cap must be positive");
  if (ops.at_zero_ok()) return 0;

  auto acc = ops.initial();  // t = 1
  if (!ops.exceeds(acc)) return 1;
  uint64_t lo = 1;  // invariant: d(lo) > eps

  // Doubling: after k rounds acc is at t = 2^k.
  size_t k = 0;
  uint64_t hi = 0;
  for (;;) {
    uint64_t next_t = 2 * lo;
    if (next_t > t_cap || next_t < lo) {
      // Probe the cap itself before giving up.
      auto at_cap = acc;
      uint64_t t = lo;
      for (size_t j = k + 1; j-- > 0;) {
        if (t >= t_cap) break;
        if (t + (1ULL << j) <= t_cap) {
          ops.ensure_ladder(j);
          at_cap = ops.advance(at_cap, j);
          t += 1ULL << j;
        }
      }
      if (ops.exceeds(at_cap))
        throw UnresolvedError("tau: d(t) stayed above eps up to the cap " +
                                  std::to_string(t_cap),
                              ops.last_d());
      hi = t_cap;
      break;
    }
    ops.ensure_ladder(k);
    auto next = ops.advance(acc, k);  // t = 2^(k+1)
    ++k;
    if (!ops.exceeds(next)) {
      hi = next_t;
      break;
    }
    acc = std::move(next);
    lo = next_t;
  }

  // Bit walk in (lo, hi): acc stays at t = lo with d(lo) > eps.
  for (size_t j = 64; j-- > 0;) {
    uint64_t step = 1ULL << j;
    if (step >= hi - lo) continue;
    uint64_t cand = lo + step;
    ops.ensure_ladder(j);
    auto trial = ops.advance(acc, j);
    if (ops.exceeds(trial)) {
      acc = std::move(trial);
      lo = cand;
    } else {
      hi = cand;
    }
  }
  return lo + 1;
}

struct ExactMatrixOps {
  const TransitionMatrix& p;
  Rational eps;
  std::vector<ScaledMatrix> ladder;
  double last = 1.0;

  bool at_zero_ok() {
    if (p.size() < 2) return true;
    return eps >= 1;  // d(0) = 1 when two or more states exist
  }
  ScaledMatrix initial() {
    ladder.push_back(p.scaled());
    return p.scaled();
  }
  void ensure_ladder(size_t j) {
    while (ladder.size() <= j) ladder.push_back(multiply(ladder.back(), ladder.back()));
  }
  ScaledMatrix advance(const ScaledMatrix& acc, size_t j) {
    return multiply(acc, ladder[j]);
  }
  bool exceeds(const ScaledMatrix& m) {
    BigInt gap = max_pair_gap_exact(m, nullptr);
    last = Rational(gap, 2 * m.den).convert_to<double>();
    // gap / (2 den) > eps  <=>  gap * eps_den > 2 den * eps_num
    return gap * denominator(eps) > 2 * m.den * numerator(eps);
  }
  double last_d() const { return last; }
};

struct FloatMatrixOps {
  Eigen::MatrixXd base;
  double eps;
  size_t states;
  std::vector<Eigen::MatrixXd> ladder;
  double last = 1.0;

  bool at_zero_ok() const { return states < 2 || eps >= 1; }
  Eigen::MatrixXd initial() {
    ladder.push_back(base);
    return base;
  }
  void ensure_ladder(size_t j) {
    while (ladder.size() <= j) ladder.push_back(ladder.back() * ladder.back());
  }
  Eigen::MatrixXd advance(const Eigen::MatrixXd& acc, size_t j) { return acc * ladder[j]; }
  bool exceeds(const Eigen::MatrixXd& m) {
    last = max_pair_gap_float(m, nullptr) / 2;
    return last > eps;
  }
  double last_d() const { return last; }
};

struct ExactRowOps {
  const TransitionMatrix& p;
  Rational eps;
  uint32_t x;
  Distribution pi;
  std::vector<ScaledMatrix> ladder;
  double last = 1.0;

  bool at_zero_ok() {
    Distribution start = Distribution::point(p.space_ptr(), x);
    Rational d0 = tv_distance(start, pi);
    last = d0.convert_to<double>();
    return d0 <= eps;
  }
  std::vector<Rational> initial() {
    ladder.push_back(p.scaled());
    return row_of(ladder[0]);
  }
  std::vector<Rational> row_of(const ScaledMatrix& m) {
    std::vector<Rational> v(m.n);
    for (size_t j = 0; j < m.n; ++j) v[j] = Rational(m.at(x, j), m.den);
    return v;
  }
  void ensure_ladder(size_t j) {
    while (ladder.size() <= j) ladder.push_back(multiply(ladder.back(), ladder.back()));
  }
  std::vector<Rational> advance(const std::vector<Rational>& v, size_t j) {
    const ScaledMatrix& m = ladder[j];
    std::vector<Rational> out(m.n, Rational(0));
    for (size_t i = 0; i < m.n; ++i) {
      if (v[i] == 0) continue;
      for (size_t c = 0; c < m.n; ++c)
        if (m.at(i, c) != 0) out[c] += v[i] * Rational(m.at(i, c), m.den);
    }
    return out;
  }
  bool exceeds(const std::vector<Rational>& v) {
    Rational sum = 0;
    for (size_t i = 0; i < v.size(); ++i) {
      Rational diff = v[i] - pi.mass[i];
      if (diff < 0) diff = -diff;
      sum += diff;
    }
    sum /= 2;
    last = sum.convert_to<double>();
    return sum > eps;
  }
  double last_d() const { return last; }
};

struct FloatRowOps {
  Eigen::MatrixXd base;
  double eps;
  uint32_t x;
  Eigen::VectorXd pi;
  std::vector<Eigen::MatrixXd> ladder;
  double last = 1.0;

  bool at_zero_ok() {
    Eigen::VectorXd start = Eigen::VectorXd::Zero(base.rows());
    start(x) = 1.0;
    last = (start - pi).lpNorm<1>() / 2;
    return last <= eps;
  }
  Eigen::RowVectorXd initial() {
    ladder.push_back(base);
    return base.row(x);
  }
  void ensure_ladder(size_t j) {
    while (ladder.size() <= j) ladder.push_back(ladder.back() * ladder.back());
  }
  Eigen::RowVectorXd advance(const Eigen::RowVectorXd& v, size_t j) { return v * ladder[j]; }
  bool exceeds(const Eigen::RowVectorXd& v) {
    last = (v.transpose() - pi).lpNorm<1>() / 2;
    return last > eps;
  }
  double last_d() const { return last; }
};

}  // namespace

Rational d_of_t_exact(const TransitionMatrix& p, uint64_t t, PairWitness* witness) {
  if (p.size() < 2) return 0;
  if (t == 0) {
    if (witness) *witness = {0, 1};
    return 1;
  }
  ScaledMatrix pt = power(p.scaled(), t);
  BigInt gap = max_pair_gap_exact(pt, witness);
  return Rational(gap, 2 * pt.den);
}

Rational d_from_power(const ScaledMatrix& pt, PairWitness* witness) {
  if (pt.n < 2) return 0;
  BigInt gap = max_pair_gap_exact(pt, witness);
  return Rational(gap, 2 * pt.den);
}

double d_of_t_float(const TransitionMatrix& p, uint64_t t, PairWitness* witness) {
  if (p.size() < 2) return 0;
  if (t == 0) {
    if (witness) *witness = {0, 1};
    return 1.0;
  }
  Eigen::MatrixXd base = p.to_float();
  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(base.rows(), base.cols());
  while (t != 0) {
    if (t & 1) result = result * base;
    t >>= 1;
    if (t != 0) base = base * base;
  }
  return max_pair_gap_float(result, witness) / 2;
}

uint64_t default_tau_cap(const TransitionMatrix& p) {
  uint64_t n = p.size();
  if (n == 0) return 1;
  if (n > 2000000) return UINT64_MAX / 2;
  return 10 * n * n * n;
}

uint64_t tau(const TransitionMatrix& p, const Rational& eps, uint64_t t_cap, ArithMode mode) {
  if (eps <= 0 || eps >= 1) {
    if (eps >= 1) return 0;
    throw std::invalid_argument("tau: eps must lie in (0,1)");
  }
  if (mode == ArithMode::Exact) {
    ExactMatrixOps ops{p, eps, {}, 1.0};
    return tau_driver(ops, t_cap);
  }
  FloatMatrixOps ops{p.to_float(), to_double(eps), p.size(), {}, 1.0};
  return tau_driver(ops, t_cap);
}

uint64_t tau_from(const TransitionMatrix& p, uint32_t x, const Rational& eps,
                  uint64_t t_cap, ArithMode mode) {
  if (x >= p.size()) throw std::invalid_argument("tau_from: state index out of range");
  if (eps <= 0 || eps >= 1) {
    if (eps >= 1) return 0;
    throw std::invalid_argument("tau_from: eps must lie in (0,1)");
  }
  Distribution pi = stationary(p);
  if (mode == ArithMode::Exact) {
    ExactRowOps ops{p, eps, x, std::move(pi), {}, 1.0};
    return tau_driver(ops, t_cap);
  }
  Eigen::VectorXd pif(p.size());
  for (size_t i = 0; i < p.size(); ++i) pif(static_cast<Eigen::Index>(i)) = to_double(pi.mass[i]);
  FloatRowOps ops{p.to_float(), to_double(eps), x, std::move(pif), {}, 1.0};
  return tau_driver(ops, t_cap);
}

CertifiedTau tau_certified(const TransitionMatrix& p, const Rational& eps, uint64_t t_cap,
                           double margin) {
  CertifiedTau out;
  out.tau = tau(p, eps, t_cap, ArithMode::Float);
  double e = to_double(eps);
  if (out.tau == 0) {
    out.certified = p.size() < 2 || eps >= 1;
    return out;
  }
  double d_after = d_of_t_float(p, out.tau);
  double d_before = d_of_t_float(p, out.tau - 1);
  out.gap_before = d_before - e;
  out.gap_after = e - d_after;
  out.certified = out.gap_before > margin && out.gap_after >= 0 &&
                  (d_after == 0 || out.gap_after > margin);
  return out;
}

MixingProfile build_mixing_profile(const TransitionMatrix& p, uint64_t horizon,
                                   const std::vector<Rational>& eps_values,
                                   bool per_state, uint64_t t_cap) {
  if (t_cap == 0) t_cap = default_tau_cap(p);
  MixingProfile profile;
  const size_t n = p.size();
  ScaledMatrix pt = ScaledMatrix::identity(n);
  std::vector<Distribution> pi_holder;
  Distribution pi = stationary(p);

  std::vector<Rational> d_vals;
  std::vector<std::vector<Rational>> dx_vals(per_state ? n : 0);
  for (uint64_t t = 0; t <= horizon; ++t) {
    if (t > 0) pt = multiply(pt, p.scaled());
    Rational d = n < 2 ? Rational(0)
                       : (t == 0 ? Rational(1) : Rational(max_pair_gap_exact(pt, nullptr), 2 * pt.den));
    d_vals.push_back(d);
    if (per_state) {
      for (size_t x = 0; x < n; ++x) {
        Distribution row = Distribution::from_scaled_row(p.space_ptr(), pt, x);
        dx_vals[x].push_back(tv_distance(row, pi));
      }
    }
  }
  profile.d_values = d_vals;

  for (const Rational& eps : eps_values) {
    uint64_t tv = 0;
    bool found = false;
    for (uint64_t t = 0; t <= horizon; ++t)
      if (d_vals[t] <= eps) {
        tv = t;
        found = true;
        break;
      }
    if (!found) tv = tau(p, eps, t_cap);
    profile.tau_table[eps] = tv;
    if (per_state) {
      std::vector<uint64_t> taus(n);
      for (size_t x = 0; x < n; ++x) {
        bool fx = false;
        for (uint64_t t = 0; t <= horizon; ++t)
          if (dx_vals[x][t] <= eps) {
            taus[x] = t;
            fx = true;
            break;
          }
        if (!fx) taus[x] = tau_from(p, static_cast<uint32_t>(x), eps, t_cap);
      }
      profile.tau_x_table[eps] = std::move(taus);
    }
  }
  return profile;
}

}  // namespace mixgap
