#include "mixgap/conductance.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace mixgap {

namespace {

std::vector<uint32_t> mask_to_indices(uint32_t mask) {
  std::vector<uint32_t> v;
  for (uint32_t i = 0; mask >> i; ++i)
    if ((mask >> i) & 1) v.push_back(i);
  return v;
}

// Lexicographic order on ascending index sequences; used only to break exact
// phi ties so results are independent of enumeration order.
bool subset_less(uint32_t a, uint32_t b) {
  return mask_to_indices(a) < mask_to_indices(b);
}

template <typename Int>
struct GrayScan {
  const std::vector<std::vector<std::pair<uint32_t, Int>>>& adj;
  const std::vector<Int>& degree;
  uint32_t n;
  Int total_degree;

  // Best cut over all proper nonempty sets, and best over sets holding at
  // most half the total degree.
  bool have_best = false, have_bal = false;
  Int best_cross{}, best_vol{};
  Int bal_cross{}, bal_vol{};
  uint32_t best_mask = 0, bal_mask = 0;

  uint32_t mask = 0;
  Int cross{}, vol{};

  void flip(uint32_t v) {
    bool removing = (mask >> v) & 1;
    mask ^= 1u << v;
    for (const auto& [u, w] : adj[v]) {
      if (u == v) continue;  // self loops never cross
      bool u_in = (mask >> u) & 1;
      if (!removing)
        cross += u_in ? -w : w;
      else
        cross += u_in ? w : -w;
    }
    vol += removing ? -degree[v] : degree[v];
  }

  void consider() {
    if (mask == 0 || mask == (n >= 32 ? ~0u : (1u << n) - 1)) return;
    if (!have_best) {
      have_best = true;
      best_cross = cross;
      best_vol = vol;
      best_mask = mask;
    } else {
      Int lhs = cross * best_vol, rhs = best_cross * vol;
      if (lhs < rhs || (lhs == rhs && subset_less(mask, best_mask))) {
        best_cross = cross;
        best_vol = vol;
        best_mask = mask;
      }
    }
    if (2 * vol <= total_degree) {
      if (!have_bal) {
        have_bal = true;
        bal_cross = cross;
        bal_vol = vol;
        bal_mask = mask;
      } else {
        Int lhs = cross * bal_vol, rhs = bal_cross * vol;
        if (lhs < rhs || (lhs == rhs && subset_less(mask, bal_mask))) {
          bal_cross = cross;
          bal_vol = vol;
          bal_mask = mask;
        }
      }
    }
  }

  void run() {
    const uint64_t total = 1ULL << n;
    mask = 0;
    cross = Int(0);
    vol = Int(0);
    for (uint64_t i = 1; i < total; ++i) {
      flip(static_cast<uint32_t>(std::countr_zero(i)));
      consider();
    }
  }
};

}  // namespace

ConductanceReport conductance_exact(const TransitionMatrix& p, size_t max_states) {
  if (!p.has_weights())
    throw std::invalid_argument("conductance: chain carries no edge weights");
  const size_t n = p.size();
  if (n < 2) throw std::invalid_argument("conductance: need at least two states");
  if (n > max_states)
    throw std::length_error("conductance: exact enumeration capped at " +
                            std::to_string(max_states) + " states");
  const WeightedGraph& w = p.weights();

  ConductanceReport rep;
  rep.exact = true;
  rep.cuts_evaluated = (1ULL << n) - 2;

  // int64 fast path when all quantities fit comfortably; the comparison
  // products then fit in 128 bits.
  bool small = w.total_degree() < BigInt(1) << 62;
  if (small) {
    std::vector<std::vector<std::pair<uint32_t, __int128>>> adj(n);
    std::vector<__int128> deg(n);
    for (size_t i = 0; i < n; ++i) {
      deg[i] = static_cast<__int128>(w.degrees()[i].convert_to<int64_t>());
      for (const auto& [j, wt] : w.adjacency()[i])
        adj[i].emplace_back(j, static_cast<__int128>(wt.convert_to<int64_t>()));
    }
    GrayScan<__int128> scan{adj, deg, static_cast<uint32_t>(n),
                            static_cast<__int128>(w.total_degree().convert_to<int64_t>())};
    scan.run();
    rep.phi = Rational(BigInt(static_cast<int64_t>(scan.best_cross)),
                       BigInt(static_cast<int64_t>(scan.best_vol)));
    rep.witness = mask_to_indices(scan.best_mask);
    rep.phi_balanced = Rational(BigInt(static_cast<int64_t>(scan.bal_cross)),
                                BigInt(static_cast<int64_t>(scan.bal_vol)));
    rep.witness_balanced = mask_to_indices(scan.bal_mask);
  } else {
    std::vector<std::vector<std::pair<uint32_t, BigInt>>> adj(n);
    std::vector<BigInt> deg(n);
    for (size_t i = 0; i < n; ++i) {
      deg[i] = w.degrees()[i];
      adj[i] = w.adjacency()[i];
    }
    GrayScan<BigInt> scan{adj, deg, static_cast<uint32_t>(n), w.total_degree()};
    scan.run();
    rep.phi = Rational(scan.best_cross, scan.best_vol);
    rep.witness = mask_to_indices(scan.best_mask);
    rep.phi_balanced = Rational(scan.bal_cross, scan.bal_vol);
    rep.witness_balanced = mask_to_indices(scan.bal_mask);
  }

  BigInt min_deg = w.degrees()[0];
  for (const BigInt& d : w.degrees()) min_deg = std::min(min_deg, d);
  rep.pi_min = Rational(min_deg, w.total_degree());
  return rep;
}

ConductanceReport conductance_cuts(const TransitionMatrix& p,
                                   const std::vector<std::vector<uint32_t>>& cuts) {
  if (!p.has_weights())
    throw std::invalid_argument("conductance: chain carries no edge weights");
  if (cuts.empty()) throw std::invalid_argument("conductance: no cuts supplied");
  const size_t n = p.size();
  const WeightedGraph& w = p.weights();

  ConductanceReport rep;
  rep.exact = false;
  rep.cuts_evaluated = cuts.size();
  bool have = false, have_bal = false;
  Rational best, best_bal;
  std::vector<uint32_t> best_set, best_bal_set;
  for (const auto& cut : cuts) {
    std::vector<char> in(n, 0);
    for (uint32_t v : cut) {
      if (v >= n) throw std::invalid_argument("conductance: cut vertex out of range");
      in[v] = 1;
    }
    size_t size = cut.size();
    if (size == 0 || size >= n)
      throw std::invalid_argument("conductance: cuts must be proper and nonempty");
    BigInt cross = 0, vol = 0;
    for (uint32_t v = 0; v < n; ++v) {
      if (!in[v]) continue;
      vol += w.degrees()[v];
      for (const auto& [u, wt] : w.adjacency()[v])
        if (u != v && !in[u]) cross += wt;
    }
    Rational phi(cross, vol);
    std::vector<uint32_t> sorted(cut);
    std::sort(sorted.begin(), sorted.end());
    if (!have || phi < best || (phi == best && sorted < best_set)) {
      have = true;
      best = phi;
      best_set = sorted;
    }
    if (2 * vol <= w.total_degree() &&
        (!have_bal || phi < best_bal || (phi == best_bal && sorted < best_bal_set))) {
      have_bal = true;
      best_bal = phi;
      best_bal_set = sorted;
    }
  }
  rep.phi = best;
  rep.witness = best_set;
  rep.phi_balanced = have_bal ? best_bal : best;
  rep.witness_balanced = have_bal ? best_bal_set : best_set;
  BigInt min_deg = w.degrees()[0];
  for (const BigInt& d : w.degrees()) min_deg = std::min(min_deg, d);
  rep.pi_min = Rational(min_deg, w.total_degree());
  return rep;
}

double conductance_mixing_bound(const Rational& phi, const Rational& pi_min, double eps) {
  if (phi <= 0 || pi_min <= 0)
    throw std::invalid_argument("mixing bound: phi and pi_min must be positive");
  if (eps <= 0 || eps >= 1)
    throw std::invalid_argument("mixing bound: eps must lie in (0,1)");
  double p = to_double(phi);
  return 2.0 / (p * p) * std::log(2.0 / (to_double(pi_min) * eps));
}

double conductance_mixing_bound(const ConductanceReport& report, double eps) {
  return conductance_mixing_bound(report.phi, report.pi_min, eps);
}

}  // namespace mixgap
