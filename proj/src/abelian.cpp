#include "ortho/abelian.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "ortho/numth.hpp"

namespace ortho::abelian {

AbelianGroup::AbelianGroup(std::vector<int64_t> orders) {
  for (int64_t r : orders) {
    if (r < 1) throw std::invalid_argument("group factor orders must be positive");
    if (r > 1) orders_.push_back(r);
  }
  for (size_t i = 0; i + 1 < orders_.size(); ++i) {
    if (orders_[i + 1] % orders_[i] != 0)
      throw std::invalid_argument("group factor orders must form a divisibility chain");
  }
  for (int64_t r : orders_) size_ *= r;
}

int64_t AbelianGroup::add(int64_t a, int64_t b) const {
  int64_t out = 0, stride = 1;
  for (int64_t r : orders_) {
    int64_t ca = (a / stride) % r, cb = (b / stride) % r;
    out += ((ca + cb) % r) * stride;
    stride *= r;
  }
  return out;
}

int64_t AbelianGroup::neg(int64_t a) const {
  int64_t out = 0, stride = 1;
  for (int64_t r : orders_) {
    int64_t ca = (a / stride) % r;
    out += ((r - ca) % r) * stride;
    stride *= r;
  }
  return out;
}

std::vector<int64_t> AbelianGroup::coords(int64_t idx) const {
  if (idx < 0 || idx >= size_) throw std::invalid_argument("element index out of range");
  std::vector<int64_t> c(orders_.size());
  for (size_t i = 0; i < orders_.size(); ++i) {
    c[i] = idx % orders_[i];
    idx /= orders_[i];
  }
  return c;
}

int64_t AbelianGroup::index(const std::vector<int64_t>& coords) const {
  if (coords.size() != orders_.size()) throw std::invalid_argument("coordinate count mismatch");
  int64_t idx = 0, stride = 1;
  for (size_t i = 0; i < orders_.size(); ++i) {
    int64_t c = coords[i] % orders_[i];
    if (c < 0) c += orders_[i];
    idx += c * stride;
    stride *= orders_[i];
  }
  return idx;
}

std::string AbelianGroup::name() const {
  if (orders_.empty()) return "Z/1";
  std::ostringstream os;
  for (size_t i = 0; i < orders_.size(); ++i) {
    if (i) os << " x ";
    os << "Z/" << orders_[i];
  }
  return os.str();
}

namespace {

// Partitions of n into non-increasing positive parts, largest-first order.
void partitions_rec(int64_t n, int64_t max_part, std::vector<int64_t>& cur,
                    std::vector<std::vector<int64_t>>& out) {
  if (n == 0) {
    out.push_back(cur);
    return;
  }
  for (int64_t part = std::min(n, max_part); part >= 1; --part) {
    cur.push_back(part);
    partitions_rec(n - part, part, cur, out);
    cur.pop_back();
  }
}

std::vector<std::vector<int64_t>> partitions(int64_t n) {
  std::vector<std::vector<int64_t>> out;
  std::vector<int64_t> cur;
  partitions_rec(n, n, cur, out);
  return out;
}

int64_t ipow(int64_t b, int64_t e) {
  int64_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

// Extended gcd based CRT for coprime moduli.
int64_t egcd(int64_t a, int64_t b, int64_t& x, int64_t& y) {
  if (b == 0) {
    x = 1;
    y = 0;
    return a;
  }
  int64_t x1, y1;
  int64_t g = egcd(b, a % b, x1, y1);
  x = y1;
  y = x1 - (a / b) * y1;
  return g;
}

int64_t crt_pair(int64_t a1, int64_t m1, int64_t a2, int64_t m2) {
  int64_t x, y;
  int64_t g = egcd(m1, m2, x, y);
  if (g != 1) throw std::logic_error("crt moduli not coprime");
  int64_t m = m1 * m2;
  __int128 r = (__int128)a1 + (__int128)((a2 - a1) % m2 + m2) % m2 * x % m2 * m1;
  int64_t out = (int64_t)(r % m);
  if (out < 0) out += m;
  return out;
}

}  // namespace

std::vector<AbelianGroup> all_abelian_groups(int64_t order) {
  if (order < 1) throw std::invalid_argument("group order must be positive");
  auto fact = numth::factorize(order);
  std::vector<std::vector<std::vector<int64_t>>> per_prime;
  for (auto [p, a] : fact.factors) {
    (void)p;
    per_prime.push_back(partitions(a));
  }
  std::vector<AbelianGroup> out;
  std::vector<size_t> sel(per_prime.size(), 0);
  while (true) {
    size_t max_len = 0;
    for (size_t i = 0; i < per_prime.size(); ++i)
      max_len = std::max(max_len, per_prime[i][sel[i]].size());
    std::vector<int64_t> chain(max_len, 1);
    for (size_t i = 0; i < per_prime.size(); ++i) {
      const auto& parts = per_prime[i][sel[i]];
      int64_t p = fact.factors[i].first;
      for (size_t r = 0; r < parts.size(); ++r)
        chain[max_len - 1 - r] *= ipow(p, parts[r]);
    }
    out.emplace_back(chain);
    size_t i = 0;
    for (; i < per_prime.size(); ++i) {
      if (++sel[i] < per_prime[i].size()) break;
      sel[i] = 0;
    }
    if (i == per_prime.size()) break;
  }
  std::sort(out.begin(), out.end(), [](const AbelianGroup& a, const AbelianGroup& b) {
    return a.factor_orders() < b.factor_orders();
  });
  return out;
}

int64_t UnitGroupIso::forward(int64_t u) const {
  int64_t r = ((u % modulus) + modulus) % modulus;
  if (fwd[r] < 0) throw std::invalid_argument("residue is not a unit");
  return fwd[r];
}

int64_t UnitGroupIso::backward(int64_t idx) const {
  if (idx < 0 || idx >= (int64_t)bwd.size()) throw std::invalid_argument("element index out of range");
  return bwd[idx];
}

UnitGroupIso unit_group(int64_t e) {
  if (e < 1) throw std::invalid_argument("modulus must be positive");
  auto fact = numth::factorize(e);
  if (!numth::is_squarefree(fact)) throw std::invalid_argument("modulus must be squarefree");

  // One piece per prime-power factor of q-1, for each odd prime q | e.
  struct Piece {
    int64_t q;
    std::vector<int64_t> dlog;  // dlog table mod q
    int64_t pk;                 // p^a
    int64_t prime;
    int slot = -1;
  };
  std::vector<Piece> pieces;
  for (auto [q, a] : fact.factors) {
    (void)a;
    if (q == 2) continue;
    int64_t g = numth::primitive_root(q);
    auto dl = numth::dlog_table(g, q);
    for (auto [p, b] : numth::factorize(q - 1).factors)
      pieces.push_back({q, dl, ipow(p, b), p, -1});
  }

  // Assign prime-power pieces to invariant-factor slots: for each prime, the
  // largest power goes to the last (largest) factor, and so on downward.
  std::map<int64_t, std::vector<size_t>> by_prime;
  for (size_t i = 0; i < pieces.size(); ++i) by_prime[pieces[i].prime].push_back(i);
  size_t num_slots = 0;
  for (auto& [p, idxs] : by_prime) {
    (void)p;
    std::sort(idxs.begin(), idxs.end(),
              [&](size_t a, size_t b) { return pieces[a].pk > pieces[b].pk; });
    num_slots = std::max(num_slots, idxs.size());
  }
  std::vector<int64_t> chain(num_slots, 1);
  for (auto& [p, idxs] : by_prime) {
    (void)p;
    for (size_t r = 0; r < idxs.size(); ++r) {
      int slot = (int)(num_slots - 1 - r);
      pieces[idxs[r]].slot = slot;
      chain[slot] *= pieces[idxs[r]].pk;
    }
  }

  UnitGroupIso iso;
  iso.modulus = e;
  iso.group = AbelianGroup(chain);
  iso.fwd.assign(e, -1);
  iso.bwd.assign(iso.group.order(), -1);

  for (int64_t u = 0; u < e; ++u) {
    if (std::gcd(u, e) != 1) continue;
    std::vector<int64_t> slot_res(num_slots, 0), slot_mod(num_slots, 1);
    for (const auto& pc : pieces) {
      int64_t t = pc.dlog[u % pc.q];
      slot_res[pc.slot] = crt_pair(slot_res[pc.slot], slot_mod[pc.slot], t % pc.pk, pc.pk);
      slot_mod[pc.slot] *= pc.pk;
    }
    int64_t idx = iso.group.index(slot_res);
    iso.fwd[u] = idx;
    if (iso.bwd[idx] != -1) throw consistency_error("unit group map is not injective");
    iso.bwd[idx] = u;
  }
  for (int64_t v : iso.bwd)
    if (v == -1) throw consistency_error("unit group map is not surjective");
  return iso;
}

uint64_t count_zero_sum_halves(const AbelianGroup& g) {
  int64_t n = g.order();
  if (n > 31) throw std::invalid_argument("group too large for exact half counting");
  // dp[c][s]: ways to pick c of the items seen so far with sum s.
  std::vector<std::vector<uint64_t>> dp(n + 1, std::vector<uint64_t>(n, 0));
  dp[0][0] = 1;
  for (int64_t item = 0; item < 2 * n; ++item) {
    int64_t v = item % n;
    for (int64_t c = std::min(item, n - 1); c >= 0; --c)
      for (int64_t s = 0; s < n; ++s)
        if (dp[c][s]) dp[c + 1][g.add(s, v)] += dp[c][s];
  }
  return dp[n][0];
}

double split_lower_bound(int64_t group_order) {
  double n = (double)group_order;
  return std::pow(4.0, n) / (2.0 * std::pow(n + 1.0, 1.5));
}

bool count_meets_split_lower_bound(uint64_t count, int64_t group_order) {
  // count >= 4^N / (2 (N+1)^{3/2})  <=>  4 count^2 (N+1)^3 >= 16^N.
  namespace mp = boost::multiprecision;
  mp::cpp_int c = count, m = group_order + 1;
  return 4 * c * c * m * m * m >= mp::pow(mp::cpp_int(16), (unsigned)group_order);
}

namespace {

void splits_rec(const AbelianGroup& g, const std::vector<int64_t>& s, size_t idx, int64_t chosen,
                int64_t sum, std::vector<int>& left, std::vector<Split>& out) {
  int64_t half = (int64_t)s.size() / 2;
  if (chosen == half) {
    if (sum != 0) return;
    Split sp;
    sp.left = left;
    size_t li = 0;
    for (int i = 0; i < (int)s.size(); ++i) {
      if (li < left.size() && left[li] == i)
        ++li;
      else
        sp.right.push_back(i);
    }
    out.push_back(std::move(sp));
    return;
  }
  if ((int64_t)(s.size() - idx) < half - chosen) return;
  left.push_back((int)idx);
  splits_rec(g, s, idx + 1, chosen + 1, g.add(sum, s[idx]), left, out);
  left.pop_back();
  splits_rec(g, s, idx + 1, chosen, sum, left, out);
}

}  // namespace

std::vector<Split> enumerate_splits(const AbelianGroup& g, const std::vector<int64_t>& s_elts) {
  if (s_elts.size() % 2 != 0) throw std::invalid_argument("multiset size must be even");
  int64_t total = 0;
  for (int64_t v : s_elts) total = g.add(total, v);
  if (total != 0) throw std::invalid_argument("multiset must sum to zero");
  std::vector<Split> out;
  std::vector<int> left;
  splits_rec(g, s_elts, 0, 0, 0, left, out);
  return out;
}

std::pair<std::vector<int64_t>, std::vector<int64_t>> decompose_sum(const AbelianGroup& g,
                                                                    const std::vector<int64_t>& f) {
  int64_t n = g.order();
  if ((int64_t)f.size() != n) throw std::invalid_argument("function size must match group order");
  int64_t total = 0;
  for (int64_t v : f) {
    if (v < 0 || v >= n) throw std::invalid_argument("function value out of range");
    total = g.add(total, v);
  }
  if (total != 0) throw std::invalid_argument("function must sum to zero");

  std::vector<int64_t> p1(n, -1), p2(n, -1);
  std::vector<char> used1(n, 0), used2(n, 0);

  // Most-constrained-first backtracking over positions; p2 is forced by p1.
  auto solve = [&](auto&& self, int64_t depth) -> bool {
    if (depth == n) return true;
    int64_t best = -1, best_cnt = n + 1;
    for (int64_t a = 0; a < n; ++a) {
      if (p1[a] != -1) continue;
      int64_t cnt = 0;
      for (int64_t v = 0; v < n; ++v)
        if (!used1[v] && !used2[g.add(f[a], g.neg(v))]) ++cnt;
      if (cnt < best_cnt) {
        best_cnt = cnt;
        best = a;
        if (cnt == 0) break;
      }
    }
    if (best_cnt == 0) return false;
    for (int64_t v = 0; v < n; ++v) {
      int64_t w = g.add(f[best], g.neg(v));
      if (used1[v] || used2[w]) continue;
      p1[best] = v;
      p2[best] = w;
      used1[v] = used2[w] = 1;
      if (self(self, depth + 1)) return true;
      p1[best] = p2[best] = -1;
      used1[v] = used2[w] = 0;
    }
    return false;
  };
  if (!solve(solve, 0)) throw consistency_error("zero-sum function did not decompose");
  return {p1, p2};
}

std::vector<int64_t> assign_labels(const AbelianGroup& g, std::vector<int64_t> labels) {
  int64_t n = g.order();
  if ((int64_t)labels.size() != n) throw std::invalid_argument("label count must match group order");
  std::sort(labels.begin(), labels.end());
  auto [p1, p2] = decompose_sum(g, labels);

  std::vector<int64_t> ell(n, -1);
  for (int64_t a = 0; a < n; ++a) ell[g.neg(p2[a])] = labels[a];

  // a -> a + ell(a) must be a bijection and ell must realize the label multiset.
  std::vector<int64_t> check = ell;
  std::sort(check.begin(), check.end());
  if (check != labels) throw consistency_error("labeling lost the label multiset");
  std::vector<char> hit(n, 0);
  for (int64_t a = 0; a < n; ++a) {
    int64_t y = g.add(a, ell[a]);
    if (hit[y]) throw consistency_error("labeling is not a bijection");
    hit[y] = 1;
  }
  return ell;
}

}  // namespace ortho::abelian
