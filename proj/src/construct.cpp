#include "ortho/construct.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ortho/search.hpp"

namespace ortho::construct {

namespace mp = boost::multiprecision;

bool admissible(int64_t n) {
  if (n < 6 || n % 2 != 0) return false;
  int64_t p = n / 2;
  if (p % 2 == 0 || !numth::is_prime(p)) return false;
  return numth::is_squarefree(p - 1);
}

int DivisorPoset::node_of(int64_t d) const {
  auto it = std::lower_bound(divisors.begin(), divisors.end(), d);
  if (it == divisors.end() || *it != d) throw std::invalid_argument("not a divisor of p-1");
  return (int)(it - divisors.begin());
}

LabeledPoset build_poset(int64_t n) {
  if (!admissible(n)) throw std::invalid_argument("n must be 2p, p an odd prime, p-1 squarefree");
  LabeledPoset lp;
  lp.poset.n = n;
  lp.poset.p = n / 2;
  lp.poset.pm1 = numth::factorize(lp.poset.p - 1);
  lp.poset.divisors = numth::divisors(lp.poset.pm1);
  lp.labels.assign(lp.poset.divisors.size(), {});
  for (int64_t v = 1; v < n; ++v)
    lp.labels[lp.poset.node_of(std::gcd(v, lp.poset.p - 1))].push_back(v);
  return lp;
}

namespace {

// Labels at node d eligible for removal: those that are 1 mod (p-1)/d.
std::vector<int64_t> eligible_labels(const std::vector<int64_t>& labels, int64_t e) {
  std::vector<int64_t> out;
  for (int64_t v : labels)
    if (v % e == 1 % e) out.push_back(v);
  return out;
}

void insert_sorted(std::vector<int64_t>& v, int64_t x) {
  v.insert(std::upper_bound(v.begin(), v.end(), x), x);
}

void erase_one(std::vector<int64_t>& v, int64_t x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it == v.end() || *it != x) throw std::invalid_argument("label not present at node");
  v.erase(it);
}

void walks_rec(const DivisorPoset& poset, const std::vector<int64_t>& chain, size_t step,
               std::vector<std::vector<int64_t>>& labels, std::vector<int64_t>& picks,
               std::vector<WalkChoice>& out) {
  if (step == chain.size()) {
    out.push_back({chain, picks});
    return;
  }
  int64_t d = chain[step];
  int64_t e = (poset.p - 1) / d;
  int node = poset.node_of(d);
  auto elig = eligible_labels(labels[node], e);
  if (elig.size() != 3) throw consistency_error("walk node does not have exactly three eligible labels");
  for (int64_t pick : elig) {
    erase_one(labels[node], pick);
    if (step + 1 < chain.size()) insert_sorted(labels[poset.node_of(chain[step + 1])], pick);
    picks.push_back(pick);
    walks_rec(poset, chain, step + 1, labels, picks, out);
    picks.pop_back();
    if (step + 1 < chain.size()) erase_one(labels[poset.node_of(chain[step + 1])], pick);
    insert_sorted(labels[node], pick);
  }
}

}  // namespace

std::vector<WalkChoice> enumerate_walks(int64_t n) {
  LabeledPoset initial = build_poset(n);
  std::vector<int64_t> primes;
  for (auto [q, a] : initial.poset.pm1.factors) {
    (void)a;
    primes.push_back(q);
  }
  std::sort(primes.begin(), primes.end());
  std::vector<WalkChoice> out;
  do {
    std::vector<int64_t> chain{1};
    for (int64_t q : primes) chain.push_back(chain.back() * q);
    auto labels = initial.labels;
    std::vector<int64_t> picks;
    walks_rec(initial.poset, chain, 0, labels, picks, out);
  } while (std::next_permutation(primes.begin(), primes.end()));
  return out;
}

LabeledPoset run_walk(const LabeledPoset& initial, const WalkChoice& choice) {
  if (initial.leftover) throw std::invalid_argument("poset has already been walked");
  const DivisorPoset& poset = initial.poset;
  int64_t pm1 = poset.p - 1;
  const auto& chain = choice.chain;
  if (chain.empty() || chain.front() != 1 || chain.back() != pm1)
    throw std::invalid_argument("chain must run from 1 to p-1");
  for (size_t i = 0; i + 1 < chain.size(); ++i) {
    if (chain[i + 1] % chain[i] != 0 || !numth::is_prime(chain[i + 1] / chain[i]))
      throw std::invalid_argument("chain steps must multiply by a prime");
  }
  if (choice.picks.size() != chain.size())
    throw std::invalid_argument("one pick per chain node required");

  LabeledPoset cur = initial;
  for (size_t step = 0; step < chain.size(); ++step) {
    int64_t d = chain[step];
    int64_t e = pm1 / d;
    int node = poset.node_of(d);
    auto elig = eligible_labels(cur.labels[node], e);
    if (elig.size() != 3) throw consistency_error("walk node does not have exactly three eligible labels");
    int64_t pick = choice.picks[step];
    if (pick % e != 1 % e) throw std::invalid_argument("pick is not 1 mod (p-1)/d");
    erase_one(cur.labels[node], pick);
    if (step + 1 < chain.size())
      insert_sorted(cur.labels[poset.node_of(chain[step + 1])], pick);
    else
      cur.leftover = pick;
  }
  return cur;
}

uint64_t distinct_walk_configurations(int64_t n) {
  LabeledPoset initial = build_poset(n);
  std::set<std::string> seen;
  for (const auto& w : enumerate_walks(n)) {
    LabeledPoset fin = run_walk(initial, w);
    std::ostringstream key;
    for (const auto& node : fin.labels) {
      for (int64_t v : node) key << v << ',';
      key << ';';
    }
    key << *fin.leftover;
    seen.insert(key.str());
  }
  return (uint64_t)seen.size();
}

namespace {

// Argument classification for n = 2p: x != p has t(x) the index of x mod p to
// the smallest primitive root, and falls to node gcd(t, p-1), with t = 0
// classed as p-1.
struct ArgTable {
  int64_t p = 0;
  int64_t g = 0;
  std::vector<int64_t> tval;  // by x in [0, n); -1 where undefined
  std::vector<int64_t> cls;
};

ArgTable arg_table(int64_t n) {
  ArgTable at;
  at.p = n / 2;
  at.g = numth::primitive_root(at.p);
  auto dl = numth::dlog_table(at.g, at.p);
  at.tval.assign(n, -1);
  at.cls.assign(n, -1);
  for (int64_t x = 1; x < n; ++x) {
    if (x == at.p) continue;
    int64_t t = dl[x % at.p];
    at.tval[x] = t;
    at.cls[x] = t == 0 ? at.p - 1 : std::gcd(t, at.p - 1);
  }
  return at;
}

}  // namespace

OrthoCertificate realize_sigma(const LabeledPoset& final_poset,
                               const std::vector<abelian::Split>& node_splits) {
  const DivisorPoset& poset = final_poset.poset;
  if (!final_poset.leftover) throw std::invalid_argument("poset walk is not finished");
  if (node_splits.size() != poset.divisors.size())
    throw std::invalid_argument("one split per node required");

  int64_t n = poset.n, p = poset.p;
  ArgTable at = arg_table(n);
  std::vector<std::vector<int64_t>> args(poset.divisors.size());
  for (int64_t x = 1; x < n; ++x)
    if (x != p) args[poset.node_of(at.cls[x])].push_back(x);

  std::vector<int64_t> sig(n - 1, -1);
  sig[p - 1] = *final_poset.leftover;

  for (size_t i = 0; i < poset.divisors.size(); ++i) {
    int64_t d = poset.divisors[i];
    int64_t e = (p - 1) / d;
    auto iso = abelian::unit_group(e);
    const auto& G = iso.group;
    int64_t N = G.order();
    const auto& labels = final_poset.labels[i];
    if ((int64_t)labels.size() != 2 * N || (int64_t)args[i].size() != 2 * N)
      throw consistency_error("node population does not match 2 phi((p-1)/d)");

    const auto& split = node_splits[i];
    if ((int64_t)split.left.size() != N || (int64_t)split.right.size() != N)
      throw std::invalid_argument("split halves must each have phi((p-1)/d) labels");

    for (int side = 0; side < 2; ++side) {
      const auto& half = side == 0 ? split.left : split.right;
      // Left half labels the even arguments, right half the odd ones.
      std::vector<int64_t> side_args;
      for (int64_t x : args[i])
        if ((x % 2 == 0) == (side == 0)) side_args.push_back(x);
      if ((int64_t)side_args.size() != N)
        throw consistency_error("arguments do not split evenly by parity");

      std::vector<int64_t> side_elts;
      std::map<int64_t, std::vector<int64_t>> pool;  // group element -> labels, ascending
      for (int idx : half) {
        if (idx < 0 || idx >= (int64_t)labels.size())
          throw std::invalid_argument("split index out of range");
        int64_t v = labels[idx];
        int64_t elt = iso.forward(v % e);
        side_elts.push_back(elt);
        pool[elt].push_back(v);
      }
      auto ell = abelian::assign_labels(G, side_elts);
      for (int64_t x : side_args) {
        int64_t a = iso.forward((at.tval[x] / d) % e);
        auto& bucket = pool[ell[a]];
        if (bucket.empty()) throw consistency_error("label pool ran dry");
        sig[x - 1] = bucket.front();
        bucket.erase(bucket.begin());
      }
    }
  }

  return make_certificate(Permutation(n, std::move(sig)), OrthoKind::Exponential);
}

namespace {

void splits_product_rec(const LabeledPoset& fin,
                        const std::vector<std::vector<abelian::Split>>& per_node, size_t i,
                        std::vector<abelian::Split>& chosen,
                        std::map<std::vector<int64_t>, OrthoCertificate>& sink) {
  if (i == per_node.size()) {
    OrthoCertificate cert = realize_sigma(fin, chosen);
    sink.emplace(cert.sigma.map, std::move(cert));
    return;
  }
  for (const auto& sp : per_node[i]) {
    chosen.push_back(sp);
    splits_product_rec(fin, per_node, i + 1, chosen, sink);
    chosen.pop_back();
  }
}

void generate_for_walks(const LabeledPoset& initial, const std::vector<WalkChoice>& walks,
                        size_t begin, size_t end,
                        std::map<std::vector<int64_t>, OrthoCertificate>& sink) {
  int64_t p = initial.poset.p;
  for (size_t wi = begin; wi < end; ++wi) {
    LabeledPoset fin = run_walk(initial, walks[wi]);
    std::vector<std::vector<abelian::Split>> per_node;
    for (size_t i = 0; i < fin.poset.divisors.size(); ++i) {
      int64_t e = (p - 1) / fin.poset.divisors[i];
      auto iso = abelian::unit_group(e);
      std::vector<int64_t> elts;
      for (int64_t v : fin.labels[i]) elts.push_back(iso.forward(v % e));
      per_node.push_back(abelian::enumerate_splits(iso.group, elts));
    }
    std::vector<abelian::Split> chosen;
    splits_product_rec(fin, per_node, 0, chosen, sink);
  }
}

}  // namespace

std::vector<OrthoCertificate> generate_all(int64_t n, int threads) {
  LabeledPoset initial = build_poset(n);
  auto walks = enumerate_walks(n);
  std::map<std::vector<int64_t>, OrthoCertificate> merged;
  if (threads <= 1 || walks.size() < 2) {
    generate_for_walks(initial, walks, 0, walks.size(), merged);
  } else {
    size_t t = std::min<size_t>(threads, walks.size());
    std::vector<std::map<std::vector<int64_t>, OrthoCertificate>> parts(t);
    std::vector<std::thread> pool;
    size_t chunk = (walks.size() + t - 1) / t;
    for (size_t i = 0; i < t; ++i) {
      size_t b = i * chunk, e = std::min(walks.size(), b + chunk);
      pool.emplace_back(
          [&, b, e, i] { generate_for_walks(initial, walks, b, e, parts[i]); });
    }
    for (auto& th : pool) th.join();
    for (auto& part : parts)
      for (auto& kv : part) merged.insert(std::move(kv));
  }
  std::vector<OrthoCertificate> out;
  out.reserve(merged.size());
  for (auto& kv : merged) out.push_back(std::move(kv.second));
  return out;
}

std::string BoundValue::exact_string() const {
  return num.str() + "/" + den.str();
}

namespace {

int odd_prime_count_or_throw(int64_t n) {
  if (!admissible(n)) throw std::invalid_argument("n must be 2p, p an odd prime, p-1 squarefree");
  int64_t p = n / 2;
  int k = (int)numth::factorize(p - 1).factors.size() - 1;
  if (k < 1)
    throw std::invalid_argument("bound needs p-1 to have an odd prime factor");
  return k;
}

mp::cpp_int factorial(int m) {
  mp::cpp_int f = 1;
  for (int i = 2; i <= m; ++i) f *= i;
  return f;
}

double ratio_approx(const mp::cpp_int& num, const mp::cpp_int& den) {
  return num.convert_to<double>() / den.convert_to<double>();
}

}  // namespace

BoundValue theorem3_bound(int64_t n) {
  int k = odd_prime_count_or_throw(n);
  int64_t half_pow = int64_t(1) << (k - 1);  // 2^{k-1}
  BoundValue b;
  b.num = factorial(k + 2) * mp::pow(mp::cpp_int(3), k + 1) *
          mp::pow(mp::cpp_int(2), (unsigned)(n - half_pow));
  b.den = 4 * mp::pow(mp::cpp_int(n - 2), (unsigned)(3 * half_pow));
  b.approx = ratio_approx(b.num, b.den);
  return b;
}

BoundValue theorem3_product_form(int64_t n) {
  int k = odd_prime_count_or_throw(n);
  int64_t p = n / 2;
  auto divs = numth::divisors(numth::factorize(p - 1));
  BoundValue b;
  b.num = factorial(k + 2) * mp::pow(mp::cpp_int(3), k + 1);
  b.den = 1;
  mp::cpp_int divisor_product = 1;
  for (int64_t e : divs) {
    b.num *= mp::pow(mp::cpp_int(4), (unsigned)numth::totient(e));
    b.den *= 2;
    divisor_product *= e;
  }
  // prod e^{3/2} over all divisors is the integer sqrt of (prod e)^3.
  mp::cpp_int cube = divisor_product * divisor_product * divisor_product;
  mp::cpp_int root = mp::sqrt(cube);
  if (root * root != cube) throw consistency_error("divisor product cube is not a perfect square");
  b.den *= root;
  b.approx = ratio_approx(b.num, b.den);
  return b;
}

uint64_t walk_count_by_construction(int k) {
  if (k < 0) throw std::invalid_argument("k must be nonnegative");
  uint64_t r = 1;
  for (int i = 2; i <= k + 1; ++i) r *= (uint64_t)i;
  for (int i = 0; i < k + 2; ++i) r *= 3;
  return r;
}

uint64_t walk_count_prefactor(int k) {
  if (k < 0) throw std::invalid_argument("k must be nonnegative");
  uint64_t r = 1;
  for (int i = 2; i <= k + 2; ++i) r *= (uint64_t)i;
  for (int i = 0; i < k + 1; ++i) r *= 3;
  return r;
}

PrimeBridge prime_reduction(int64_t n) {
  if (n < 3 || !numth::is_prime(n)) throw std::invalid_argument("n must be an odd prime");
  PrimeBridge pb;
  pb.n = n;
  int64_t m = n - 1;

  search::SearchSpec es;
  es.n = n;
  es.kind = OrthoKind::Exponential;
  es.mode = search::SearchMode::EnumerateAll;
  auto exp_res = search::enumerate(es);
  search::SearchSpec ms = es;
  ms.n = m;
  ms.kind = OrthoKind::Multiplicative;
  auto mult_res = search::enumerate(ms);
  pb.exp_count = exp_res.count;
  pb.mult_count = mult_res.count;

  int64_t g = numth::primitive_root(n);
  std::set<std::vector<int64_t>> exp_set, mult_set;
  for (const auto& c : exp_res.certificates) exp_set.insert(c.sigma.map);
  for (const auto& c : mult_res.certificates) mult_set.insert(c.sigma.map);

  bool ok = exp_set.size() == mult_set.size();
  // Exponential mod n -> multiplicative mod n-1: read arguments through
  // powers of g. sigma(1) = n-1 is forced, freeing [1, n-2] for the rest.
  for (const auto& c : exp_res.certificates) {
    if (c.sigma.sigma(1) != n - 1) {
      ok = false;
      break;
    }
    std::vector<int64_t> tilde(m - 1);
    int64_t pw = 1;
    for (int64_t t = 1; t < m; ++t) {
      pw = pw * g % n;
      tilde[t - 1] = c.sigma.sigma(pw);
    }
    Permutation tp(m, tilde);
    if (!is_orthomorphism(tp, OrthoKind::Multiplicative) || !mult_set.count(tp.map)) ok = false;
  }
  // And back.
  for (const auto& c : mult_res.certificates) {
    std::vector<int64_t> sig(n - 1);
    sig[0] = n - 1;
    int64_t pw = 1;
    for (int64_t t = 1; t < m; ++t) {
      pw = pw * g % n;
      sig[pw - 1] = c.sigma.sigma(t);
    }
    Permutation sp(n, sig);
    if (!is_orthomorphism(sp, OrthoKind::Exponential) || !exp_set.count(sp.map)) ok = false;
  }
  pb.maps_verified = ok;
  return pb;
}

namespace {

int64_t to_range_mod(int64_t v, int64_t m) {
  int64_t r = v % m;
  return r == 0 ? m : r;
}

}  // namespace

Reformulation reformulate(int64_t n, const Permutation& sigma) {
  int64_t p = n / 2;
  if (n < 6 || n % 2 != 0 || p % 2 == 0 || !numth::is_prime(p))
    throw std::invalid_argument("n must be twice an odd prime");
  if (sigma.n != n || !sigma.is_bijection()) throw std::invalid_argument("sigma must be a bijection");
  Reformulation r;
  r.n = n;
  int64_t m = p - 1;
  for (int64_t x = 1; x < n; x += 2)
    if (x != p) r.a.push_back(to_range_mod(sigma.sigma(x), m));
  for (int64_t x = 2; x < n; x += 2) r.b.push_back(to_range_mod(sigma.sigma(x), m));
  r.c = to_range_mod(sigma.sigma(p), m);
  return r;
}

bool reformulation_valid(const Reformulation& r) {
  int64_t n = r.n, p = n / 2, m = p - 1;
  if ((int64_t)r.a.size() != m || (int64_t)r.b.size() != m) return false;
  auto in_range = [&](int64_t v) { return v >= 1 && v <= m; };
  if (!in_range(r.c)) return false;
  std::vector<int64_t> mult(m + 1, 0);
  for (int64_t v : r.a) {
    if (!in_range(v)) return false;
    ++mult[v];
  }
  for (int64_t v : r.b) {
    if (!in_range(v)) return false;
    ++mult[v];
  }
  ++mult[r.c];
  // Values are drawn from the multiset with 1 three times, everything else twice.
  for (int64_t v = 1; v <= m; ++v)
    if (mult[v] != (v == 1 ? 3 : 2)) return false;

  ArgTable at = arg_table(n);
  // On each parity side the products t(x) sigma(x) must sweep Z/(p-1).
  for (int side = 0; side < 2; ++side) {
    std::vector<char> hit(m, 0);
    size_t i = 0;
    for (int64_t x = side == 0 ? 2 : 1; x < n; x += 2) {
      if (x == p) continue;
      int64_t v = side == 0 ? r.b[i] : r.a[i];
      ++i;
      int64_t prod = (at.tval[x] % m) * (v % m) % m;
      if (hit[prod]) return false;
      hit[prod] = 1;
    }
  }
  return true;
}

uint64_t count_via_reformulation(int64_t n) {
  int64_t p = n / 2;
  if (n < 6 || n % 2 != 0 || p % 2 == 0 || !numth::is_prime(p))
    throw std::invalid_argument("n must be twice an odd prime");
  int64_t m = p - 1;
  if (m > 62) throw std::invalid_argument("modulus too large for the tuple counter");

  ArgTable at = arg_table(n);
  // Slot list: odd arguments then even ones, each with its weight t(x).
  struct Slot {
    int64_t t;
    int side;
  };
  std::vector<Slot> slots;
  for (int64_t x = 1; x < n; x += 2)
    if (x != p) slots.push_back({at.tval[x], 1});
  for (int64_t x = 2; x < n; x += 2) slots.push_back({at.tval[x], 0});

  std::vector<int> avail(m + 1, 2);
  avail[1] = 3;
  uint64_t used[2] = {0, 0};  // product bitmask per side, bits 0..m-1
  uint64_t tuples = 0;

  auto rec = [&](auto&& self, size_t i) -> void {
    if (i == slots.size()) {
      ++tuples;
      return;
    }
    const Slot& s = slots[i];
    for (int64_t v = 1; v <= m; ++v) {
      if (!avail[v]) continue;
      int64_t prod = (s.t % m) * (v % m) % m;
      if (used[s.side] >> prod & 1) continue;
      --avail[v];
      used[s.side] |= uint64_t(1) << prod;
      self(self, i + 1);
      used[s.side] &= ~(uint64_t(1) << prod);
      ++avail[v];
    }
  };
  rec(rec, 0);

  // Each valid tuple lifts to 3! 2^{p-2} distinct sigma.
  uint64_t fiber = 6;
  for (int64_t i = 0; i < p - 2; ++i) fiber *= 2;
  return tuples * fiber;
}

}  // namespace ortho::construct
