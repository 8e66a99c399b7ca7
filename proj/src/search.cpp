#include "ortho/search.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstring>
#include <numeric>
#include <set>
#include <stdexcept>
#include <thread>

#include "ortho/numth.hpp"

namespace ortho::search {

namespace {

// ---------------------------------------------------------------- bit masks

// Fixed-width mask for n - 1 <= 64 values, the common case.
struct Mask64 {
  uint64_t w = 0;

  static Mask64 none() { return {0}; }
  static Mask64 all(int m) { return {m >= 64 ? ~0ull : ((1ull << m) - 1)}; }

  bool test(int i) const { return (w >> i) & 1; }
  void set(int i) { w |= 1ull << i; }
  bool empty() const { return w == 0; }
  int count() const { return std::popcount(w); }
  void remove(const Mask64& o) { w &= ~o.w; }
  void remove_bit(int i) { w &= ~(1ull << i); }
  int first() const { return w ? std::countr_zero(w) : -1; }
  int next(int i) const {
    uint64_t rest = w & ~((i + 1 >= 64) ? ~0ull : ((1ull << (i + 1)) - 1));
    return rest ? std::countr_zero(rest) : -1;
  }
};

// Word-vector mask for larger n. Same interface, no attempt at cleverness.
struct MaskDyn {
  std::vector<uint64_t> w;

  static MaskDyn none_of(int m) { return MaskDyn{std::vector<uint64_t>((m + 63) / 64, 0)}; }
  static MaskDyn all_of(int m) {
    MaskDyn out = none_of(m);
    for (int i = 0; i < m; ++i) out.set(i);
    return out;
  }

  bool test(int i) const { return (w[i >> 6] >> (i & 63)) & 1; }
  void set(int i) { w[i >> 6] |= 1ull << (i & 63); }
  bool empty() const {
    for (uint64_t x : w)
      if (x) return false;
    return true;
  }
  int count() const {
    int c = 0;
    for (uint64_t x : w) c += std::popcount(x);
    return c;
  }
  void remove(const MaskDyn& o) {
    for (size_t k = 0; k < w.size(); ++k) w[k] &= ~o.w[k];
  }
  void remove_bit(int i) { w[i >> 6] &= ~(1ull << (i & 63)); }
  int first() const {
    for (size_t k = 0; k < w.size(); ++k)
      if (w[k]) return (int)(k * 64 + std::countr_zero(w[k]));
    return -1;
  }
  int next(int i) const {
    ++i;
    size_t k = i >> 6;
    if (k >= w.size()) return -1;
    uint64_t word = w[k] & (~0ull << (i & 63));
    while (true) {
      if (word) return (int)(k * 64 + std::countr_zero(word));
      if (++k >= w.size()) return -1;
      word = w[k];
    }
  }
};

// --------------------------------------------------------- precomputed maps

template <class Mask>
struct Tables {
  int64_t n = 2;
  OrthoKind kind = OrthoKind::Additive;
  int m = 1;                      // n - 1 positions and values
  std::vector<int> image_of;      // [xi * m + ei] -> image value in [0, n-1]
  std::vector<Mask> static_ok;    // [xi] -> admissible sigma values
  std::vector<Mask> inv_img;      // [xi * m + yi] -> values whose image is y
  std::vector<int> static_order;  // positions, rank-descending then index
};

// Value set of the power sequence x, x^2, x^3, ... taken mod n.
std::vector<char> reach_set(int64_t x, int64_t n) {
  std::vector<char> seen(n, 0);
  int64_t acc = x % n;
  while (!seen[acc]) {
    seen[acc] = 1;
    acc = acc * (x % n) % n;
  }
  return seen;
}

template <class Mask>
Tables<Mask> build_tables(const SearchSpec& spec, const Mask& /*tag*/) {
  Tables<Mask> t;
  t.n = spec.n;
  t.kind = spec.kind;
  t.m = (int)(spec.n - 1);
  const int m = t.m;
  const int64_t n = spec.n;

  t.image_of.assign((size_t)m * m, 0);
  for (int xi = 0; xi < m; ++xi) {
    const int64_t x = xi + 1;
    int64_t acc = x;  // x^1 for the exponential kind
    for (int ei = 0; ei < m; ++ei) {
      const int64_t e = ei + 1;
      int64_t y = 0;
      switch (spec.kind) {
        case OrthoKind::Additive: y = (x + e) % n; break;
        case OrthoKind::Multiplicative: y = x * e % n; break;
        case OrthoKind::Exponential:
          y = acc;
          acc = acc * x % n;
          break;
      }
      t.image_of[(size_t)xi * m + ei] = (int)y;
    }
  }

  std::vector<std::vector<char>> reach;
  if (spec.kind == OrthoKind::Exponential && spec.use_domain_filter) {
    reach.resize(n);
    for (int64_t x = 1; x < n; ++x) reach[x] = reach_set(x, n);
  }

  t.static_ok.assign(m, Mask{});
  for (int xi = 0; xi < m; ++xi) {
    const int64_t x = xi + 1;
    Mask ok{};
    if constexpr (std::is_same_v<Mask, MaskDyn>) ok = MaskDyn::none_of(m);
    for (int ei = 0; ei < m; ++ei) {
      const int64_t e = ei + 1;
      const int y = t.image_of[(size_t)xi * m + ei];
      if (y == 0) continue;
      if (spec.use_domain_filter) {
        if (spec.kind == OrthoKind::Multiplicative) {
          const int64_t r = numth::rank(x, n);
          if (numth::rank(e, n) != r || numth::rank(y, n) != r) continue;
        } else if (spec.kind == OrthoKind::Exponential) {
          if (!(reach[x][y] && reach[y][x])) continue;
        }
      }
      ok.set(ei);
    }
    t.static_ok[xi] = ok;
  }

  t.inv_img.assign((size_t)m * m, Mask{});
  if constexpr (std::is_same_v<Mask, MaskDyn>) {
    for (auto& msk : t.inv_img) msk = MaskDyn::none_of(m);
  }
  for (int xi = 0; xi < m; ++xi)
    for (int ei = 0; ei < m; ++ei) {
      const int y = t.image_of[(size_t)xi * m + ei];
      if (y != 0) t.inv_img[(size_t)xi * m + (y - 1)].set(ei);
    }

  t.static_order.resize(m);
  std::iota(t.static_order.begin(), t.static_order.end(), 0);
  if (spec.order == VarOrder::RankThenIndex) {
    std::stable_sort(t.static_order.begin(), t.static_order.end(), [&](int a, int b) {
      return numth::rank(a + 1, n) > numth::rank(b + 1, n);
    });
  }
  return t;
}

// ------------------------------------------------------------------- engine

struct SharedFlags {
  std::atomic<bool> stop_exists{false};
};

struct BranchOutcome {
  uint64_t count = 0;
  uint64_t nodes = 0;
  bool exhausted = true;
  std::vector<OrthoCertificate> certificates;
};

template <class Mask>
class Dfs {
 public:
  Dfs(const SearchSpec& spec, const Tables<Mask>& t, SharedFlags& flags,
      std::optional<uint64_t> node_share, std::optional<uint64_t> cert_cap)
      : spec_(spec), t_(t), flags_(flags), budget_(node_share), cert_cap_(cert_cap) {
    const int m = t_.m;
    cand_.resize(m);
    for (int xi = 0; xi < m; ++xi) cand_[xi] = t_.static_ok[xi];
    snap_.assign(m, std::vector<Mask>(m));
    sigma_.assign(m, 0);
    assigned_.assign(m, 0);
    if constexpr (std::is_same_v<Mask, MaskDyn>) {
      used_sigma_ = MaskDyn::none_of(m);
      used_img_ = MaskDyn::none_of(m);
    }
  }

  // Pins the root position to one candidate value, then explores the rest.
  BranchOutcome run(int root_xi, int root_ei) {
    if (stopped()) {
      out_.exhausted = false;
      return out_;
    }
    if (!charge_node()) return out_;
    apply(root_xi, root_ei, 0);
    recurse(1);
    return out_;
  }

 private:
  bool stopped() const {
    return spec_.mode == SearchMode::Exists && flags_.stop_exists.load(std::memory_order_relaxed);
  }

  bool charge_node() {
    if (budget_ && out_.nodes >= *budget_) {
      out_.exhausted = false;
      return false;
    }
    ++out_.nodes;
    return true;
  }

  void apply(int xi, int ei, int depth) {
    const int m = t_.m;
    const int y = t_.image_of[(size_t)xi * m + ei];
    std::copy(cand_.begin(), cand_.end(), snap_[depth].begin());
    sigma_[xi] = ei + 1;
    assigned_[xi] = 1;
    ++depth_count_;
    used_sigma_.set(ei);
    used_img_.set(y - 1);
    for (int xj = 0; xj < m; ++xj) {
      if (assigned_[xj]) continue;
      cand_[xj].remove_bit(ei);
      cand_[xj].remove(t_.inv_img[(size_t)xj * m + (y - 1)]);
    }
  }

  void undo(int xi, int ei, int depth) {
    const int m = t_.m;
    const int y = t_.image_of[(size_t)xi * m + ei];
    std::copy(snap_[depth].begin(), snap_[depth].end(), cand_.begin());
    assigned_[xi] = 0;
    --depth_count_;
    used_sigma_.remove_bit(ei);
    used_img_.remove_bit(y - 1);
  }

  int select() const {
    const int m = t_.m;
    if (spec_.order == VarOrder::MostConstrained) {
      int best = -1, best_count = INT32_MAX;
      for (int xi = 0; xi < m; ++xi) {
        if (assigned_[xi]) continue;
        const int c = cand_[xi].count();
        if (c < best_count) {
          best = xi;
          best_count = c;
          if (c == 0) break;
        }
      }
      return best;
    }
    for (int xi : t_.static_order)
      if (!assigned_[xi]) return xi;
    return -1;
  }

  void record_solution() {
    ++out_.count;
    if (spec_.mode == SearchMode::Count) return;
    std::vector<int64_t> map(sigma_.begin(), sigma_.end());
    out_.certificates.push_back(make_certificate(Permutation(t_.n, std::move(map)), spec_.kind));
    if (spec_.mode == SearchMode::Exists) {
      flags_.stop_exists.store(true, std::memory_order_relaxed);
      out_.exhausted = false;
    } else if (cert_cap_ && out_.certificates.size() >= *cert_cap_) {
      cap_hit_ = true;
      out_.exhausted = false;
    }
  }

  void recurse(int depth) {
    if (depth_count_ == t_.m) {
      record_solution();
      return;
    }
    const int xi = select();
    const Mask c = cand_[xi];
    for (int ei = c.first(); ei != -1; ei = c.next(ei)) {
      if (stopped() || cap_hit_) {
        out_.exhausted = false;
        return;
      }
      if (!charge_node()) return;
      apply(xi, ei, depth);
      recurse(depth + 1);
      undo(xi, ei, depth);
      if (!out_.exhausted && (stopped() || cap_hit_ || budget_exceeded())) return;
    }
  }

  bool budget_exceeded() const { return budget_ && out_.nodes >= *budget_; }

  const SearchSpec& spec_;
  const Tables<Mask>& t_;
  SharedFlags& flags_;
  std::optional<uint64_t> budget_;
  std::optional<uint64_t> cert_cap_;
  std::vector<Mask> cand_;
  std::vector<std::vector<Mask>> snap_;
  std::vector<int> sigma_;
  std::vector<char> assigned_;
  Mask used_sigma_{}, used_img_{};
  int depth_count_ = 0;
  bool cap_hit_ = false;
  BranchOutcome out_;
};

// Counting obstructions over the whole image multiset. The combined map of
// an orthomorphism is a permutation of [1, n-1], so its sum (additive) or
// product (multiplicative) must match that of [1, n-1]; the left side
// telescopes to 2 sum(x) resp. (prod x)^2 independently of sigma. When the
// congruence fails no orthomorphism exists at all.
bool globally_obstructed(int64_t n, OrthoKind kind) {
  if (kind == OrthoKind::Additive) {
    int64_t s = 0;
    for (int64_t x = 1; x < n; ++x) s = (s + x) % n;
    return s != 0;
  }
  if (kind == OrthoKind::Multiplicative) {
    int64_t p = 1;
    for (int64_t x = 1; x < n; ++x) p = p * x % n;
    return (p * p - p) % n != 0;
  }
  return false;
}

template <class Mask>
SearchResult run_search(const SearchSpec& spec) {
  Mask tag{};

  SearchResult result;
  result.spec = spec;

  if (spec.use_domain_filter && globally_obstructed(spec.n, spec.kind)) {
    result.exhausted = true;
    return result;
  }

  const Tables<Mask> t = build_tables(spec, tag);
  const int m = t.m;

  // Root position and its candidate values; every branch is an independent
  // subtree, which is also the parallel split and the budget split.
  std::vector<Mask> root_cand(t.static_ok);
  int root_xi = 0;
  if (spec.order == VarOrder::MostConstrained) {
    int best_count = INT32_MAX;
    for (int xi = 0; xi < m; ++xi) {
      const int c = root_cand[xi].count();
      if (c < best_count) {
        root_xi = xi;
        best_count = c;
      }
    }
  } else {
    root_xi = t.static_order.front();
  }

  std::vector<int> branch_values;
  for (int ei = root_cand[root_xi].first(); ei != -1; ei = root_cand[root_xi].next(ei))
    branch_values.push_back(ei);

  if (branch_values.empty()) {
    result.exhausted = true;
    return result;
  }

  const size_t nb = branch_values.size();
  std::vector<std::optional<uint64_t>> shares(nb);
  if (spec.node_budget) {
    const uint64_t base = *spec.node_budget / nb;
    const uint64_t extra = *spec.node_budget % nb;
    for (size_t i = 0; i < nb; ++i) shares[i] = base + (i < extra ? 1 : 0);
  }

  // A capped enumeration runs on one thread so the emitted prefix is the
  // deterministic depth-first one.
  const bool capped = spec.mode == SearchMode::EnumerateAll && spec.limit.has_value();
  const int threads = capped ? 1 : std::max(1, spec.threads);

  SharedFlags flags;
  std::vector<BranchOutcome> outcomes(nb);

  auto run_branch = [&](size_t i) {
    Dfs<Mask> dfs(spec, t, flags, shares[i], spec.limit);
    outcomes[i] = dfs.run(root_xi, branch_values[i]);
  };

  if (threads <= 1) {
    uint64_t certs_so_far = 0;
    for (size_t i = 0; i < nb; ++i) {
      if (spec.mode == SearchMode::Exists && flags.stop_exists.load()) {
        outcomes[i].exhausted = false;
        continue;
      }
      if (capped && certs_so_far >= *spec.limit) {
        outcomes[i].exhausted = false;
        continue;
      }
      if (capped) {
        Dfs<Mask> dfs(spec, t, flags, shares[i],
                      std::optional<uint64_t>(*spec.limit - certs_so_far));
        outcomes[i] = dfs.run(root_xi, branch_values[i]);
        certs_so_far += outcomes[i].certificates.size();
      } else {
        run_branch(i);
      }
    }
  } else {
    std::atomic<size_t> next{0};
    auto worker = [&]() {
      while (true) {
        const size_t i = next.fetch_add(1);
        if (i >= nb) return;
        run_branch(i);
      }
    };
    std::vector<std::thread> pool;
    const int tcount = (int)std::min<size_t>(threads, nb);
    pool.reserve(tcount);
    for (int i = 0; i < tcount; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  result.exhausted = true;
  for (size_t i = 0; i < nb; ++i) {
    result.count += outcomes[i].count;
    result.nodes += outcomes[i].nodes;
    result.exhausted = result.exhausted && outcomes[i].exhausted;
    for (auto& c : outcomes[i].certificates) result.certificates.push_back(std::move(c));
  }

  if (spec.mode == SearchMode::Exists) {
    // The answer is the witness; normalize the count to 0/1.
    if (result.count > 0) {
      result.count = 1;
      result.certificates.resize(1);
    }
  }
  return result;
}

}  // namespace

SearchResult enumerate(const SearchSpec& spec) {
  if (spec.n < 2) throw std::invalid_argument("enumerate: n must be >= 2");
  if (spec.threads < 1) throw std::invalid_argument("enumerate: threads must be >= 1");
  if (spec.n - 1 <= 64) return run_search<Mask64>(spec);
  return run_search<MaskDyn>(spec);
}

uint64_t naive_oracle(int64_t n, OrthoKind kind) {
  if (n < 2 || n > 9)
    throw std::invalid_argument("naive_oracle: factorial enumeration is capped at n <= 9");
  std::vector<int64_t> vals(n - 1);
  std::iota(vals.begin(), vals.end(), 1);
  uint64_t count = 0;
  do {
    if (is_orthomorphism(Permutation(n, vals), kind)) ++count;
  } while (std::next_permutation(vals.begin(), vals.end()));
  return count;
}

const char* to_string(Existence e) {
  switch (e) {
    case Existence::Yes: return "yes";
    case Existence::No: return "no";
    case Existence::Unknown: return "unknown";
  }
  throw std::invalid_argument("to_string: bad Existence");
}

std::vector<ExistenceRow> existence_table(OrthoKind kind, int64_t n_max,
                                          std::optional<uint64_t> node_budget, int threads) {
  if (n_max < 2) throw std::invalid_argument("existence_table: n_max must be >= 2");
  std::vector<ExistenceRow> rows;
  for (int64_t n = 2; n <= n_max; ++n) {
    SearchSpec spec;
    spec.n = n;
    spec.kind = kind;
    spec.mode = SearchMode::Exists;
    spec.node_budget = node_budget ? node_budget : std::optional<uint64_t>(kDefaultNodeBudget);
    spec.threads = threads;
    SearchResult r = enumerate(spec);
    Existence status = Existence::Unknown;
    if (r.count > 0)
      status = Existence::Yes;
    else if (r.exhausted)
      status = Existence::No;
    rows.push_back({n, status});
  }
  return rows;
}

}  // namespace ortho::search
