#pragma once
// Constructive generation of exponential orthomorphisms for n = 2p with p an
// odd prime and p-1 squarefree, via a walk on the divisor lattice of p-1.
//
// Elements x in [1, n-1], x != p, are classed by d = gcd(t, p-1) where t is
// the index of x mod p to the smallest primitive root (t = 0 classed as p-1).
// The poset node for divisor d initially holds exactly the x of class d. A
// walk follows a maximal chain 1 -> ... -> p-1; at each node it removes one
// label that is 1 mod (p-1)/d and deposits it at the next node, and the label
// removed at p-1 becomes sigma(p). After the walk each node's labels reduce
// mod e = (p-1)/d to every unit exactly twice, which lets the per-node label
// assignment go through the zero-sum split and sum-decomposition machinery.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "ortho/abelian.hpp"
#include "ortho/numth.hpp"
#include "ortho/perm.hpp"

namespace ortho::construct {

using std::int64_t;

// n = 2p with p an odd prime and p-1 squarefree.
bool admissible(int64_t n);

struct DivisorPoset {
  int64_t n = 0;
  int64_t p = 0;
  numth::FactoredInt pm1;           // factorization of p-1
  std::vector<int64_t> divisors;    // of p-1, ascending
  int node_of(int64_t d) const;     // index into divisors
};

struct LabeledPoset {
  DivisorPoset poset;
  std::vector<std::vector<int64_t>> labels;  // per node, kept sorted ascending
  std::optional<int64_t> leftover;           // set once a walk completes
};

struct WalkChoice {
  std::vector<int64_t> chain;  // maximal chain of divisors, 1 -> ... -> p-1
  std::vector<int64_t> picks;  // label removed at each chain node
};

// Initial labeling: node d holds {x in [1, n-1] : class(x) = d}, x != p.
LabeledPoset build_poset(int64_t n);

// All walks: every maximal chain (lexicographic by its prime sequence) times
// every choice of three eligible picks per node (ascending). At every node of
// every valid walk exactly three labels are eligible.
std::vector<WalkChoice> enumerate_walks(int64_t n);

// Replays one walk on a copy of the initial poset.
LabeledPoset run_walk(const LabeledPoset& initial, const WalkChoice& choice);

// Per-node final label multisets plus the leftover, counted up to equality
// across all walks. Walks that ferry one label down different chains can
// collide, so this may be smaller than the walk count.
uint64_t distinct_walk_configurations(int64_t n);

// Builds sigma from a finished walk. node_splits[i] picks the zero-sum half
// of node i's labels that goes to the even arguments (the rest go to the odd
// ones); within each side labels are glued by assign_labels and handed out
// smallest-first. sigma(p) is the leftover. The result is checked before
// being returned.
OrthoCertificate realize_sigma(const LabeledPoset& final_poset,
                               const std::vector<abelian::Split>& node_splits);

// Every certificate reachable from some walk and some choice of per-node
// splits, deduplicated by sigma and sorted. Each (walk, splits) pair uses the
// canonical label arrangement, so this is a large constructed family rather
// than the full set.
std::vector<OrthoCertificate> generate_all(int64_t n, int threads = 1);

// Lower bound on the number of exponential orthomorphisms mod n, with p-1
// having k odd prime factors (k >= 1):
//   (k+2)! 3^{k+1} 2^{n - 2^{k-1}} / (4 (n-2)^{3 2^{k-1}}).
struct BoundValue {
  boost::multiprecision::cpp_int num;
  boost::multiprecision::cpp_int den;
  double approx = 0.0;
  std::string exact_string() const;  // "num/den", unreduced formula parts
};
BoundValue theorem3_bound(int64_t n);

// Same bound assembled as (k+2)! 3^{k+1} prod_{e | p-1} 4^{phi(e)}/(2 e^{3/2});
// the product is rational even though single terms are not.
BoundValue theorem3_product_form(int64_t n);

// Walk counts by the two closed forms.
uint64_t walk_count_by_construction(int k);  // 3^{k+2} (k+1)!
uint64_t walk_count_prefactor(int k);        // (k+2)! 3^{k+1}

// For odd prime n: exponential orthomorphisms mod n correspond to
// multiplicative orthomorphisms mod n-1 by reading arguments through powers
// of a primitive root; sigma(1) = n-1 is forced. Both sides are enumerated
// exhaustively and transported onto each other.
struct PrimeBridge {
  int64_t n = 0;
  uint64_t exp_count = 0;   // exponential orthomorphisms mod n
  uint64_t mult_count = 0;  // multiplicative orthomorphisms mod n-1
  bool maps_verified = false;
};
PrimeBridge prime_reduction(int64_t n);

// Reformulation of sigma for n = 2p as three tracks of values mod p-1:
// a over the odd arguments (skipping p), b over the even ones, c = sigma(p).
// Validity asks that on each side the products t(x) sigma(x) mod p-1 sweep
// out a full system, and that the values drawn from the multiset with 1
// available three times and everything else twice are consistent.
struct Reformulation {
  int64_t n = 0;
  std::vector<int64_t> a;  // indexed by odd arguments 1, 3, ..., excluding p
  std::vector<int64_t> b;  // indexed by even arguments 2, 4, ...
  int64_t c = 0;
};
Reformulation reformulate(int64_t n, const Permutation& sigma);
bool reformulation_valid(const Reformulation& r);

// Counts exponential orthomorphisms mod n = 2p by enumerating valid
// reformulation tuples and scaling by the fiber size 3! 2^{p-2}.
uint64_t count_via_reformulation(int64_t n);

}  // namespace ortho::construct
