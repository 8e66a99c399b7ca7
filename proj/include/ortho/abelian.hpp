#pragma once
// Finite abelian groups in invariant-factor form, explicit unit-group
// isomorphisms for squarefree moduli, zero-sum half-splits of the doubled
// group, and the decomposition of a sum-zero function into two bijections.
//
// Group elements are handled as dense indices in [0, order); coords() and
// index() convert to and from mixed-radix coordinate vectors.

#include <cstdint>
#include <utility>
#include <vector>

#include "ortho/perm.hpp"  // consistency_error

namespace ortho::abelian {

using std::int64_t;

class AbelianGroup {
 public:
  AbelianGroup() = default;  // trivial group

  // orders must form a divisibility chain r_1 | r_2 | ... | r_m. Factors of 1
  // are dropped; an empty list is the trivial group.
  explicit AbelianGroup(std::vector<int64_t> orders);

  int64_t order() const { return size_; }
  const std::vector<int64_t>& factor_orders() const { return orders_; }

  int64_t add(int64_t a, int64_t b) const;
  int64_t neg(int64_t a) const;
  int64_t zero() const { return 0; }

  std::vector<int64_t> coords(int64_t idx) const;
  int64_t index(const std::vector<int64_t>& coords) const;

  std::string name() const;  // e.g. "Z/2 x Z/6"

 private:
  std::vector<int64_t> orders_;
  int64_t size_ = 1;
};

// Every abelian group of the given order, one per isomorphism class, in a
// deterministic order.
std::vector<AbelianGroup> all_abelian_groups(int64_t order);

// Explicit isomorphism (Z/e)^x -> canonical chain form, for squarefree e.
// Each odd prime q | e contributes a cyclic factor of order q-1 coordinatized
// by the discrete log to the smallest primitive root mod q; the factor 2
// contributes nothing. forward/backward are mutually inverse and forward
// turns unit multiplication into group addition.
struct UnitGroupIso {
  int64_t modulus = 1;
  AbelianGroup group;
  std::vector<int64_t> fwd;  // indexed by residue in [0, e); -1 for non-units
  std::vector<int64_t> bwd;  // indexed by element index

  int64_t forward(int64_t u) const;
  int64_t backward(int64_t idx) const;
};

UnitGroupIso unit_group(int64_t e);

// Number of N-subsets of G + G (2N labeled elements, each group element
// twice) whose sum is zero, by dynamic programming over (element, size, sum).
uint64_t count_zero_sum_halves(const AbelianGroup& g);

// 4^N / (2 (N+1)^{3/2}) for N = |G|, as a double for display.
double split_lower_bound(int64_t group_order);

// Exact integer comparison count >= 4^N / (2 (N+1)^{3/2}).
bool count_meets_split_lower_bound(uint64_t count, int64_t group_order);

struct Split {
  std::vector<int> left;   // indices into the multiset handed to enumerate_splits
  std::vector<int> right;
};

// All ordered halvings of the labeled multiset s_elts (element indices in g):
// left is any zero-sum subset of size |S|/2, right the complement. Requires
// |S| even and sum(S) = 0, which makes the right half zero-sum too.
std::vector<Split> enumerate_splits(const AbelianGroup& g, const std::vector<int64_t>& s_elts);

// Splits f (a function G -> G with sum 0, given as a value per element index)
// into bijections pi1, pi2 with pi1(a) + pi2(a) = f(a). The decomposition
// always exists; if the backtracking ever comes back empty that is a hard
// internal error, not a caller problem.
std::pair<std::vector<int64_t>, std::vector<int64_t>> decompose_sum(
    const AbelianGroup& g, const std::vector<int64_t>& f);

// Turns a zero-sum label multiset (|L| = |G|) into a labeling ell with
// a -> a + ell(a) a bijection of G and multiset {ell(a)} = L, by arranging L
// canonically and gluing through decompose_sum. Postconditions are asserted
// on every call.
std::vector<int64_t> assign_labels(const AbelianGroup& g, std::vector<int64_t> labels);

}  // namespace ortho::abelian
