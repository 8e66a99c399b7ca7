#pragma once
// Exhaustive backtracking search for orthomorphisms of Z/n.
//
// The engine assigns sigma(x) position by position, keeping bitmasks of used
// sigma values and used image values, plus a per-position candidate mask that
// is narrowed as assignments land (forward checking). Positions are picked
// most-constrained-first by default; two static orders are kept around so
// tests can confirm counts do not depend on the assignment order.
//
// Candidate domains are pre-filtered per kind before the search starts:
//  - additive: only the image-0 value is excluded;
//  - multiplicative: in any solution rank(sigma(x)) and rank(x * sigma(x))
//    both equal rank(x) pointwise (the combined map is a bijection and rank
//    can only grow under multiplication, so the rank multisets force
//    equality), and the domain keeps only such values;
//  - exponential: the image x^e must lie in the cycle class of x, i.e. the
//    set of y with y = x^a and x = y^b for some a, b >= 1. A bijection cannot
//    strictly descend the reachability preorder of repeated powering, so this
//    filter loses no solutions. It subsumes rank preservation of the image.
//
// All filters are validated against the unfiltered engine and the factorial
// oracle in the test suite.

#include <cstdint>
#include <optional>
#include <vector>

#include "ortho/perm.hpp"

namespace ortho::search {

enum class SearchMode { Exists, Count, EnumerateAll };

enum class VarOrder { MostConstrained, RankThenIndex, IndexAscending };

// Cap on assignments explored by searches that apply the default budget
// (existence tables, the CLI). A capped search reports exhausted = false.
inline constexpr uint64_t kDefaultNodeBudget = 400'000'000;

struct SearchSpec {
  int64_t n = 2;
  OrthoKind kind = OrthoKind::Additive;
  SearchMode mode = SearchMode::Count;
  std::optional<uint64_t> limit;        // EnumerateAll: stop after this many certificates
  std::optional<uint64_t> node_budget;  // empty = unlimited
  int threads = 1;
  VarOrder order = VarOrder::MostConstrained;
  bool use_domain_filter = true;        // testing knob, leave on
};

struct SearchResult {
  SearchSpec spec;
  uint64_t count = 0;
  bool exhausted = false;  // true: space fully explored, count is exact
  uint64_t nodes = 0;      // assignments attempted
  std::vector<OrthoCertificate> certificates;
};

SearchResult enumerate(const SearchSpec& spec);

// Filters all (n-1)! permutations through is_orthomorphism. Shares nothing
// with the masked engine above; exists to cross-check it. n <= 9 only.
uint64_t naive_oracle(int64_t n, OrthoKind kind);

enum class Existence { Yes, No, Unknown };
const char* to_string(Existence e);

struct ExistenceRow {
  int64_t n = 2;
  Existence status = Existence::Unknown;
};

// One Exists-mode search per n in [2, n_max]. A budget-capped search that
// found no witness is reported Unknown, never guessed.
std::vector<ExistenceRow> existence_table(OrthoKind kind, int64_t n_max,
                                          std::optional<uint64_t> node_budget = {},
                                          int threads = 1);

}  // namespace ortho::search
