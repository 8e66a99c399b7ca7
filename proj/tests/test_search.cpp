#include <algorithm>
#include <set>
#include <vector>

#include "doctest.h"
#include "ortho/search.hpp"

using namespace ortho;
using namespace ortho::search;

namespace {

SearchResult count_search(int64_t n, OrthoKind kind, bool filter = true,
                          VarOrder order = VarOrder::MostConstrained, int threads = 1) {
  SearchSpec spec;
  spec.n = n;
  spec.kind = kind;
  spec.mode = SearchMode::Count;
  spec.order = order;
  spec.use_domain_filter = filter;
  spec.threads = threads;
  return enumerate(spec);
}

const OrthoKind kAllKinds[] = {OrthoKind::Additive, OrthoKind::Multiplicative,
                               OrthoKind::Exponential};

}  // namespace

TEST_CASE("engine counts agree with the factorial oracle for n <= 9") {
  for (int64_t n = 2; n <= 9; ++n) {
    for (auto kind : kAllKinds) {
      auto res = count_search(n, kind);
      CAPTURE(n);
      CAPTURE(to_string(kind));
      CHECK(res.exhausted);
      CHECK(res.count == naive_oracle(n, kind));
    }
  }
}

TEST_CASE("known counts") {
  CHECK(count_search(3, OrthoKind::Additive).count == 1);
  CHECK(count_search(5, OrthoKind::Additive).count == 3);
  CHECK(count_search(7, OrthoKind::Additive).count == 19);
  CHECK(count_search(9, OrthoKind::Additive).count == 225);
  CHECK(count_search(11, OrthoKind::Additive).count == 3441);
  CHECK(count_search(2, OrthoKind::Multiplicative).count == 1);
  CHECK(count_search(6, OrthoKind::Exponential).count == 36);
  CHECK(count_search(14, OrthoKind::Exponential).count == 11520);
}

TEST_CASE("oracle rejects large n") {
  CHECK_THROWS_AS(naive_oracle(10, OrthoKind::Additive), std::invalid_argument);
}

TEST_CASE("domain filter does not change counts") {
  for (int64_t n : {5, 7, 10, 11, 12}) {
    for (auto kind : kAllKinds) {
      auto filtered = count_search(n, kind, true);
      auto plain = count_search(n, kind, false);
      CAPTURE(n);
      CAPTURE(to_string(kind));
      CHECK(filtered.exhausted);
      CHECK(plain.exhausted);
      CHECK(filtered.count == plain.count);
    }
  }
}

TEST_CASE("counts are independent of the variable order") {
  for (int64_t n : {6, 9, 12, 14}) {
    for (auto kind : kAllKinds) {
      auto a = count_search(n, kind, true, VarOrder::MostConstrained);
      auto b = count_search(n, kind, true, VarOrder::RankThenIndex);
      auto c = count_search(n, kind, true, VarOrder::IndexAscending);
      CAPTURE(n);
      CAPTURE(to_string(kind));
      CHECK(a.count == b.count);
      CHECK(a.count == c.count);
      CHECK(b.exhausted);
      CHECK(c.exhausted);
    }
  }
}

TEST_CASE("counts are independent of the thread count") {
  auto serial = count_search(14, OrthoKind::Exponential, true, VarOrder::MostConstrained, 1);
  auto parallel = count_search(14, OrthoKind::Exponential, true, VarOrder::MostConstrained, 4);
  CHECK(serial.count == parallel.count);
  CHECK(parallel.exhausted);
  CHECK(serial.count == 11520);
}

TEST_CASE("enumeration yields verified distinct certificates") {
  SearchSpec spec;
  spec.n = 6;
  spec.kind = OrthoKind::Exponential;
  spec.mode = SearchMode::EnumerateAll;
  auto res = enumerate(spec);
  CHECK(res.exhausted);
  CHECK(res.count == 36);
  REQUIRE(res.certificates.size() == 36);
  std::set<std::vector<int64_t>> sigmas;
  for (const auto& c : res.certificates) {
    CHECK(verify_certificate(c).ok);
    sigmas.insert(c.sigma.map);
  }
  CHECK(sigmas.size() == 36);
}

TEST_CASE("parallel enumeration returns the same certificate set") {
  SearchSpec spec;
  spec.n = 14;
  spec.kind = OrthoKind::Exponential;
  spec.mode = SearchMode::EnumerateAll;
  auto serial = enumerate(spec);
  spec.threads = 3;
  auto parallel = enumerate(spec);
  REQUIRE(serial.certificates.size() == parallel.certificates.size());
  std::set<std::vector<int64_t>> a, b;
  for (const auto& c : serial.certificates) a.insert(c.sigma.map);
  for (const auto& c : parallel.certificates) b.insert(c.sigma.map);
  CHECK(a == b);
}

TEST_CASE("enumeration limit caps the output") {
  SearchSpec spec;
  spec.n = 6;
  spec.kind = OrthoKind::Exponential;
  spec.mode = SearchMode::EnumerateAll;
  spec.limit = 5;
  auto res = enumerate(spec);
  CHECK(res.certificates.size() == 5);
  CHECK(res.count == 5);
  CHECK_FALSE(res.exhausted);
  for (const auto& c : res.certificates) CHECK(verify_certificate(c).ok);

  spec.limit = 100;  // above the true count of 36
  res = enumerate(spec);
  CHECK(res.certificates.size() == 36);
  CHECK(res.exhausted);
}

TEST_CASE("exists mode reports one witness and normalizes the count") {
  SearchSpec spec;
  spec.n = 14;
  spec.kind = OrthoKind::Exponential;
  spec.mode = SearchMode::Exists;
  auto res = enumerate(spec);
  CHECK(res.count == 1);
  REQUIRE(res.certificates.size() == 1);
  CHECK(verify_certificate(res.certificates.front()).ok);

  spec.n = 10;  // none exist
  res = enumerate(spec);
  CHECK(res.count == 0);
  CHECK(res.exhausted);
  CHECK(res.certificates.empty());
}

TEST_CASE("node budget is honored and reported") {
  SearchSpec spec;
  spec.n = 12;
  spec.kind = OrthoKind::Additive;
  spec.mode = SearchMode::Count;
  spec.use_domain_filter = false;  // force a real refutation run
  spec.node_budget = 100;
  auto res = enumerate(spec);
  CHECK_FALSE(res.exhausted);
  CHECK(res.nodes <= 100 + 12);  // per-branch shares round up

  spec.node_budget = {};
  res = enumerate(spec);
  CHECK(res.exhausted);
  CHECK(res.count == 0);
}

TEST_CASE("existence table distinguishes no from unknown") {
  auto rows = existence_table(OrthoKind::Exponential, 14);
  REQUIRE(rows.size() == 13);
  std::set<int64_t> yes;
  for (const auto& r : rows) {
    CHECK(r.status != Existence::Unknown);
    if (r.status == Existence::Yes) yes.insert(r.n);
  }
  CHECK(yes == std::set<int64_t>{2, 3, 4, 6, 14});

  // A one-node budget can prove nothing beyond n = 2.
  auto capped = existence_table(OrthoKind::Exponential, 5, 1);
  CHECK(capped[0].status == Existence::Yes);
  for (size_t i = 1; i < capped.size(); ++i) CHECK(capped[i].status == Existence::Unknown);
}

TEST_CASE("global counting obstructions match brute force on primes") {
  // Odd primes admit no multiplicative orthomorphism; the filtered engine
  // settles this without branching and the plain engine by search.
  for (int64_t n : {3, 5, 7, 11, 13}) {
    auto fast = count_search(n, OrthoKind::Multiplicative, true);
    CHECK(fast.exhausted);
    CHECK(fast.count == 0);
    CHECK(fast.nodes == 0);
    auto slow = count_search(n, OrthoKind::Multiplicative, false);
    CHECK(slow.exhausted);
    CHECK(slow.count == 0);
  }
  // Even n admit no additive orthomorphism.
  for (int64_t n : {2, 4, 6, 8, 10, 12}) {
    auto fast = count_search(n, OrthoKind::Additive, true);
    CHECK(fast.exhausted);
    CHECK(fast.count == 0);
  }
}

TEST_CASE("spec validation") {
  SearchSpec spec;
  spec.n = 1;
  CHECK_THROWS_AS(enumerate(spec), std::invalid_argument);
  spec.n = 6;
  spec.threads = 0;
  CHECK_THROWS_AS(enumerate(spec), std::invalid_argument);
}

TEST_CASE("large modulus falls back to wide masks") {
  // n - 1 > 64 exercises the dynamic-mask engine.
  auto mult = count_search(66, OrthoKind::Multiplicative);
  CHECK(mult.exhausted);
  CHECK(mult.count == 0);
  CHECK(mult.nodes > 0);
  auto exp = count_search(68, OrthoKind::Exponential);
  CHECK(exp.exhausted);
  CHECK(exp.count == 0);
  CHECK(exp.nodes > 0);
}