#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "doctest.h"
#include "ortho/construct.hpp"
#include "ortho/search.hpp"

using namespace ortho;
using namespace ortho::construct;

namespace {

std::set<std::vector<int64_t>> sigma_set(const std::vector<OrthoCertificate>& certs) {
  std::set<std::vector<int64_t>> out;
  for (const auto& c : certs) out.insert(c.sigma.map);
  return out;
}

std::vector<abelian::Split> first_splits(const LabeledPoset& fin) {
  std::vector<abelian::Split> splits;
  for (size_t i = 0; i < fin.poset.divisors.size(); ++i) {
    int64_t e = (fin.poset.p - 1) / fin.poset.divisors[i];
    auto iso = abelian::unit_group(e);
    std::vector<int64_t> elts;
    for (int64_t v : fin.labels[i]) elts.push_back(iso.forward(v % e));
    splits.push_back(abelian::enumerate_splits(iso.group, elts).front());
  }
  return splits;
}

}  // namespace

TEST_CASE("admissible moduli") {
  for (int64_t n : {6, 14, 22, 46, 86, 94}) CHECK(admissible(n));
  // 10 and 26 fail squarefreeness of p-1; the rest fail shape.
  for (int64_t n : {2, 4, 10, 26, 34, 15, 18, 28, 50}) CHECK_FALSE(admissible(n));
}

TEST_CASE("initial poset labeling") {
  auto lp = build_poset(14);
  CHECK(lp.poset.p == 7);
  CHECK(lp.poset.divisors == std::vector<int64_t>{1, 2, 3, 6});
  CHECK(lp.labels[0] == std::vector<int64_t>{1, 5, 7, 11, 13});
  CHECK(lp.labels[1] == std::vector<int64_t>{2, 4, 8, 10});
  CHECK(lp.labels[2] == std::vector<int64_t>{3, 9});
  CHECK(lp.labels[3] == std::vector<int64_t>{6, 12});
  CHECK_FALSE(lp.leftover.has_value());

  auto lp6 = build_poset(6);
  CHECK(lp6.poset.divisors == std::vector<int64_t>{1, 2});
  CHECK(lp6.labels[0] == std::vector<int64_t>{1, 3, 5});
  CHECK(lp6.labels[1] == std::vector<int64_t>{2, 4});

  // Node sizes are 2 phi((p-1)/d), plus one extra at d = 1.
  for (int64_t n : {6, 14, 22, 46}) {
    auto poset = build_poset(n);
    int64_t pm1 = poset.poset.p - 1;
    for (size_t i = 0; i < poset.poset.divisors.size(); ++i) {
      int64_t d = poset.poset.divisors[i];
      int64_t expect = 2 * numth::totient(pm1 / d) + (d == 1 ? 1 : 0);
      CHECK((int64_t)poset.labels[i].size() == expect);
    }
  }

  CHECK_THROWS_AS(build_poset(10), std::invalid_argument);
  CHECK_THROWS_AS(build_poset(12), std::invalid_argument);
}

TEST_CASE("walk enumeration counts and order") {
  auto w6 = enumerate_walks(6);
  CHECK(w6.size() == 9);
  CHECK(w6.front().chain == std::vector<int64_t>{1, 2});
  CHECK(w6.front().picks == std::vector<int64_t>{1, 1});

  auto w14 = enumerate_walks(14);
  CHECK(w14.size() == 54);
  std::map<std::vector<int64_t>, int> chains;
  for (const auto& w : w14) ++chains[w.chain];
  REQUIRE(chains.size() == 2);
  CHECK(chains[{1, 2, 6}] == 27);
  CHECK(chains[{1, 3, 6}] == 27);
  CHECK(w14.front().chain == std::vector<int64_t>{1, 2, 6});
  CHECK(w14.front().picks == std::vector<int64_t>{1, 1, 1});

  CHECK(enumerate_walks(86).size() == 486);

  // Closed forms: the first matches the enumeration; the second agrees only
  // at k = 1 and is reported alongside.
  CHECK(walk_count_by_construction(0) == 9);
  CHECK(walk_count_by_construction(1) == 54);
  CHECK(walk_count_by_construction(2) == 486);
  CHECK(walk_count_prefactor(1) == 54);
  CHECK(walk_count_prefactor(2) == 648);
}

TEST_CASE("walk replay on the worked n = 14 example") {
  auto initial = build_poset(14);
  WalkChoice choice{{1, 2, 6}, {7, 10, 12}};
  auto fin = run_walk(initial, choice);
  CHECK(fin.labels[0] == std::vector<int64_t>{1, 5, 11, 13});
  CHECK(fin.labels[1] == std::vector<int64_t>{2, 4, 7, 8});
  CHECK(fin.labels[2] == std::vector<int64_t>{3, 9});
  CHECK(fin.labels[3] == std::vector<int64_t>{6, 10});
  REQUIRE(fin.leftover.has_value());
  CHECK(*fin.leftover == 12);

  // Eligibility at the bottom node is exactly {1, p, 2p-1}.
  CHECK_THROWS_AS(run_walk(initial, WalkChoice{{1, 2, 6}, {5, 1, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(run_walk(initial, WalkChoice{{1, 2, 6}, {1, 2, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(run_walk(initial, WalkChoice{{1, 6}, {1, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(run_walk(initial, WalkChoice{{1, 2}, {1, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(run_walk(fin, choice), std::invalid_argument);
}

TEST_CASE("every walk keeps the structural invariants") {
  for (int64_t n : {6, 14}) {
    auto initial = build_poset(n);
    int64_t pm1 = initial.poset.p - 1;
    for (const auto& w : enumerate_walks(n)) {
      auto fin = run_walk(initial, w);  // three-label invariant asserted inside
      REQUIRE(fin.leftover.has_value());
      // Finished nodes hold each unit mod (p-1)/d exactly twice.
      for (size_t i = 0; i < fin.poset.divisors.size(); ++i) {
        int64_t e = pm1 / fin.poset.divisors[i];
        std::map<int64_t, int> freq;
        for (int64_t v : fin.labels[i]) {
          CHECK(std::gcd(v % e, e) == 1);
          ++freq[v % e];
        }
        CHECK((int64_t)freq.size() == numth::totient(e));
        for (auto [u, c] : freq) CHECK(c == 2);
      }
      // All n-1 labels are accounted for: node contents plus the leftover.
      std::set<int64_t> all{*fin.leftover};
      for (const auto& node : fin.labels) all.insert(node.begin(), node.end());
      CHECK((int64_t)all.size() == n - 1);
    }
  }
}

TEST_CASE("distinct configurations across walks") {
  CHECK(distinct_walk_configurations(6) == 9);
  // Walks that ferry one label down different chains collide, so this is 45,
  // not the 54 walk count: chains 1-2-6 and 1-3-6 with picks (1,1,1) leave
  // identical labels everywhere and the same leftover.
  CHECK(distinct_walk_configurations(14) == 45);

  auto initial = build_poset(14);
  auto c1 = run_walk(initial, WalkChoice{{1, 2, 6}, {1, 1, 1}});
  auto c2 = run_walk(initial, WalkChoice{{1, 3, 6}, {1, 1, 1}});
  CHECK(c1.labels == c2.labels);
  CHECK(*c1.leftover == *c2.leftover);

  // Within one chain, distinct picks do give distinct configurations.
  for (int64_t n : {6, 14}) {
    auto init = build_poset(n);
    std::map<std::vector<int64_t>, std::set<std::string>> per_chain;
    std::map<std::vector<int64_t>, int> walks_per_chain;
    for (const auto& w : enumerate_walks(n)) {
      auto fin = run_walk(init, w);
      std::string key;
      for (const auto& node : fin.labels) {
        for (int64_t v : node) key += std::to_string(v) + ",";
        key += ";";
      }
      key += std::to_string(*fin.leftover);
      per_chain[w.chain].insert(key);
      ++walks_per_chain[w.chain];
    }
    for (const auto& [chain, keys] : per_chain)
      CHECK((int)keys.size() == walks_per_chain[chain]);
  }
}

TEST_CASE("sigma realization on worked examples") {
  // n = 6, first walk (picks 1,1), first splits: worked out by hand.
  auto init6 = build_poset(6);
  auto fin6 = run_walk(init6, WalkChoice{{1, 2}, {1, 1}});
  auto cert6 = realize_sigma(fin6, first_splits(fin6));
  CHECK(cert6.sigma.map == std::vector<int64_t>{4, 3, 1, 2, 5});
  CHECK(cert6.image == std::vector<int64_t>{1, 2, 3, 4, 5});
  CHECK(verify_certificate(cert6).ok);

  // The worked n = 14 walk: sigma(p) is the leftover 12.
  auto init14 = build_poset(14);
  auto fin14 = run_walk(init14, WalkChoice{{1, 2, 6}, {7, 10, 12}});
  auto cert14 = realize_sigma(fin14, first_splits(fin14));
  CHECK(cert14.sigma.sigma(7) == 12);
  CHECK(verify_certificate(cert14).ok);
  CHECK(is_orthomorphism(cert14.sigma, OrthoKind::Exponential));

  CHECK_THROWS_AS(realize_sigma(init14, first_splits(fin14)), std::invalid_argument);
}

TEST_CASE("generated family is contained in the exhaustive enumeration") {
  search::SearchSpec spec;
  spec.kind = OrthoKind::Exponential;
  spec.mode = search::SearchMode::EnumerateAll;

  spec.n = 6;
  auto all6 = sigma_set(search::enumerate(spec).certificates);
  auto gen6 = generate_all(6);
  CHECK(gen6.size() == 36);
  CHECK(sigma_set(gen6) == all6);  // at n = 6 the construction reaches everything

  spec.n = 14;
  auto all14 = sigma_set(search::enumerate(spec).certificates);
  auto gen14 = generate_all(14);
  CHECK(gen14.size() == 720);
  CHECK(gen14.size() >= 64);
  for (const auto& c : gen14) {
    CHECK(verify_certificate(c).ok);
    CHECK(all14.count(c.sigma.map) == 1);
  }
  // Deduplicated and deterministically ordered.
  CHECK(sigma_set(gen14).size() == gen14.size());
  CHECK(std::is_sorted(gen14.begin(), gen14.end(),
                       [](const auto& a, const auto& b) { return a.sigma.map < b.sigma.map; }));

  CHECK(sigma_set(generate_all(14, 3)) == sigma_set(gen14));
}

TEST_CASE("lower bound values") {
  auto b14 = theorem3_bound(14);
  CHECK(b14.num == 442368);
  CHECK(b14.den == 6912);
  CHECK(b14.approx == 64.0);
  CHECK(b14.exact_string() == "442368/6912");

  auto b22 = theorem3_bound(22);
  CHECK(b22.num == 113246208);
  CHECK(b22.den == 32000);
  CHECK(b22.approx == doctest::Approx(3538.944));

  for (int64_t n : {14, 22, 46, 86}) {
    auto closed = theorem3_bound(n);
    auto prod = theorem3_product_form(n);
    CHECK(closed.num * prod.den == prod.num * closed.den);
  }

  // k = 0 (n = 6) has no odd prime factor in p-1; the formula does not apply.
  CHECK_THROWS_AS(theorem3_bound(6), std::invalid_argument);
  CHECK_THROWS_AS(theorem3_bound(10), std::invalid_argument);
  CHECK_THROWS_AS(theorem3_product_form(6), std::invalid_argument);
}

TEST_CASE("prime bridge to multiplicative orthomorphisms") {
  for (int64_t n : {3, 5, 7, 11, 13}) {
    auto pb = prime_reduction(n);
    CAPTURE(n);
    CHECK(pb.exp_count == pb.mult_count);
    CHECK(pb.maps_verified);
    CHECK(pb.exp_count == (n == 3 ? 1 : 0));
  }
  CHECK_THROWS_AS(prime_reduction(4), std::invalid_argument);
  CHECK_THROWS_AS(prime_reduction(9), std::invalid_argument);
  CHECK_THROWS_AS(prime_reduction(2), std::invalid_argument);
}

TEST_CASE("reformulation characterizes exponential orthomorphisms") {
  // Over all 120 bijections at n = 6, tuple validity is exactly membership.
  std::vector<int64_t> perm{1, 2, 3, 4, 5};
  int valid = 0;
  do {
    Permutation sigma(6, perm);
    auto r = reformulate(6, sigma);
    bool v = reformulation_valid(r);
    CHECK(v == is_orthomorphism(sigma, OrthoKind::Exponential));
    valid += v;
  } while (std::next_permutation(perm.begin(), perm.end()));
  CHECK(valid == 36);

  CHECK_THROWS_AS(reformulate(12, Permutation(12, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11})),
                  std::invalid_argument);
}

TEST_CASE("tuple counting matches the direct count") {
  CHECK(count_via_reformulation(6) == 36);
  CHECK(count_via_reformulation(10) == 0);
  CHECK(count_via_reformulation(14) == 11520);
  CHECK_THROWS_AS(count_via_reformulation(12), std::invalid_argument);
}