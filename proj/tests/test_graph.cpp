#include <algorithm>
#include <set>

#include "doctest.h"

#include "cpsrl/graph.hpp"
#include "cpsrl/rng.hpp"

using namespace cpsrl;

TEST_CASE("scope_select projects in scope order") {
  CHECK(scope_select(std::vector<int>{2, 1, 3}, {0, 2}) == std::vector<int>{2, 3});
  CHECK(scope_select(std::vector<int>{5}, {}) == std::vector<int>{});
  CHECK(scope_select(std::vector<int>{0, 1, 0, 1}, {1, 3}) == std::vector<int>{1, 1});
  CHECK_THROWS_AS(scope_select(std::vector<int>{1, 2}, {5}), std::invalid_argument);
}

TEST_CASE("assignment_index encodes mixed radix") {
  const std::vector<int> supports = {2, 2};
  CHECK(assignment_index(std::vector<int>{0, 0}, supports) == 0);
  CHECK(assignment_index(std::vector<int>{1, 1}, supports) == 3);
  CHECK_THROWS_AS(assignment_index(std::vector<int>{2, 0}, supports),
                  std::invalid_argument);

  const std::vector<int> mixed = {2, 2, 3};
  for (long long i = 0; i < 12; ++i) {
    CHECK(assignment_index(assignment_decode(i, mixed), mixed) == i);
  }
}

TEST_CASE("assignment encoding is a bijection on random grids") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> supports;
    long long total = 1;
    while (supports.size() < 6) {
      const int n = 1 + static_cast<int>(rng.uniform_below(6));
      if (total * n > 10000) break;
      supports.push_back(n);
      total *= n;
    }
    if (supports.empty()) supports.push_back(2);
    total = support_product(supports);
    std::set<long long> seen;
    for (long long i = 0; i < total; ++i) {
      const std::vector<int> values = assignment_decode(i, supports);
      for (std::size_t v = 0; v < values.size(); ++v) {
        CHECK(values[v] < supports[v]);
      }
      const long long back = assignment_index(values, supports);
      CHECK(back == i);
      seen.insert(back);
    }
    CHECK(seen.size() == static_cast<std::size_t>(total));
  }
}

TEST_CASE("enumerate_consistent_scopes matches the worked examples") {
  const auto scopes = enumerate_consistent_scopes(4, {0, 1}, 3);
  REQUIRE(scopes.size() == 3);
  CHECK(scopes[0] == Scope{0, 1});
  CHECK(scopes[1] == Scope{0, 1, 2});
  CHECK(scopes[2] == Scope{0, 1, 3});

  CHECK(enumerate_consistent_scopes(3, {}, 3).size() == 8);
  CHECK(enumerate_consistent_scopes(9, {2, 7}, 5).size() == 64);

  CHECK_THROWS_AS(enumerate_consistent_scopes(4, {0, 1, 2}, 2),
                  std::invalid_argument);
}

TEST_CASE("enumeration is deterministic, duplicate free and consistent") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int d_x = 1 + static_cast<int>(rng.uniform_below(7));
    const int max_parents = static_cast<int>(rng.uniform_below(d_x + 1));
    const int known = static_cast<int>(rng.uniform_below(max_parents + 1));
    std::vector<int> pool(static_cast<std::size_t>(d_x));
    for (int i = 0; i < d_x; ++i) pool[static_cast<std::size_t>(i)] = i;
    Scope fixed;
    for (int i = 0; i < known; ++i) {
      std::swap(pool[static_cast<std::size_t>(i)],
                pool[i + rng.uniform_below(pool.size() - static_cast<std::size_t>(i))]);
      fixed.push_back(pool[static_cast<std::size_t>(i)]);
    }
    std::sort(fixed.begin(), fixed.end());

    const auto scopes = enumerate_consistent_scopes(d_x, fixed, max_parents);
    std::set<Scope> unique(scopes.begin(), scopes.end());
    CHECK(unique.size() == scopes.size());
    for (std::size_t i = 1; i < scopes.size(); ++i) {
      const bool ordered = scopes[i - 1].size() < scopes[i].size() ||
                           (scopes[i - 1].size() == scopes[i].size() &&
                            scopes[i - 1] < scopes[i]);
      CHECK(ordered);
    }
    for (const Scope& s : scopes) {
      CHECK(is_canonical_scope(s, d_x));
      CHECK(s.size() <= static_cast<std::size_t>(max_parents));
      CHECK(std::includes(s.begin(), s.end(), fixed.begin(), fixed.end()));
    }
  }
}

TEST_CASE("count_consistent_scopes closed form") {
  CHECK(count_consistent_scopes(9, 2, 5) == 64);
  CHECK(consistent_scopes_bound(9, 2) == 128);
  CHECK(count_consistent_scopes(4, 2, 3) == 3);
  CHECK(consistent_scopes_bound(4, 2) == 4);
  for (int k = 1; k <= 6; ++k) CHECK(count_consistent_scopes(k, k, k) == 1);
  CHECK_THROWS_AS(count_consistent_scopes(4, 3, 2), std::invalid_argument);
}

TEST_CASE("count matches exhaustive enumeration for every small parameter set") {
  Rng rng(11);
  for (int d_x = 1; d_x <= 8; ++d_x) {
    for (int max_parents = 0; max_parents <= d_x; ++max_parents) {
      for (int known = 0; known <= max_parents; ++known) {
        std::vector<int> pool(static_cast<std::size_t>(d_x));
        for (int i = 0; i < d_x; ++i) pool[static_cast<std::size_t>(i)] = i;
        Scope fixed;
        for (int i = 0; i < known; ++i) {
          std::swap(pool[static_cast<std::size_t>(i)],
                    pool[i + rng.uniform_below(pool.size() - static_cast<std::size_t>(i))]);
          fixed.push_back(pool[static_cast<std::size_t>(i)]);
        }
        std::sort(fixed.begin(), fixed.end());
        const auto scopes = enumerate_consistent_scopes(d_x, fixed, max_parents);
        CHECK(scopes.size() == count_consistent_scopes(d_x, known, max_parents));
        CHECK(scopes.size() <= consistent_scopes_bound(d_x, known));
      }
    }
  }
}

namespace {

CausalGraph random_graph(Rng& rng, int d_x, int d_y) {
  CausalGraph g;
  g.d_x = d_x;
  g.d_y = d_y;
  for (int j = 0; j < d_y; ++j) {
    Scope scope;
    for (int i = 0; i < d_x; ++i) {
      if (rng.uniform01() < 0.4) scope.push_back(i);
    }
    g.parents.push_back(scope);
  }
  return g;
}

}  // namespace

TEST_CASE("is_subgraph on hand examples") {
  CausalGraph prior;
  prior.d_x = 4;
  prior.d_y = 2;
  prior.parents = {{0, 1}, {1, 3}};
  CHECK(is_subgraph(prior, prior));

  CausalGraph truth = prior;  // prior plus one hidden edge on the second factor
  truth.parents[1] = {1, 2, 3};
  CHECK(is_subgraph(prior, truth));
  CHECK_FALSE(is_subgraph(truth, prior));

  CausalGraph other = prior;
  other.d_x = 5;
  CHECK_THROWS_AS(is_subgraph(prior, other), std::invalid_argument);
}

TEST_CASE("is_subgraph is a partial order") {
  Rng rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const CausalGraph a = random_graph(rng, 5, 3);
    const CausalGraph b = random_graph(rng, 5, 3);
    const CausalGraph c = random_graph(rng, 5, 3);
    CHECK(is_subgraph(a, a));
    if (is_subgraph(a, b) && is_subgraph(b, a)) CHECK(a == b);
    if (is_subgraph(a, b) && is_subgraph(b, c)) CHECK(is_subgraph(a, c));
  }
}

TEST_CASE("graph validation catches malformed parent sets") {
  CausalGraph g;
  g.d_x = 4;
  g.d_y = 2;
  g.parents = {{0, 1, 2}, {3}};
  g.check();
  CHECK(g.sparseness() == 3);

  g.parents[0] = {1, 0, 2};  // unsorted
  CHECK_THROWS_AS(g.check(), std::invalid_argument);
  g.parents[0] = {0, 1, 7};  // out of range
  CHECK_THROWS_AS(g.check(), std::invalid_argument);
}
