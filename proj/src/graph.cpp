#include "cpsrl/graph.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace cpsrl {

bool is_canonical_scope(const Scope& scope, int d_x) {
  for (std::size_t i = 0; i < scope.size(); ++i) {
    if (scope[i] < 0 || scope[i] >= d_x) return false;
    if (i > 0 && scope[i] <= scope[i - 1]) return false;
  }
  return true;
}

int CausalGraph::sparseness() const {
  std::size_t widest = 0;
  for (const Scope& z : parents) widest = std::max(widest, z.size());
  return static_cast<int>(widest);
}

void CausalGraph::check() const {
  if (d_x < 0 || d_y < 0) {
    throw std::invalid_argument("CausalGraph: negative dimension");
  }
  if (static_cast<int>(parents.size()) != d_y) {
    throw std::invalid_argument("CausalGraph: expected one parent set per factor");
  }
  for (int j = 0; j < d_y; ++j) {
    if (!is_canonical_scope(parents[j], d_x)) {
      throw std::invalid_argument("CausalGraph: parent set of factor " +
                                  std::to_string(j) +
                                  " is not a sorted index set in [0, d_x)");
    }
  }
}

std::vector<int> scope_select(std::span<const int> x, const Scope& scope) {
  std::vector<int> out;
  out.reserve(scope.size());
  for (int i : scope) {
    if (i < 0 || static_cast<std::size_t>(i) >= x.size()) {
      throw std::invalid_argument("scope_select: index " + std::to_string(i) +
                                  " out of bounds for assignment of size " +
                                  std::to_string(x.size()));
    }
    out.push_back(x[static_cast<std::size_t>(i)]);
  }
  return out;
}

long long support_product(std::span<const int> supports) {
  long long prod = 1;
  for (int n : supports) {
    if (n < 1) throw std::invalid_argument("support_product: support must be >= 1");
    if (prod > std::numeric_limits<long long>::max() / n) {
      throw std::overflow_error("support_product: table size overflows");
    }
    prod *= n;
  }
  return prod;
}

long long assignment_index(std::span<const int> values,
                           std::span<const int> supports) {
  if (values.size() != supports.size()) {
    throw std::invalid_argument("assignment_index: size mismatch");
  }
  long long index = 0;
  long long stride = 1;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < 0 || values[i] >= supports[i]) {
      throw std::invalid_argument("assignment_index: entry " +
                                  std::to_string(values[i]) +
                                  " outside support " +
                                  std::to_string(supports[i]));
    }
    index += values[i] * stride;
    stride *= supports[i];
  }
  return index;
}

std::vector<int> assignment_decode(long long index,
                                   std::span<const int> supports) {
  if (index < 0 || index >= support_product(supports)) {
    throw std::invalid_argument("assignment_decode: index out of range");
  }
  std::vector<int> values(supports.size());
  for (std::size_t i = 0; i < supports.size(); ++i) {
    values[i] = static_cast<int>(index % supports[i]);
    index /= supports[i];
  }
  return values;
}

long long scoped_row_index(std::span<const int> x, const Scope& scope,
                           std::span<const int> supports) {
  long long index = 0;
  long long stride = 1;
  for (int i : scope) {
    index += x[static_cast<std::size_t>(i)] * stride;
    stride *= supports[static_cast<std::size_t>(i)];
  }
  return index;
}

std::vector<Scope> enumerate_consistent_scopes(int d_x, const Scope& fixed,
                                               int max_parents) {
  if (!is_canonical_scope(fixed, d_x)) {
    throw std::invalid_argument("enumerate_consistent_scopes: fixed set is not canonical");
  }
  if (max_parents < 0 || max_parents > d_x) {
    throw std::invalid_argument("enumerate_consistent_scopes: max_parents outside [0, d_x]");
  }
  if (static_cast<int>(fixed.size()) > max_parents) {
    throw std::invalid_argument(
        "enumerate_consistent_scopes: fixed set larger than max_parents (infeasible prior)");
  }

  std::vector<int> free_vars;
  for (int i = 0; i < d_x; ++i) {
    if (!std::binary_search(fixed.begin(), fixed.end(), i)) free_vars.push_back(i);
  }
  const int budget = max_parents - static_cast<int>(fixed.size());

  std::vector<Scope> scopes;
  std::vector<int> combo;
  // Depth-first over subsets of the free variables, capped at `budget`.
  auto emit = [&]() {
    Scope s = fixed;
    s.insert(s.end(), combo.begin(), combo.end());
    std::sort(s.begin(), s.end());
    scopes.push_back(std::move(s));
  };
  auto recurse = [&](auto&& self, std::size_t start) -> void {
    emit();
    if (static_cast<int>(combo.size()) == budget) return;
    for (std::size_t i = start; i < free_vars.size(); ++i) {
      combo.push_back(free_vars[i]);
      self(self, i + 1);
      combo.pop_back();
    }
  };
  recurse(recurse, 0);

  std::sort(scopes.begin(), scopes.end(), [](const Scope& a, const Scope& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return scopes;
}

namespace {

unsigned long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned long long result = 1;
  for (int i = 1; i <= k; ++i) {
    result = result * static_cast<unsigned long long>(n - k + i) /
             static_cast<unsigned long long>(i);
  }
  return result;
}

}  // namespace

unsigned long long count_consistent_scopes(int d_x, int known_parents,
                                           int max_parents) {
  if (known_parents < 0 || known_parents > max_parents || max_parents > d_x) {
    throw std::invalid_argument(
        "count_consistent_scopes: require 0 <= known_parents <= max_parents <= d_x");
  }
  unsigned long long count = 0;
  for (int i = 0; i <= max_parents - known_parents; ++i) {
    count += binomial(d_x - known_parents, i);
  }
  return count;
}

unsigned long long consistent_scopes_bound(int d_x, int known_parents) {
  if (known_parents < 0 || known_parents > d_x) {
    throw std::invalid_argument("consistent_scopes_bound: require 0 <= known_parents <= d_x");
  }
  if (d_x - known_parents >= 64) {
    throw std::overflow_error("consistent_scopes_bound: exponent too large");
  }
  return 1ULL << (d_x - known_parents);
}

bool is_subgraph(const CausalGraph& a, const CausalGraph& b) {
  if (a.d_x != b.d_x || a.d_y != b.d_y) {
    throw std::invalid_argument("is_subgraph: dimension mismatch");
  }
  for (int j = 0; j < a.d_y; ++j) {
    if (!std::includes(b.parents[j].begin(), b.parents[j].end(),
                       a.parents[j].begin(), a.parents[j].end())) {
      return false;
    }
  }
  return true;
}

}  // namespace cpsrl
