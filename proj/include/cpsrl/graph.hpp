#pragma once

#include <span>
#include <vector>

namespace cpsrl {

// Parent index set over the left variables of a bigraph: sorted, duplicate
// free, entries in [0, d_x).
using Scope = std::vector<int>;

bool is_canonical_scope(const Scope& scope, int d_x);

// Bipartite DAG from d_x input variables (state features followed by action
// features) to d_y output variables (next-state features), stored as one
// parent set per output factor.
struct CausalGraph {
  int d_x = 0;
  int d_y = 0;
  std::vector<Scope> parents;

  // Largest parent-set size across factors.
  int sparseness() const;

  // Throws std::invalid_argument if a structural invariant is broken.
  void check() const;

  bool operator==(const CausalGraph&) const = default;
};

// Projects a full assignment onto a scope, preserving scope order.
std::vector<int> scope_select(std::span<const int> x, const Scope& scope);

// Mixed-radix encoding of a sub-assignment into a table row index; the first
// entry varies fastest. Bijective onto [0, prod(supports)).
long long assignment_index(std::span<const int> values,
                           std::span<const int> supports);
std::vector<int> assignment_decode(long long index,
                                   std::span<const int> supports);
long long support_product(std::span<const int> supports);

// Row index of x's projection onto `scope` without materializing the
// sub-assignment. Equivalent to
// assignment_index(scope_select(x, scope), supports_at(scope)).
long long scoped_row_index(std::span<const int> x, const Scope& scope,
                           std::span<const int> supports);

// All scopes s with fixed ⊆ s ⊆ [0, d_x) and |s| <= max_parents, ordered by
// size and then lexicographically so downstream weight vectors are
// reproducible. Throws if |fixed| > max_parents.
std::vector<Scope> enumerate_consistent_scopes(int d_x, const Scope& fixed,
                                               int max_parents);

// Closed-form size of the consistent set when |fixed| = known_parents:
// sum_{i=0}^{max_parents - known_parents} C(d_x - known_parents, i).
unsigned long long count_consistent_scopes(int d_x, int known_parents,
                                           int max_parents);

// 2^(d_x - known_parents); the count above never exceeds it.
unsigned long long consistent_scopes_bound(int d_x, int known_parents);

// True iff a.parents[j] ⊆ b.parents[j] for every factor. Dimensions must
// match.
bool is_subgraph(const CausalGraph& a, const CausalGraph& b);

}  // namespace cpsrl
