#pragma once

#include <cstdint>
#include <vector>

#include "dicelab/bigint.hpp"

namespace dicelab {

/// Result of one exact enumeration run.
struct CountReport {
  int letters = 0;
  int faces = 0;
  BigInt intransitive_count = 0;
  BigInt total_count = 0;
  double ratio = 0.0;            // intransitive / total
  double delta_l = 0.0;          // -log(ratio) / faces
  double elapsed_seconds = 0.0;
  int workers = 1;
};

/// Number of visited nodes allowed before a search is refused; the projected
/// node count of a run is its total word count. Override with the
/// DICELAB_BUDGET environment variable or the --budget flag.
inline constexpr std::uint64_t kDefaultNodeBudget = 10'000'000'000ULL;

/// |W_l(n)| = (l n)! / (n!)^l, exactly.
BigInt total_words(int letters, int faces);

/// Exact |W_{intransitive,l}(n)| by depth-first generation in lexicographic
/// order with incremental victory tallies and upper-bound pruning: a branch
/// dies once some cyclic pair can no longer exceed half its comparisons even
/// if it wins every undecided one. The count is independent of the worker
/// count. Throws BudgetExceeded when the projected node count is above
/// `node_budget`.
CountReport count_intransitive(int letters, int faces, int workers = 1,
                               std::uint64_t node_budget = kDefaultNodeBudget);

/// count_intransitive over a list of face counts, for decay-rate tables.
std::vector<CountReport> rate_report(int letters, const std::vector<int>& faces_list,
                                     int workers = 1,
                                     std::uint64_t node_budget = kDefaultNodeBudget);

}  // namespace dicelab
