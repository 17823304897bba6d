#ifndef MVD_SAD_HPP
#define MVD_SAD_HPP

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace mvd {

/// Finitely supported nonnegative weight profile on the integers, summing
/// to 1; leading/trailing zeros are trimmed.
struct SADProfile {
  long offset = 0;                // leftmost potentially nonzero site
  std::vector<double> weights;    // weights[i] is the weight at offset + i

  double at(long site) const {
    const long i = site - offset;
    return (i >= 0 && i < static_cast<long>(weights.size())) ? weights[static_cast<std::size_t>(i)]
                                                             : 0.0;
  }
  double sum() const;
  void trim();
};

/// Unit mass at site v.
SADProfile sad_init(long v);

/// One averaging step on edge <u, u+1>:
///   new(u)   = (1-mu) old(u) + mu old(u+1)
///   new(u+1) = mu old(u) + (1-mu) old(u+1)
SADProfile sad_step(const SADProfile& p, long u, double mu);

/// Fold of sad_step over the update list.
SADProfile sad_run(long start, const std::vector<std::pair<long, double>>& updates);

/// True iff the weights are nondecreasing up to some index and nonincreasing
/// after it (ties allowed).
bool is_unimodal(const SADProfile& p);

struct SearchBudgetExceeded : std::runtime_error {
  double best_so_far;
  SearchBudgetExceeded(const char* msg, double best) : std::runtime_error(msg), best_so_far(best) {}
};

struct SadSearchResult {
  double best = 0.0;
  std::vector<long> best_sequence;  // edges, in application order
  std::uint64_t nodes_visited = 0;
};

/// Maximum weight reachable at graph distance d from the start, over all
/// update sequences of length <= max_updates on edges within distance d+2 of
/// the start (a heuristic restriction; mass routed further out cannot help).
/// Branch-and-bound: profile states are memoized with weights quantized to
/// 1e-12, and subtrees are cut with the fractional relaxation of the
/// 1/(dist+1) profile bound. Throws SearchBudgetExceeded past node_budget.
SadSearchResult sad_max_weight(int d, double mu, int max_updates,
                               std::uint64_t node_budget = 200'000'000);

}  // namespace mvd

#endif
