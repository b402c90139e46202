#pragma once

#include "edgesim/sim.hpp"

namespace edgesim {

// Slot decisions of the two Table-II baselines. Both write new RB grants as
// leases plus a fronthaul allocation, through the same commit path as the
// proposed scheme.
struct BaselineDecision {
  std::vector<Lease> grants;       // new allocations this slot
  std::vector<double> nu;          // [s][f]
};

// B1: uniformly random feasible matching/scheduling, random fronthaul split
// over backlogged cells.
BaselineDecision baseline_b1(const World& w, Rng& rng);

// B2: RSSI-ranked RB allocation, proportional-fair user selection, backlog-
// proportional fronthaul.
BaselineDecision baseline_b2(const World& w, Rng& rng);

// B1's random cache draw (uniform d-subset, at most N changes kept).
std::vector<int> baseline_b1_cache(const std::vector<int>& old_cache, int catalog,
                                   int cache_size, int max_updates, Rng& rng,
                                   std::vector<int>* fetched);

// B2's cache: top-d contents by running request frequency, at most N changes.
std::vector<int> baseline_b2_cache(const std::vector<int>& old_cache,
                                   const std::vector<long>& freq, int cache_size,
                                   int max_updates, std::vector<int>* fetched);

}  // namespace edgesim
