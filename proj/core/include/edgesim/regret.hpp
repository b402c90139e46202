#pragma once

#include <vector>

#include "edgesim/rng.hpp"

namespace edgesim {

// Actions are size-N multisets of class ids (an SBS may spend several of its
// N cache updates on the same class). At the cloud the "classes" are the
// contents themselves and N = 1.
struct ActionSpace {
  int num_classes = 0;
  int updates = 0;
  std::vector<std::vector<int>> actions;  // each sorted ascending

  int size() const { return int(actions.size()); }
};

// C(K+N-1, K-1) multisets; throws when the count exceeds `cap`.
ActionSpace enumerate_actions(int num_classes, int updates, int cap = 10000);

// Softmax over already-clipped regrets with max-subtraction.
std::vector<double> boltzmann_gibbs(const std::vector<double>& clipped_regrets,
                                    double xi);

struct CacheLearnerState {
  std::vector<double> util_est;    // u~ per action
  std::vector<double> regret_est;  // r~ per action (raw, unclipped)
  std::vector<double> strategy;    // pi, probability vector
  double feedback_avg = 0.0;       // u^, slot-averaged feedback
  long feedback_count = 0;
  std::vector<int> cache;          // current contents, sorted, |.| <= d
  int committed_action = -1;       // action in effect since the last commit

  void reset(int num_actions);
  void check_strategy(double tol = 1e-9) const;  // throws on broken pmf
};

struct LearnRates {
  double gamma1, gamma2, gamma3, xi;
};

// Eq. (17): utility EMA at the played action only, regret EMA toward
// (u~ - u^) for every action, strategy EMA toward the Boltzmann-Gibbs
// distribution over clipped regrets. u^ is the running slot average of raw
// feedback.
void learn_step(CacheLearnerState& st, int played, double feedback,
                const LearnRates& r);

// Same recursion for the cloud; the action space is the catalog itself.
void cloud_learn_step(CacheLearnerState& st, int played, double feedback,
                      const LearnRates& r);

struct PopularityProfile {
  std::vector<double> class_pop;      // P_{s,k}
  std::vector<double> content_local;  // P_{s,f}
  std::vector<double> content_cloud;  // P_{c,f}
  std::vector<double> content_blend;  // P'_{s,f}
  std::vector<double> class_blend;    // P'_{s,k}
  std::vector<double> strategy_blend; // pi' over actions
};

// Eqs. (18)-(20). `class_of` maps content -> class id; beta in [0,1].
PopularityProfile blend_popularity(const std::vector<double>& pi_sbs,
                                   const ActionSpace& space,
                                   const std::vector<double>& pi_cloud,
                                   const std::vector<int>& class_of,
                                   double beta);

struct CacheCommit {
  std::vector<int> cache;      // new contents, sorted
  std::vector<int> fetched;    // contents not previously cached (<= N)
  int action = -1;             // sampled action index
};

// Alg. 1 phase II: sample an action from pi', rank the selected classes'
// contents by blended popularity, fill up to d slots changing at most N
// contents versus the old cache.
CacheCommit commit_cache(const PopularityProfile& prof, const ActionSpace& space,
                         const std::vector<int>& class_of,
                         const std::vector<int>& old_cache, int cache_size,
                         int max_updates, Rng& rng);

}  // namespace edgesim
