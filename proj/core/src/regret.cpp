#include "edgesim/regret.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace edgesim {

namespace {

void enumerate_rec(int num_classes, int remaining, int lo, std::vector<int>& cur,
                   std::vector<std::vector<int>>& out, int cap) {
  if (remaining == 0) {
    if (int(out.size()) >= cap)
      throw std::runtime_error("action space too large; reduce K or N");
    out.push_back(cur);
    return;
  }
  for (int k = lo; k < num_classes; ++k) {
    cur.push_back(k);
    enumerate_rec(num_classes, remaining - 1, k, cur, out, cap);
    cur.pop_back();
  }
}

double binomial(int n, int k) {
  double v = 1;
  for (int i = 1; i <= k; ++i) v = v * (n - k + i) / i;
  return v;
}

}  // namespace

ActionSpace enumerate_actions(int num_classes, int updates, int cap) {
  if (num_classes < 1 || updates < 1)
    throw std::invalid_argument("enumerate_actions: K >= 1 and N >= 1 required");
  double expected = binomial(num_classes + updates - 1, updates);
  if (expected > double(cap))
    throw std::runtime_error("action space too large; reduce K or N");
  ActionSpace space;
  space.num_classes = num_classes;
  space.updates = updates;
  std::vector<int> cur;
  enumerate_rec(num_classes, updates, 0, cur, space.actions, cap);
  if (std::llround(expected) != space.size())
    throw std::logic_error("enumerate_actions: count does not match binomial");
  return space;
}

std::vector<double> boltzmann_gibbs(const std::vector<double>& clipped, double xi) {
  if (!(xi > 0)) throw std::invalid_argument("boltzmann_gibbs: xi must be > 0");
  double mx = *std::max_element(clipped.begin(), clipped.end());
  std::vector<double> g(clipped.size());
  double z = 0;
  for (size_t j = 0; j < clipped.size(); ++j) {
    g[j] = std::exp((clipped[j] - mx) / xi);
    z += g[j];
  }
  for (double& v : g) v /= z;
  return g;
}

void CacheLearnerState::reset(int num_actions) {
  util_est.assign(num_actions, 0.0);
  regret_est.assign(num_actions, 0.0);
  strategy.assign(num_actions, 1.0 / num_actions);
  feedback_avg = 0.0;
  feedback_count = 0;
  committed_action = -1;
}

void CacheLearnerState::check_strategy(double tol) const {
  double sum = 0;
  for (double p : strategy) {
    if (p < -1e-12) throw std::logic_error("strategy: negative probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > tol)
    throw std::logic_error("strategy: probabilities do not sum to 1");
}

void learn_step(CacheLearnerState& st, int played, double feedback,
                const LearnRates& r) {
  const int n = int(st.strategy.size());
  if (played < 0 || played >= n)
    throw std::invalid_argument("learn_step: played action out of range");
  st.feedback_count += 1;
  st.feedback_avg += (feedback - st.feedback_avg) / double(st.feedback_count);
  st.util_est[played] =
      (1.0 - r.gamma1) * st.util_est[played] + r.gamma1 * feedback;
  std::vector<double> clipped(n);
  for (int j = 0; j < n; ++j) {
    st.regret_est[j] = (1.0 - r.gamma2) * st.regret_est[j] +
                       r.gamma2 * (st.util_est[j] - st.feedback_avg);
    clipped[j] = std::max(st.regret_est[j], 0.0);
  }
  std::vector<double> g = boltzmann_gibbs(clipped, r.xi);
  double sum = 0;
  for (int j = 0; j < n; ++j) {
    st.strategy[j] = (1.0 - r.gamma3) * st.strategy[j] + r.gamma3 * g[j];
    sum += st.strategy[j];
  }
  for (double& p : st.strategy) p /= sum;  // shed accumulated rounding
  st.check_strategy();
}

void cloud_learn_step(CacheLearnerState& st, int played, double feedback,
                      const LearnRates& r) {
  learn_step(st, played, feedback, r);
}

PopularityProfile blend_popularity(const std::vector<double>& pi_sbs,
                                   const ActionSpace& space,
                                   const std::vector<double>& pi_cloud,
                                   const std::vector<int>& class_of,
                                   double beta) {
  if (beta < 0 || beta > 1)
    throw std::invalid_argument("blend_popularity: beta in [0,1]");
  const int k = space.num_classes;
  const int f_count = int(class_of.size());
  PopularityProfile prof;
  prof.class_pop.assign(k, 0.0);
  std::vector<double> class_size(k, 0.0);
  for (int f = 0; f < f_count; ++f) class_size[class_of[f]] += 1;

  // Eq. (18): action mass folded onto classes by multiplicity, normalized
  for (int j = 0; j < space.size(); ++j)
    for (int cls : space.actions[j]) prof.class_pop[cls] += pi_sbs[j];
  double z = 0;
  for (double v : prof.class_pop) z += v;
  if (z > 0)
    for (double& v : prof.class_pop) v /= z;

  prof.content_local.assign(f_count, 0.0);
  for (int f = 0; f < f_count; ++f) {
    int cls = class_of[f];
    prof.content_local[f] =
        class_size[cls] > 0 ? prof.class_pop[cls] / class_size[cls] : 0.0;
  }
  prof.content_cloud = pi_cloud;

  // Eq. (19): ratio blend, then normalized over contents
  prof.content_blend.assign(f_count, 0.0);
  double bz = 0;
  for (int f = 0; f < f_count; ++f) {
    double denom = prof.content_local[f] + prof.content_cloud[f];
    double v = 0;
    if (denom > 0)
      v = (1.0 - beta) * prof.content_local[f] / denom +
          beta * prof.content_cloud[f] / denom;
    prof.content_blend[f] = v;
    bz += v;
  }
  if (bz > 0)
    for (double& v : prof.content_blend) v /= bz;

  prof.class_blend.assign(k, 0.0);
  for (int f = 0; f < f_count; ++f)
    prof.class_blend[class_of[f]] += prof.content_blend[f];
  for (int c = 0; c < k; ++c)
    if (class_size[c] > 0) prof.class_blend[c] /= class_size[c];

  // Eq. (20): refold class masses onto actions, normalized
  prof.strategy_blend.assign(space.size(), 0.0);
  double sz = 0;
  for (int j = 0; j < space.size(); ++j) {
    double v = 0;
    for (int cls : space.actions[j]) v += prof.class_blend[cls];
    prof.strategy_blend[j] = v;
    sz += v;
  }
  if (sz > 0) {
    for (double& v : prof.strategy_blend) v /= sz;
  } else {
    prof.strategy_blend.assign(space.size(), 1.0 / space.size());
  }
  return prof;
}

CacheCommit commit_cache(const PopularityProfile& prof, const ActionSpace& space,
                         const std::vector<int>& class_of,
                         const std::vector<int>& old_cache, int cache_size,
                         int max_updates, Rng& rng) {
  CacheCommit out;
  out.action = rng.sample_pmf(prof.strategy_blend);
  std::set<int> selected_classes(space.actions[out.action].begin(),
                                 space.actions[out.action].end());
  std::set<int> old_set(old_cache.begin(), old_cache.end());

  // candidates from the selected classes, best blended popularity first
  std::vector<int> cand;
  for (int f = 0; f < int(class_of.size()); ++f)
    if (selected_classes.count(class_of[f])) cand.push_back(f);
  std::stable_sort(cand.begin(), cand.end(), [&](int a, int b) {
    if (prof.content_blend[a] != prof.content_blend[b])
      return prof.content_blend[a] > prof.content_blend[b];
    return a < b;
  });
  if (int(cand.size()) > cache_size) cand.resize(cache_size);

  std::set<int> next;
  out.fetched.clear();
  for (int f : cand) {
    if (old_set.count(f)) {
      next.insert(f);
    } else if (int(out.fetched.size()) < max_updates) {
      next.insert(f);
      out.fetched.push_back(f);
    }
  }
  // keep previously cached contents while capacity remains
  if (int(next.size()) < cache_size) {
    std::vector<int> keep(old_cache.begin(), old_cache.end());
    std::stable_sort(keep.begin(), keep.end(), [&](int a, int b) {
      if (prof.content_blend[a] != prof.content_blend[b])
        return prof.content_blend[a] > prof.content_blend[b];
      return a < b;
    });
    for (int f : keep) {
      if (int(next.size()) >= cache_size) break;
      next.insert(f);
    }
  }
  out.cache.assign(next.begin(), next.end());
  std::sort(out.fetched.begin(), out.fetched.end());
  return out;
}

}  // namespace edgesim
