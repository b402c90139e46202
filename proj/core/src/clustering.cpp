#include "edgesim/clustering.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace edgesim {

void SimilarityMatrix::check_valid(double tol) const {
  for (int i = 0; i < n; ++i) {
    if (std::abs(at(i, i) - 1.0) > tol)
      throw std::logic_error("similarity: diagonal != 1");
    for (int j = 0; j < n; ++j) {
      double v = at(i, j);
      if (v < -tol || v > 1.0 + tol)
        throw std::logic_error("similarity: entry outside [0,1]");
      if (std::abs(v - at(j, i)) > tol)
        throw std::logic_error("similarity: not symmetric");
    }
  }
}

std::vector<std::vector<int>> ClusterAssignment::members() const {
  std::vector<std::vector<int>> out(k);
  for (int i = 0; i < int(labels.size()); ++i) out[labels[i]].push_back(i);
  return out;
}

SimilarityMatrix content_similarity(const std::vector<double>& demand,
                                    const std::vector<double>& popularity,
                                    double sigma_c2) {
  if (!(sigma_c2 > 0))
    throw std::invalid_argument("content_similarity: sigma_c2 must be > 0");
  int n = int(demand.size());
  SimilarityMatrix sim;
  sim.kind = SimilarityMatrix::Kind::Content;
  sim.n = n;
  sim.m.assign(size_t(n) * n, 0.0);
  std::vector<double> dp(n);
  for (int f = 0; f < n; ++f) dp[f] = demand[f] * popularity[f];
  for (int i = 0; i < n; ++i) {
    sim.at(i, i) = 1.0;
    for (int j = i + 1; j < n; ++j) {
      double diff = dp[i] - dp[j];
      double v = std::exp(-(diff * diff) / (2.0 * sigma_c2));
      sim.at(i, j) = v;
      sim.at(j, i) = v;
    }
  }
  return sim;
}

SimilarityMatrix sbs_similarity(const DemandMatrix& dm) {
  int n = dm.num_sbs;
  SimilarityMatrix sim;
  sim.kind = SimilarityMatrix::Kind::Sbs;
  sim.n = n;
  sim.m.assign(size_t(n) * n, 0.0);
  std::vector<double> norm(n, 0.0);
  for (int s = 0; s < n; ++s) {
    for (int f = 0; f < dm.catalog; ++f) norm[s] += dm.at(s, f) * dm.at(s, f);
    norm[s] = std::sqrt(norm[s]);
  }
  for (int i = 0; i < n; ++i) {
    sim.at(i, i) = 1.0;
    for (int j = i + 1; j < n; ++j) {
      double v = 0.0;
      if (norm[i] > 0 && norm[j] > 0) {
        double dot = 0;
        for (int f = 0; f < dm.catalog; ++f) dot += dm.at(i, f) * dm.at(j, f);
        v = dot / (norm[i] * norm[j]);
        v = std::clamp(v, 0.0, 1.0);
      }
      sim.at(i, j) = v;
      sim.at(j, i) = v;
    }
  }
  return sim;
}

namespace {

// Lloyd iterations with k-means++ seeding; empty clusters get the farthest
// point reassigned so every label is populated.
std::vector<int> kmeans(const Eigen::MatrixXd& rows, int k, Rng& rng) {
  const int n = int(rows.rows());
  const int d = int(rows.cols());
  Eigen::MatrixXd centers(k, d);
  std::vector<double> dist2(n, std::numeric_limits<double>::max());
  int first = int(rng.uniform_int(0, n - 1));
  centers.row(0) = rows.row(first);
  for (int c = 1; c < k; ++c) {
    for (int i = 0; i < n; ++i) {
      double d2 = (rows.row(i) - centers.row(c - 1)).squaredNorm();
      dist2[i] = std::min(dist2[i], d2);
    }
    double total = 0;
    for (double v : dist2) total += v;
    int pick;
    if (total <= 0) {
      pick = int(rng.uniform_int(0, n - 1));
    } else {
      pick = rng.sample_pmf(dist2);
    }
    centers.row(c) = rows.row(pick);
  }

  std::vector<int> label(n, 0);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double bd = std::numeric_limits<double>::max();
      for (int c = 0; c < k; ++c) {
        double d2 = (rows.row(i) - centers.row(c)).squaredNorm();
        if (d2 < bd - 1e-15) {
          bd = d2;
          best = c;
        }
      }
      if (label[i] != best) {
        label[i] = best;
        changed = true;
      }
    }
    std::vector<int> count(k, 0);
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(k, d);
    for (int i = 0; i < n; ++i) {
      count[label[i]]++;
      sum.row(label[i]) += rows.row(i);
    }
    for (int c = 0; c < k; ++c) {
      if (count[c] == 0) {
        // steal the point farthest from its center
        int far = 0;
        double fd = -1;
        for (int i = 0; i < n; ++i) {
          double d2 = (rows.row(i) - centers.row(label[i])).squaredNorm();
          if (d2 > fd && count[label[i]] > 1) {
            fd = d2;
            far = i;
          }
        }
        count[label[far]]--;
        sum.row(label[far]) -= rows.row(far);
        label[far] = c;
        count[c] = 1;
        sum.row(c) = rows.row(far);
        changed = true;
      }
      centers.row(c) = sum.row(c) / double(count[c]);
    }
    if (!changed) break;
  }
  return label;
}

}  // namespace

ClusterAssignment spectral_cluster(const SimilarityMatrix& sim, int k, Rng& rng) {
  const int n = sim.n;
  if (k > n) throw std::invalid_argument("spectral_cluster: K > item count");
  ClusterAssignment ca;
  if (n == 0) return ca;
  if (k == 1 || n == 1) {
    ca.k = 1;
    ca.labels.assign(n, 0);
    return ca;
  }

  Eigen::MatrixXd w(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) w(i, j) = sim.at(i, j);
  Eigen::VectorXd deg = w.rowwise().sum();
  Eigen::VectorXd dinv = deg.array().max(1e-12).rsqrt();
  Eigen::MatrixXd lsym =
      Eigen::MatrixXd::Identity(n, n) - dinv.asDiagonal() * w * dinv.asDiagonal();
  // symmetrize away rounding before the solver
  lsym = 0.5 * (lsym + lsym.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lsym);
  const Eigen::VectorXd& evals = es.eigenvalues();  // ascending

  if (k == 0) {
    int kmax = std::min(8, n);
    double best_gap = -1;
    k = 2;
    for (int c = 2; c <= kmax && c < n; ++c) {
      double gap = evals(c) - evals(c - 1);
      if (gap > best_gap + 1e-15) {
        best_gap = gap;
        k = c;
      }
    }
  }

  Eigen::MatrixXd embed = es.eigenvectors().leftCols(k);
  for (int i = 0; i < n; ++i) {
    double norm = embed.row(i).norm();
    if (norm > 1e-12) embed.row(i) /= norm;
  }
  ca.k = k;
  ca.labels = kmeans(embed, k, rng);
  return ca;
}

void select_cluster_heads(const SimilarityMatrix& sim, ClusterAssignment& ca) {
  auto groups = ca.members();
  ca.heads.assign(ca.k, -1);
  for (int c = 0; c < ca.k; ++c) {
    double best = -1;
    int head = -1;
    for (int i : groups[c]) {
      double row = 0;
      for (int j : groups[c]) row += sim.at(i, j);
      if (row > best + 1e-12) {
        best = row;
        head = i;
      }
    }
    ca.heads[c] = head;
  }
}

}  // namespace edgesim
