#pragma once

#include <vector>

#include "edgesim/request.hpp"
#include "edgesim/rng.hpp"

namespace edgesim {

struct SimilarityMatrix {
  enum class Kind { Content, Sbs };
  Kind kind = Kind::Content;
  int n = 0;
  std::vector<double> m;  // row-major, symmetric, unit diagonal, entries in [0,1]

  double at(int i, int j) const { return m[size_t(i) * n + j]; }
  double& at(int i, int j) { return m[size_t(i) * n + j]; }
  // Throws std::logic_error when symmetry / diagonal / range is violated.
  void check_valid(double tol = 1e-12) const;
};

struct ClusterAssignment {
  std::vector<int> labels;  // cluster id per item
  int k = 0;
  std::vector<int> heads;   // one item per cluster (SBS kind only)

  std::vector<std::vector<int>> members() const;
};

// Eq. (13): Gaussian kernel on the scalars D_f * P_f.
SimilarityMatrix content_similarity(const std::vector<double>& demand,
                                    const std::vector<double>& popularity,
                                    double sigma_c2);

// Eq. (14): cosine similarity of SBS demand rows; zero rows pair to 0 (1 on
// the diagonal).
SimilarityMatrix sbs_similarity(const DemandMatrix& dm);

// Normalized-Laplacian spectral embedding + seeded k-means. k = 0 picks the
// largest-eigengap count in [2, min(8, n)].
ClusterAssignment spectral_cluster(const SimilarityMatrix& sim, int k, Rng& rng);

// Head = member with the largest within-cluster similarity row sum, ties to
// the lowest id.
void select_cluster_heads(const SimilarityMatrix& sim, ClusterAssignment& ca);

}  // namespace edgesim
