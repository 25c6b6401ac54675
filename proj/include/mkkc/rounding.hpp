#pragma once

#include "mkkc/core.hpp"

#include <cstdint>
#include <vector>

namespace mkkc {

/// Discrete cluster labels in [0, k).
struct HardAssignment {
  std::vector<int> labels;
  int k = 0;

  Index size() const { return static_cast<Index>(labels.size()); }
};

/// Scales every row to unit Euclidean norm. Throws DegenerateError on an all-zero row.
MatrixXd normalize_rows(const MatrixXd& H);

/// One Lloyd run from fixed starting centroids.
struct LloydRun {
  std::vector<int> labels;
  MatrixXd centroids;
  /// Within-cluster sum of squares after every assignment step.
  std::vector<double> objective_history;
  int iterations = 0;
};

/// Lloyd's algorithm. A centroid that loses all its points is moved to the
/// point farthest from its current centroid.
LloydRun lloyd(const MatrixXd& points, MatrixXd centroids, int max_iter = 300);

/// k-means++ seeding: rows of `points` chosen as initial centroids.
MatrixXd kmeanspp_seed(const MatrixXd& points, int k, std::uint64_t seed);

double within_cluster_sum_of_squares(const MatrixXd& points, const std::vector<int>& labels, int k);

/// Best-of-n_starts k-means (k-means++ seeding per start, seeds derived from
/// `seed`). Ties between starts go to the lowest start index.
HardAssignment kmeans(const MatrixXd& points, int k, int n_starts, std::uint64_t seed);

/// Spectral rounding: normalize_rows followed by kmeans.
HardAssignment round_assignment(const MatrixXd& H, int k, int n_starts, std::uint64_t seed);

}  // namespace mkkc
