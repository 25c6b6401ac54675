#include "mkkc/rounding.hpp"

#include <limits>
#include <random>
#include <string>

namespace mkkc {

MatrixXd normalize_rows(const MatrixXd& H) {
  MatrixXd out = H;
  for (Index i = 0; i < out.rows(); ++i) {
    const double norm = out.row(i).norm();
    if (!(norm > 0.0))
      throw DegenerateError("row " + std::to_string(i) + " of the embedding is all zero");
    out.row(i) /= norm;
  }
  return out;
}

double within_cluster_sum_of_squares(const MatrixXd& points, const std::vector<int>& labels, int k) {
  MatrixXd centroids = MatrixXd::Zero(k, points.cols());
  std::vector<int> counts(static_cast<std::size_t>(k), 0);
  for (Index i = 0; i < points.rows(); ++i) {
    centroids.row(labels[i]) += points.row(i);
    ++counts[static_cast<std::size_t>(labels[i])];
  }
  for (int c = 0; c < k; ++c)
    if (counts[static_cast<std::size_t>(c)] > 0) centroids.row(c) /= counts[static_cast<std::size_t>(c)];
  double total = 0.0;
  for (Index i = 0; i < points.rows(); ++i)
    total += (points.row(i) - centroids.row(labels[i])).squaredNorm();
  return total;
}

namespace {

double assign(const MatrixXd& points, const MatrixXd& centroids, std::vector<int>& labels) {
  double total = 0.0;
  for (Index i = 0; i < points.rows(); ++i) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Index c = 0; c < centroids.rows(); ++c) {
      const double d = (points.row(i) - centroids.row(c)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    labels[static_cast<std::size_t>(i)] = best;
    total += best_d;
  }
  return total;
}

}  // namespace

LloydRun lloyd(const MatrixXd& points, MatrixXd centroids, int max_iter) {
  const Index n = points.rows();
  const Index k = centroids.rows();
  LloydRun run;
  run.labels.assign(static_cast<std::size_t>(n), -1);
  std::vector<int> previous;

  for (int iter = 0; iter < max_iter; ++iter) {
    previous = run.labels;
    run.objective_history.push_back(assign(points, centroids, run.labels));
    run.iterations = iter + 1;
    if (run.labels == previous) break;

    MatrixXd sums = MatrixXd::Zero(k, points.cols());
    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (Index i = 0; i < n; ++i) {
      sums.row(run.labels[i]) += points.row(i);
      ++counts[static_cast<std::size_t>(run.labels[i])];
    }
    auto count = [&](Index c) -> Index& { return counts[static_cast<std::size_t>(c)]; };
    for (Index c = 0; c < k; ++c)
      if (count(c) > 0) centroids.row(c) = sums.row(c) / static_cast<double>(count(c));
    for (Index c = 0; c < k; ++c) {
      if (count(c) > 0) continue;
      // empty cluster: take over the point farthest from its own centroid
      Index far = -1;
      double far_d = -1.0;
      for (Index i = 0; i < n; ++i) {
        const int owner = run.labels[i];
        if (count(owner) < 2) continue;
        const double d = (points.row(i) - centroids.row(owner)).squaredNorm();
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      if (far < 0) break;
      const int owner = run.labels[far];
      sums.row(owner) -= points.row(far);
      --count(owner);
      centroids.row(owner) = sums.row(owner) / static_cast<double>(count(owner));
      run.labels[far] = static_cast<int>(c);
      sums.row(c) = points.row(far);
      count(c) = 1;
      centroids.row(c) = points.row(far);
    }
  }
  run.centroids = std::move(centroids);
  return run;
}

MatrixXd kmeanspp_seed(const MatrixXd& points, int k, std::uint64_t seed) {
  const Index n = points.rows();
  std::mt19937_64 rng(seed);
  MatrixXd centroids(k, points.cols());
  std::uniform_int_distribution<Index> first(0, n - 1);
  centroids.row(0) = points.row(first(rng));

  VectorXd d2(n);
  for (Index i = 0; i < n; ++i) d2(i) = (points.row(i) - centroids.row(0)).squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Index pick = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double target = u(rng);
      pick = n - 1;
      for (Index i = 0; i < n; ++i) {
        target -= d2(i);
        if (target < 0.0 && d2(i) > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = first(rng);
    }
    centroids.row(c) = points.row(pick);
    for (Index i = 0; i < n; ++i)
      d2(i) = std::min(d2(i), (points.row(i) - centroids.row(c)).squaredNorm());
  }
  return centroids;
}

HardAssignment kmeans(const MatrixXd& points, int k, int n_starts, std::uint64_t seed) {
  const Index n = points.rows();
  if (k < 1) throw InputError("k must be at least 1");
  if (n < k) throw InputError("kmeans needs at least k=" + std::to_string(k) + " points, got " + std::to_string(n));
  if (n_starts < 1) throw InputError("n_starts must be at least 1");
  if (!points.allFinite()) throw InputError("kmeans input contains non-finite entries");

  HardAssignment best{std::vector<int>(static_cast<std::size_t>(n), 0), k};
  if (k == 1) return best;

  double best_obj = std::numeric_limits<double>::infinity();
  for (int start = 0; start < n_starts; ++start) {
    const auto start_seed = combine_seed(seed, static_cast<std::uint64_t>(start));
    LloydRun run = lloyd(points, kmeanspp_seed(points, k, start_seed));
    const double obj = within_cluster_sum_of_squares(points, run.labels, k);
    if (obj < best_obj) {
      best_obj = obj;
      best.labels = std::move(run.labels);
    }
  }
  return best;
}

HardAssignment round_assignment(const MatrixXd& H, int k, int n_starts, std::uint64_t seed) {
  return kmeans(normalize_rows(H), k, n_starts, seed);
}

}  // namespace mkkc
