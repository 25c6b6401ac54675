#pragma once

// Random instance generators and brute-force oracles shared by the unit and
// acceptance tests. Nothing here calls into the solver.

#include "mkkc/core.hpp"
#include "mkkc/kernels.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace mkkc::testing {

inline MatrixXd gaussian(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  MatrixXd X(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) X(i, j) = z(rng);
  return X;
}

inline MatrixXd random_psd(Index n, Index rank, std::mt19937_64& rng) {
  const MatrixXd A = gaussian(n, rank, rng);
  MatrixXd K = A * A.transpose();
  return 0.5 * (K + K.transpose());
}

inline MatrixXd random_orthonormal(Index n, Index k, std::mt19937_64& rng) {
  Eigen::HouseholderQR<MatrixXd> qr(gaussian(n, k, rng));
  return qr.householderQ() * MatrixXd::Identity(n, k);
}

inline Index uniform_index(Index lo, Index hi, std::mt19937_64& rng) {
  return std::uniform_int_distribution<Index>(lo, hi)(rng);
}

/// Preprocessed bundle over m random views (mix of rbf and linear kernels).
inline KernelBundle<double> random_bundle(Index n, Index m, std::mt19937_64& rng) {
  std::vector<DataView<double>> views;
  std::vector<KernelSpec> specs;
  for (Index v = 0; v < m; ++v) {
    views.push_back({gaussian(n, uniform_index(1, 6, rng), rng), "v" + std::to_string(v)});
    const bool linear = uniform_index(0, 1, rng) == 1;
    specs.push_back(linear ? KernelSpec{KernelKind::Linear, 0.0, false}
                           : KernelSpec{KernelKind::Rbf, 0.05 + 0.5 * std::uniform_real_distribution<double>()(rng), false});
  }
  return prepare_bundle(views, specs);
}

/// (I - 11^T/n) K (I - 11^T/n) by explicit products.
inline MatrixXd center_by_projection(const MatrixXd& K) {
  const Index n = K.rows();
  const MatrixXd P = MatrixXd::Identity(n, n) - MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
  return P * K * P;
}

/// Eigenvalues of a PSD matrix via singular values, largest first.
inline VectorXd psd_spectrum(const MatrixXd& K) {
  return Eigen::JacobiSVD<MatrixXd>(K).singularValues();
}

/// Trace of H^T K H summed column by column.
inline double explained_trace(const MatrixXd& K, const MatrixXd& H) {
  double total = 0.0;
  for (Index c = 0; c < H.cols(); ++c) total += H.col(c).dot(K * H.col(c));
  return total;
}

struct GridOptimum {
  VectorXd theta;
  double value = 0.0;
};

/// Coarse-to-fine search over the first m-1 coordinates of a box
/// [lo, hi]^(m-1); `complete` fills the last coordinate and returns false when
/// the point is infeasible. The final pass has spacing `fine`.
inline GridOptimum grid_search(Index m, double lo, double hi, double fine,
                               const std::function<bool(VectorXd&)>& complete,
                               const std::function<double(const VectorXd&)>& objective, bool maximize) {
  const Index free = m - 1;
  GridOptimum best;
  best.value = maximize ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
  if (free == 0) {
    VectorXd t(1);
    if (complete(t)) best = {t, objective(t)};
    return best;
  }

  auto sweep = [&](const VectorXd& lower, const VectorXd& upper, double step) {
    std::vector<Index> counts(static_cast<std::size_t>(free));
    for (Index d = 0; d < free; ++d)
      counts[static_cast<std::size_t>(d)] = static_cast<Index>(std::floor((upper(d) - lower(d)) / step + 1e-9)) + 1;
    std::vector<Index> idx(static_cast<std::size_t>(free), 0);
    VectorXd t(m);
    while (true) {
      for (Index d = 0; d < free; ++d) t(d) = lower(d) + step * static_cast<double>(idx[static_cast<std::size_t>(d)]);
      if (complete(t)) {
        const double value = objective(t);
        if (maximize ? value > best.value : value < best.value) best = {t, value};
      }
      Index d = 0;
      while (d < free && ++idx[static_cast<std::size_t>(d)] == counts[static_cast<std::size_t>(d)]) {
        idx[static_cast<std::size_t>(d)] = 0;
        ++d;
      }
      if (d == free) break;
    }
  };

  const double coarse = free >= 3 ? 0.02 : 0.01;
  sweep(VectorXd::Constant(free, lo), VectorXd::Constant(free, hi), coarse);
  const double window = 2.0 * coarse;
  const VectorXd center = best.theta.head(free);
  VectorXd lower(free), upper(free);
  for (Index d = 0; d < free; ++d) {
    // Snap the window to the fine lattice anchored at lo.
    lower(d) = lo + fine * std::floor((std::max(lo, center(d) - window) - lo) / fine + 1e-9);
    upper(d) = std::min(hi, center(d) + window);
  }
  sweep(lower, upper, fine);
  return best;
}

/// max sum theta_v g_v over {||theta||_2 <= 1, theta >= 0}. For g >= 0 the
/// last coordinate sits on the sphere.
inline GridOptimum l2_ball_maximum(const VectorXd& g, double fine = 1e-3) {
  const Index m = g.size();
  auto complete = [m](VectorXd& t) {
    const double used = t.head(m - 1).squaredNorm();
    if (used > 1.0) return false;
    t(m - 1) = std::sqrt(1.0 - used);
    return true;
  };
  return grid_search(m, 0.0, 1.0, fine, complete, [&](const VectorXd& t) { return t.dot(g); }, true);
}

/// max sum theta_v g_v over {sum theta = 1, theta >= floor}.
inline GridOptimum floored_simplex_maximum(const VectorXd& g, double floor, double fine = 1e-3) {
  const Index m = g.size();
  auto complete = [m, floor](VectorXd& t) {
    t(m - 1) = 1.0 - t.head(m - 1).sum();
    return t(m - 1) >= floor - 1e-12;
  };
  return grid_search(m, floor, 1.0, fine, complete, [&](const VectorXd& t) { return t.dot(g); }, true);
}

/// min sum theta_v^2 g_v over {sum theta = 1, theta >= 0}.
inline GridOptimum simplex_squared_minimum(const VectorXd& g, double fine = 1e-3) {
  const Index m = g.size();
  auto complete = [m](VectorXd& t) {
    t(m - 1) = 1.0 - t.head(m - 1).sum();
    return t(m - 1) >= -1e-12;
  };
  return grid_search(m, 0.0, 1.0, fine, complete,
                     [&](const VectorXd& t) { return t.array().square().matrix().dot(g); }, false);
}

/// Unexplained variance of view v for two linear views, from the SVD of the
/// concatenated data [X_1 X_2]: tr(X_v X_v^T) minus the within-view and
/// cross-view terms of the top-k right singular blocks.
inline double svd_unexplained_variance(const MatrixXd& X1, const MatrixXd& X2, Index k, int view) {
  MatrixXd X(X1.rows(), X1.cols() + X2.cols());
  X << X1, X2;
  Eigen::JacobiSVD<MatrixXd> svd(X, Eigen::ComputeThinV);
  const MatrixXd Vk = svd.matrixV().leftCols(k);
  const MatrixXd V1 = Vk.topRows(X1.cols());
  const MatrixXd V2 = Vk.bottomRows(X2.cols());
  const MatrixXd& Xv = view == 0 ? X1 : X2;
  const MatrixXd& Xw = view == 0 ? X2 : X1;
  const MatrixXd& Vv = view == 0 ? V1 : V2;
  const MatrixXd& Vw = view == 0 ? V2 : V1;
  const double within = (Vv.transpose() * Xv.transpose() * Xv * Vv).trace();
  const double cross = (Vv.transpose() * Xv.transpose() * Xw * Vw).trace();
  return (Xv * Xv.transpose()).trace() - (within + cross);
}

inline MatrixXd center_columns(const MatrixXd& X) {
  return X.rowwise() - X.colwise().mean();
}

/// Largest |A - B| entry.
inline double max_abs_diff(const MatrixXd& A, const MatrixXd& B) {
  return (A - B).cwiseAbs().maxCoeff();
}

}  // namespace mkkc::testing
