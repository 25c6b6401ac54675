#pragma once

#include "mkkc/core.hpp"
#include "mkkc/kernels.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mkkc {

enum class Variant {
  MinMaxL2,    // min_H max_theta, ||theta||_2 <= 1
  MinMaxMinC,  // min_H max_theta, sum(theta) = 1, theta >= 0.5 / m
  MinMinMkkm,  // min_H min_theta, squared weights on the simplex
  Uniform,     // theta = 1/m, one H-update
  SingleBest,  // best single view by kernel k-means objective
};

enum class ConstraintKind { L2Ball, L1SimplexFloor };

std::string_view variant_name(Variant v);
std::optional<Variant> parse_variant(std::string_view name);
const std::vector<Variant>& all_variants();

/// Variants whose combined kernel is sum_v theta_v^2 K_v.
constexpr bool uses_squared_weights(Variant v) { return v == Variant::MinMinMkkm; }

template <typename Scalar>
struct CoefVector {
  Vector<Scalar> theta;
  ConstraintKind constraint = ConstraintKind::L2Ball;
  /// Lower bound on every entry for L1SimplexFloor (0 for the plain simplex).
  Scalar floor = Scalar(0);
};

/// Relaxed cluster indicator with orthonormal columns.
template <typename Scalar>
struct ContinuousAssignment {
  Matrix<Scalar> H;
  /// Set when lambda_k - lambda_{k+1} is too small for the top-k subspace to be unique.
  bool eigengap_warning = false;
};

struct SolveConfig {
  Index k = 2;
  int max_iter = 500;
  double tol = 1e-4;
  std::uint64_t seed = 0;
  Variant variant = Variant::MinMaxL2;
  /// Floor for MinMaxMinC; negative means the default 0.5 / m.
  double theta_min = -1.0;
};

template <typename Scalar>
struct TraceEntry {
  Vector<Scalar> theta;
  /// tr(K_theta - H^T K_theta H) at the iterate's (H, theta).
  Scalar objective = 0;
  Scalar delta_theta = 0;
};

template <typename Scalar>
struct SolveTrace {
  std::vector<TraceEntry<Scalar>> iterations;
  bool hit_max_iter = false;
};

template <typename Scalar>
struct SolveResult {
  ContinuousAssignment<Scalar> H;
  CoefVector<Scalar> theta;
  SolveTrace<Scalar> trace;
  bool converged = false;
};

inline constexpr double kEigengapTolerance = 1e-10;
inline constexpr double kDegenerateVariance = 1e-12;

/// g(H) = tr(K) - tr(H^T K H), clamped at zero. Nonnegative for PSD K and
/// orthonormal H.
template <typename DerivedK, typename DerivedH>
typename DerivedK::Scalar within_cluster_variance(const Eigen::MatrixBase<DerivedK>& K,
                                                  const Eigen::MatrixBase<DerivedH>& H) {
  using Scalar = typename DerivedK::Scalar;
  if (K.rows() != K.cols()) throw ShapeError("kernel must be square");
  if (H.rows() != K.rows())
    throw ShapeError("assignment has " + std::to_string(H.rows()) + " rows, kernel has " +
                     std::to_string(K.rows()));
  const Scalar explained = (H.transpose() * K * H).trace();
  return std::max(Scalar(0), K.trace() - explained);
}

/// g_v(H) for every kernel in the bundle.
template <typename Scalar>
Vector<Scalar> view_variances(const KernelBundle<Scalar>& bundle, const Matrix<Scalar>& H) {
  Vector<Scalar> g(bundle.views());
  for (Index v = 0; v < bundle.views(); ++v) g(v) = within_cluster_variance(bundle[v], H);
  return g;
}

/// Maximizer of sum_v theta_v g_v over {||theta||_2 <= 1, theta >= 0}: theta = g / ||g||.
template <typename Scalar>
CoefVector<Scalar> theta_minmax_from_variances(const Vector<Scalar>& g) {
  if (g.size() == 0) throw InputError("no view variances");
  if ((g.array() < 0).any()) throw InputError("view variances must be nonnegative");
  if (g.maxCoeff() <= Scalar(kDegenerateVariance))
    throw DegenerateError("all views are perfectly explained by the clustering (g = 0)");
  return {g / g.norm(), ConstraintKind::L2Ball, Scalar(0)};
}

/// Maximizer of sum_v theta_v g_v over {sum theta = 1, theta >= floor}. The
/// largest g (lowest index on ties) takes whatever the floors leave over.
template <typename Scalar>
CoefVector<Scalar> theta_minc_from_variances(const Vector<Scalar>& g, Scalar floor) {
  const Index m = g.size();
  if (m == 0) throw InputError("no view variances");
  if (floor < 0 || floor * Scalar(m) > Scalar(1) + Scalar(1e-12))
    throw InputError("theta_min must satisfy 0 <= m * theta_min <= 1");
  if (g.maxCoeff() <= Scalar(kDegenerateVariance))
    throw DegenerateError("all views are perfectly explained by the clustering (g = 0)");
  Index best = 0;
  for (Index v = 1; v < m; ++v)
    if (g(v) > g(best)) best = v;
  Vector<Scalar> theta = Vector<Scalar>::Constant(m, floor);
  theta(best) = Scalar(1) - Scalar(m - 1) * floor;
  return {theta, ConstraintKind::L1SimplexFloor, floor};
}

/// Minimizer of sum_v theta_v^2 g_v over the simplex: theta_v proportional to
/// 1 / g_v. Views with g_v = 0 share all the weight equally when present.
template <typename Scalar>
CoefVector<Scalar> theta_minmin_from_variances(const Vector<Scalar>& g) {
  const Index m = g.size();
  if (m == 0) throw InputError("no view variances");
  if ((g.array() < 0).any()) throw InputError("view variances must be nonnegative");
  Vector<Scalar> theta(m);
  const auto zero = (g.array() <= Scalar(kDegenerateVariance));
  const Index zeros = zero.count();
  if (zeros > 0) {
    theta = zero.template cast<Scalar>() / Scalar(zeros);
  } else {
    theta = g.cwiseInverse();
    theta /= theta.sum();
  }
  return {theta, ConstraintKind::L1SimplexFloor, Scalar(0)};
}

template <typename Scalar>
CoefVector<Scalar> update_theta_minmax(const KernelBundle<Scalar>& bundle,
                                       const ContinuousAssignment<Scalar>& h) {
  return theta_minmax_from_variances<Scalar>(view_variances(bundle, h.H));
}

template <typename Scalar>
CoefVector<Scalar> update_theta_minc(const KernelBundle<Scalar>& bundle,
                                     const ContinuousAssignment<Scalar>& h, Scalar theta_min) {
  return theta_minc_from_variances<Scalar>(view_variances(bundle, h.H), theta_min);
}

template <typename Scalar>
CoefVector<Scalar> update_theta_minmin(const KernelBundle<Scalar>& bundle,
                                       const ContinuousAssignment<Scalar>& h) {
  return theta_minmin_from_variances<Scalar>(view_variances(bundle, h.H));
}

/// Eigenvalues of a symmetric matrix, largest first.
template <typename Derived>
Vector<typename Derived::Scalar> descending_eigenvalues(const Eigen::MatrixBase<Derived>& K) {
  using Scalar = typename Derived::Scalar;
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(K, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("symmetric eigen-solver did not converge");
  return es.eigenvalues().reverse();
}

/// Kernel k-means objective at its relaxed optimum: sum of all but the top-k eigenvalues.
template <typename Derived>
typename Derived::Scalar residual_eigenvalue_sum(const Eigen::MatrixBase<Derived>& K, Index k) {
  const auto lambda = descending_eigenvalues(K);
  return lambda.tail(lambda.size() - k).sum();
}

/// Columns are the eigenvectors of K for its k largest eigenvalues (Q = I).
/// Each column's largest-magnitude entry is made positive.
template <typename Derived>
ContinuousAssignment<typename Derived::Scalar> update_H(const Eigen::MatrixBase<Derived>& K,
                                                        Index k) {
  using Scalar = typename Derived::Scalar;
  const Index n = K.rows();
  if (K.cols() != n) throw ShapeError("kernel must be square");
  if (k < 1 || k >= n)
    throw InputError("cluster count k=" + std::to_string(k) + " must satisfy 1 <= k < n=" +
                     std::to_string(n));

  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(K);
  if (es.info() != Eigen::Success) throw NumericalError("symmetric eigen-solver did not converge");
  const auto& values = es.eigenvalues();

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index(0));
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return values(a) > values(b); });

  ContinuousAssignment<Scalar> out;
  out.H.resize(n, k);
  for (Index c = 0; c < k; ++c) {
    auto col = out.H.col(c);
    col = es.eigenvectors().col(order[static_cast<std::size_t>(c)]);
    Index pivot = 0;
    col.cwiseAbs().maxCoeff(&pivot);
    if (col(pivot) < 0) col = -col;
  }
  const Scalar gap = values(order[static_cast<std::size_t>(k - 1)]) -
                     values(order[static_cast<std::size_t>(k)]);
  out.eigengap_warning = gap < Scalar(kEigengapTolerance);
  return out;
}

template <typename Scalar>
KernelMatrix<Scalar> combine_for_variant(const KernelBundle<Scalar>& bundle,
                                         const Vector<Scalar>& theta, Variant variant) {
  return uses_squared_weights(variant) ? combine_squared(bundle, theta)
                                       : combine_linear(bundle, theta);
}

namespace detail {

template <typename Scalar>
Scalar weighted_objective(const Vector<Scalar>& theta, const Vector<Scalar>& g, Variant variant) {
  return uses_squared_weights(variant) ? theta.array().square().matrix().dot(g) : theta.dot(g);
}

template <typename Scalar>
void validate_solve(const KernelBundle<Scalar>& bundle, const SolveConfig& config) {
  if (bundle.views() == 0) throw InputError("empty kernel bundle");
  const Index n = bundle.samples();
  for (Index v = 0; v < bundle.views(); ++v)
    if (bundle[v].rows() != n || bundle[v].cols() != n)
      throw ShapeError("kernel " + std::to_string(v + 1) + " is not " + std::to_string(n) + "x" +
                       std::to_string(n));
  if (config.k < 1 || config.k >= n)
    throw InputError("cluster count k=" + std::to_string(config.k) + " must satisfy 1 <= k < n=" +
                     std::to_string(n));
  if (!(config.tol > 0)) throw InputError("tol must be positive");
  if (config.max_iter < 1) throw InputError("max_iter must be at least 1");
}

}  // namespace detail

/// Alternates an H-update on the combined kernel with the variant's theta-update,
/// starting from uniform weights, until ||theta_t - theta_{t-1}||_2 < tol or
/// max_iter. Uniform and SingleBest perform a single H-update.
template <typename Scalar>
SolveResult<Scalar> solve(const KernelBundle<Scalar>& bundle, const SolveConfig& config) {
  detail::validate_solve(bundle, config);
  const Index m = bundle.views();
  const Index k = config.k;
  const Variant variant = config.variant;

  SolveResult<Scalar> result;
  auto single_step = [&](Vector<Scalar> theta, ConstraintKind constraint, const Matrix<Scalar>& K) {
    result.H = update_H(K, k);
    const Vector<Scalar> g = view_variances(bundle, result.H.H);
    result.trace.iterations.push_back({theta, detail::weighted_objective(theta, g, variant), Scalar(0)});
    result.theta = {std::move(theta), constraint, Scalar(0)};
    result.converged = true;
    return result;
  };

  if (variant == Variant::SingleBest) {
    Index best = 0;
    Scalar best_residual = residual_eigenvalue_sum(bundle[0], k);
    for (Index v = 1; v < m; ++v) {
      const Scalar r = residual_eigenvalue_sum(bundle[v], k);
      if (r < best_residual) {
        best = v;
        best_residual = r;
      }
    }
    return single_step(Vector<Scalar>::Unit(m, best), ConstraintKind::L1SimplexFloor, bundle[best]);
  }
  if (variant == Variant::Uniform || m == 1) {
    const ConstraintKind constraint =
        variant == Variant::MinMaxL2 ? ConstraintKind::L2Ball : ConstraintKind::L1SimplexFloor;
    Vector<Scalar> theta = Vector<Scalar>::Constant(m, Scalar(1) / Scalar(m));
    return single_step(theta, constraint, combine_linear(bundle, theta).K);
  }

  const Scalar theta_min =
      config.theta_min >= 0 ? Scalar(config.theta_min) : Scalar(0.5) / Scalar(m);
  Vector<Scalar> theta = variant == Variant::MinMaxL2
                             ? Vector<Scalar>::Constant(m, Scalar(1) / std::sqrt(Scalar(m)))
                             : Vector<Scalar>::Constant(m, Scalar(1) / Scalar(m));

  // theta before each H-update, and the H it produced. The iteration map is
  // deterministic, so a bitwise repeat of theta makes the rest of the run periodic.
  std::vector<Vector<Scalar>> before;
  std::vector<ContinuousAssignment<Scalar>> assignments;
  for (int iter = 0; iter < config.max_iter; ++iter) {
    const auto repeat = std::find(before.begin(), before.end(), theta);
    if (repeat != before.end()) {
      const auto start = static_cast<std::size_t>(repeat - before.begin());
      const std::size_t period = before.size() - start;
      for (auto j = static_cast<std::size_t>(iter); j < static_cast<std::size_t>(config.max_iter); ++j)
        result.trace.iterations.push_back(result.trace.iterations[start + (j - start) % period]);
      const std::size_t last = start + (static_cast<std::size_t>(config.max_iter) - 1 - start) % period;
      result.H = assignments[last];
      result.theta.theta = result.trace.iterations.back().theta;
      result.trace.hit_max_iter = true;
      return result;
    }
    before.push_back(theta);

    result.H = update_H(combine_for_variant(bundle, theta, variant).K, k);
    assignments.push_back(result.H);
    const Vector<Scalar> g = view_variances(bundle, result.H.H);
    CoefVector<Scalar> next;
    switch (variant) {
      case Variant::MinMaxL2: next = theta_minmax_from_variances(g); break;
      case Variant::MinMaxMinC: next = theta_minc_from_variances(g, theta_min); break;
      default: next = theta_minmin_from_variances(g); break;
    }
    const Scalar delta = (next.theta - theta).norm();
    theta = next.theta;
    result.theta = std::move(next);
    result.trace.iterations.push_back({theta, detail::weighted_objective(theta, g, variant), delta});
    if (delta < Scalar(config.tol)) {
      result.converged = true;
      return result;
    }
  }
  result.trace.hit_max_iter = true;
  return result;
}

/// Share of the combined kernel carried by each view: theta / sum(theta), or
/// theta^2 / sum(theta^2) for squared-weight variants.
template <typename Scalar>
Vector<Scalar> relative_weights(const Vector<Scalar>& theta, Variant variant) {
  Vector<Scalar> w = uses_squared_weights(variant) ? theta.array().square().matrix() : theta;
  const Scalar total = w.sum();
  return total > 0 ? Vector<Scalar>(w / total) : w;
}

}  // namespace mkkc
