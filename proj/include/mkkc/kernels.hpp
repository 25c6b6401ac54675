#pragma once

#include "mkkc/core.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace mkkc {

/// One data modality: n samples by p features.
template <typename Scalar>
struct DataView {
  Matrix<Scalar> X;
  std::string view_id;
};

/// An n x n kernel together with the preprocessing that has been applied to it.
template <typename Scalar>
struct KernelMatrix {
  Matrix<Scalar> K;
  bool centered = false;
  bool trace_scaled = false;

  Index size() const { return K.rows(); }
};

/// m preprocessed kernels over the same n samples.
template <typename Scalar>
struct KernelBundle {
  std::vector<KernelMatrix<Scalar>> kernels;

  Index views() const { return static_cast<Index>(kernels.size()); }
  Index samples() const { return kernels.empty() ? 0 : kernels.front().size(); }
  const Matrix<Scalar>& operator[](Index v) const { return kernels[static_cast<std::size_t>(v)].K; }
};

enum class KernelKind { Linear, Rbf };

struct KernelSpec {
  KernelKind kind = KernelKind::Rbf;
  /// exp(-gamma * ||x - y||^2); ignored for linear kernels.
  double gamma = 0.5;
  /// Derive gamma from the view's feature count as 1 / (2 + p^2).
  bool gamma_from_features = false;
};

/// gamma used for high-dimensional views: 1 / (2 + p^2).
inline double feature_count_gamma(Index features) {
  const double p = static_cast<double>(features);
  return 1.0 / (2.0 + p * p);
}

namespace detail {

template <typename Scalar>
void symmetrize(Matrix<Scalar>& K) {
  K = (0.5 * (K + K.transpose())).eval();
}

template <typename Scalar>
void validate_view(const DataView<Scalar>& view) {
  if (view.X.rows() < 2)
    throw InputError("view '" + view.view_id + "' needs at least 2 samples");
  if (view.X.cols() < 1)
    throw InputError("view '" + view.view_id + "' needs at least 1 feature");
  if (!view.X.allFinite())
    throw InputError("view '" + view.view_id + "' contains non-finite entries");
}

}  // namespace detail

/// Centers every column to mean 0 and scales it to unit sample (n - 1) standard
/// deviation. Constant columns are left centered at zero.
template <typename Derived>
Matrix<typename Derived::Scalar> standardize_columns(const Eigen::MatrixBase<Derived>& X) {
  using Scalar = typename Derived::Scalar;
  Matrix<Scalar> out = X;
  const auto n = static_cast<Scalar>(X.rows());
  for (Index j = 0; j < out.cols(); ++j) {
    auto col = out.col(j);
    col.array() -= col.mean();
    const Scalar sd = std::sqrt(col.squaredNorm() / (n - 1));
    if (sd > Scalar(0)) col /= sd;
  }
  return out;
}

template <typename Scalar>
KernelMatrix<Scalar> linear_kernel(const DataView<Scalar>& view) {
  detail::validate_view(view);
  KernelMatrix<Scalar> out;
  out.K.noalias() = view.X * view.X.transpose();
  detail::symmetrize(out.K);
  return out;
}

template <typename Scalar>
KernelMatrix<Scalar> rbf_kernel(const DataView<Scalar>& view, Scalar gamma) {
  if (!(gamma > Scalar(0)) || !std::isfinite(gamma))
    throw InputError("rbf gamma must be a positive finite number");
  detail::validate_view(view);

  const Index n = view.X.rows();
  const Vector<Scalar> sq = view.X.rowwise().squaredNorm();
  Matrix<Scalar> gram = view.X * view.X.transpose();

  KernelMatrix<Scalar> out;
  out.K.resize(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = j; i < n; ++i) {
      // clamp cancellation error in ||x||^2 + ||y||^2 - 2<x, y>
      const Scalar d2 = std::max(Scalar(0), sq(i) + sq(j) - 2 * gram(i, j));
      const Scalar v = std::exp(-gamma * d2);
      out.K(i, j) = v;
      out.K(j, i) = v;
    }
    out.K(j, j) = Scalar(1);
  }
  return out;
}

/// K <- K - JK - KJ + JKJ with J = 11^T / n, computed as a double-centering
/// of rows and columns.
template <typename Scalar>
KernelMatrix<Scalar> center_kernel(const KernelMatrix<Scalar>& k) {
  const Index n = k.size();
  if (k.K.cols() != n) throw ShapeError("kernel must be square");
  const Vector<Scalar> row_mean = k.K.rowwise().mean();
  const Vector<Scalar> col_mean = k.K.colwise().mean().transpose();
  const Scalar grand = k.K.mean();

  KernelMatrix<Scalar> out = k;
  out.K.colwise() -= row_mean;
  out.K.rowwise() -= col_mean.transpose();
  out.K.array() += grand;
  detail::symmetrize(out.K);
  out.centered = true;
  return out;
}

template <typename Scalar>
KernelMatrix<Scalar> scale_kernel(const KernelMatrix<Scalar>& k, Scalar tolerance = Scalar(1e-12)) {
  const Scalar tr = k.K.trace();
  if (!(tr > tolerance))
    throw DegenerateError("kernel trace is numerically zero; the view carries no variance");
  KernelMatrix<Scalar> out = k;
  out.K /= tr;
  out.trace_scaled = true;
  return out;
}

template <typename Scalar>
KernelMatrix<Scalar> build_kernel(const DataView<Scalar>& view, const KernelSpec& spec) {
  if (spec.kind == KernelKind::Linear) return linear_kernel(view);
  const Scalar gamma = spec.gamma_from_features ? Scalar(feature_count_gamma(view.X.cols()))
                                                : Scalar(spec.gamma);
  return rbf_kernel(view, gamma);
}

/// Builds each view's kernel, then centers it, then divides it by its trace.
/// `specs` holds either one spec per view or a single spec shared by all views.
template <typename Scalar>
KernelBundle<Scalar> prepare_bundle(const std::vector<DataView<Scalar>>& views,
                                    const std::vector<KernelSpec>& specs) {
  if (views.empty()) throw InputError("at least one view is required");
  if (specs.size() != 1 && specs.size() != views.size())
    throw ShapeError("expected 1 or " + std::to_string(views.size()) + " kernel specs, got " +
                     std::to_string(specs.size()));
  const Index n = views.front().X.rows();
  KernelBundle<Scalar> bundle;
  bundle.kernels.reserve(views.size());
  for (std::size_t v = 0; v < views.size(); ++v) {
    if (views[v].X.rows() != n)
      throw ShapeError("view " + std::to_string(v + 1) + " has " + std::to_string(views[v].X.rows()) +
                       " samples, expected " + std::to_string(n));
    const KernelSpec& spec = specs.size() == 1 ? specs.front() : specs[v];
    bundle.kernels.push_back(scale_kernel(center_kernel(build_kernel(views[v], spec))));
  }
  return bundle;
}

/// sum_v theta_v K_v
template <typename Scalar, typename Derived>
KernelMatrix<Scalar> combine_linear(const KernelBundle<Scalar>& bundle,
                                    const Eigen::MatrixBase<Derived>& theta) {
  const Index m = bundle.views();
  if (m == 0) throw InputError("empty kernel bundle");
  if (theta.size() != m)
    throw ShapeError("theta has " + std::to_string(theta.size()) + " entries for " +
                     std::to_string(m) + " kernels");
  if ((theta.array() < 0).any()) throw InputError("kernel weights must be nonnegative");

  KernelMatrix<Scalar> out;
  out.K = Matrix<Scalar>::Zero(bundle.samples(), bundle.samples());
  bool centered = true;
  for (Index v = 0; v < m; ++v) {
    out.K += Scalar(theta(v)) * bundle[v];
    centered = centered && bundle.kernels[static_cast<std::size_t>(v)].centered;
  }
  detail::symmetrize(out.K);
  out.centered = centered;
  return out;
}

/// sum_v theta_v^2 K_v
template <typename Scalar, typename Derived>
KernelMatrix<Scalar> combine_squared(const KernelBundle<Scalar>& bundle,
                                     const Eigen::MatrixBase<Derived>& theta) {
  if ((theta.array() < 0).any()) throw InputError("kernel weights must be nonnegative");
  const Vector<Scalar> squared = theta.array().square().template cast<Scalar>();
  return combine_linear(bundle, squared);
}

}  // namespace mkkc
