#include "mkkc/simgen.hpp"

#include <cmath>
#include <cstdio>

namespace mkkc {

namespace {

MatrixXd standard_normal(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixXd out(rows, cols);
  // column-major fill order is part of the reproducibility contract
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) out(i, j) = normal(rng);
  return out;
}

/// Each row is N(mean(cluster) * 1, I_p).
MatrixXd draw_view(const std::vector<int>& labels, const std::vector<double>& cluster_means, int p,
                   std::mt19937_64& rng) {
  const auto n = static_cast<Index>(labels.size());
  MatrixXd X = standard_normal(n, p, rng);
  for (Index i = 0; i < n; ++i) X.row(i).array() += cluster_means[static_cast<std::size_t>(labels[i])];
  return X;
}

}  // namespace

void validate(const ScenarioSpec& spec) {
  if (spec.count < 0) throw InputError("perturbation count must be nonnegative");
  if (spec.perturbation == Perturbation::Redundant && !(spec.rho > 0.0 && spec.rho <= 1.0))
    throw InputError("redundant correlation rho must lie in (0, 1]");
  if (spec.n_per_cluster < 2) throw InputError("n_per_cluster must be at least 2");
  if (spec.p < 1) throw InputError("p must be at least 1");
  if (!std::isfinite(spec.mu_sep)) throw InputError("mu_sep must be finite");
}

VectorXd make_redundant(const VectorXd& x, double rho, std::mt19937_64& rng) {
  if (!(rho > 0.0 && rho <= 1.0)) throw InputError("redundant correlation rho must lie in (0, 1]");
  const VectorXd source = standardize_columns(x);
  const VectorXd eps = standard_normal(x.size(), 1, rng);
  return standardize_columns(VectorXd(rho * source + std::sqrt(1.0 - rho * rho) * eps));
}

VectorXd make_redundant(const VectorXd& x, double rho, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return make_redundant(x, rho, rng);
}

LabeledMultiview generate(const ScenarioSpec& spec) {
  validate(spec);
  std::mt19937_64 rng(spec.seed);
  const int npc = spec.n_per_cluster;
  const double mu = spec.mu_sep;

  LabeledMultiview out;
  out.truth.k = 3;
  out.truth.labels.resize(static_cast<std::size_t>(3 * npc));
  for (int i = 0; i < 3 * npc; ++i) out.truth.labels[static_cast<std::size_t>(i)] = i / npc;
  const auto& labels = out.truth.labels;

  // partial view separating cluster c from the other two
  auto partial = [&](int c) {
    std::vector<double> means(3, -mu);
    means[static_cast<std::size_t>(c)] = mu;
    return draw_view(labels, means, spec.p, rng);
  };

  std::vector<MatrixXd> views;
  switch (spec.scenario) {
    case Scenario::A:
      views.push_back(draw_view(labels, {mu, 0.0, -mu}, spec.p, rng));
      views.push_back(partial(2));
      break;
    case Scenario::B:
      views.push_back(partial(0));
      views.push_back(partial(2));
      break;
    case Scenario::C:
      views.push_back(partial(0));
      views.push_back(partial(2));
      views.push_back(standard_normal(3 * npc, spec.p, rng));
      break;
  }

  MatrixXd& first = views.front();
  if (spec.count > 0 && spec.perturbation != Perturbation::None) {
    const Index p = first.cols();
    MatrixXd extra(first.rows(), spec.count);
    if (spec.perturbation == Perturbation::Noise) {
      extra = standard_normal(first.rows(), spec.count, rng);
    } else {
      // sources cycle over the original columns of view 1
      for (int j = 0; j < spec.count; ++j)
        extra.col(j) = make_redundant(VectorXd(first.col(j % p)), spec.rho, rng);
    }
    MatrixXd widened(first.rows(), p + spec.count);
    widened << first, extra;
    first = std::move(widened);
  }

  for (std::size_t v = 0; v < views.size(); ++v)
    out.views.push_back({standardize_columns(views[v]), "view" + std::to_string(v + 1)});
  return out;
}

std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::A: return "A";
    case Scenario::B: return "B";
    case Scenario::C: return "C";
  }
  return "?";
}

std::string perturbation_name(Perturbation p) {
  switch (p) {
    case Perturbation::None: return "None";
    case Perturbation::Noise: return "Noise";
    case Perturbation::Redundant: return "Redun";
  }
  return "?";
}

std::string scenario_label(const ScenarioSpec& spec) {
  if (spec.perturbation == Perturbation::None) return scenario_name(spec.scenario);
  return scenario_name(spec.scenario) + "-" + perturbation_name(spec.perturbation);
}

std::string level_label(const ScenarioSpec& spec) {
  if (spec.perturbation == Perturbation::Redundant) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "cor=%.2f,N=%d", spec.rho, spec.count);
    return buf;
  }
  return "N=" + std::to_string(spec.perturbation == Perturbation::None ? 0 : spec.count);
}

}  // namespace mkkc
