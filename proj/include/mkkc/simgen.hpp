#pragma once

#include "mkkc/core.hpp"
#include "mkkc/kernels.hpp"
#include "mkkc/rounding.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace mkkc {

/// A: complete view + partial view (cluster 3).
/// B: partial view (cluster 1) + partial view (cluster 3).
/// C: B plus a pure-noise third view.
enum class Scenario { A, B, C };

enum class Perturbation { None, Noise, Redundant };

struct ScenarioSpec {
  Scenario scenario = Scenario::B;
  Perturbation perturbation = Perturbation::None;
  /// Number of columns appended to view 1.
  int count = 0;
  /// Target correlation of redundant columns with their source column.
  double rho = 0.9;
  int n_per_cluster = 100;
  /// Informative features per view.
  int p = 4;
  /// Cluster means are +mu_sep * 1 and -mu_sep * 1 (0 for the middle cluster of the complete view).
  double mu_sep = 3.25;
  std::uint64_t seed = 0;
};

/// Views over 3 * n_per_cluster samples plus the balanced 3-cluster ground truth.
struct LabeledMultiview {
  std::vector<DataView<double>> views;
  HardAssignment truth;
};

void validate(const ScenarioSpec& spec);

/// Draws the scenario, appends the perturbation columns to view 1, then
/// standardizes every column. Identical specs give bit-identical output.
LabeledMultiview generate(const ScenarioSpec& spec);

/// rho * standardize(x) + sqrt(1 - rho^2) * eps, standardized.
VectorXd make_redundant(const VectorXd& x, double rho, std::mt19937_64& rng);
VectorXd make_redundant(const VectorXd& x, double rho, std::uint64_t seed);

std::string scenario_name(Scenario s);
std::string perturbation_name(Perturbation p);

/// "B-Noise", "A-Redun", "C" (no perturbation).
std::string scenario_label(const ScenarioSpec& spec);
/// "N=3", "cor=0.90,N=4", "N=0".
std::string level_label(const ScenarioSpec& spec);

}  // namespace mkkc
