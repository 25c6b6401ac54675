#pragma once

#include "mkkc/core.hpp"
#include "mkkc/rounding.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace mkkc {

/// counts(i, j) = number of samples with predicted label i and true label j.
struct ContingencyTable {
  Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic> counts;
  long long n = 0;
};

ContingencyTable contingency_table(const HardAssignment& pred, const HardAssignment& truth);

/// Hubert-Arabie adjusted Rand index.
double adjusted_rand_index(const HardAssignment& pred, const HardAssignment& truth);

enum class NmiMode {
  Standard,     // MI / sqrt(H(pred) H(truth)), natural logs, in [0, 1]
  PaperCompat,  // Standard / ln 2; a perfect clustering scores 1/ln 2 = 1.4427
};

/// Normalized mutual information. When either partition has zero entropy the
/// score is 1 if the partitions are identical up to relabeling, else 0.
double normalized_mutual_information(const HardAssignment& pred, const HardAssignment& truth,
                                     NmiMode mode = NmiMode::Standard);

/// (1/n) sum over predicted clusters of the largest overlap with a true class.
double purity(const HardAssignment& pred, const HardAssignment& truth);

enum class Metric { Ari, Nmi, Purity };

std::string_view metric_name(Metric m);
std::optional<Metric> parse_metric(std::string_view name);

double score(Metric metric, const HardAssignment& pred, const HardAssignment& truth,
             NmiMode nmi_mode = NmiMode::Standard);

}  // namespace mkkc
