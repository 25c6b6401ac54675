#include "mkkc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace mkkc {

namespace {

int label_count(const HardAssignment& a) {
  int k = a.k;
  for (int label : a.labels) {
    if (label < 0) throw InputError("labels must be nonnegative");
    k = std::max(k, label + 1);
  }
  return k;
}

double choose2(double x) { return x * (x - 1.0) / 2.0; }

double entropy(const VectorXd& counts, double n) {
  double h = 0.0;
  for (Index i = 0; i < counts.size(); ++i)
    if (counts(i) > 0) {
      const double p = counts(i) / n;
      h -= p * std::log(p);
    }
  return h;
}

}  // namespace

ContingencyTable contingency_table(const HardAssignment& pred, const HardAssignment& truth) {
  if (pred.labels.size() != truth.labels.size())
    throw InputError("partitions have different lengths (" + std::to_string(pred.labels.size()) +
                     " vs " + std::to_string(truth.labels.size()) + ")");
  ContingencyTable table;
  table.counts.setZero(label_count(pred), label_count(truth));
  for (std::size_t i = 0; i < pred.labels.size(); ++i) ++table.counts(pred.labels[i], truth.labels[i]);
  table.n = static_cast<long long>(pred.labels.size());
  return table;
}

double adjusted_rand_index(const HardAssignment& pred, const HardAssignment& truth) {
  const ContingencyTable t = contingency_table(pred, truth);
  const MatrixXd c = t.counts.cast<double>();
  const double pairs = choose2(static_cast<double>(t.n));
  const double index = c.unaryExpr(&choose2).sum();
  const double rows = c.rowwise().sum().unaryExpr(&choose2).sum();
  const double cols = c.colwise().sum().unaryExpr(&choose2).sum();
  const double expected = pairs > 0 ? rows * cols / pairs : 0.0;
  const double maximum = 0.5 * (rows + cols);
  // both partitions trivial (all singletons or one block): identical, so 1
  if (maximum == expected) return 1.0;
  return (index - expected) / (maximum - expected);
}

double normalized_mutual_information(const HardAssignment& pred, const HardAssignment& truth,
                                     NmiMode mode) {
  const ContingencyTable t = contingency_table(pred, truth);
  const MatrixXd c = t.counts.cast<double>();
  const double n = static_cast<double>(t.n);
  const VectorXd rows = c.rowwise().sum();
  const VectorXd cols = c.colwise().sum().transpose();
  const double h_pred = entropy(rows, n);
  const double h_truth = entropy(cols, n);

  double nmi = 0.0;
  if (h_pred <= 0.0 || h_truth <= 0.0) {
    // identical up to relabeling iff every nonempty row and column has one nonzero cell
    const bool identical = (c.array() > 0).rowwise().count().maxCoeff() <= 1 &&
                           (c.array() > 0).colwise().count().maxCoeff() <= 1;
    nmi = identical ? 1.0 : 0.0;
  } else {
    double mi = 0.0;
    for (Index i = 0; i < c.rows(); ++i)
      for (Index j = 0; j < c.cols(); ++j)
        if (c(i, j) > 0) mi += c(i, j) / n * std::log(n * c(i, j) / (rows(i) * cols(j)));
    nmi = mi / std::sqrt(h_pred * h_truth);
  }
  return mode == NmiMode::PaperCompat ? nmi / std::numbers::ln2 : nmi;
}

double purity(const HardAssignment& pred, const HardAssignment& truth) {
  const ContingencyTable t = contingency_table(pred, truth);
  if (t.n == 0) throw InputError("purity of an empty partition is undefined");
  return static_cast<double>(t.counts.rowwise().maxCoeff().sum()) / static_cast<double>(t.n);
}

std::string_view metric_name(Metric m) {
  switch (m) {
    case Metric::Ari: return "ari";
    case Metric::Nmi: return "nmi";
    case Metric::Purity: return "purity";
  }
  return "unknown";
}

std::optional<Metric> parse_metric(std::string_view name) {
  for (Metric m : {Metric::Ari, Metric::Nmi, Metric::Purity})
    if (metric_name(m) == name) return m;
  return std::nullopt;
}

double score(Metric metric, const HardAssignment& pred, const HardAssignment& truth, NmiMode nmi_mode) {
  switch (metric) {
    case Metric::Ari: return adjusted_rand_index(pred, truth);
    case Metric::Nmi: return normalized_mutual_information(pred, truth, nmi_mode);
    case Metric::Purity: return purity(pred, truth);
  }
  throw InputError("unknown metric");
}

}  // namespace mkkc
