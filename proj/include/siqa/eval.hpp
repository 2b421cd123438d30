#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace siqa {

// Rows are true classes, columns are predicted classes.
struct ConfusionMatrix {
  std::array<std::array<std::int64_t, 3>, 3> counts{};

  std::int64_t total() const;
  std::int64_t row_sum(int t) const;
  std::int64_t col_sum(int p) const;
};

ConfusionMatrix confusion(std::span<const int> preds,
                          std::span<const int> truths);

struct Metrics {
  double acc = 0.0;
  std::array<double, 3> precision{};
  std::array<double, 3> recall{};
  std::array<double, 3> f_score{};
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f = 0.0;
};

// Accuracy, per-class precision/recall/F and unweighted macro averages.
// Computed with exact rational arithmetic and rounded once per value, so
// results match a rational oracle bit for bit. Zero-denominator classes
// contribute 0.
Metrics metrics(const ConfusionMatrix& cm);

// Empirical per-class cumulative distributions of tiny-structure mask sizes.
// CDF_c(t) is the fraction of class-c samples with |M_TS| strictly below t.
class MtsCdf {
 public:
  explicit MtsCdf(
      std::span<const std::pair<std::int64_t, int>> sizes_with_labels);

  double cdf(int cls, std::int64_t t) const;
  // Smallest integer t with cdf(cls, t) >= q; q in (0, 1].
  std::int64_t quantile(int cls, double q) const;

  const std::vector<std::int64_t>& sizes(int cls) const {
    return sorted_[cls];
  }

 private:
  std::array<std::vector<std::int64_t>, 3> sorted_;
};

}  // namespace siqa
