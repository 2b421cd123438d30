#include "siqa/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "siqa/errors.hpp"

namespace siqa {

std::int64_t ConfusionMatrix::total() const {
  std::int64_t sum = 0;
  for (const auto& row : counts) {
    sum = std::accumulate(row.begin(), row.end(), sum);
  }
  return sum;
}

std::int64_t ConfusionMatrix::row_sum(int t) const {
  return counts[t][0] + counts[t][1] + counts[t][2];
}

std::int64_t ConfusionMatrix::col_sum(int p) const {
  return counts[0][p] + counts[1][p] + counts[2][p];
}

ConfusionMatrix confusion(std::span<const int> preds,
                          std::span<const int> truths) {
  if (preds.size() != truths.size()) {
    throw LengthMismatch("confusion: pred/truth length mismatch");
  }
  if (preds.empty()) throw EmptyInput("confusion: empty input");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i] < 0 || preds[i] > 2 || truths[i] < 0 || truths[i] > 2) {
      throw LengthMismatch("confusion: label out of range");
    }
    ++cm.counts[truths[i]][preds[i]];
  }
  return cm;
}

namespace {

// Exact fraction on 128-bit integers; every metric here fits comfortably.
struct Frac {
  __int128 num = 0;
  __int128 den = 1;

  static Frac of(std::int64_t n, std::int64_t d) { return reduce({n, d}); }

  static Frac reduce(Frac f) {
    if (f.den < 0) {
      f.num = -f.num;
      f.den = -f.den;
    }
    __int128 a = f.num < 0 ? -f.num : f.num;
    __int128 b = f.den;
    while (b != 0) {
      const __int128 t = a % b;
      a = b;
      b = t;
    }
    if (a > 1) {
      f.num /= a;
      f.den /= a;
    }
    return f;
  }

  Frac operator+(const Frac& o) const {
    return reduce({num * o.den + o.num * den, den * o.den});
  }
  Frac operator*(const Frac& o) const {
    return reduce({num * o.num, den * o.den});
  }
  Frac operator/(const Frac& o) const {
    return reduce({num * o.den, den * o.num});
  }
  bool is_zero() const { return num == 0; }

  // Single correctly-rounded conversion: both sides fit in 64 bits after
  // reduction for any realistic confusion matrix.
  double to_double() const {
    return static_cast<double>(static_cast<std::int64_t>(num)) /
           static_cast<double>(static_cast<std::int64_t>(den));
  }
};

}  // namespace

Metrics metrics(const ConfusionMatrix& cm) {
  const std::int64_t total = cm.total();
  if (total == 0) throw EmptyMatrix("metrics: empty confusion matrix");

  std::int64_t trace = 0;
  for (int k = 0; k < 3; ++k) trace += cm.counts[k][k];

  Metrics out;
  out.acc = Frac::of(trace, total).to_double();

  Frac macro_p{0, 1}, macro_r{0, 1}, macro_f{0, 1};
  for (int k = 0; k < 3; ++k) {
    const std::int64_t col = cm.col_sum(k);
    const std::int64_t row = cm.row_sum(k);
    const Frac p = col > 0 ? Frac::of(cm.counts[k][k], col) : Frac{0, 1};
    const Frac r = row > 0 ? Frac::of(cm.counts[k][k], row) : Frac{0, 1};
    // F = 2PR / (P + R), 0 when the denominator vanishes.
    const Frac pr_sum = p + r;
    const Frac f = pr_sum.is_zero() ? Frac{0, 1}
                                    : (Frac{2, 1} * p * r) / pr_sum;
    out.precision[k] = p.to_double();
    out.recall[k] = r.to_double();
    out.f_score[k] = f.to_double();
    macro_p = macro_p + p;
    macro_r = macro_r + r;
    macro_f = macro_f + f;
  }
  out.macro_precision = (macro_p / Frac{3, 1}).to_double();
  out.macro_recall = (macro_r / Frac{3, 1}).to_double();
  out.macro_f = (macro_f / Frac{3, 1}).to_double();
  return out;
}

MtsCdf::MtsCdf(std::span<const std::pair<std::int64_t, int>> sizes_with_labels) {
  for (const auto& [size, label] : sizes_with_labels) {
    if (label < 0 || label > 2) throw EmptyClass("mts_cdf: label out of range");
    sorted_[label].push_back(size);
  }
  for (auto& v : sorted_) std::sort(v.begin(), v.end());
}

double MtsCdf::cdf(int cls, std::int64_t t) const {
  const auto& sizes = sorted_[cls];
  if (sizes.empty()) throw EmptyClass("mts_cdf: empty class");
  const auto below =
      std::lower_bound(sizes.begin(), sizes.end(), t) - sizes.begin();
  return static_cast<double>(below) / static_cast<double>(sizes.size());
}

std::int64_t MtsCdf::quantile(int cls, double q) const {
  const auto& sizes = sorted_[cls];
  if (sizes.empty()) throw EmptyClass("mts_cdf: empty class");
  const auto n = static_cast<std::int64_t>(sizes.size());
  std::int64_t k = static_cast<std::int64_t>(std::ceil(q * n));
  k = std::clamp<std::int64_t>(k, 1, n);
  return sizes[k - 1] + 1;
}

}  // namespace siqa
