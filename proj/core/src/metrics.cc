#include "ticketscope/metrics.h"

#include <algorithm>
#include <numeric>

#include "ticketscope/error.h"

namespace ticketscope {

Scores score_predictions(std::span<const std::size_t> y_true, std::span<const std::size_t> y_pred,
                         const std::vector<std::string>& labels) {
  if (y_true.size() != y_pred.size())
    throw InvalidInput("y_true and y_pred differ in length");
  const std::size_t L = labels.size();
  std::vector<std::size_t> tp(L, 0), predicted(L, 0), actual(L, 0);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i] >= L || y_pred[i] >= L) throw InvalidInput("label index out of range");
    ++actual[y_true[i]];
    ++predicted[y_pred[i]];
    if (y_true[i] == y_pred[i]) {
      ++tp[y_true[i]];
      ++correct;
    }
  }
  auto ratio = [](std::size_t a, std::size_t b) {
    return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b);
  };
  Scores s;
  const double n = static_cast<double>(y_true.size());
  for (std::size_t c = 0; c < L; ++c) {
    ClassScores cs{labels[c], ratio(tp[c], predicted[c]), ratio(tp[c], actual[c]), 0.0, actual[c]};
    // F1 = 2 tp / (predicted + actual), identical to the harmonic mean of P and R.
    cs.f1 = ratio(2 * tp[c], predicted[c] + actual[c]);
    if (n > 0) {
      const double w = static_cast<double>(actual[c]) / n;
      s.weighted_precision += w * cs.precision;
      s.weighted_recall += w * cs.recall;
      s.weighted_f1 += w * cs.f1;
    }
    s.per_class.push_back(std::move(cs));
  }
  s.accuracy = ratio(correct, y_true.size());
  return s;
}

std::vector<std::size_t> rank_labels(std::span<const double> proba) {
  std::vector<std::size_t> order(proba.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return proba[a] > proba[b]; });
  return order;
}

double accuracy_at_k(const Matrix& proba, std::span<const std::size_t> y_true, std::size_t k) {
  if (k == 0) throw InvalidInput("accuracy@k needs k >= 1");
  if (proba.rows != y_true.size()) throw InvalidInput("probability rows and labels differ in count");
  if (y_true.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < proba.rows; ++i) {
    const auto row = proba.row(i);
    const double p = row[y_true[i]];
    // Rank of the true label under the descending-probability, lower-index-first order.
    std::size_t rank = 0;
    for (std::size_t j = 0; j < row.size(); ++j)
      if (row[j] > p || (row[j] == p && j < y_true[i])) ++rank;
    if (rank < k) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(y_true.size());
}

}  // namespace ticketscope
