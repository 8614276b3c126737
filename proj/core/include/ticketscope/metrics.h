#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ticketscope/matrix.h"

namespace ticketscope {

struct ClassScores {
  std::string label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;  // true occurrences
};

struct Scores {
  std::vector<ClassScores> per_class;  // one entry per label, label-table order
  double weighted_precision = 0.0;
  double weighted_recall = 0.0;
  double weighted_f1 = 0.0;
  double accuracy = 0.0;
};

// Per-class and support-weighted precision/recall/F1. A ratio with a zero
// denominator counts as 0.
Scores score_predictions(std::span<const std::size_t> y_true, std::span<const std::size_t> y_pred,
                         const std::vector<std::string>& labels);

// Label indices by descending probability; ties go to the lower index.
std::vector<std::size_t> rank_labels(std::span<const double> proba);

// Fraction of rows whose true label is among the k best-ranked labels.
double accuracy_at_k(const Matrix& proba, std::span<const std::size_t> y_true, std::size_t k);

}  // namespace ticketscope
