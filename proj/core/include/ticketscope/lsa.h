#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <json.hpp>

#include "ticketscope/lda.h"
#include "ticketscope/matrix.h"

namespace ticketscope {

struct SvdResult {
  Eigen::MatrixXd U;  // n x r, orthonormal columns
  Eigen::VectorXd S;  // r, non-increasing
  Eigen::MatrixXd V;  // m x r
};

// Thin SVD by one-sided Jacobi rotations (Hestenes), applied to whichever
// orientation of A has fewer columns. Zero singular values are kept.
SvdResult thin_svd(const Eigen::MatrixXd& A);

struct TruncatedSvdOptions {
  std::size_t oversample = 20;
  std::size_t power_iterations = 4;
  // At or below this min(rows, cols) the exact Jacobi SVD is used; above it a
  // randomized range finder reduces the problem first.
  std::size_t direct_limit = 400;
  std::uint64_t seed = 7;
};

// Leading d singular triplets. Fewer are returned when the numerical rank
// (relative tolerance 1e-10) is below d.
SvdResult truncated_svd(const Eigen::SparseMatrix<double>& A, std::size_t d,
                        const TruncatedSvdOptions& options = {});

struct LsaConfig {
  std::size_t dimension = 100;
  // "log_tfidf": (1 + ln tf) * (ln((1 + N) / (1 + df)) + 1), L2-normalized per doc.
  // "tf": raw counts, no normalization.
  std::string weighting = "log_tfidf";
  TruncatedSvdOptions svd;

  nlohmann::json to_json() const;
  static LsaConfig from_json(const nlohmann::json& j);
};

struct Projection {
  std::vector<double> values;
  bool degenerate = false;  // no in-vocabulary tokens
};

class LsaModel {
 public:
  LsaModel() = default;

  static LsaModel fit(const EncodedDocs& docs, std::size_t vocab_size, const LsaConfig& config);

  const LsaConfig& config() const { return config_; }
  std::size_t dimension() const { return singular_values_.size(); }
  std::size_t vocab_size() const { return idf_.size(); }
  const std::vector<double>& singular_values() const { return singular_values_; }
  // V x d term basis; a document maps to basis^T x.
  const Matrix& basis() const { return basis_; }
  const std::vector<double>& idf() const { return idf_; }

  // Weighted term vector of one document (length V).
  std::vector<double> weight(const std::vector<std::uint32_t>& doc) const;
  // V x D weighted term-document matrix, one column per document.
  Eigen::SparseMatrix<double> weighted_matrix(const EncodedDocs& docs) const;
  Projection project(const std::vector<std::uint32_t>& doc) const;

  void save(const std::filesystem::path& dir) const;
  static LsaModel load(const std::filesystem::path& dir);

 private:
  LsaConfig config_;
  std::vector<double> idf_;
  std::vector<double> singular_values_;
  Matrix basis_;
};

}  // namespace ticketscope
