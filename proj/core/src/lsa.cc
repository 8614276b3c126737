#include "ticketscope/lsa.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "ticketscope/blob.h"
#include "ticketscope/error.h"
#include "ticketscope/util.h"

namespace ticketscope {

namespace {

constexpr double kRankTolerance = 1e-10;

// Rotates the columns of M until they are mutually orthogonal; the rotations
// are accumulated into R so that M_in * R = M_out.
void jacobi_orthogonalize(Eigen::MatrixXd& M, Eigen::MatrixXd& R) {
  const Eigen::Index m = M.cols();
  R = Eigen::MatrixXd::Identity(m, m);
  constexpr double tol = 1e-15;
  for (int sweep = 0; sweep < 80; ++sweep) {
    bool rotated = false;
    for (Eigen::Index p = 0; p + 1 < m; ++p) {
      for (Eigen::Index q = p + 1; q < m; ++q) {
        const double a = M.col(p).squaredNorm();
        const double b = M.col(q).squaredNorm();
        const double g = M.col(p).dot(M.col(q));
        if (std::abs(g) <= tol * std::sqrt(a * b) || g == 0.0) continue;
        rotated = true;
        const double zeta = (b - a) / (2.0 * g);
        const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (Eigen::MatrixXd* X : {&M, &R}) {
          Eigen::VectorXd xp = X->col(p);
          X->col(p) = c * xp - s * X->col(q);
          X->col(q) = s * xp + c * X->col(q);
        }
      }
    }
    if (!rotated) return;
  }
  warn("Jacobi SVD did not fully converge in 80 sweeps");
}

// SVD of a matrix with at most as many columns as rows.
SvdResult tall_svd(Eigen::MatrixXd M) {
  Eigen::MatrixXd R;
  jacobi_orthogonalize(M, R);
  const Eigen::Index m = M.cols();
  std::vector<double> norms(static_cast<std::size_t>(m));
  for (Eigen::Index j = 0; j < m; ++j) norms[static_cast<std::size_t>(j)] = M.col(j).norm();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
    return norms[static_cast<std::size_t>(x)] > norms[static_cast<std::size_t>(y)];
  });
  SvdResult out{Eigen::MatrixXd::Zero(M.rows(), m), Eigen::VectorXd(m), Eigen::MatrixXd(m, m)};
  for (Eigen::Index j = 0; j < m; ++j) {
    const Eigen::Index src = order[static_cast<std::size_t>(j)];
    const double sigma = norms[static_cast<std::size_t>(src)];
    out.S(j) = sigma;
    if (sigma > 0.0) out.U.col(j) = M.col(src) / sigma;
    out.V.col(j) = R.col(src);
  }
  return out;
}

Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& Y) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(Y);
  return qr.householderQ() * Eigen::MatrixXd::Identity(Y.rows(), Y.cols());
}

SvdResult keep_leading(SvdResult svd, std::size_t d) {
  const double top = svd.S.size() ? svd.S(0) : 0.0;
  Eigen::Index r = 0;
  while (r < svd.S.size() && static_cast<std::size_t>(r) < d && svd.S(r) > kRankTolerance * top)
    ++r;
  return {svd.U.leftCols(r), svd.S.head(r), svd.V.leftCols(r)};
}

}  // namespace

SvdResult thin_svd(const Eigen::MatrixXd& A) {
  if (A.cols() <= A.rows()) return tall_svd(A);
  SvdResult t = tall_svd(A.transpose());
  return {std::move(t.V), std::move(t.S), std::move(t.U)};
}

SvdResult truncated_svd(const Eigen::SparseMatrix<double>& A, std::size_t d,
                        const TruncatedSvdOptions& options) {
  if (d == 0) throw InvalidInput("SVD dimension must be positive");
  const auto n = static_cast<std::size_t>(A.rows());
  const auto m = static_cast<std::size_t>(A.cols());
  const std::size_t small = std::min(n, m);
  if (small == 0) throw InvalidInput("SVD of an empty matrix");
  if (small <= options.direct_limit || d + options.oversample >= small)
    return keep_leading(thin_svd(Eigen::MatrixXd(A)), d);

  // Randomized subspace iteration (Halko, Martinsson and Tropp).
  const auto l = static_cast<Eigen::Index>(d + options.oversample);
  Rng rng(options.seed);
  Eigen::MatrixXd omega(static_cast<Eigen::Index>(m), l);
  for (Eigen::Index j = 0; j < l; ++j)
    for (Eigen::Index i = 0; i < omega.rows(); ++i) omega(i, j) = rng.normal();
  Eigen::MatrixXd Q = orthonormal_basis(A * omega);
  for (std::size_t it = 0; it < options.power_iterations; ++it) {
    const Eigen::MatrixXd Z = orthonormal_basis(A.transpose() * Q);
    Q = orthonormal_basis(A * Z);
  }
  const Eigen::MatrixXd B = (A.transpose() * Q).transpose();  // l x m
  SvdResult small_svd = thin_svd(B);
  small_svd.U = Q * small_svd.U;
  return keep_leading(std::move(small_svd), d);
}

nlohmann::json LsaConfig::to_json() const {
  return {{"dimension", dimension},
          {"weighting", weighting},
          {"oversample", svd.oversample},
          {"power_iterations", svd.power_iterations},
          {"direct_limit", svd.direct_limit},
          {"seed", svd.seed}};
}

LsaConfig LsaConfig::from_json(const nlohmann::json& j) {
  LsaConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "dimension") c.dimension = value.get<std::size_t>();
    else if (key == "weighting") c.weighting = value.get<std::string>();
    else if (key == "oversample") c.svd.oversample = value.get<std::size_t>();
    else if (key == "power_iterations") c.svd.power_iterations = value.get<std::size_t>();
    else if (key == "direct_limit") c.svd.direct_limit = value.get<std::size_t>();
    else if (key == "seed") c.svd.seed = value.get<std::uint64_t>();
    else throw InvalidInput("unknown LSA option '" + key + "'");
  }
  if (c.weighting != "log_tfidf" && c.weighting != "tf")
    throw InvalidInput("unknown LSA weighting '" + c.weighting + "' (expected log_tfidf or tf)");
  return c;
}

std::vector<double> LsaModel::weight(const std::vector<std::uint32_t>& doc) const {
  std::vector<double> x(vocab_size(), 0.0);
  std::map<std::uint32_t, double> tf;
  for (std::uint32_t w : doc) {
    if (w >= x.size()) throw InvalidInput("token id outside vocabulary");
    tf[w] += 1.0;
  }
  if (config_.weighting == "tf") {
    for (auto [w, c] : tf) x[w] = c;
    return x;
  }
  for (auto [w, c] : tf) x[w] = (1.0 + std::log(c)) * idf_[w];
  normalize_l2(x);
  return x;
}

Eigen::SparseMatrix<double> LsaModel::weighted_matrix(const EncodedDocs& docs) const {
  std::vector<Eigen::Triplet<double>> entries;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    const auto x = weight(docs[d]);
    for (std::size_t w = 0; w < x.size(); ++w)
      if (x[w] != 0.0)
        entries.emplace_back(static_cast<int>(w), static_cast<int>(d), x[w]);
  }
  Eigen::SparseMatrix<double> X(static_cast<Eigen::Index>(vocab_size()),
                                static_cast<Eigen::Index>(docs.size()));
  X.setFromTriplets(entries.begin(), entries.end());
  return X;
}

LsaModel LsaModel::fit(const EncodedDocs& docs, std::size_t vocab_size, const LsaConfig& config) {
  if (config.dimension == 0) throw InvalidInput("LSA dimension must be positive");
  if (config.weighting != "log_tfidf" && config.weighting != "tf")
    throw InvalidInput("unknown LSA weighting '" + config.weighting + "'");
  if (vocab_size == 0) throw InvalidInput("LSA vocabulary is empty");
  if (docs.empty()) throw InvalidInput("LSA needs at least one document");

  LsaModel model;
  model.config_ = config;
  std::vector<std::size_t> df(vocab_size, 0);
  for (const auto& doc : docs) {
    std::vector<std::uint32_t> uniq(doc);
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    for (std::uint32_t w : uniq) {
      if (w >= vocab_size) throw InvalidInput("token id outside vocabulary");
      ++df[w];
    }
  }
  const double n = static_cast<double>(docs.size());
  model.idf_.resize(vocab_size);
  for (std::size_t w = 0; w < vocab_size; ++w)
    model.idf_[w] = std::log((1.0 + n) / (1.0 + static_cast<double>(df[w]))) + 1.0;

  const auto X = model.weighted_matrix(docs);
  SvdResult svd = truncated_svd(X, config.dimension, config.svd);
  const auto rank = static_cast<std::size_t>(svd.S.size());
  if (rank == 0) throw InvalidInput("LSA term-document matrix is zero");
  if (rank < config.dimension)
    warn("LSA: term-document matrix has rank " + std::to_string(rank) + " < dimension " +
         std::to_string(config.dimension) + "; using dimension " + std::to_string(rank));

  // Fix the sign of each basis vector (largest-magnitude entry positive) so the
  // output does not depend on the SVD route taken.
  for (Eigen::Index j = 0; j < svd.U.cols(); ++j) {
    Eigen::Index arg = 0;
    svd.U.col(j).cwiseAbs().maxCoeff(&arg);
    if (svd.U(arg, j) < 0) svd.U.col(j) *= -1.0;
  }
  model.singular_values_.assign(svd.S.data(), svd.S.data() + rank);
  model.basis_ = Matrix(vocab_size, rank);
  for (std::size_t w = 0; w < vocab_size; ++w)
    for (std::size_t j = 0; j < rank; ++j)
      model.basis_(w, j) = svd.U(static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(j));
  return model;
}

Projection LsaModel::project(const std::vector<std::uint32_t>& doc) const {
  Projection out;
  out.values.assign(dimension(), 0.0);
  if (doc.empty()) {
    out.degenerate = true;
    return out;
  }
  const auto x = weight(doc);
  for (std::size_t w = 0; w < x.size(); ++w) {
    if (x[w] == 0.0) continue;
    const auto b = basis_.row(w);
    for (std::size_t j = 0; j < b.size(); ++j) out.values[j] += x[w] * b[j];
  }
  return out;
}

void LsaModel::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  write_json_file(dir / "lsa.json", {{"config", config_.to_json()},
                                     {"singular_values", singular_values_},
                                     {"idf", idf_}});
  write_matrix_blob(dir / "basis.bin", basis_);
}

LsaModel LsaModel::load(const std::filesystem::path& dir) {
  LsaModel m;
  const auto j = read_json_file(dir / "lsa.json");
  m.config_ = LsaConfig::from_json(j.at("config"));
  m.singular_values_ = j.at("singular_values").get<std::vector<double>>();
  m.idf_ = j.at("idf").get<std::vector<double>>();
  m.basis_ = read_matrix_blob(dir / "basis.bin");
  if (m.basis_.rows != m.idf_.size() || m.basis_.cols != m.singular_values_.size())
    throw Error("LSA model files in " + dir.string() + " have inconsistent shapes");
  return m;
}

}  // namespace ticketscope
