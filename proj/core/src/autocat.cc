#include "ticketscope/autocat.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <numeric>

#include "ticketscope/error.h"
#include "ticketscope/util.h"

namespace ticketscope {

std::vector<TopicSummary> export_topics(const LdaModel& model, const Vocabulary& vocab,
                                        std::size_t n_words) {
  if (vocab.size() != model.vocab_size())
    throw InvalidInput("vocabulary does not belong to this LDA model");
  n_words = std::min(n_words, vocab.size());
  std::vector<TopicSummary> out;
  for (std::size_t k = 0; k < model.n_topics(); ++k) {
    const auto row = model.phi().row(k);
    std::vector<std::size_t> order(row.size());
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_words), order.end(),
                      [&](std::size_t a, std::size_t b) {
                        return row[a] != row[b] ? row[a] > row[b] : vocab.term(a) < vocab.term(b);
                      });
    TopicSummary t{k, {}, {}};
    for (std::size_t i = 0; i < n_words; ++i) t.top_words.emplace_back(vocab.term(order[i]), row[order[i]]);
    out.push_back(std::move(t));
  }
  return out;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string topics_csv(const std::vector<TopicSummary>& topics) {
  std::string out = "topic_id,rank,word,probability,label\n";
  char prob[32];
  for (const auto& t : topics) {
    for (std::size_t r = 0; r < t.top_words.size(); ++r) {
      std::snprintf(prob, sizeof prob, "%.6g", t.top_words[r].second);
      out += std::to_string(t.topic) + "," + std::to_string(r + 1) + "," +
             csv_field(t.top_words[r].first) + "," + prob + "," + csv_field(t.label) + "\n";
    }
  }
  return out;
}

nlohmann::json topics_json(const std::vector<TopicSummary>& topics) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& t : topics) {
    nlohmann::json words = nlohmann::json::array();
    for (const auto& [w, p] : t.top_words) words.push_back({{"word", w}, {"probability", p}});
    out.push_back({{"topic", t.topic}, {"top_words", words}, {"label", t.label}});
  }
  return out;
}

std::string_view to_string(ClusterAlgorithm a) {
  switch (a) {
    case ClusterAlgorithm::KMeans: return "kmeans";
    case ClusterAlgorithm::KMedoids: return "kmedoids";
    case ClusterAlgorithm::Dbscan: return "dbscan";
  }
  return "?";
}

std::string_view to_string(Distance d) { return d == Distance::Cosine ? "cosine" : "euclidean"; }

std::string_view to_string(RepresentativeStrategy s) {
  switch (s) {
    case RepresentativeStrategy::Frequency: return "frequency";
    case RepresentativeStrategy::CenterDistance: return "center_distance";
    case RepresentativeStrategy::Weighted: return "weighted";
  }
  return "?";
}

ClusterAlgorithm cluster_algorithm_from_string(std::string_view s) {
  for (auto a : {ClusterAlgorithm::KMeans, ClusterAlgorithm::KMedoids, ClusterAlgorithm::Dbscan})
    if (to_string(a) == s) return a;
  throw InvalidInput("unknown clustering algorithm '" + std::string(s) +
                     "' (expected kmeans, kmedoids or dbscan)");
}

Distance distance_from_string(std::string_view s) {
  if (s == "cosine") return Distance::Cosine;
  if (s == "euclidean") return Distance::Euclidean;
  throw InvalidInput("unknown distance '" + std::string(s) + "' (expected euclidean or cosine)");
}

RepresentativeStrategy representative_strategy_from_string(std::string_view s) {
  for (auto r : {RepresentativeStrategy::Frequency, RepresentativeStrategy::CenterDistance,
                 RepresentativeStrategy::Weighted})
    if (to_string(r) == s) return r;
  throw InvalidInput("unknown representative strategy '" + std::string(s) +
                     "' (expected frequency, center_distance or weighted)");
}

double point_distance(std::span<const double> a, std::span<const double> b, Distance distance) {
  if (distance == Distance::Cosine) return std::max(0.0, 1.0 - cosine(a, b));
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

Matrix distance_matrix(const Matrix& points, Distance distance) {
  Matrix d(points.rows, points.rows, 0.0);
  for (std::size_t i = 0; i < points.rows; ++i)
    for (std::size_t j = i + 1; j < points.rows; ++j)
      d(i, j) = d(j, i) = point_distance(points.row(i), points.row(j), distance);
  return d;
}

// ---------------------------------------------------------------- PAM

namespace {

struct Assignment {
  std::vector<int> nearest;
  double cost = 0.0;
};

Assignment assign_to_medoids(const Matrix& D, const std::vector<std::size_t>& medoids) {
  Assignment a{std::vector<int>(D.rows, 0), 0.0};
  for (std::size_t i = 0; i < D.rows; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < medoids.size(); ++m) {
      if (D(i, medoids[m]) < best) {
        best = D(i, medoids[m]);
        a.nearest[i] = static_cast<int>(m);
      }
    }
    a.cost += best;
  }
  return a;
}

}  // namespace

PamResult pam(const Matrix& D, std::size_t k) {
  const std::size_t n = D.rows;
  if (D.cols != n) throw InvalidInput("distance matrix must be square");
  if (k == 0 || k > n)
    throw InvalidInput("k = " + std::to_string(k) + " must lie in [1, " + std::to_string(n) + "]");

  // BUILD: start from the most central point, then add the point that lowers
  // the total distance the most.
  std::vector<std::size_t> medoids;
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  std::vector<bool> chosen(n, false);
  for (std::size_t step = 0; step < k; ++step) {
    std::size_t best = n;
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < n; ++c) {
      if (chosen[c]) continue;
      double cost = 0.0;
      for (std::size_t i = 0; i < n; ++i) cost += std::min(nearest[i], D(i, c));
      if (cost < best_cost - 1e-12) {
        best_cost = cost;
        best = c;
      }
    }
    chosen[best] = true;
    medoids.push_back(best);
    for (std::size_t i = 0; i < n; ++i) nearest[i] = std::min(nearest[i], D(i, best));
  }

  PamResult r;
  Assignment a = assign_to_medoids(D, medoids);
  r.build_cost = a.cost;
  r.cost_history.push_back(a.cost);

  // SWAP: evaluate every (medoid, non-medoid) exchange, apply the best one.
  for (std::size_t iter = 0; iter < 10000; ++iter) {
    // Distance to the nearest and second-nearest medoid for each point.
    std::vector<double> d1(n), d2(n);
    for (std::size_t i = 0; i < n; ++i) {
      d1[i] = d2[i] = std::numeric_limits<double>::infinity();
      for (std::size_t m = 0; m < medoids.size(); ++m) {
        const double d = D(i, medoids[m]);
        if (d < d1[i]) {
          d2[i] = d1[i];
          d1[i] = d;
        } else if (d < d2[i]) {
          d2[i] = d;
        }
      }
    }
    double best_delta = 0.0;
    std::size_t best_m = 0, best_h = n;
    for (std::size_t m = 0; m < medoids.size(); ++m) {
      for (std::size_t h = 0; h < n; ++h) {
        if (chosen[h]) continue;
        double delta = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const bool served_by_m = a.nearest[i] == static_cast<int>(m);
          const double without = served_by_m ? d2[i] : d1[i];
          delta += std::min(without, D(i, h)) - d1[i];
        }
        if (delta < best_delta - 1e-12) {
          best_delta = delta;
          best_m = m;
          best_h = h;
        }
      }
    }
    if (best_h == n) break;
    chosen[medoids[best_m]] = false;
    chosen[best_h] = true;
    medoids[best_m] = best_h;
    a = assign_to_medoids(D, medoids);
    r.cost_history.push_back(a.cost);
  }
  r.medoids = std::move(medoids);
  r.assignment = std::move(a.nearest);
  r.cost = a.cost;
  return r;
}

// ---------------------------------------------------------------- k-means

namespace {

Matrix normalized_rows(const Matrix& points) {
  Matrix out = points;
  for (std::size_t i = 0; i < out.rows; ++i) normalize_l2(out.row(i));
  return out;
}

double kmeans_point_cost(std::span<const double> x, std::span<const double> c, Distance distance) {
  if (distance == Distance::Cosine) return 1.0 - dot(x, c);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - c[i]) * (x[i] - c[i]);
  return s;
}

}  // namespace

KMeansResult kmeans(const Matrix& input, std::size_t k, Distance distance, std::uint64_t seed,
                    std::size_t max_iterations) {
  const std::size_t n = input.rows;
  if (k == 0 || k > n)
    throw InvalidInput("k = " + std::to_string(k) + " must lie in [1, " + std::to_string(n) + "]");
  const Matrix X = distance == Distance::Cosine ? normalized_rows(input) : input;
  Rng rng(seed);

  // k-means++ seeding.
  KMeansResult r;
  r.centroids = Matrix(k, X.cols);
  std::vector<std::size_t> seeds{rng.below(n)};
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  while (seeds.size() < k) {
    for (std::size_t i = 0; i < n; ++i)
      d2[i] = std::min(d2[i], kmeans_point_cost(X.row(i), X.row(seeds.back()), distance));
    std::vector<double> w(d2);
    for (std::size_t s : seeds) w[s] = 0.0;
    for (double& x : w) x = std::max(0.0, x);
    if (std::accumulate(w.begin(), w.end(), 0.0) > 0.0) {
      seeds.push_back(rng.discrete(w));
    } else {
      // Remaining points coincide with seeds; take the first unused one.
      for (std::size_t i = 0; i < n; ++i)
        if (std::find(seeds.begin(), seeds.end(), i) == seeds.end()) {
          seeds.push_back(i);
          break;
        }
    }
  }
  for (std::size_t c = 0; c < k; ++c) {
    const auto src = X.row(seeds[c]);
    std::copy(src.begin(), src.end(), r.centroids.row(c).begin());
  }

  r.assignment.assign(n, -1);
  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    double cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_cost = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double v = kmeans_point_cost(X.row(i), r.centroids.row(c), distance);
        if (v < best_cost) {
          best_cost = v;
          best = static_cast<int>(c);
        }
      }
      changed |= r.assignment[i] != best;
      r.assignment[i] = best;
      cost += best_cost;
    }
    r.cost_history.push_back(cost);
    if (!changed && iter > 0) break;

    Matrix sums(k, X.cols, 0.0);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      auto s = sums.row(static_cast<std::size_t>(r.assignment[i]));
      const auto x = X.row(i);
      for (std::size_t j = 0; j < x.size(); ++j) s[j] += x[j];
      ++counts[static_cast<std::size_t>(r.assignment[i])];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;  // empty cluster keeps its centroid
      auto dst = r.centroids.row(c);
      const auto s = sums.row(c);
      for (std::size_t j = 0; j < s.size(); ++j) dst[j] = s[j] / static_cast<double>(counts[c]);
      if (distance == Distance::Cosine && l2_norm(dst) > 0.0) normalize_l2(dst);
    }
    double after = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      after += kmeans_point_cost(X.row(i), r.centroids.row(static_cast<std::size_t>(r.assignment[i])), distance);
    r.cost_history.push_back(after);
  }
  return r;
}

// ---------------------------------------------------------------- DBSCAN

std::vector<int> dbscan(const Matrix& D, double eps, std::size_t min_pts) {
  if (!(eps > 0.0)) throw InvalidInput("dbscan eps must be positive");
  if (min_pts < 2) throw InvalidInput("dbscan min_pts must be at least 2");
  const std::size_t n = D.rows;
  auto neighbours = [&](std::size_t p) {
    std::vector<std::size_t> out;
    for (std::size_t q = 0; q < n; ++q)
      if (D(p, q) <= eps) out.push_back(q);
    return out;
  };
  constexpr int kUnvisited = -2;
  std::vector<int> label(n, kUnvisited);
  int cluster = 0;
  for (std::size_t p = 0; p < n; ++p) {
    if (label[p] != kUnvisited) continue;
    auto seeds = neighbours(p);
    if (seeds.size() < min_pts) {
      label[p] = kNoise;
      continue;
    }
    label[p] = cluster;
    std::deque<std::size_t> queue(seeds.begin(), seeds.end());
    while (!queue.empty()) {
      const std::size_t q = queue.front();
      queue.pop_front();
      if (label[q] == kNoise) label[q] = cluster;  // border point
      if (label[q] != kUnvisited) continue;
      label[q] = cluster;
      auto nq = neighbours(q);
      if (nq.size() >= min_pts) queue.insert(queue.end(), nq.begin(), nq.end());
    }
    ++cluster;
  }
  return label;
}

double default_dbscan_eps(const Matrix& D) {
  const std::size_t n = D.rows;
  if (n < 2) throw InvalidInput("dbscan needs at least 2 points");
  const std::size_t nn = std::min<std::size_t>(5, n - 1);
  std::vector<double> kth;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) row.push_back(D(i, j));
    std::nth_element(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(nn - 1), row.end());
    kth.push_back(row[nn - 1]);
  }
  std::nth_element(kth.begin(), kth.begin() + static_cast<std::ptrdiff_t>(n / 2), kth.end());
  return kth[n / 2];
}

// ---------------------------------------------------------------- word clustering

WordClustering cluster_points(const Matrix& points, const std::vector<std::string>& words,
                              const std::vector<std::size_t>& counts, const ClusterParams& params) {
  const std::size_t n = points.rows;
  if (words.size() != n || counts.size() != n)
    throw InvalidInput("points, words and counts differ in length");
  if (params.algorithm != ClusterAlgorithm::Dbscan && params.k > n)
    throw InvalidInput("k = " + std::to_string(params.k) + " exceeds the vocabulary size " +
                       std::to_string(n));

  WordClustering wc;
  wc.algorithm = params.algorithm;
  wc.distance = params.distance;
  wc.strategy = params.strategy;
  wc.words = words;
  const Matrix X = params.distance == Distance::Cosine ? normalized_rows(points) : points;

  switch (params.algorithm) {
    case ClusterAlgorithm::KMedoids: {
      const PamResult r = pam(distance_matrix(X, params.distance), params.k);
      wc.assignment = r.assignment;
      wc.n_clusters = r.medoids.size();
      wc.medoids = r.medoids;
      wc.centers = Matrix(wc.n_clusters, X.cols);
      for (std::size_t c = 0; c < wc.n_clusters; ++c) {
        const auto src = X.row(r.medoids[c]);
        std::copy(src.begin(), src.end(), wc.centers.row(c).begin());
      }
      wc.cost_history = r.cost_history;
      break;
    }
    case ClusterAlgorithm::KMeans: {
      KMeansResult r = kmeans(X, params.k, params.distance, params.seed, params.max_iterations);
      wc.assignment = std::move(r.assignment);
      wc.n_clusters = params.k;
      wc.centers = std::move(r.centroids);
      wc.cost_history = std::move(r.cost_history);
      break;
    }
    case ClusterAlgorithm::Dbscan: {
      const Matrix D = distance_matrix(X, params.distance);
      wc.eps = params.eps > 0.0 ? params.eps : default_dbscan_eps(D);
      wc.assignment = dbscan(D, wc.eps, params.min_pts);
      const int max_id = *std::max_element(wc.assignment.begin(), wc.assignment.end());
      if (max_id < 0) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.4g", wc.eps);
        throw InvalidInput(std::string("dbscan labelled every point as noise at eps=") + buf +
                           "; try a larger eps or a smaller min_pts");
      }
      wc.n_clusters = static_cast<std::size_t>(max_id) + 1;
      wc.centers = Matrix(wc.n_clusters, X.cols, 0.0);
      std::vector<std::size_t> members(wc.n_clusters, 0);
      for (std::size_t i = 0; i < n; ++i) {
        if (wc.assignment[i] == kNoise) continue;
        auto c = wc.centers.row(static_cast<std::size_t>(wc.assignment[i]));
        const auto x = X.row(i);
        for (std::size_t j = 0; j < x.size(); ++j) c[j] += x[j];
        ++members[static_cast<std::size_t>(wc.assignment[i])];
      }
      for (std::size_t c = 0; c < wc.n_clusters; ++c) {
        auto row = wc.centers.row(c);
        for (double& v : row) v /= static_cast<double>(members[c]);
      }
      break;
    }
  }

  // Representatives.
  wc.representatives.assign(wc.n_clusters, {});
  for (std::size_t c = 0; c < wc.n_clusters; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < n; ++i)
      if (wc.assignment[i] == static_cast<int>(c)) members.push_back(i);
    std::vector<double> dist(n, 0.0);
    for (std::size_t i : members) dist[i] = point_distance(X.row(i), wc.centers.row(c), params.distance);
    auto by_freq = members;
    std::sort(by_freq.begin(), by_freq.end(), [&](std::size_t a, std::size_t b) {
      return counts[a] != counts[b] ? counts[a] > counts[b] : words[a] < words[b];
    });
    auto by_dist = members;
    std::sort(by_dist.begin(), by_dist.end(), [&](std::size_t a, std::size_t b) {
      return dist[a] != dist[b] ? dist[a] < dist[b] : words[a] < words[b];
    });
    std::vector<std::size_t> chosen;
    switch (params.strategy) {
      case RepresentativeStrategy::Frequency: chosen = by_freq; break;
      case RepresentativeStrategy::CenterDistance: chosen = by_dist; break;
      case RepresentativeStrategy::Weighted: {
        std::vector<double> score(n, 0.0);
        for (std::size_t r = 0; r < by_freq.size(); ++r) score[by_freq[r]] += params.alpha * static_cast<double>(r);
        for (std::size_t r = 0; r < by_dist.size(); ++r)
          score[by_dist[r]] += (1.0 - params.alpha) * static_cast<double>(r);
        chosen = members;
        std::sort(chosen.begin(), chosen.end(), [&](std::size_t a, std::size_t b) {
          return score[a] != score[b] ? score[a] < score[b] : words[a] < words[b];
        });
        break;
      }
    }
    for (std::size_t r = 0; r < std::min(params.n_representatives, chosen.size()); ++r)
      wc.representatives[c].push_back(words[chosen[r]]);
  }
  return wc;
}

WordClustering cluster_words(const EmbeddingModel& model, const ClusterParams& params) {
  const Vocabulary& vocab = model.vocabulary();
  std::vector<std::size_t> counts;
  for (std::size_t i = 0; i < vocab.size(); ++i) counts.push_back(vocab.count(i));
  return cluster_points(model.word_vectors(), vocab.terms(), counts, params);
}

double clustering_cost(const WordClustering& clustering, const Matrix& points, Distance distance) {
  if (clustering.assignment.size() != points.rows)
    throw InvalidInput("clustering and points differ in size");
  double cost = 0.0;
  for (std::size_t i = 0; i < points.rows; ++i) {
    const int c = clustering.assignment[i];
    if (c == kNoise) continue;
    cost += point_distance(points.row(i), clustering.centers.row(static_cast<std::size_t>(c)), distance);
  }
  return cost;
}

nlohmann::json WordClustering::to_json() const {
  nlohmann::json clusters = nlohmann::json::array();
  for (std::size_t c = 0; c < n_clusters; ++c) {
    std::vector<std::string> members;
    for (std::size_t i = 0; i < words.size(); ++i)
      if (assignment[i] == static_cast<int>(c)) members.push_back(words[i]);
    nlohmann::json entry{{"id", c}, {"size", members.size()}, {"representatives", representatives[c]},
                         {"members", members}};
    if (!medoids.empty()) entry["medoid"] = words[medoids[c]];
    clusters.push_back(std::move(entry));
  }
  std::vector<std::string> noise;
  for (std::size_t i = 0; i < words.size(); ++i)
    if (assignment[i] == kNoise) noise.push_back(words[i]);
  nlohmann::json j{{"algorithm", std::string(to_string(algorithm))},
                   {"distance", std::string(to_string(distance))},
                   {"representative_strategy", std::string(to_string(strategy))},
                   {"n_clusters", n_clusters},
                   {"clusters", clusters},
                   {"noise", noise}};
  if (algorithm == ClusterAlgorithm::Dbscan) j["eps"] = eps;
  return j;
}

std::string WordClustering::table() const {
  std::string out = "cluster  size  representatives\n";
  char line[64];
  for (std::size_t c = 0; c < n_clusters; ++c) {
    const auto size = std::count(assignment.begin(), assignment.end(), static_cast<int>(c));
    std::snprintf(line, sizeof line, "%-8zu %-5td ", c, size);
    out += line + join(representatives[c], ", ") + "\n";
  }
  const auto noise = std::count(assignment.begin(), assignment.end(), kNoise);
  if (noise) out += "noise    " + std::to_string(noise) + "\n";
  return out;
}

}  // namespace ticketscope
