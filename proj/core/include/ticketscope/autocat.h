#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ticketscope/embedding.h"
#include "ticketscope/lda.h"
#include "ticketscope/matrix.h"
#include "ticketscope/vocabulary.h"

namespace ticketscope {

struct TopicSummary {
  std::size_t topic = 0;
  std::vector<std::pair<std::string, double>> top_words;  // by probability, descending
  std::string label;                                      // filled in by people
};

// Top n_words per topic by phi (ties by word); n_words is clamped to the vocabulary.
std::vector<TopicSummary> export_topics(const LdaModel& model, const Vocabulary& vocab,
                                        std::size_t n_words);
// Labeling worksheet: topic_id,rank,word,probability,label
std::string topics_csv(const std::vector<TopicSummary>& topics);
nlohmann::json topics_json(const std::vector<TopicSummary>& topics);

enum class ClusterAlgorithm { KMeans, KMedoids, Dbscan };
enum class Distance { Euclidean, Cosine };
enum class RepresentativeStrategy { Frequency, CenterDistance, Weighted };

std::string_view to_string(ClusterAlgorithm a);
std::string_view to_string(Distance d);
std::string_view to_string(RepresentativeStrategy s);
ClusterAlgorithm cluster_algorithm_from_string(std::string_view s);
Distance distance_from_string(std::string_view s);
RepresentativeStrategy representative_strategy_from_string(std::string_view s);

inline constexpr int kNoise = -1;

struct ClusterParams {
  ClusterAlgorithm algorithm = ClusterAlgorithm::KMedoids;
  Distance distance = Distance::Cosine;
  std::size_t k = 10;
  double eps = 0.0;         // dbscan; 0 = median distance to the 5th nearest neighbour
  std::size_t min_pts = 5;  // dbscan
  RepresentativeStrategy strategy = RepresentativeStrategy::Frequency;
  std::size_t n_representatives = 5;
  double alpha = 0.5;       // weight of the frequency rank in the weighted strategy
  std::size_t max_iterations = 300;
  std::uint64_t seed = 7;
};

struct WordClustering {
  ClusterAlgorithm algorithm = ClusterAlgorithm::KMedoids;
  Distance distance = Distance::Cosine;
  RepresentativeStrategy strategy = RepresentativeStrategy::Frequency;
  std::vector<std::string> words;
  std::vector<int> assignment;            // cluster id per word, kNoise for dbscan noise
  std::size_t n_clusters = 0;
  Matrix centers;                         // n_clusters x dim: medoid, centroid or member mean
  std::vector<std::size_t> medoids;       // kmedoids only: word index per cluster
  std::vector<std::vector<std::string>> representatives;
  double eps = 0.0;                       // dbscan radius actually used
  std::vector<double> cost_history;       // objective after each improving step

  nlohmann::json to_json() const;
  std::string table() const;
};

// Pairwise distances; cosine distance is 1 - cos on L2-normalized rows.
Matrix distance_matrix(const Matrix& points, Distance distance);
double point_distance(std::span<const double> a, std::span<const double> b, Distance distance);

struct PamResult {
  std::vector<std::size_t> medoids;  // point indices
  std::vector<int> assignment;       // index into medoids
  double build_cost = 0.0;
  double cost = 0.0;
  std::vector<double> cost_history;  // build cost, then after every accepted swap
};
// Partitioning Around Medoids: greedy BUILD, then the best improving swap
// until none improves the total distance.
PamResult pam(const Matrix& distances, std::size_t k);

struct KMeansResult {
  Matrix centroids;
  std::vector<int> assignment;
  // Objective after every assignment step and centroid update: squared
  // Euclidean error, or sum of (1 - cos) for the spherical variant.
  std::vector<double> cost_history;
};
// Lloyd iterations from k-means++ seeds; cosine runs spherical k-means.
KMeansResult kmeans(const Matrix& points, std::size_t k, Distance distance, std::uint64_t seed,
                    std::size_t max_iterations = 300);

// Cluster ids in discovery order; kNoise for noise points.
std::vector<int> dbscan(const Matrix& distances, double eps, std::size_t min_pts);
double default_dbscan_eps(const Matrix& distances);

// Clusters arbitrary labelled points; counts drive the frequency strategy.
WordClustering cluster_points(const Matrix& points, const std::vector<std::string>& words,
                              const std::vector<std::size_t>& counts, const ClusterParams& params);
WordClustering cluster_words(const EmbeddingModel& model, const ClusterParams& params);

// Sum of member-to-center distances; noise excluded.
double clustering_cost(const WordClustering& clustering, const Matrix& points, Distance distance);

}  // namespace ticketscope
