#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ticketscope {

using Timestamp = std::chrono::sys_seconds;

// Seeded pseudo-random source. All draws are derived from the raw 64-bit
// engine output with fixed arithmetic so results do not depend on the
// standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  // Uniform integer in [0, n). n must be > 0.
  std::size_t below(std::size_t n);
  // Standard normal via Box-Muller.
  double normal();
  // Index drawn proportionally to non-negative weights (sum > 0).
  std::size_t discrete(std::span<const double> weights);
  // Poisson(lambda) by inversion; lambda small.
  int poisson(double lambda);

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Mixes values into a well-distributed 64-bit seed (splitmix64 finalizer).
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);
std::uint64_t fnv1a(std::string_view data, std::uint64_t h = 0xcbf29ce484222325ULL);
std::uint64_t hash_tokens(std::span<const std::string> tokens);
std::string hex64(std::uint64_t v);

// Strict ISO-8601 with an explicit offset ("Z" or "+hh:mm"); naive times throw.
Timestamp parse_utc_timestamp(std::string_view text);
std::string format_utc_timestamp(Timestamp t);
// "YYYY-MM" of a timestamp.
std::string year_month(Timestamp t);
// Accepts "YYYY-MM-DD" (start of day UTC) or a full timestamp.
Timestamp parse_date_or_timestamp(std::string_view text);

// Whole-file helpers. Files ending in ".gz" are transparently (de)compressed.
std::vector<std::string> read_lines(const std::filesystem::path& path);
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

std::string trim(std::string_view s);
std::vector<std::string> split_whitespace(std::string_view s);
std::string join(std::span<const std::string> parts, std::string_view sep);

double dot(std::span<const double> a, std::span<const double> b);
double l2_norm(std::span<const double> a);
// Cosine similarity; 0 when either vector is zero.
double cosine(std::span<const double> a, std::span<const double> b);
void normalize_l2(std::span<double> a);

std::size_t edit_distance(std::string_view a, std::string_view b);

// Non-fatal diagnostics (rank reduction, clamped parameters, ...). The default
// handler writes "warning: <msg>" to stderr.
using WarningHandler = std::function<void(std::string_view)>;
void warn(std::string_view message);
// Returns the previous handler.
WarningHandler set_warning_handler(WarningHandler handler);

}  // namespace ticketscope
