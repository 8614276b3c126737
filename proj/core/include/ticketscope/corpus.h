#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "ticketscope/util.h"

namespace ticketscope {

enum class Status { New, Open, Stalled, Waiting, Resolved, Rejected, Deleted };
enum class Contact { Email, Phone, Other };

// create_only = subject + create message; combined adds correspondence and comments.
enum class ContentScope { CreateOnly, Combined };

std::string_view to_string(Status s);
std::string_view to_string(Contact c);
std::string_view to_string(ContentScope s);
Status status_from_string(std::string_view s);
Contact contact_from_string(std::string_view s);
ContentScope scope_from_string(std::string_view s);

struct Ticket {
  std::string id;
  Timestamp created{};
  Status status = Status::New;
  Contact contact = Contact::Email;
  std::string requestor;
  std::string owner;  // empty when unassigned
  std::vector<std::string> categories;
  std::string subject;
  std::string create_message;
  std::string content;
  std::string comments;
  std::optional<std::string> machine;

  bool active() const { return status != Status::Rejected && status != Status::Deleted; }
  bool has_category(std::string_view c) const;

  nlohmann::json to_json() const;
  static Ticket from_json(const nlohmann::json& j);

  bool operator==(const Ticket&) const = default;
};

// Text of a ticket under a scope. Phone tickets have no usable create message,
// so they have no create_only text (nullopt).
std::optional<std::string> scope_text(const Ticket& t, ContentScope scope);

// Immutable set of tickets with id lookup.
class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::vector<Ticket> tickets);

  const std::vector<Ticket>& tickets() const { return tickets_; }
  std::size_t size() const { return tickets_.size(); }
  bool empty() const { return tickets_.empty(); }
  const Ticket* find(std::string_view id) const;
  const Ticket& at(std::string_view id) const;  // throws NotFound
  std::size_t index_of(std::string_view id) const;  // throws NotFound

  // FNV-1a over the canonical JSONL serialization.
  std::string content_hash() const;

 private:
  std::vector<Ticket> tickets_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

struct LoadOptions {
  bool include_inactive = false;  // keep rejected/deleted tickets
};

// One ticket object per line. Blank lines are skipped; ".gz" is decompressed.
std::vector<Ticket> load_tickets(const std::filesystem::path& path, LoadOptions options = {});
std::vector<Ticket> parse_tickets(std::string_view jsonl, LoadOptions options = {});
Corpus load_corpus(const std::filesystem::path& path, LoadOptions options = {});
std::string serialize_tickets(const std::vector<Ticket>& tickets);
void save_tickets(const std::filesystem::path& path, const std::vector<Ticket>& tickets);

struct LabeledItem {
  std::string doc_text;
  std::string label;
  std::string ticket_id;
};

struct LabeledDataset {
  std::vector<LabeledItem> items;
  std::vector<std::string> label_table;  // sorted, distinct

  std::size_t label_index(std::string_view label) const;
  std::vector<std::size_t> label_indices() const;
};

// Resolved, emailed, single-category tickets whose category is allowed and has
// at least min_support such tickets. An empty allow-list admits every category.
LabeledDataset build_labeled_dataset(const Corpus& corpus, std::size_t min_support,
                                     const std::set<std::string>& current_categories = {});

struct CategoryShare {
  std::string category;
  std::size_t count = 0;
  double percent = 0.0;
};

struct CorpusStats {
  std::map<std::string, std::size_t> monthly_volume;  // "YYYY-MM" -> tickets
  std::vector<CategoryShare> categories;  // >= threshold, by count desc then name
  CategoryShare other{"other", 0, 0.0};
  std::size_t total_tickets = 0;

  nlohmann::json to_json() const;
};

// Multi-categorized tickets count once per category; percent is relative to
// the number of tickets, so percentages can sum past 100.
CorpusStats corpus_stats(const Corpus& corpus, double display_threshold = 0.02);

}  // namespace ticketscope
