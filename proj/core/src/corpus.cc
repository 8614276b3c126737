#include "ticketscope/corpus.h"

#include <algorithm>

#include "ticketscope/error.h"

namespace ticketscope {

namespace {

constexpr std::string_view kStatusNames[] = {"new",      "open",     "stalled", "waiting",
                                             "resolved", "rejected", "deleted"};
constexpr std::string_view kContactNames[] = {"email", "phone", "other"};

const std::string& require_string(const nlohmann::json& j, const char* field) {
  const auto it = j.find(field);
  if (it == j.end() || it->is_null()) throw InvalidInput(std::string("missing field ") + field);
  if (!it->is_string()) throw InvalidInput(std::string("field ") + field + " must be a string");
  return it->get_ref<const std::string&>();
}

std::string optional_string(const nlohmann::json& j, const char* field) {
  const auto it = j.find(field);
  if (it == j.end() || it->is_null()) return {};
  if (!it->is_string()) throw InvalidInput(std::string("field ") + field + " must be a string");
  return it->get<std::string>();
}

}  // namespace

std::string_view to_string(Status s) { return kStatusNames[static_cast<int>(s)]; }
std::string_view to_string(Contact c) { return kContactNames[static_cast<int>(c)]; }
std::string_view to_string(ContentScope s) {
  return s == ContentScope::CreateOnly ? "create_only" : "combined";
}

Status status_from_string(std::string_view s) {
  for (int i = 0; i < 7; ++i)
    if (kStatusNames[i] == s) return static_cast<Status>(i);
  throw InvalidInput("unknown status '" + std::string(s) + "'");
}

Contact contact_from_string(std::string_view s) {
  for (int i = 0; i < 3; ++i)
    if (kContactNames[i] == s) return static_cast<Contact>(i);
  throw InvalidInput("unknown contact method '" + std::string(s) + "'");
}

ContentScope scope_from_string(std::string_view s) {
  if (s == "create_only") return ContentScope::CreateOnly;
  if (s == "combined") return ContentScope::Combined;
  throw InvalidInput("unknown scope '" + std::string(s) + "' (expected create_only or combined)");
}

bool Ticket::has_category(std::string_view c) const {
  return std::find(categories.begin(), categories.end(), c) != categories.end();
}

nlohmann::json Ticket::to_json() const {
  nlohmann::json j{{"id", id},
                   {"created", format_utc_timestamp(created)},
                   {"status", to_string(status)},
                   {"contact", to_string(contact)},
                   {"requestor", requestor},
                   {"owner", owner},
                   {"categories", categories},
                   {"subject", subject},
                   {"create_message", create_message},
                   {"content", content},
                   {"comments", comments}};
  if (machine) j["machine"] = *machine;
  return j;
}

Ticket Ticket::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidInput("ticket must be a JSON object");
  Ticket t;
  t.id = require_string(j, "id");
  if (t.id.empty()) throw InvalidInput("field id must not be empty");
  t.created = parse_utc_timestamp(require_string(j, "created"));
  t.status = status_from_string(require_string(j, "status"));
  t.contact = contact_from_string(require_string(j, "contact"));
  t.requestor = require_string(j, "requestor");
  t.owner = optional_string(j, "owner");
  if (const auto it = j.find("categories"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) throw InvalidInput("field categories must be an array");
    for (const auto& c : *it) {
      if (!c.is_string()) throw InvalidInput("field categories must hold strings");
      t.categories.push_back(c.get<std::string>());
    }
  }
  t.subject = optional_string(j, "subject");
  t.create_message = optional_string(j, "create_message");
  t.content = optional_string(j, "content");
  t.comments = optional_string(j, "comments");
  if (const auto it = j.find("machine"); it != j.end() && !it->is_null())
    t.machine = it->get<std::string>();
  return t;
}

std::optional<std::string> scope_text(const Ticket& t, ContentScope scope) {
  if (scope == ContentScope::CreateOnly) {
    if (t.contact == Contact::Phone) return std::nullopt;
    return t.subject + " " + t.create_message;
  }
  return t.subject + " " + t.create_message + " " + t.content + " " + t.comments;
}

Corpus::Corpus(std::vector<Ticket> tickets) : tickets_(std::move(tickets)) {
  by_id_.reserve(tickets_.size());
  for (std::size_t i = 0; i < tickets_.size(); ++i) {
    if (!by_id_.emplace(tickets_[i].id, i).second)
      throw InvalidInput("duplicate ticket id '" + tickets_[i].id + "'");
  }
}

const Ticket* Corpus::find(std::string_view id) const {
  const auto it = by_id_.find(std::string(id));
  return it == by_id_.end() ? nullptr : &tickets_[it->second];
}

const Ticket& Corpus::at(std::string_view id) const {
  return tickets_[index_of(id)];
}

std::size_t Corpus::index_of(std::string_view id) const {
  const auto it = by_id_.find(std::string(id));
  if (it == by_id_.end()) throw NotFound("unknown ticket '" + std::string(id) + "'");
  return it->second;
}

std::string Corpus::content_hash() const { return hex64(fnv1a(serialize_tickets(tickets_))); }

std::vector<Ticket> parse_tickets(std::string_view jsonl, LoadOptions options) {
  std::vector<Ticket> out;
  std::unordered_map<std::string, std::size_t> first_line;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < jsonl.size()) {
    std::size_t end = jsonl.find('\n', pos);
    if (end == std::string_view::npos) end = jsonl.size();
    std::string_view line = jsonl.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) continue;

    const std::string prefix = "line " + std::to_string(line_no) + ": ";
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw InvalidInput(prefix + "malformed JSON (" + e.what() + ")");
    }
    Ticket t;
    try {
      t = Ticket::from_json(j);
    } catch (const Error& e) {
      throw InvalidInput(prefix + e.what());
    }
    const auto [it, inserted] = first_line.emplace(t.id, line_no);
    if (!inserted)
      throw InvalidInput("duplicate id '" + t.id + "' on lines " + std::to_string(it->second) +
                         " and " + std::to_string(line_no));
    if (options.include_inactive || t.active()) out.push_back(std::move(t));
  }
  return out;
}

std::vector<Ticket> load_tickets(const std::filesystem::path& path, LoadOptions options) {
  try {
    return parse_tickets(read_file(path), options);
  } catch (const InvalidInput& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
}

Corpus load_corpus(const std::filesystem::path& path, LoadOptions options) {
  return Corpus(load_tickets(path, options));
}

std::string serialize_tickets(const std::vector<Ticket>& tickets) {
  std::string out;
  for (const auto& t : tickets) {
    out += t.to_json().dump();
    out += '\n';
  }
  return out;
}

void save_tickets(const std::filesystem::path& path, const std::vector<Ticket>& tickets) {
  write_file(path, serialize_tickets(tickets));
}

std::size_t LabeledDataset::label_index(std::string_view label) const {
  const auto it = std::lower_bound(label_table.begin(), label_table.end(), label);
  if (it == label_table.end() || *it != label)
    throw NotFound("label '" + std::string(label) + "' not in label table");
  return static_cast<std::size_t>(it - label_table.begin());
}

std::vector<std::size_t> LabeledDataset::label_indices() const {
  std::vector<std::size_t> out;
  out.reserve(items.size());
  for (const auto& item : items) out.push_back(label_index(item.label));
  return out;
}

LabeledDataset build_labeled_dataset(const Corpus& corpus, std::size_t min_support,
                                     const std::set<std::string>& current_categories) {
  if (min_support < 1) throw InvalidInput("min_support must be >= 1");
  std::vector<const Ticket*> qualifying;
  std::map<std::string, std::size_t> support;
  for (const auto& t : corpus.tickets()) {
    if (t.status != Status::Resolved) continue;
    if (t.contact != Contact::Email || trim(t.create_message).empty()) continue;
    if (t.categories.size() != 1) continue;
    if (!current_categories.empty() && !current_categories.contains(t.categories[0])) continue;
    qualifying.push_back(&t);
    ++support[t.categories[0]];
  }
  LabeledDataset ds;
  for (const auto& [label, n] : support)
    if (n >= min_support) ds.label_table.push_back(label);
  for (const Ticket* t : qualifying) {
    if (support[t->categories[0]] < min_support) continue;
    ds.items.push_back({t->subject + " " + t->create_message, t->categories[0], t->id});
  }
  if (ds.items.empty()) throw InvalidInput("no tickets satisfy dataset rules");
  return ds;
}

nlohmann::json CorpusStats::to_json() const {
  nlohmann::json months = nlohmann::json::array();
  for (const auto& [m, n] : monthly_volume) months.push_back({{"month", m}, {"count", n}});
  nlohmann::json cats = nlohmann::json::array();
  for (const auto& c : categories)
    cats.push_back({{"category", c.category}, {"count", c.count}, {"percent", c.percent}});
  return {{"total_tickets", total_tickets},
          {"monthly_volume", months},
          {"categories", cats},
          {"other", {{"category", other.category}, {"count", other.count}, {"percent", other.percent}}}};
}

CorpusStats corpus_stats(const Corpus& corpus, double display_threshold) {
  CorpusStats stats;
  stats.total_tickets = corpus.size();
  std::map<std::string, std::size_t> histogram;
  for (const auto& t : corpus.tickets()) {
    ++stats.monthly_volume[year_month(t.created)];
    for (const auto& c : t.categories) ++histogram[c];
  }
  if (stats.total_tickets == 0) return stats;
  const double total = static_cast<double>(stats.total_tickets);
  for (const auto& [category, n] : histogram) {
    const double share = static_cast<double>(n) / total;
    if (static_cast<double>(n) + 1e-9 >= display_threshold * total)
      stats.categories.push_back({category, n, 100.0 * share});
    else
      stats.other.count += n;
  }
  stats.other.percent = 100.0 * static_cast<double>(stats.other.count) / total;
  std::stable_sort(stats.categories.begin(), stats.categories.end(),
                   [](const CategoryShare& a, const CategoryShare& b) { return a.count > b.count; });
  return stats;
}

}  // namespace ticketscope
