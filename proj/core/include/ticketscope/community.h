#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ticketscope/corpus.h"

namespace ticketscope {

enum class NodeKind { User, Consultant, Category, Machine };
std::string_view to_string(NodeKind k);

// Node ids are "<kind>:<name>", e.g. "user:u01", so names never collide
// across kinds. Tickets without an owner go to "consultant:unassigned".
std::string node_id(NodeKind kind, std::string_view name);
inline constexpr std::string_view kUnassignedNode = "consultant:unassigned";

struct GraphEdge {
  std::string source;
  std::string target;
  std::size_t weight = 0;              // ticket count
  std::optional<double> normalized;    // consultant-category graph only

  bool operator==(const GraphEdge&) const = default;
};

class CommunityGraph {
 public:
  std::string kind;  // "user-consultant" or "consultant-category"

  const std::map<std::string, NodeKind>& nodes() const { return nodes_; }
  // Sorted by (source, target).
  const std::vector<GraphEdge>& edges() const { return edges_; }
  bool has_node(std::string_view id) const { return nodes_.contains(std::string(id)); }
  std::size_t total_weight() const;

  void add_node(const std::string& id, NodeKind kind) { nodes_.emplace(id, kind); }
  void add_edge(GraphEdge e);  // endpoints must exist
  void sort_edges();

  // Accepts a full node id or a bare name that identifies exactly one node.
  std::string resolve(std::string_view name) const;

  nlohmann::json to_json() const;
  // Graphviz-style undirected edge list.
  std::string to_dot() const;

 private:
  std::map<std::string, NodeKind> nodes_;
  std::vector<GraphEdge> edges_;
};

struct UserConsultantOptions {
  std::size_t min_edge_weight = 1;
  bool attach_unassigned = true;  // unowned tickets link to kUnassignedNode
  bool include_machines = false;  // add user-machine edges from the machine field
};

CommunityGraph build_user_consultant_graph(const Corpus& corpus, const UserConsultantOptions& options = {});

// Edge weight = consultant's tickets in the category; normalized weight =
// weight / consultant's total over the retained categories. Categories with
// fewer than min_category_tickets corpus-wide are dropped first.
CommunityGraph build_consultant_category_graph(const Corpus& corpus, std::size_t min_category_tickets);

// Nodes within `radius` hops of `focus`, with every edge among them.
CommunityGraph subgraph(const CommunityGraph& graph, std::string_view focus, std::size_t radius);

}  // namespace ticketscope
