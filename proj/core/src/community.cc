#include "ticketscope/community.h"

#include <algorithm>
#include <deque>
#include <set>

#include "ticketscope/error.h"

namespace ticketscope {

std::string_view to_string(NodeKind k) {
  switch (k) {
    case NodeKind::User: return "user";
    case NodeKind::Consultant: return "consultant";
    case NodeKind::Category: return "category";
    case NodeKind::Machine: return "machine";
  }
  return "?";
}

std::string node_id(NodeKind kind, std::string_view name) {
  return std::string(to_string(kind)) + ":" + std::string(name);
}

std::size_t CommunityGraph::total_weight() const {
  std::size_t total = 0;
  for (const auto& e : edges_) total += e.weight;
  return total;
}

void CommunityGraph::add_edge(GraphEdge e) {
  if (!nodes_.contains(e.source) || !nodes_.contains(e.target))
    throw InvalidInput("edge endpoint missing: " + e.source + " -- " + e.target);
  edges_.push_back(std::move(e));
}

void CommunityGraph::sort_edges() {
  std::sort(edges_.begin(), edges_.end(), [](const GraphEdge& a, const GraphEdge& b) {
    return a.source != b.source ? a.source < b.source : a.target < b.target;
  });
}

std::string CommunityGraph::resolve(std::string_view name) const {
  if (nodes_.contains(std::string(name))) return std::string(name);
  std::vector<std::string> matches;
  for (const auto& [id, _] : nodes_)
    if (id.substr(id.find(':') + 1) == name) matches.push_back(id);
  if (matches.size() == 1) return matches.front();
  if (matches.empty()) throw NotFound("no node '" + std::string(name) + "' in the graph");
  std::string msg = "node name '" + std::string(name) + "' is ambiguous:";
  for (const auto& m : matches) msg += " " + m;
  throw InvalidInput(msg);
}

nlohmann::json CommunityGraph::to_json() const {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& [id, k] : nodes_)
    nodes.push_back({{"id", id}, {"kind", std::string(to_string(k))}, {"label", id.substr(id.find(':') + 1)}});
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : edges_) {
    nlohmann::json j{{"source", e.source}, {"target", e.target}, {"weight", e.weight}};
    if (e.normalized) j["normalized_weight"] = *e.normalized;
    edges.push_back(std::move(j));
  }
  return {{"kind", kind}, {"nodes", nodes}, {"edges", edges}};
}

std::string CommunityGraph::to_dot() const {
  auto quote = [](const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
      if (c == '"' || c == '\\') out += '\\';
      out += c;
    }
    return out + "\"";
  };
  std::string out = "graph \"" + kind + "\" {\n";
  for (const auto& [id, k] : nodes_) out += "  " + quote(id) + " [kind=" + std::string(to_string(k)) + "];\n";
  for (const auto& e : edges_) {
    out += "  " + quote(e.source) + " -- " + quote(e.target) + " [weight=" + std::to_string(e.weight);
    if (e.normalized) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6g", *e.normalized);
      out += std::string(", normalized=") + buf;
    }
    out += "];\n";
  }
  return out + "}\n";
}

CommunityGraph build_user_consultant_graph(const Corpus& corpus, const UserConsultantOptions& options) {
  std::map<std::pair<std::string, std::string>, std::size_t> counts;
  CommunityGraph g;
  g.kind = "user-consultant";
  for (const Ticket& t : corpus.tickets()) {
    const std::string user = node_id(NodeKind::User, t.requestor);
    std::string owner;
    if (!t.owner.empty())
      owner = node_id(NodeKind::Consultant, t.owner);
    else if (options.attach_unassigned)
      owner = std::string(kUnassignedNode);
    if (!owner.empty()) ++counts[{user, owner}];
    if (options.include_machines && t.machine && !t.machine->empty())
      ++counts[{user, node_id(NodeKind::Machine, *t.machine)}];
  }
  auto kind_of = [](const std::string& id) {
    if (id.starts_with("user:")) return NodeKind::User;
    if (id.starts_with("machine:")) return NodeKind::Machine;
    return NodeKind::Consultant;
  };
  for (const auto& [ends, weight] : counts) {
    if (weight < options.min_edge_weight) continue;
    g.add_node(ends.first, kind_of(ends.first));
    g.add_node(ends.second, kind_of(ends.second));
    g.add_edge({ends.first, ends.second, weight, std::nullopt});
  }
  g.sort_edges();
  return g;
}

CommunityGraph build_consultant_category_graph(const Corpus& corpus, std::size_t min_category_tickets) {
  std::map<std::string, std::size_t> category_total;
  for (const Ticket& t : corpus.tickets())
    for (const auto& c : std::set<std::string>(t.categories.begin(), t.categories.end()))
      ++category_total[c];
  std::map<std::string, std::map<std::string, std::size_t>> per_consultant;
  for (const Ticket& t : corpus.tickets()) {
    if (t.owner.empty()) continue;
    for (const auto& c : std::set<std::string>(t.categories.begin(), t.categories.end()))
      if (category_total[c] >= min_category_tickets) ++per_consultant[t.owner][c];
  }
  CommunityGraph g;
  g.kind = "consultant-category";
  for (const auto& [consultant, cats] : per_consultant) {
    std::size_t total = 0;
    for (const auto& [_, n] : cats) total += n;
    const std::string cid = node_id(NodeKind::Consultant, consultant);
    g.add_node(cid, NodeKind::Consultant);
    for (const auto& [category, n] : cats) {
      const std::string kid = node_id(NodeKind::Category, category);
      g.add_node(kid, NodeKind::Category);
      g.add_edge({cid, kid, n, static_cast<double>(n) / static_cast<double>(total)});
    }
  }
  g.sort_edges();
  return g;
}

CommunityGraph subgraph(const CommunityGraph& graph, std::string_view focus, std::size_t radius) {
  const std::string start = graph.resolve(focus);
  std::map<std::string, std::vector<std::string>> adjacency;
  for (const auto& e : graph.edges()) {
    adjacency[e.source].push_back(e.target);
    adjacency[e.target].push_back(e.source);
  }
  std::map<std::string, std::size_t> depth{{start, 0}};
  std::deque<std::string> queue{start};
  while (!queue.empty()) {
    const std::string n = queue.front();
    queue.pop_front();
    if (depth[n] == radius) continue;
    for (const auto& m : adjacency[n]) {
      if (depth.contains(m)) continue;
      depth[m] = depth[n] + 1;
      queue.push_back(m);
    }
  }
  CommunityGraph out;
  out.kind = graph.kind;
  for (const auto& [id, _] : depth) out.add_node(id, graph.nodes().at(id));
  for (const auto& e : graph.edges())
    if (depth.contains(e.source) && depth.contains(e.target)) out.add_edge(e);
  return out;
}

}  // namespace ticketscope
