#pragma once

// Type-based relation graph. Operations own parameter and response nodes;
// those connect to the types they carry: named types (nominal), structural
// field nodes keyed by (field-name, field-type), and one node per scalar type.
// Parameters and responses that share a named type or a field are closer than
// ones that only share a scalar.

#include <algorithm>
#include <cstddef>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "restex/openapi.hpp"

namespace restex {

inline constexpr int kDefaultMaxDistance = 4;

enum class NodeKind { operation, parameter, response, named_type, structural_field, scalar_type };

inline std::string_view to_string(NodeKind k) {
  switch (k) {
    case NodeKind::operation: return "operation";
    case NodeKind::parameter: return "parameter";
    case NodeKind::response: return "response";
    case NodeKind::named_type: return "named-type";
    case NodeKind::structural_field: return "structural-field";
    case NodeKind::scalar_type: return "scalar-type";
  }
  return "operation";
}

/// A scalar position inside a parameter or response value.
struct LeafField {
  std::string pointer;  // JSON pointer inside the value; "" is the value itself
  std::string name;     // nearest field or parameter name; "" for an unnamed response scalar
  ScalarType type = ScalarType::string;

  bool operator==(const LeafField&) const = default;
};

struct GraphNode {
  NodeKind kind = NodeKind::operation;
  std::string key;
  std::string operation;  // owning operation for operation/parameter/response nodes
  std::string name;       // parameter name, type name or field name
  std::vector<LeafField> leaves;  // parameter/response nodes only
};

struct GraphEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  bool bidirectional = false;
};

class GraphError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline std::string operation_key(std::string_view op) { return "op:" + std::string(op); }
inline std::string parameter_key(std::string_view op, std::string_view name) {
  return "param:" + std::string(op) + ":" + std::string(name);
}
inline std::string response_key(std::string_view op) { return "response:" + std::string(op); }

class TypeGraph {
 public:
  std::size_t add_node(NodeKind kind, std::string key, std::string operation = {}, std::string name = {}) {
    if (auto it = index_.find(key); it != index_.end()) return it->second;
    const std::size_t id = nodes_.size();
    nodes_.push_back({kind, key, std::move(operation), std::move(name), {}});
    index_.emplace(std::move(key), id);
    adjacency_.emplace_back();
    return id;
  }

  void add_edge(std::size_t from, std::size_t to, bool bidirectional) {
    if (from == to) return;
    if (!edge_set_.insert({from, to, bidirectional}).second) return;
    edges_.push_back({from, to, bidirectional});
    insert_sorted(adjacency_[from], to);
    if (bidirectional) insert_sorted(adjacency_[to], from);
  }

  std::optional<std::size_t> find(std::string_view key) const {
    if (auto it = index_.find(std::string(key)); it != index_.end()) return it->second;
    return std::nullopt;
  }

  std::size_t require(std::string_view key) const {
    auto id = find(key);
    if (!id) throw GraphError("unknown graph node '" + std::string(key) + "'");
    return *id;
  }

  const std::vector<GraphNode>& nodes() const { return nodes_; }
  const std::vector<GraphEdge>& edges() const { return edges_; }
  const GraphNode& node(std::size_t id) const { return nodes_.at(id); }
  GraphNode& node(std::size_t id) { return nodes_.at(id); }

  /// Nodes reachable in one traversal step, ordered by key.
  const std::vector<std::size_t>& successors(std::size_t id) const { return adjacency_.at(id); }

 private:
  void insert_sorted(std::vector<std::size_t>& list, std::size_t id) {
    auto pos = std::lower_bound(list.begin(), list.end(), id, [this](std::size_t a, std::size_t b) {
      return nodes_[a].key < nodes_[b].key;
    });
    if (pos == list.end() || *pos != id) list.insert(pos, id);
  }

  struct EdgeKey {
    std::size_t from, to;
    bool bidirectional;
    bool operator<(const EdgeKey& o) const {
      return std::tie(from, to, bidirectional) < std::tie(o.from, o.to, o.bidirectional);
    }
  };

  std::vector<GraphNode> nodes_;
  std::vector<GraphEdge> edges_;
  std::vector<std::vector<std::size_t>> adjacency_;
  std::map<std::string, std::size_t> index_;
  std::set<EdgeKey> edge_set_;
};

namespace detail {

inline std::string type_label(const Schema& s) {
  switch (s.kind) {
    case Schema::Kind::scalar: return std::string(to_string(s.scalar));
    case Schema::Kind::ref: return s.ref;
    case Schema::Kind::array: return "array<" + type_label(s.element()) + ">";
    case Schema::Kind::object: return "object";
  }
  return "object";
}

class GraphBuilder {
 public:
  GraphBuilder(const ApiSpec& spec, TypeGraph& graph) : spec_(spec), graph_(graph) {}

  void build() {
    for (const auto& op : query_operations(spec_)) {
      const auto op_node = graph_.add_node(NodeKind::operation, operation_key(op.id), op.id, op.id);
      for (const auto& p : op.parameters) {
        const auto pn = graph_.add_node(NodeKind::parameter, parameter_key(op.id, p.name), op.id, p.name);
        graph_.add_edge(op_node, pn, false);
        attach(pn, p.schema, p.name);
        std::vector<std::string> ancestry;
        collect_leaves(p.schema, "", p.name, ancestry, graph_.node(pn).leaves);
      }
      if (const Schema* resp = op.success_response()) {
        const auto rn = graph_.add_node(NodeKind::response, response_key(op.id), op.id, op.id);
        graph_.add_edge(op_node, rn, false);
        attach(rn, *resp, "");
        std::vector<std::string> ancestry;
        collect_leaves(*resp, "", "", ancestry, graph_.node(rn).leaves);
      }
    }
  }

 private:
  const ApiSpec& spec_;
  TypeGraph& graph_;
  std::set<std::size_t> expanded_;

  std::size_t scalar_node(ScalarType t) {
    return graph_.add_node(NodeKind::scalar_type, "scalar:" + std::string(to_string(t)), {}, std::string(to_string(t)));
  }

  std::size_t named_node(const std::string& name) {
    const auto id = graph_.add_node(NodeKind::named_type, "type:" + name, {}, name);
    if (expanded_.insert(id).second) {
      auto it = spec_.definitions.find(name);
      if (it != spec_.definitions.end()) attach_body(id, it->second);
    }
    return id;
  }

  std::size_t field_node(const std::string& name, const Schema& s) {
    const auto label = type_label(s);
    const auto id = graph_.add_node(NodeKind::structural_field, "field:" + name + ":" + label, {}, name);
    // Inline objects sharing a field label merge their contents; recursion
    // only happens through named_node, which expands each type once.
    attach_body(id, s);
    return id;
  }

  /// Connects an owner (parameter/response) to the node(s) describing `s`.
  /// A named scalar goes through its (name, type) field node so equal-named
  /// scalars across operations share structure.
  void attach(std::size_t owner, const Schema& s, const std::string& name) {
    switch (s.kind) {
      case Schema::Kind::scalar:
        graph_.add_edge(owner, name.empty() ? scalar_node(s.scalar) : field_node(name, s), true);
        break;
      case Schema::Kind::ref:
        graph_.add_edge(owner, named_node(s.ref), true);
        break;
      case Schema::Kind::array:
        attach(owner, s.element(), name);
        break;
      case Schema::Kind::object:
        attach_body(owner, s);
        break;
    }
  }

  /// Edges from a type-ish node to its content.
  void attach_body(std::size_t node, const Schema& s) {
    switch (s.kind) {
      case Schema::Kind::scalar:
        graph_.add_edge(node, scalar_node(s.scalar), true);
        break;
      case Schema::Kind::ref:
        graph_.add_edge(node, named_node(s.ref), true);
        break;
      case Schema::Kind::array:
        attach_body(node, s.element());
        break;
      case Schema::Kind::object:
        for (const auto& f : s.fields) graph_.add_edge(node, field_node(f.name, f.schema), true);
        break;
    }
  }

  void collect_leaves(const Schema& s, const std::string& pointer, const std::string& name,
                      std::vector<std::string>& ancestry, std::vector<LeafField>& out) {
    const Schema r = resolve_schema(spec_, s, ancestry);
    if (r.cycle) return;
    const bool pushed = s.is_ref();
    if (pushed) ancestry.push_back(s.ref);
    switch (r.kind) {
      case Schema::Kind::scalar:
        out.push_back({pointer, name, r.scalar});
        break;
      case Schema::Kind::array:
        collect_leaves(r.element(), pointer + "/0", name, ancestry, out);
        break;
      case Schema::Kind::object:
        for (const auto& f : r.fields) collect_leaves(f.schema, child_pointer(pointer, f.name), f.name, ancestry, out);
        break;
      case Schema::Kind::ref:
        break;
    }
    if (pushed) ancestry.pop_back();
  }
};

}  // namespace detail

inline TypeGraph build_schema_graph(const ApiSpec& spec) {
  TypeGraph graph;
  detail::GraphBuilder(spec, graph).build();
  return graph;
}

struct RelationPath {
  std::string source;
  std::string target;
  std::vector<std::string> hops;  // node keys, source first
  int distance = 0;

  bool operator==(const RelationPath&) const = default;
};

namespace detail {

struct ShortestPaths {
  std::vector<int> distance;            // -1 when unreachable
  std::vector<std::size_t> predecessor;  // on the lexicographically smallest shortest path
};

/// Breadth-first layers from `source`. Among equal-length paths, each node
/// keeps the predecessor whose own path sorts first (node keys, compared hop by
/// hop from the source).
inline ShortestPaths shortest_paths(const TypeGraph& g, std::size_t source, int max_distance) {
  const auto n = g.nodes().size();
  ShortestPaths sp{std::vector<int>(n, -1), std::vector<std::size_t>(n, n)};
  std::vector<std::size_t> rank(n, n);
  sp.distance[source] = 0;
  rank[source] = 0;
  std::vector<std::size_t> layer{source};
  for (int d = 1; d <= max_distance && !layer.empty(); ++d) {
    std::vector<std::size_t> next;
    for (auto u : layer) {
      for (auto v : g.successors(u)) {
        if (sp.distance[v] == -1) {
          sp.distance[v] = d;
          sp.predecessor[v] = u;
          next.push_back(v);
        } else if (sp.distance[v] == d && rank[u] < rank[sp.predecessor[v]]) {
          sp.predecessor[v] = u;
        }
      }
    }
    std::sort(next.begin(), next.end(), [&](std::size_t a, std::size_t b) {
      if (rank[sp.predecessor[a]] != rank[sp.predecessor[b]]) return rank[sp.predecessor[a]] < rank[sp.predecessor[b]];
      return g.node(a).key < g.node(b).key;
    });
    for (std::size_t i = 0; i < next.size(); ++i) rank[next[i]] = i;
    layer = std::move(next);
  }
  return sp;
}

}  // namespace detail

/// Parameter and response nodes within `max_distance` hops of `source`,
/// nearest first, ties broken by target key.
inline std::vector<RelationPath> related_parameters(const TypeGraph& graph, std::string_view source,
                                                    int max_distance = kDefaultMaxDistance) {
  const auto src = graph.require(source);
  const auto sp = detail::shortest_paths(graph, src, max_distance);
  std::vector<RelationPath> out;
  for (std::size_t v = 0; v < graph.nodes().size(); ++v) {
    const auto& node = graph.node(v);
    if (v == src || sp.distance[v] < 0) continue;
    if (node.kind != NodeKind::parameter && node.kind != NodeKind::response) continue;
    RelationPath path;
    path.source = graph.node(src).key;
    path.target = node.key;
    path.distance = sp.distance[v];
    for (auto cur = v; cur != src; cur = sp.predecessor[cur]) path.hops.push_back(graph.node(cur).key);
    path.hops.push_back(path.source);
    std::reverse(path.hops.begin(), path.hops.end());
    out.push_back(std::move(path));
  }
  std::sort(out.begin(), out.end(), [](const RelationPath& a, const RelationPath& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.target < b.target;
  });
  return out;
}

enum class SourceKind { argument, response };

inline std::string_view to_string(SourceKind k) { return k == SourceKind::argument ? "argument" : "response"; }

/// One way another operation could supply a scalar of the target parameter.
struct ProducerCandidate {
  std::string operation;
  SourceKind kind = SourceKind::argument;
  std::string parameter;       // producing parameter when kind == argument
  std::string source_pointer;  // leaf inside the producing value
  std::string target_pointer;  // leaf inside the target parameter value
  int distance = 0;
  bool same_name = false;

  bool operator==(const ProducerCandidate&) const = default;
};

/// Producers for `target_parameter` (a parameter node key) from other
/// operations, ordered by (distance, name match, producer key, pointers).
/// Only leaves of the same scalar type qualify; when a producer has a leaf
/// with the target leaf's name, type-only matches from it are dropped.
inline std::vector<ProducerCandidate> candidate_producers(const TypeGraph& graph, std::string_view target_parameter,
                                                          int max_distance = kDefaultMaxDistance) {
  const auto target = graph.require(target_parameter);
  const auto& tnode = graph.node(target);
  if (tnode.kind != NodeKind::parameter) throw GraphError("'" + tnode.key + "' is not a parameter node");
  struct Keyed {
    ProducerCandidate c;
    std::string node_key;
  };
  std::vector<Keyed> out;
  for (const auto& path : related_parameters(graph, tnode.key, max_distance)) {
    const auto& pnode = graph.node(graph.require(path.target));
    if (pnode.operation == tnode.operation) continue;
    for (const auto& tl : tnode.leaves) {
      std::vector<ProducerCandidate> named, typed;
      for (const auto& pl : pnode.leaves) {
        if (pl.type != tl.type) continue;
        ProducerCandidate c;
        c.operation = pnode.operation;
        c.kind = pnode.kind == NodeKind::parameter ? SourceKind::argument : SourceKind::response;
        c.parameter = pnode.kind == NodeKind::parameter ? pnode.name : std::string{};
        c.source_pointer = pl.pointer;
        c.target_pointer = tl.pointer;
        c.distance = path.distance;
        c.same_name = !tl.name.empty() && pl.name == tl.name;
        (c.same_name ? named : typed).push_back(std::move(c));
      }
      for (auto& c : named.empty() ? typed : named) out.push_back({std::move(c), pnode.key});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Keyed& a, const Keyed& b) {
    if (a.c.distance != b.c.distance) return a.c.distance < b.c.distance;
    if (a.c.same_name != b.c.same_name) return a.c.same_name;
    if (a.node_key != b.node_key) return a.node_key < b.node_key;
    if (a.c.target_pointer != b.c.target_pointer) return a.c.target_pointer < b.c.target_pointer;
    return a.c.source_pointer < b.c.source_pointer;
  });
  std::vector<ProducerCandidate> result;
  result.reserve(out.size());
  for (auto& k : out) result.push_back(std::move(k.c));
  return result;
}

/// Graphviz rendering, nodes labelled by kind and key.
inline std::string to_dot(const TypeGraph& graph) {
  std::ostringstream os;
  os << "digraph relations {\n";
  for (std::size_t i = 0; i < graph.nodes().size(); ++i) {
    const auto& n = graph.node(i);
    os << "  n" << i << " [label=\"" << to_string(n.kind) << "\\n";
    for (char c : n.key) {
      if (c == '"' || c == '\\') os << '\\';
      os << c;
    }
    os << "\"];\n";
  }
  for (const auto& e : graph.edges()) {
    os << "  n" << e.from << " -> n" << e.to;
    if (e.bidirectional) os << " [dir=both]";
    os << ";\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace restex
