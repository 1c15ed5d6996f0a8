#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "tsslab/tss.hpp"

namespace tsslab {

struct Edge {
  std::string from;
  Name label;
  std::string to;

  auto operator<=>(const Edge&) const = default;
};

// A rooted labelled transition system. Identity for family membership and
// graph-constant naming is (states, edges, root); the name and the truncated
// flag are presentation metadata.
struct ProcessGraph {
  std::string name;
  std::set<std::string> states;
  std::set<Name> actions;
  std::set<Edge> edges;
  std::string root;
  bool truncated = false;

  // Throws Error when the root or an edge endpoint is not a state, or an
  // edge label is not in the action set.
  void validate() const;

  bool same_graph(const ProcessGraph& other) const {
    return states == other.states && edges == other.edges && root == other.root;
  }

  std::set<std::string> successors(const std::string& state, const Name& action) const;
};

// An unrooted LTS produced by bounded exploration.
struct Lts {
  std::set<std::string> states;
  std::set<Name> actions;
  std::set<Edge> edges;
  bool truncated = false;
};

// Least subgraph containing the root and closed under outgoing edges.
ProcessGraph reachable_part(const ProcessGraph& g);

// A finite set of process graphs, deduplicated up to same_graph.
struct GraphFamily {
  std::vector<ProcessGraph> members;

  bool contains(const ProcessGraph& g) const;
  // Returns false when an equal graph was already present.
  bool add(ProcessGraph g);
  bool empty() const { return members.empty(); }
  std::size_t size() const { return members.size(); }
};

// All rerootings of g along edges (root, action, s). Throws GNotInFamily when
// g is not a member of the family.
std::vector<ProcessGraph> graph_step(const GraphFamily& family, const ProcessGraph& g,
                                     const Name& action);

// Least superset closed under rerooting along edges.
GraphFamily transition_closure(const GraphFamily& family);
bool is_transition_closed(const GraphFamily& family);

// Deterministic constant name for a graph: "g_" + 64-bit hash of the
// canonical (states, edges, root) serialization. Structurally equal graphs
// get equal names.
Name graph_constant_name(const ProcessGraph& g);
std::uint64_t canonical_graph_hash(const ProcessGraph& g);

// P extended with one fresh constant per family member and a premise-free
// rule G -a-> G' per graph step. Requires a transition-closed family whose
// labels are actions of P and whose constant names are fresh in P's signature.
Tss embed(const Tss& tss, const GraphFamily& family);

std::string to_dot(const ProcessGraph& g);
std::string to_dot(const Lts& lts);

}  // namespace tsslab
