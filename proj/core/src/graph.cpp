#include "tsslab/graph.hpp"

#include <deque>
#include <sstream>

namespace tsslab {

void ProcessGraph::validate() const {
  if (states.count(root) == 0) throw Error("graph root '" + root + "' is not a state");
  for (const Edge& e : edges) {
    if (states.count(e.from) == 0 || states.count(e.to) == 0) {
      throw Error("edge endpoint outside the state set: " + e.from + " -" + e.label + "-> " +
                  e.to);
    }
    if (actions.count(e.label) == 0) {
      throw Error("edge label '" + e.label + "' is not in the action set");
    }
  }
}

std::set<std::string> ProcessGraph::successors(const std::string& state,
                                               const Name& action) const {
  std::set<std::string> out;
  for (const Edge& e : edges) {
    if (e.from == state && e.label == action) out.insert(e.to);
  }
  return out;
}

ProcessGraph reachable_part(const ProcessGraph& g) {
  ProcessGraph out;
  out.name = g.name;
  out.actions = g.actions;
  out.root = g.root;
  out.truncated = g.truncated;
  std::deque<std::string> frontier{g.root};
  out.states.insert(g.root);
  while (!frontier.empty()) {
    std::string s = frontier.front();
    frontier.pop_front();
    for (const Edge& e : g.edges) {
      if (e.from != s) continue;
      if (out.states.insert(e.to).second) frontier.push_back(e.to);
    }
  }
  for (const Edge& e : g.edges) {
    if (out.states.count(e.from)) out.edges.insert(e);
  }
  return out;
}

bool GraphFamily::contains(const ProcessGraph& g) const {
  for (const ProcessGraph& m : members) {
    if (m.same_graph(g)) return true;
  }
  return false;
}

bool GraphFamily::add(ProcessGraph g) {
  if (contains(g)) return false;
  members.push_back(std::move(g));
  return true;
}

std::vector<ProcessGraph> graph_step(const GraphFamily& family, const ProcessGraph& g,
                                     const Name& action) {
  if (!family.contains(g)) {
    throw GNotInFamily("graph '" + (g.name.empty() ? graph_constant_name(g) : g.name) +
                       "' is not a member of the family");
  }
  std::vector<ProcessGraph> out;
  for (const std::string& s : g.successors(g.root, action)) {
    ProcessGraph rerooted = g;
    rerooted.root = s;
    rerooted.name.clear();
    out.push_back(std::move(rerooted));
  }
  return out;
}

GraphFamily transition_closure(const GraphFamily& family) {
  GraphFamily out;
  std::deque<ProcessGraph> frontier;
  for (const ProcessGraph& g : family.members) {
    if (out.add(g)) frontier.push_back(g);
  }
  while (!frontier.empty()) {
    ProcessGraph g = frontier.front();
    frontier.pop_front();
    for (const Edge& e : g.edges) {
      if (e.from != g.root) continue;
      ProcessGraph rerooted = g;
      rerooted.root = e.to;
      rerooted.name.clear();
      if (out.add(rerooted)) frontier.push_back(std::move(rerooted));
    }
  }
  return out;
}

bool is_transition_closed(const GraphFamily& family) {
  for (const ProcessGraph& g : family.members) {
    for (const Edge& e : g.edges) {
      if (e.from != g.root) continue;
      ProcessGraph rerooted = g;
      rerooted.root = e.to;
      if (!family.contains(rerooted)) return false;
    }
  }
  return true;
}

namespace {

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

std::string canonical_graph_text(const ProcessGraph& g) {
  std::ostringstream out;
  out << "states:";
  for (const std::string& s : g.states) out << s << ';';
  out << "root:" << g.root << ";edges:";
  for (const Edge& e : g.edges) out << e.from << '|' << e.label << '|' << e.to << ';';
  return out.str();
}

}  // namespace

std::uint64_t canonical_graph_hash(const ProcessGraph& g) {
  return fnv1a64(canonical_graph_text(g));
}

Name graph_constant_name(const ProcessGraph& g) {
  static const char* digits = "0123456789abcdef";
  std::uint64_t h = canonical_graph_hash(g);
  Name name = "g_";
  for (int shift = 60; shift >= 0; shift -= 4) name += digits[(h >> shift) & 0xf];
  return name;
}

Tss embed(const Tss& tss, const GraphFamily& family) {
  if (!is_transition_closed(family)) {
    throw NotTransitionClosed("embed requires a transition-closed family");
  }
  Tss out = tss;
  if (!family.empty()) out.name = tss.name.empty() ? "+graphs" : tss.name + "+graphs";
  for (const ProcessGraph& g : family.members) {
    g.validate();
    for (const Edge& e : g.edges) {
      if (tss.actions.count(e.label) == 0) {
        throw Error("family graph uses label '" + e.label + "' outside the TSS action set");
      }
    }
    Name constant = graph_constant_name(g);
    if (tss.signature.contains(constant)) {
      throw SignatureOverlap("graph constant '" + constant + "' clashes with the signature");
    }
    out.signature.declare(constant, 0);
  }
  for (const ProcessGraph& g : family.members) {
    Term source = Term::app(graph_constant_name(g));
    for (const Edge& e : g.edges) {
      if (e.from != g.root) continue;
      ProcessGraph rerooted = g;
      rerooted.root = e.to;
      TransitionRule axiom;
      axiom.conclusion = Literal::pos(source, e.label, Term::app(graph_constant_name(rerooted)));
      out.rules.push_back(std::move(axiom));
    }
  }
  return out;
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

void dot_body(std::ostringstream& out, const std::set<std::string>& states,
              const std::set<Edge>& edges, const std::string* root) {
  std::size_t id = 0;
  std::map<std::string, std::size_t> ids;
  for (const std::string& s : states) ids[s] = id++;
  if (root) {
    out << "  __root [shape=none, label=\"\"];\n";
    out << "  __root -> n" << ids.at(*root) << ";\n";
  }
  for (const std::string& s : states) {
    out << "  n" << ids.at(s) << " [label=\"" << dot_escape(s) << "\"];\n";
  }
  for (const Edge& e : edges) {
    out << "  n" << ids.at(e.from) << " -> n" << ids.at(e.to) << " [label=\""
        << dot_escape(e.label) << "\"];\n";
  }
}

}  // namespace

std::string to_dot(const ProcessGraph& g) {
  std::ostringstream out;
  out << "digraph \"" << dot_escape(g.name.empty() ? "graph" : g.name) << "\" {\n";
  out << "  rankdir=LR;\n";
  dot_body(out, g.states, g.edges, &g.root);
  out << "}\n";
  return out.str();
}

std::string to_dot(const Lts& lts) {
  std::ostringstream out;
  out << "digraph lts {\n  rankdir=LR;\n";
  dot_body(out, lts.states, lts.edges, nullptr);
  out << "}\n";
  return out.str();
}

}  // namespace tsslab
