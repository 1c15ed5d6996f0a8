#include "tsslab/equivalence.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "tsslab/parse.hpp"

namespace tsslab {

namespace {

// Disjoint union of two graphs with integer state ids and per-state sorted
// successor lists; drives the refinement loop.
struct Union {
  std::vector<std::vector<std::pair<Name, std::size_t>>> succ;
  std::size_t left_root = 0;
  std::size_t right_root = 0;

  Union(const ProcessGraph& g, const ProcessGraph& h) {
    std::map<std::string, std::size_t> left, right;
    for (const std::string& s : g.states) left[s] = left.size();
    for (const std::string& s : h.states) right[s] = right.size() + g.states.size();
    succ.resize(g.states.size() + h.states.size());
    for (const Edge& e : g.edges) succ[left.at(e.from)].push_back({e.label, left.at(e.to)});
    for (const Edge& e : h.edges) succ[right.at(e.from)].push_back({e.label, right.at(e.to)});
    for (auto& list : succ) std::sort(list.begin(), list.end());
    left_root = left.at(g.root);
    right_root = right.at(h.root);
  }
};

using Partition = std::vector<std::size_t>;

using StateSig = std::vector<std::pair<Name, std::size_t>>;

StateSig signature_of(const Union& u, const Partition& part, std::size_t state) {
  StateSig sig;
  for (const auto& [label, target] : u.succ[state]) sig.push_back({label, part[target]});
  std::sort(sig.begin(), sig.end());
  sig.erase(std::unique(sig.begin(), sig.end()), sig.end());
  return sig;
}

// Iterated signature refinement; returns the partition after every round,
// history[0] being the trivial partition. The final entry is the coarsest
// strong bisimulation.
std::vector<Partition> refine(const Union& u) {
  std::vector<Partition> history;
  history.push_back(Partition(u.succ.size(), 0));
  while (true) {
    const Partition& prev = history.back();
    std::map<std::pair<std::size_t, StateSig>, std::size_t> block_ids;
    Partition next(prev.size());
    for (std::size_t s = 0; s < prev.size(); ++s) {
      auto key = std::make_pair(prev[s], signature_of(u, prev, s));
      auto [it, inserted] = block_ids.emplace(std::move(key), block_ids.size());
      (void)inserted;
      next[s] = it->second;
    }
    if (next == prev) break;
    history.push_back(std::move(next));
  }
  return history;
}

// Builds a minimal-depth distinguishing HML formula for states separated by
// the refinement: recursion is on the separation level, which strictly
// decreases for the successor pairs picked from the splitting signature.
struct Distinguisher {
  const Union& u;
  const std::vector<Partition>& history;

  std::size_t level(std::size_t s, std::size_t t) const {
    for (std::size_t k = 0; k < history.size(); ++k) {
      if (history[k][s] != history[k][t]) return k;
    }
    return history.size();  // never separated
  }

  std::string formula(std::size_t s, std::size_t t) const {
    std::size_t k = level(s, t);
    const Partition& prev = history[k - 1];
    StateSig ssig = signature_of(u, prev, s);
    StateSig tsig = signature_of(u, prev, t);
    for (const auto& entry : ssig) {
      if (std::find(tsig.begin(), tsig.end(), entry) == tsig.end()) {
        return diamond(entry, s, t, prev);
      }
    }
    for (const auto& entry : tsig) {
      if (std::find(ssig.begin(), ssig.end(), entry) == ssig.end()) {
        return "!" + diamond(entry, t, s, prev);
      }
    }
    return "?";  // unreachable: separated states have differing signatures
  }

  std::string diamond(const std::pair<Name, std::size_t>& entry, std::size_t s, std::size_t t,
                      const Partition& prev) const {
    const auto& [label, block] = entry;
    std::size_t witness = s;
    for (const auto& [l, target] : u.succ[s]) {
      if (l == label && prev[target] == block) {
        witness = target;
        break;
      }
    }
    std::vector<std::string> parts;
    for (const auto& [l, target] : u.succ[t]) {
      if (l == label) parts.push_back(formula(witness, target));
    }
    if (parts.empty()) return "<" + label + ">true";
    std::sort(parts.begin(), parts.end());
    parts.erase(std::unique(parts.begin(), parts.end()), parts.end());
    std::string out = "<" + label + ">";
    if (parts.size() == 1) return out + parts[0];
    out += "(";
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i) out += " & ";
      out += parts[i];
    }
    return out + ")";
  }
};

}  // namespace

BisimResult strong_bisim(const ProcessGraph& g, const ProcessGraph& h) {
  Union u(g, h);
  std::vector<Partition> history = refine(u);
  const Partition& final_part = history.back();
  BisimResult result;
  result.related = final_part[u.left_root] == final_part[u.right_root];
  if (!result.related) {
    Distinguisher d{u, history};
    result.distinguishing = d.formula(u.left_root, u.right_root);
  }
  return result;
}

ProcessGraph saturate_weak(const ProcessGraph& g, const Name& tau) {
  // tau-closure per state
  std::map<std::string, std::set<std::string>> closure;
  for (const std::string& s : g.states) {
    std::set<std::string>& reach = closure[s];
    std::vector<std::string> stack{s};
    reach.insert(s);
    while (!stack.empty()) {
      std::string cur = stack.back();
      stack.pop_back();
      for (const Edge& e : g.edges) {
        if (e.from == cur && e.label == tau && reach.insert(e.to).second) stack.push_back(e.to);
      }
    }
  }
  ProcessGraph out;
  out.name = g.name;
  out.states = g.states;
  out.actions = g.actions;
  out.actions.insert(tau);
  out.root = g.root;
  for (const std::string& s : g.states) {
    for (const std::string& mid : closure.at(s)) {
      out.edges.insert(Edge{s, tau, mid});
      for (const Edge& e : g.edges) {
        if (e.from != mid || e.label == tau) continue;
        for (const std::string& end : closure.at(e.to)) {
          out.edges.insert(Edge{s, e.label, end});
        }
      }
    }
  }
  return out;
}

bool weak_bisim(const ProcessGraph& g, const ProcessGraph& h, const Name& tau) {
  return strong_bisim(saturate_weak(g, tau), saturate_weak(h, tau)).related;
}

bool equivalent(const ProcessGraph& g, const ProcessGraph& h, const EquivalenceKind& kind) {
  return kind.is_weak() ? weak_bisim(g, h, kind.tau) : strong_bisim(g, h).related;
}

ProcessGraph minimize(const ProcessGraph& g, const EquivalenceKind& kind) {
  ProcessGraph reach = reachable_part(g);
  ProcessGraph basis = kind.is_weak() ? saturate_weak(reach, kind.tau) : reach;
  // Refinement over a single graph: pair it with an empty placeholder.
  ProcessGraph empty;
  empty.states.insert("_");
  empty.root = "_";
  Union u(basis, empty);
  Partition part = refine(u).back();
  std::map<std::string, std::size_t> index;
  for (const std::string& s : basis.states) index[s] = index.size();

  // Deterministic class names: classes ordered by their minimal member.
  std::map<std::size_t, std::string> block_min;
  for (const std::string& s : reach.states) {
    std::size_t b = part[index.at(s)];
    auto it = block_min.find(b);
    if (it == block_min.end() || s < it->second) block_min[b] = s;
  }
  std::vector<std::pair<std::string, std::size_t>> ordered;
  for (const auto& [b, least] : block_min) ordered.push_back({least, b});
  std::sort(ordered.begin(), ordered.end());
  std::map<std::size_t, std::string> class_name;
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    class_name[ordered[i].second] = "c" + std::to_string(i);
  }

  ProcessGraph out;
  out.name = g.name.empty() ? "min" : g.name + "/min";
  out.actions = g.actions;
  for (const auto& [b, name] : class_name) {
    (void)b;
    out.states.insert(name);
  }
  out.root = class_name.at(part[index.at(reach.root)]);
  for (const Edge& e : reach.edges) {
    out.edges.insert(Edge{class_name.at(part[index.at(e.from)]), e.label,
                          class_name.at(part[index.at(e.to)])});
  }
  return out;
}

EnumeratedTerms enumerate_closed_terms(const Tss& tss, std::size_t max_depth,
                                       bool include_recursion, std::size_t cap) {
  EnumeratedTerms out;
  std::vector<Term> pool;
  auto push = [&](Term t) {
    if (pool.size() >= cap) {
      out.complete = false;
      return false;
    }
    pool.push_back(std::move(t));
    return true;
  };
  for (const auto& [sym, arity] : tss.signature.declarations()) {
    if (arity == 0 && !push(Term::app(sym))) break;
  }
  if (include_recursion) {
    // Guarded one-variable loops rec X { X = a.X } for each prefix operator.
    for (const auto& [sym, arity] : tss.signature.declarations()) {
      if (arity == 1 && sym.rfind("prefix_", 0) == 0) {
        RecSpec spec;
        spec.bindings.emplace("X", Term::app(sym, {Term::var("X")}));
        if (!push(Term::rec("X", std::move(spec)))) break;
      }
    }
  }
  std::size_t previous_size = 0;
  for (std::size_t d = 2; d <= max_depth && out.complete && !pool.empty(); ++d) {
    std::size_t base = pool.size();
    for (const auto& [sym, arity] : tss.signature.declarations()) {
      if (arity == 0 || !out.complete) continue;
      std::vector<std::size_t> pick(arity, 0);
      while (out.complete) {
        bool fresh = false;  // at least one argument from the previous depth layer
        for (std::size_t i : pick) fresh |= i >= previous_size;
        if (fresh) {
          std::vector<Term> args;
          for (std::size_t i : pick) args.push_back(pool[i]);
          if (!push(Term::app(sym, std::move(args)))) break;
        }
        std::size_t pos = 0;
        while (pos < arity && ++pick[pos] == base) pick[pos++] = 0;
        if (pos == arity) break;
      }
    }
    previous_size = base;
  }
  out.terms = std::move(pool);
  return out;
}

LiftVerdict lift_ci(const Tss& tss, const Term& t, const Term& u, const EquivalenceKind& kind,
                    CiOptions options) {
  std::set<Name> var_set = t.free_vars();
  var_set.insert(u.free_vars().begin(), u.free_vars().end());
  std::vector<Name> vars(var_set.begin(), var_set.end());
  EnumeratedTerms pool =
      enumerate_closed_terms(tss, options.depth, tss.recursion_unfolding, options.max_terms);
  if (pool.terms.empty() && !vars.empty()) {
    LiftVerdict verdict;
    verdict.verdict = LiftVerdict::V::Unknown;
    verdict.coverage = "no closed terms exist over the signature";
    return verdict;
  }

  DerivationEngine engine(tss, options.limits);
  LiftVerdict verdict;
  bool truncated = false;
  std::size_t tried = 0;
  bool capped = false;
  std::vector<std::size_t> pick(vars.size(), 0);
  while (true) {
    if (tried >= options.max_instantiations) {
      capped = true;
      break;
    }
    ++tried;
    Subst sigma;
    for (std::size_t i = 0; i < vars.size(); ++i) sigma.set(vars[i], pool.terms[pick[i]]);
    ProcessGraph left = closed_meaning(engine, substitute(t, sigma), options.bound);
    ProcessGraph right = closed_meaning(engine, substitute(u, sigma), options.bound);
    if (left.truncated || right.truncated) {
      truncated = true;
    } else if (!equivalent(left, right, kind)) {
      verdict.verdict = LiftVerdict::V::Unrelated;
      verdict.witness_subst = sigma;
      std::ostringstream out;
      out << "closed substitution " << serialize_subst(sigma) << " separates "
          << serialize_term(t) << " and " << serialize_term(u);
      if (!kind.is_weak()) {
        BisimResult b = strong_bisim(left, right);
        if (b.distinguishing) out << "; distinguishing formula: " << *b.distinguishing;
      }
      verdict.witness = out.str();
      break;
    }
    if (vars.empty()) break;
    std::size_t pos = 0;
    while (pos < vars.size() && ++pick[pos] == pool.terms.size()) pick[pos++] = 0;
    if (pos == vars.size()) break;
  }
  if (verdict.verdict != LiftVerdict::V::Unrelated && truncated) {
    verdict.verdict = LiftVerdict::V::Unknown;
  }
  std::ostringstream cov;
  cov << tried << " closed substitution(s) over " << pool.terms.size()
      << " closed terms of depth <= " << options.depth
      << (pool.complete ? "" : " (term pool capped)") << (capped ? " (instantiation cap hit)" : "")
      << "; recursion images " << (tss.recursion_unfolding ? "included" : "excluded");
  if (truncated) cov << "; some explorations truncated";
  verdict.coverage = cov.str();
  return verdict;
}

LiftVerdict lift_pg(const Tss& tss, const Term& t, const Term& u, const EquivalenceKind& kind,
                    const GraphFamily& family, PgOptions options) {
  std::set<Name> var_set = t.free_vars();
  var_set.insert(u.free_vars().begin(), u.free_vars().end());
  std::vector<Name> vars(var_set.begin(), var_set.end());
  GraphFamily closed = transition_closure(family);
  if (closed.empty() && !vars.empty()) {
    LiftVerdict verdict;
    verdict.verdict = LiftVerdict::V::Unknown;
    verdict.coverage = "empty graph family";
    return verdict;
  }

  LiftVerdict verdict;
  bool truncated = false;
  std::size_t tried = 0;
  std::vector<std::size_t> pick(vars.size(), 0);
  while (true) {
    ++tried;
    GraphValuation rho;
    for (std::size_t i = 0; i < vars.size(); ++i) {
      rho.mapping.emplace(vars[i], closed.members[pick[i]]);
    }
    PgMeaning left = pg_meaning(tss, t, rho, closed, options);
    PgMeaning right = pg_meaning(tss, u, rho, closed, options);
    if (left.graph.truncated || right.graph.truncated) {
      truncated = true;
    } else if (!equivalent(left.graph, right.graph, kind)) {
      verdict.verdict = LiftVerdict::V::Unrelated;
      verdict.witness_valuation = rho;
      std::ostringstream out;
      out << "graph valuation {";
      bool first = true;
      for (const auto& [v, g] : rho.mapping) {
        if (!first) out << ", ";
        first = false;
        out << v << " -> " << (g.name.empty() ? graph_constant_name(g) : g.name);
      }
      out << "} separates " << serialize_term(t) << " and " << serialize_term(u);
      if (!kind.is_weak()) {
        BisimResult b = strong_bisim(left.graph, right.graph);
        if (b.distinguishing) out << "; distinguishing formula: " << *b.distinguishing;
      }
      verdict.witness = out.str();
      break;
    }
    if (vars.empty()) break;
    std::size_t pos = 0;
    while (pos < vars.size() && ++pick[pos] == closed.members.size()) pick[pos++] = 0;
    if (pos == vars.size()) break;
  }
  if (verdict.verdict != LiftVerdict::V::Unrelated && truncated) {
    verdict.verdict = LiftVerdict::V::Unknown;
  }
  std::ostringstream cov;
  cov << tried << " valuation(s) into the " << closed.members.size()
      << "-member transition-closed family";
  if (truncated) cov << "; some explorations truncated";
  verdict.coverage = cov.str();
  return verdict;
}

}  // namespace tsslab
