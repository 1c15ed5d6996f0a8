#include "tsslab/semantics.hpp"

#include <deque>
#include <random>
#include <sstream>

#include "tsslab/parse.hpp"

namespace tsslab {

const Term& ClosedValuation::at(const Name& var) const {
  auto it = mapping.find(var);
  if (it == mapping.end()) {
    throw UnmappedFreeVariable("valuation does not map variable '" + var + "'");
  }
  return it->second;
}

Subst ClosedValuation::as_subst() const {
  Subst sigma;
  for (const auto& [v, t] : mapping) sigma.set(v, t);
  return sigma;
}

std::string AdequacyStatus::describe() const {
  if (kind == Kind::PureHenceManifest) return "pure TSS: adequacy is manifest";
  std::ostringstream out;
  out << "non-pure TSS: not falsified by " << probes.size() << " probed enlargement(s)";
  return out.str();
}

ProcessGraph closed_meaning(DerivationEngine& engine, const Term& p, std::size_t bound) {
  if (!p.is_closed()) throw Error("closed_meaning requires a closed term");
  if (bound == 0) throw Error("state bound must be positive");
  ProcessGraph g;
  g.actions = engine.tss().actions;
  std::map<std::string, std::string> display;  // canonical key -> state id
  std::deque<Term> frontier;
  auto admit = [&](const Term& t) -> const std::string* {
    std::string key = canonical_key(t);
    auto it = display.find(key);
    if (it != display.end()) return &it->second;
    if (display.size() >= bound) {
      g.truncated = true;
      return nullptr;
    }
    auto [pos, inserted] = display.emplace(std::move(key), serialize_term(t));
    (void)inserted;
    g.states.insert(pos->second);
    frontier.push_back(t);
    return &pos->second;
  };
  g.root = *admit(p);
  while (!frontier.empty()) {
    Term q = frontier.front();
    frontier.pop_front();
    const std::string& from = display.at(canonical_key(q));
    for (const Transition& t : engine.transitions(q)) {
      const std::string* to = admit(t.target);
      if (to) g.edges.insert(Edge{from, t.action, *to});
    }
  }
  return g;
}

ProcessGraph closed_meaning(const Tss& tss, const Term& p, std::size_t bound,
                            SearchLimits limits) {
  DerivationEngine engine(tss, limits);
  return closed_meaning(engine, p, bound);
}

Term closed_term_meaning(const Tss& tss, const Term& t, const ClosedValuation& rho) {
  Subst sigma;
  for (const Name& v : t.free_vars()) {
    const Term& image = rho.at(v);
    if (!image.is_closed()) throw Error("valuation image for '" + v + "' is not closed");
    check_well_formed(image, tss.signature);
    sigma.set(v, image);
  }
  return substitute(t, sigma);
}

PurityReport is_pure(const Tss& tss) {
  PurityReport report;
  for (std::size_t i = 0; i < tss.rules.size(); ++i) {
    const TransitionRule& rule = tss.rules[i];
    std::set<Name> bound = rule.conclusion.source.free_vars();
    bool grew = true;
    while (grew) {
      grew = false;
      for (const Literal& premise : rule.premises) {
        if (!premise.positive) continue;
        const std::set<Name>& src = premise.source.free_vars();
        if (!std::includes(bound.begin(), bound.end(), src.begin(), src.end())) continue;
        for (const Name& v : premise.target->free_vars()) {
          grew |= bound.insert(v).second;
        }
      }
    }
    std::set<Name> unbound;
    for (const Name& v : rule_vars(rule)) {
      if (!bound.count(v)) unbound.insert(v);
    }
    if (!unbound.empty()) {
      report.pure = false;
      report.offending.emplace(i, std::move(unbound));
    }
  }
  return report;
}

std::string PurityReport::describe(const Tss& tss) const {
  if (pure) return "pure";
  std::ostringstream out;
  out << "not pure:";
  for (const auto& [index, vars] : offending) {
    out << "\n  rule `" << serialize_rule(tss.rules[index]) << "`: free variables not rule-bound:";
    for (const Name& v : vars) out << " " << v;
  }
  return out.str();
}

namespace {

// Instantiates t with the graph constants of rho's images and evaluates the
// closed meaning in the embedded TSS.
ProcessGraph meaning_in_family(const Tss& tss, const Term& t, const GraphValuation& rho,
                               const GraphFamily& closed_family, const PgOptions& options) {
  Tss extended = embed(tss, closed_family);
  Subst sigma;
  for (const Name& v : t.free_vars()) {
    auto it = rho.mapping.find(v);
    if (it == rho.mapping.end()) {
      throw UnmappedFreeVariable("graph valuation does not map free variable '" + v + "'");
    }
    sigma.set(v, Term::app(graph_constant_name(it->second)));
  }
  return closed_meaning(extended, substitute(t, sigma), options.bound, options.limits);
}

GraphFamily family_with_valuation(const GraphFamily& base, const GraphValuation& rho,
                                  const Term& t) {
  GraphFamily family = base;
  for (const Name& v : t.free_vars()) {
    auto it = rho.mapping.find(v);
    if (it == rho.mapping.end()) {
      throw UnmappedFreeVariable("graph valuation does not map free variable '" + v + "'");
    }
    family.add(it->second);
  }
  return transition_closure(family);
}

}  // namespace

GraphFamily random_graph_family(const std::set<Name>& actions, std::size_t count,
                                std::size_t max_states, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Name> labels(actions.begin(), actions.end());
  GraphFamily family;
  for (std::size_t i = 0; i < count; ++i) {
    ProcessGraph g;
    g.name = "rnd" + std::to_string(i);
    g.actions = actions;
    std::size_t n = 1 + rng() % max_states;
    for (std::size_t s = 0; s < n; ++s) g.states.insert("s" + std::to_string(s));
    g.root = "s0";
    if (!labels.empty()) {
      std::size_t edge_count = rng() % (2 * n + 1);
      for (std::size_t e = 0; e < edge_count; ++e) {
        std::string from = "s" + std::to_string(rng() % n);
        std::string to = "s" + std::to_string(rng() % n);
        g.edges.insert(Edge{from, labels[rng() % labels.size()], to});
      }
    }
    family.add(std::move(g));
  }
  return family;
}

ProbeOutcome adequacy_probe(const Tss& tss, const Term& t, const GraphValuation& rho,
                            const GraphFamily& igstar,
                            const std::vector<GraphFamily>& enlargements, PgOptions options) {
  GraphFamily base = transition_closure(family_with_valuation(igstar, rho, t));
  ProcessGraph reference = meaning_in_family(tss, t, rho, base, options);
  ProbeOutcome outcome;
  for (std::size_t i = 0; i < enlargements.size(); ++i) {
    GraphFamily larger = transition_closure(enlargements[i]);
    for (const ProcessGraph& g : base.members) {
      if (!larger.contains(g)) {
        throw Error("probe enlargement is not a superset of the base family");
      }
    }
    ProcessGraph probed = meaning_in_family(tss, t, rho, larger, options);
    if (!probed.same_graph(reference)) {
      outcome.pass = false;
      std::ostringstream out;
      out << "enlargement #" << i << " changes the interpretation of "
          << serialize_term(t) << ": ";
      bool explained = false;
      for (const Edge& e : probed.edges) {
        if (!reference.edges.count(e)) {
          out << "it gains the transition " << e.from << " -" << e.label << "-> " << e.to;
          explained = true;
          break;
        }
      }
      if (!explained) {
        for (const Edge& e : reference.edges) {
          if (!probed.edges.count(e)) {
            out << "it loses the transition " << e.from << " -" << e.label << "-> " << e.to;
            explained = true;
            break;
          }
        }
      }
      if (!explained) out << "the state sets differ";
      outcome.counterexample = out.str();
      return outcome;
    }
  }
  return outcome;
}

PgMeaning pg_meaning(const Tss& tss, const Term& t, const GraphValuation& rho,
                     const GraphFamily& base_family, PgOptions options) {
  PgMeaning result;
  result.family_used = transition_closure(family_with_valuation(base_family, rho, t));
  result.graph = meaning_in_family(tss, t, rho, result.family_used, options);
  PurityReport purity = is_pure(tss);
  if (purity.pure) {
    result.adequacy.kind = AdequacyStatus::Kind::PureHenceManifest;
    return result;
  }
  result.adequacy.kind = AdequacyStatus::Kind::VerifiedUpTo;
  if (options.run_probes) {
    GraphFamily random = random_graph_family(tss.actions, options.probe_count,
                                             options.probe_max_states, options.seed);
    std::vector<GraphFamily> enlargements;
    for (const ProcessGraph& g : random.members) {
      GraphFamily enlarged = result.family_used;
      enlarged.add(g);
      enlargements.push_back(transition_closure(enlarged));
      result.adequacy.probes.push_back("base family plus random graph '" + g.name + "'");
    }
    ProbeOutcome outcome = adequacy_probe(tss, t, rho, result.family_used, enlargements, options);
    if (!outcome.pass) {
      throw NonAdequate("the TSS does not induce a stable process-graph meaning for " +
                        serialize_term(t) + ": " + outcome.counterexample);
    }
  }
  return result;
}

}  // namespace tsslab
