#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tsslab/engine.hpp"
#include "tsslab/graph.hpp"

namespace tsslab {

// Valuation into closed terms. Querying an unmapped variable is an error.
struct ClosedValuation {
  std::map<Name, Term> mapping;

  const Term& at(const Name& var) const;
  Subst as_subst() const;
};

// Valuation into process graphs, restricted to the relevant variables.
struct GraphValuation {
  std::map<Name, ProcessGraph> mapping;
};

struct PgOptions {
  std::size_t bound = 10000;
  SearchLimits limits{};
  // Adequacy probing for non-pure TSSs: enlargements with random graphs.
  bool run_probes = true;
  std::size_t probe_count = 20;
  std::size_t probe_max_states = 5;
  std::uint64_t seed = 1;
};

struct AdequacyStatus {
  enum class Kind { PureHenceManifest, VerifiedUpTo } kind = Kind::PureHenceManifest;
  std::vector<std::string> probes;  // descriptions of the enlargements checked

  std::string describe() const;
};

// The process-graph meaning of a term under a graph valuation: the reachable
// behaviour of t[rho] in the TSS extended with the family as constants.
struct PgMeaning {
  ProcessGraph graph;
  GraphFamily family_used;
  AdequacyStatus adequacy;
};

// Reachable part of the specified LTS rooted at the closed term p, explored
// to `bound` states. States are named by their serialized terms.
ProcessGraph closed_meaning(const Tss& tss, const Term& p, std::size_t bound = 10000,
                            SearchLimits limits = {});

// Same, reusing an existing engine (and its derivation memo) across calls.
ProcessGraph closed_meaning(DerivationEngine& engine, const Term& p, std::size_t bound = 10000);

// The closed-term semantics of an open term: the substitution instance t[rho].
Term closed_term_meaning(const Tss& tss, const Term& t, const ClosedValuation& rho);

struct PurityReport {
  bool pure = true;
  // rule index (into tss.rules) -> free rule variables that are not rule-bound
  std::map<std::size_t, std::set<Name>> offending;

  std::string describe(const Tss& tss) const;
};

// Def-level purity: every free rule variable reachable from the conclusion
// source through positive premise chaining.
PurityReport is_pure(const Tss& tss);

// Requires rho to cover the free variables of t. For non-pure TSSs the
// default probes may throw NonAdequate when an enlargement changes the result.
PgMeaning pg_meaning(const Tss& tss, const Term& t, const GraphValuation& rho,
                     const GraphFamily& base_family, PgOptions options = {});

struct ProbeOutcome {
  bool pass = true;
  std::string counterexample;  // first enlargement that changes the result
};

// Falsification-only: recomputes the meaning under each enlargement (a
// transition-closed superset of igstar) and compares graphs structurally
// under the canonical constant naming. A pass is not a proof of adequacy
// unless the TSS is pure.
ProbeOutcome adequacy_probe(const Tss& tss, const Term& t, const GraphValuation& rho,
                            const GraphFamily& igstar,
                            const std::vector<GraphFamily>& enlargements,
                            PgOptions options = {});

// Random graphs over the action set, for probe enlargements and sampling.
GraphFamily random_graph_family(const std::set<Name>& actions, std::size_t count,
                                std::size_t max_states, std::uint64_t seed);

}  // namespace tsslab
