#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tsslab/engine.hpp"
#include "tsslab/graph.hpp"
#include "tsslab/semantics.hpp"

namespace tsslab {

struct EquivalenceKind {
  enum class Kind { Strong, Weak } kind = Kind::Strong;
  Name tau = "tau";  // silent action, used by the weak variant

  static EquivalenceKind strong() { return {Kind::Strong, "tau"}; }
  static EquivalenceKind weak(Name tau = "tau") { return {Kind::Weak, std::move(tau)}; }
  bool is_weak() const { return kind == Kind::Weak; }
  std::string describe() const { return is_weak() ? "weak-bisim(" + tau + ")" : "strong-bisim"; }
};

struct BisimResult {
  bool related = true;
  // Minimal-depth distinguishing HML formula holding at the left root only
  // (possibly negated), when unrelated.
  std::optional<std::string> distinguishing;
};

// Partition refinement on the disjoint union of both graphs.
BisimResult strong_bisim(const ProcessGraph& g, const ProcessGraph& h);

// tau-saturation (reflexive tau-closure, a-steps as tau*.a.tau*) followed by
// strong partition refinement.
bool weak_bisim(const ProcessGraph& g, const ProcessGraph& h, const Name& tau);

bool equivalent(const ProcessGraph& g, const ProcessGraph& h, const EquivalenceKind& kind);

// Quotient of the reachable part by bisimilarity; minimal among quotients
// equivalent to the input under the given kind.
ProcessGraph minimize(const ProcessGraph& g, const EquivalenceKind& kind);

ProcessGraph saturate_weak(const ProcessGraph& g, const Name& tau);

struct LiftVerdict {
  enum class V { Related, Unrelated, Unknown } verdict = V::Related;
  std::string witness;  // replayable description of the distinguishing instance
  std::optional<Subst> witness_subst;          // closed-instantiation lifting
  std::optional<GraphValuation> witness_valuation;  // graph-valuation lifting
  std::string coverage;  // enumerated domain; Related means related-on-this-domain

  bool related() const { return verdict == V::Related; }
  int exit_code() const {
    switch (verdict) {
      case V::Related: return 0;
      case V::Unrelated: return 1;
      case V::Unknown: return 2;
    }
    return 2;
  }
};

struct CiOptions {
  std::size_t depth = 4;                  // max depth of substituted closed terms
  std::size_t bound = 10000;              // state bound per meaning
  std::size_t max_instantiations = 5000;  // cap on enumerated substitutions
  std::size_t max_terms = 2000;           // cap on the closed-term pool
  SearchLimits limits{};
};

struct EnumeratedTerms {
  std::vector<Term> terms;
  bool complete = true;  // false when the cap cut the enumeration
};

// Closed terms over the signature up to the depth; recursion terms (guarded
// one-variable prefix loops) are included only when requested.
EnumeratedTerms enumerate_closed_terms(const Tss& tss, std::size_t max_depth,
                                       bool include_recursion, std::size_t cap = 2000);

// t ~ci u: compares closed instantiations over all enumerated substitutions.
// Unrelated is definitive (witness included); Related is evidence on the
// enumerated domain, described in `coverage`.
LiftVerdict lift_ci(const Tss& tss, const Term& t, const Term& u, const EquivalenceKind& kind,
                    CiOptions options = {});

// t ~pg u: compares process-graph meanings over all valuations into the
// transition closure of the family.
LiftVerdict lift_pg(const Tss& tss, const Term& t, const Term& u, const EquivalenceKind& kind,
                    const GraphFamily& family, PgOptions options = {});

}  // namespace tsslab
