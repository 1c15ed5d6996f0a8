#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tsslab/graph.hpp"
#include "tsslab/tss.hpp"

namespace tsslab {

struct SearchLimits {
  std::size_t max_depth = 64;       // goal nesting depth
  std::size_t max_facts = 200000;   // total derived transitions across all goals
};

struct RuleApplication {
  std::size_t rule_index = 0;  // index into the engine's expanded rule list
  Subst sigma;
  bool via_unfolding = false;
};

// Well-founded witness for a derived literal. Positive internal nodes are
// substitution instances of a rule; negative leaves record refusals
// established by stratified saturation.
struct ProofTree {
  Literal root;
  std::vector<ProofTree> children;
  std::optional<RuleApplication> rule;
};

struct Transition {
  Name action;
  Term target;
  ProofTree proof;
};

// A stratification presented as nonnegative symbol weights; the layer of a
// literal is the weighted symbol count of its source term. Every rule's
// negative premises sit strictly below its conclusion and positive premises
// non-strictly below, for all closed instances.
struct Stratification {
  std::map<Name, unsigned> weights;

  unsigned layer_of(const Term& t) const;
  std::string describe() const;
};

std::optional<Stratification> stratify(const Tss& tss);

// Goal-directed derivation of provable closed literals, with memoization per
// (term, action) goal, saturation to a least fixpoint, and stratified
// evaluation of negative premises. The memo table persists across queries.
// An engine instance confines all mutable state; distinct instances may be
// used from different threads concurrently.
class DerivationEngine {
 public:
  explicit DerivationEngine(Tss tss, SearchLimits limits = {});
  ~DerivationEngine();
  DerivationEngine(DerivationEngine&&) noexcept;
  DerivationEngine& operator=(DerivationEngine&&) noexcept;

  // All (a, p') with p -a-> p' provable, each with one witness proof.
  // Targets are deduplicated up to alpha-equivalence.
  std::vector<Transition> transitions(const Term& p);
  std::vector<Transition> transitions(const Term& p, const Name& action);
  bool refuses(const Term& p, const Name& action);

  const Tss& tss() const;
  const std::vector<TransitionRule>& expanded_rules() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::vector<Transition> derive_transitions(const Tss& tss, const Term& p,
                                           SearchLimits limits = {});

enum class CompletenessVerdict { Transition, Refusal, Undetermined };

struct CompletenessEntry {
  Term term;
  Name action;
  CompletenessVerdict verdict;
};

// Verdict per (term, action) over the sample; for a stratified TSS the
// Undetermined verdict does not occur.
std::vector<CompletenessEntry> completeness_check(const Tss& tss, const std::vector<Term>& sample,
                                                  SearchLimits limits = {});

// Breadth-first exploration from the roots up to `bound` distinct states
// (alpha-equivalence classes). Edges into unexplored states are dropped and
// the result is flagged truncated when the frontier was nonempty at the bound.
Lts specified_lts(const Tss& tss, const std::vector<Term>& roots, std::size_t bound,
                  SearchLimits limits = {});

}  // namespace tsslab
