#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tsslab/term.hpp"

namespace tsslab {

// A positive literal t -a-> t' or a negative literal t -/a-> (no target).
struct Literal {
  bool positive = true;
  Term source = Term::var("_");
  Name label;
  std::optional<Term> target;

  static Literal pos(Term source, Name label, Term target) {
    return Literal{true, std::move(source), std::move(label), std::move(target)};
  }
  static Literal neg(Term source, Name label) {
    return Literal{false, std::move(source), std::move(label), std::nullopt};
  }

  bool operator==(const Literal& other) const {
    return positive == other.positive && source == other.source && label == other.label &&
           target == other.target;
  }
};

// "forall a in {a1,...,ak}:" — the metavariable may appear only as a label.
struct ActionSchema {
  Name metavar;
  std::vector<Name> range;

  bool operator==(const ActionSchema& other) const {
    return metavar == other.metavar && range == other.range;
  }
};

struct TransitionRule {
  std::vector<Literal> premises;
  Literal conclusion;
  std::optional<ActionSchema> schema;

  bool operator==(const TransitionRule& other) const {
    return premises == other.premises && conclusion == other.conclusion &&
           schema == other.schema;
  }
};

// Free variables occurring anywhere in the rule's literals.
std::set<Name> rule_vars(const TransitionRule& rule);

struct Tss {
  std::string name;
  Signature signature;
  std::set<Name> actions;
  std::vector<TransitionRule> rules;
  // When set, rec X { S } inherits the transitions of its unfolding <S_X|S>.
  bool recursion_unfolding = false;

  bool same_content(const Tss& other) const;
};

// Well-formedness: rule terms over the signature, conclusions positive,
// labels declared or bound by the rule's schema, schema ranges declared,
// schema metavariables not used as term variables. Throws on violation.
void validate(const Tss& tss);

// Rules with schemas replaced by one concrete rule per action in the range.
std::vector<TransitionRule> expand_schemas(const Tss& tss);

// Componentwise union; requires disjoint signatures and equal action sets.
Tss tss_sum(const Tss& p, const Tss& q);

}  // namespace tsslab
