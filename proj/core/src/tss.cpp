#include "tsslab/tss.hpp"

#include <algorithm>

namespace tsslab {

std::set<Name> rule_vars(const TransitionRule& rule) {
  std::set<Name> vars;
  auto add = [&vars](const Literal& lit) {
    vars.insert(lit.source.free_vars().begin(), lit.source.free_vars().end());
    if (lit.target) vars.insert(lit.target->free_vars().begin(), lit.target->free_vars().end());
  };
  for (const Literal& p : rule.premises) add(p);
  add(rule.conclusion);
  return vars;
}

namespace {

bool rule_set_equal(const std::vector<TransitionRule>& a, const std::vector<TransitionRule>& b) {
  if (a.size() != b.size()) return false;
  std::vector<bool> used(b.size(), false);
  for (const TransitionRule& r : a) {
    bool found = false;
    for (std::size_t i = 0; i < b.size(); ++i) {
      if (!used[i] && b[i] == r) {
        used[i] = true;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

}  // namespace

bool Tss::same_content(const Tss& other) const {
  return signature == other.signature && actions == other.actions &&
         recursion_unfolding == other.recursion_unfolding && rule_set_equal(rules, other.rules);
}

void validate(const Tss& tss) {
  for (const TransitionRule& rule : tss.rules) {
    if (!rule.conclusion.positive) throw Error("rule conclusion must be positive");
    std::set<Name> schema_labels;
    if (rule.schema) {
      if (rule.schema->range.empty()) throw Error("schema range must be nonempty");
      for (const Name& a : rule.schema->range) {
        if (tss.actions.count(a) == 0) {
          throw Error("schema action '" + a + "' is not a declared action");
        }
      }
      if (rule_vars(rule).count(rule.schema->metavar)) {
        throw Error("schema metavariable '" + rule.schema->metavar +
                    "' may appear only as a label");
      }
      schema_labels.insert(rule.schema->metavar);
    }
    auto check_literal = [&](const Literal& lit) {
      check_well_formed(lit.source, tss.signature);
      if (lit.target) check_well_formed(*lit.target, tss.signature);
      if (lit.positive && !lit.target) throw Error("positive literal requires a target");
      if (!lit.positive && lit.target) throw Error("negative literal carries no target");
      if (tss.actions.count(lit.label) == 0 && schema_labels.count(lit.label) == 0) {
        throw Error("label '" + lit.label + "' is not a declared action");
      }
    };
    for (const Literal& p : rule.premises) check_literal(p);
    check_literal(rule.conclusion);
  }
}

std::vector<TransitionRule> expand_schemas(const Tss& tss) {
  std::vector<TransitionRule> out;
  for (const TransitionRule& rule : tss.rules) {
    if (!rule.schema) {
      out.push_back(rule);
      continue;
    }
    for (const Name& action : rule.schema->range) {
      TransitionRule concrete;
      auto instantiate = [&](const Literal& lit) {
        Literal r = lit;
        if (r.label == rule.schema->metavar) r.label = action;
        return r;
      };
      for (const Literal& p : rule.premises) concrete.premises.push_back(instantiate(p));
      concrete.conclusion = instantiate(rule.conclusion);
      out.push_back(std::move(concrete));
    }
  }
  return out;
}

Tss tss_sum(const Tss& p, const Tss& q) {
  if (p.actions != q.actions) {
    throw Error("tss_sum requires equal action sets ('" + p.name + "' vs '" + q.name + "')");
  }
  Tss out;
  out.name = p.name.empty() ? q.name : (q.name.empty() ? p.name : p.name + "+" + q.name);
  out.signature = Signature::disjoint_union(p.signature, q.signature);
  out.actions = p.actions;
  out.rules = p.rules;
  out.rules.insert(out.rules.end(), q.rules.begin(), q.rules.end());
  out.recursion_unfolding = p.recursion_unfolding || q.recursion_unfolding;
  validate(out);
  return out;
}

}  // namespace tsslab
