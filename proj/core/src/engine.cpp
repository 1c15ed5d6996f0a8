#include "tsslab/engine.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include "tsslab/parse.hpp"

namespace tsslab {

unsigned Stratification::layer_of(const Term& t) const {
  unsigned total = 0;
  switch (t.kind()) {
    case TermKind::Var:
      return 0;
    case TermKind::App: {
      auto it = weights.find(t.symbol());
      if (it != weights.end()) total += it->second;
      for (const Term& a : t.args()) total += layer_of(a);
      return total;
    }
    case TermKind::Rec:
      for (const auto& [y, body] : t.rec_spec().bindings) {
        (void)y;
        total += layer_of(body);
      }
      return total;
  }
  return total;
}

std::string Stratification::describe() const {
  std::ostringstream out;
  out << "layer(t -a-> u) = weighted symbol count of t with weights {";
  bool first = true;
  for (const auto& [sym, w] : weights) {
    if (w == 0) continue;
    if (!first) out << ", ";
    first = false;
    out << sym << "=" << w;
  }
  out << "}; all other symbols weigh 0";
  return out.str();
}

namespace {

void count_symbols(const Term& t, std::map<Name, unsigned>& counts) {
  switch (t.kind()) {
    case TermKind::Var:
      return;
    case TermKind::App:
      counts[t.symbol()] += 1;
      for (const Term& a : t.args()) count_symbols(a, counts);
      return;
    case TermKind::Rec:
      for (const auto& [y, body] : t.rec_spec().bindings) {
        (void)y;
        count_symbols(body, counts);
      }
      return;
  }
}

void count_free_occurrences(const Term& t, std::set<Name> shadowed,
                            std::map<Name, unsigned>& counts) {
  switch (t.kind()) {
    case TermKind::Var:
      if (!shadowed.count(t.var_name())) counts[t.var_name()] += 1;
      return;
    case TermKind::App:
      for (const Term& a : t.args()) count_free_occurrences(a, shadowed, counts);
      return;
    case TermKind::Rec: {
      for (const auto& [y, body] : t.rec_spec().bindings) {
        (void)body;
        shadowed.insert(y);
      }
      for (const auto& [y, body] : t.rec_spec().bindings) {
        (void)y;
        count_free_occurrences(body, shadowed, counts);
      }
      return;
    }
  }
}

// For every closed instance, m(u[s]) <= m(src[s]) requires every variable to
// occur in u at most as often as in src (variable values can carry arbitrary
// weight once any symbol weight is nonzero).
bool occurrences_dominated(const Term& premise_source, const Term& conclusion_source) {
  std::map<Name, unsigned> in_premise;
  std::map<Name, unsigned> in_conclusion;
  count_free_occurrences(premise_source, {}, in_premise);
  count_free_occurrences(conclusion_source, {}, in_conclusion);
  for (const auto& [v, n] : in_premise) {
    auto it = in_conclusion.find(v);
    if (it == in_conclusion.end() || it->second < n) return false;
  }
  return true;
}

long weighted(const std::map<Name, unsigned>& counts, const std::map<Name, unsigned>& weights) {
  long total = 0;
  for (const auto& [sym, n] : counts) {
    auto it = weights.find(sym);
    if (it != weights.end()) total += static_cast<long>(n) * it->second;
  }
  return total;
}

}  // namespace

std::optional<Stratification> stratify(const Tss& tss) {
  std::vector<TransitionRule> rules = expand_schemas(tss);
  bool has_negative = false;
  for (const TransitionRule& r : rules) {
    for (const Literal& p : r.premises) {
      if (!p.positive) has_negative = true;
    }
  }
  if (!has_negative) return Stratification{};

  // Weights only on symbols that occur in a rule with a negative premise.
  std::set<Name> relevant;
  for (const TransitionRule& r : rules) {
    bool negated = false;
    for (const Literal& p : r.premises) negated |= !p.positive;
    if (!negated) continue;
    std::map<Name, unsigned> counts;
    count_symbols(r.conclusion.source, counts);
    for (const Literal& p : r.premises) count_symbols(p.source, counts);
    for (const auto& [sym, n] : counts) {
      (void)n;
      relevant.insert(sym);
    }
  }
  std::vector<Name> symbols(relevant.begin(), relevant.end());
  if (symbols.size() > 20) symbols.resize(20);

  auto feasible = [&rules](const Stratification& candidate) {
    for (const TransitionRule& r : rules) {
      std::map<Name, unsigned> concl_counts;
      count_symbols(r.conclusion.source, concl_counts);
      long concl = weighted(concl_counts, candidate.weights);
      for (const Literal& p : r.premises) {
        if (!occurrences_dominated(p.source, r.conclusion.source)) return false;
        std::map<Name, unsigned> prem_counts;
        count_symbols(p.source, prem_counts);
        long prem = weighted(prem_counts, candidate.weights);
        if (p.positive ? prem > concl : prem >= concl) return false;
      }
    }
    return true;
  };

  // Weight vectors in order of increasing total weight: small relevant sets
  // get weights up to 3 (enough for nested negation levels), larger ones {0,1}.
  const unsigned max_weight = symbols.size() <= 8 ? 3 : 1;
  std::uint64_t combos = 1;
  for (std::size_t i = 0; i < symbols.size(); ++i) combos *= max_weight + 1;
  std::vector<std::pair<unsigned, std::uint64_t>> order;
  for (std::uint64_t code = 1; code < combos; ++code) {
    unsigned total = 0;
    std::uint64_t rest = code;
    for (std::size_t i = 0; i < symbols.size(); ++i) {
      total += rest % (max_weight + 1);
      rest /= max_weight + 1;
    }
    order.push_back({total, code});
  }
  std::sort(order.begin(), order.end());

  for (const auto& [total, code] : order) {
    (void)total;
    Stratification candidate;
    std::uint64_t rest = code;
    for (std::size_t i = 0; i < symbols.size(); ++i) {
      unsigned w = rest % (max_weight + 1);
      rest /= max_weight + 1;
      if (w) candidate.weights[symbols[i]] = w;
    }
    if (feasible(candidate)) return candidate;
  }
  return std::nullopt;
}

namespace {

struct PreparedRule {
  std::size_t rule_index = 0;
  std::vector<std::size_t> premise_order;
  // Per ordered premise: source variables not determined by matching,
  // instantiated by enumerating the ground constant universe.
  std::vector<std::vector<Name>> universe_vars;
  std::vector<Name> conclusion_universe_vars;
};

std::optional<Subst> match_term(const Term& pattern, const Term& value, Subst sigma) {
  switch (pattern.kind()) {
    case TermKind::Var: {
      if (const Term* bound = sigma.find(pattern.var_name())) {
        if (!alpha_eq(*bound, value)) return std::nullopt;
        return sigma;
      }
      sigma.set(pattern.var_name(), value);
      return sigma;
    }
    case TermKind::App: {
      if (!value.is_app() || value.symbol() != pattern.symbol() ||
          value.args().size() != pattern.args().size()) {
        return std::nullopt;
      }
      for (std::size_t i = 0; i < pattern.args().size(); ++i) {
        auto next = match_term(pattern.args()[i], value.args()[i], std::move(sigma));
        if (!next) return std::nullopt;
        sigma = std::move(*next);
      }
      return sigma;
    }
    case TermKind::Rec: {
      Term grounded = pattern;
      if (!pattern.free_vars().empty()) {
        Subst restricted;
        for (const Name& v : pattern.free_vars()) {
          const Term* bound = sigma.find(v);
          if (!bound) {
            throw UnboundRuleVariable(
                "recursion patterns with unmatched variables are not supported");
          }
          restricted.set(v, *bound);
        }
        grounded = substitute(pattern, restricted);
      }
      if (!alpha_eq(grounded, value)) return std::nullopt;
      return sigma;
    }
  }
  return std::nullopt;
}

}  // namespace

struct DerivationEngine::Impl {
  Tss tss;
  SearchLimits limits;
  std::vector<TransitionRule> rules;  // schema-expanded
  std::vector<PreparedRule> prepared;
  std::map<Name, std::vector<std::size_t>> rules_by_label;
  std::vector<Term> universe;  // ground constant terms, sorted by symbol
  std::optional<Stratification> strat;

  struct Fact {
    Term target;
    ProofTree proof;
  };
  struct GoalState {
    std::map<std::string, Fact> facts;
    bool saturated = false;
  };
  std::map<std::string, GoalState> memo;
  std::size_t total_facts = 0;

  Impl(Tss t, SearchLimits lim) : tss(std::move(t)), limits(lim) {
    validate(tss);
    rules = expand_schemas(tss);
    bool needs_universe = false;
    for (std::size_t i = 0; i < rules.size(); ++i) {
      prepared.push_back(prepare(i, needs_universe));
      rules_by_label[rules[i].conclusion.label].push_back(i);
    }
    if (needs_universe) {
      for (const auto& [sym, arity] : tss.signature.declarations()) {
        (void)sym;
        if (arity > 0) {
          throw UnboundRuleVariable(
              "a rule requires guessing a term for a variable not determined by matching, "
              "and the closed-term universe is infinite (signature has non-constant symbols)");
        }
      }
    }
    for (const auto& [sym, arity] : tss.signature.declarations()) {
      if (arity == 0) universe.push_back(Term::app(sym));
    }
    bool has_negative = false;
    for (const TransitionRule& r : rules) {
      for (const Literal& p : r.premises) has_negative |= !p.positive;
    }
    if (has_negative) {
      strat = stratify(tss);
      if (!strat) {
        throw NonStratified("the TSS has negative premises and no stratification was found");
      }
    }
  }

  PreparedRule prepare(std::size_t index, bool& needs_universe) {
    const TransitionRule& rule = rules[index];
    PreparedRule prep;
    prep.rule_index = index;
    std::set<Name> bound = rule.conclusion.source.free_vars();
    std::vector<bool> used(rule.premises.size(), false);
    for (std::size_t placed = 0; placed < rule.premises.size(); ++placed) {
      int pick = -1;
      for (std::size_t i = 0; i < rule.premises.size(); ++i) {
        if (used[i]) continue;
        const std::set<Name>& src = rule.premises[i].source.free_vars();
        if (std::includes(bound.begin(), bound.end(), src.begin(), src.end())) {
          pick = static_cast<int>(i);
          break;
        }
      }
      std::vector<Name> unbound;
      if (pick < 0) {
        std::size_t best_missing = SIZE_MAX;
        for (std::size_t i = 0; i < rule.premises.size(); ++i) {
          if (used[i]) continue;
          std::size_t missing = 0;
          for (const Name& v : rule.premises[i].source.free_vars()) missing += !bound.count(v);
          if (missing < best_missing) {
            best_missing = missing;
            pick = static_cast<int>(i);
          }
        }
        for (const Name& v : rule.premises[pick].source.free_vars()) {
          if (!bound.count(v)) unbound.push_back(v);
        }
        needs_universe = true;
      }
      used[pick] = true;
      prep.premise_order.push_back(pick);
      prep.universe_vars.push_back(unbound);
      for (const Name& v : unbound) bound.insert(v);
      const Literal& premise = rule.premises[pick];
      if (premise.positive) {
        bound.insert(premise.target->free_vars().begin(), premise.target->free_vars().end());
      }
    }
    for (const Name& v : rule.conclusion.target->free_vars()) {
      if (!bound.count(v)) {
        prep.conclusion_universe_vars.push_back(v);
        needs_universe = true;
      }
    }
    if (prep.conclusion_universe_vars.size() > 4) {
      throw UnboundRuleVariable("too many rule variables require universe enumeration");
    }
    return prep;
  }

  static std::string goal_key(const Term& p, const Name& action) {
    return canonical_key(p) + '\x1f' + action;
  }

  void add_fact(GoalState& state, const Term& target, ProofTree proof) {
    std::string key = canonical_key(target);
    if (state.facts.count(key)) return;
    if (++total_facts > limits.max_facts) {
      throw SearchBudgetExceeded("proof search exceeded the fact budget (" +
                                 std::to_string(limits.max_facts) + ")");
    }
    state.facts.emplace(std::move(key), Fact{target, std::move(proof)});
  }

  // Fully saturates the goal: afterwards its facts are exactly the provable
  // transitions. Runs rounds of memoized expansion to a global fixpoint.
  GoalState& saturate(const Term& p, const Name& action, std::size_t depth) {
    std::string key = goal_key(p, action);
    if (memo[key].saturated) return memo[key];
    std::set<std::string> visited;
    while (true) {
      std::size_t before = total_facts;
      visited.clear();
      expand(p, action, depth, visited);
      if (total_facts == before) break;
    }
    for (const std::string& k : visited) memo[k].saturated = true;
    return memo[key];
  }

  // One expansion pass for the goal within the current round: applies every
  // rule once, reading subgoal facts accumulated so far.
  void expand(const Term& p, const Name& action, std::size_t depth,
              std::set<std::string>& visited) {
    std::string key = goal_key(p, action);
    GoalState& state = memo[key];
    if (state.saturated || visited.count(key)) return;
    if (depth > limits.max_depth) {
      throw SearchBudgetExceeded("proof search exceeded the depth bound (" +
                                 std::to_string(limits.max_depth) + ")");
    }
    visited.insert(key);

    if (p.is_rec() && tss.recursion_unfolding) {
      const Term& body = p.rec_spec().bindings.at(p.rec_var());
      Term unfolded = unfold_abbrev(p.rec_spec(), body);
      expand(unfolded, action, depth + 1, visited);
      GoalState& sub = memo[goal_key(unfolded, action)];
      std::vector<Fact> snapshot;
      for (const auto& [k, fact] : sub.facts) {
        (void)k;
        snapshot.push_back(fact);
      }
      for (const Fact& fact : snapshot) {
        ProofTree proof;
        proof.root = Literal::pos(p, action, fact.target);
        proof.children.push_back(fact.proof);
        proof.rule = RuleApplication{0, {}, true};
        add_fact(state, fact.target, std::move(proof));
      }
    }

    auto it = rules_by_label.find(action);
    if (it == rules_by_label.end()) return;
    for (std::size_t rule_idx : it->second) {
      auto sigma = match_term(rules[rule_idx].conclusion.source, p, {});
      if (!sigma) continue;
      std::vector<ProofTree> children;
      solve_premises(p, action, rule_idx, 0, *sigma, children, depth, visited);
    }
  }

  void solve_premises(const Term& p, const Name& action, std::size_t rule_idx,
                      std::size_t position, const Subst& sigma, std::vector<ProofTree>& children,
                      std::size_t depth, std::set<std::string>& visited) {
    const TransitionRule& rule = rules[rule_idx];
    const PreparedRule& prep = prepared[rule_idx];
    if (position == prep.premise_order.size()) {
      conclude(p, action, rule_idx, sigma, children);
      return;
    }
    const Literal& premise = rule.premises[prep.premise_order[position]];
    enumerate_universe(prep.universe_vars[position], sigma, [&](const Subst& sigma1) {
      Term source = substitute(premise.source, sigma1);
      if (premise.positive) {
        expand(source, premise.label, depth + 1, visited);
        GoalState& sub = memo[goal_key(source, premise.label)];
        std::vector<Fact> snapshot;
        for (const auto& [k, fact] : sub.facts) {
          (void)k;
          snapshot.push_back(fact);
        }
        for (const Fact& fact : snapshot) {
          auto sigma2 = match_term(*premise.target, fact.target, sigma1);
          if (!sigma2) continue;
          children.push_back(fact.proof);
          solve_premises(p, action, rule_idx, position + 1, *sigma2, children, depth, visited);
          children.pop_back();
        }
      } else {
        // Strictly lower stratum: safe to saturate fully before reading.
        GoalState& sub = saturate(source, premise.label, depth + 1);
        if (!sub.facts.empty()) return;
        ProofTree leaf;
        leaf.root = Literal::neg(source, premise.label);
        children.push_back(std::move(leaf));
        solve_premises(p, action, rule_idx, position + 1, sigma1, children, depth, visited);
        children.pop_back();
      }
    });
  }

  void conclude(const Term& p, const Name& action, std::size_t rule_idx, const Subst& sigma,
                const std::vector<ProofTree>& children) {
    const TransitionRule& rule = rules[rule_idx];
    const PreparedRule& prep = prepared[rule_idx];
    enumerate_universe(prep.conclusion_universe_vars, sigma, [&](const Subst& full) {
      Term target = substitute(*rule.conclusion.target, full);
      ProofTree proof;
      proof.root = Literal::pos(p, action, target);
      proof.children = children;
      proof.rule = RuleApplication{rule_idx, full, false};
      add_fact(memo[goal_key(p, action)], target, std::move(proof));
    });
  }

  template <typename Fn>
  void enumerate_universe(const std::vector<Name>& vars, const Subst& sigma, const Fn& fn,
                          std::size_t pos = 0) {
    if (pos == vars.size()) {
      fn(sigma);
      return;
    }
    for (const Term& candidate : universe) {
      Subst extended = sigma;
      extended.set(vars[pos], candidate);
      enumerate_universe(vars, extended, fn, pos + 1);
    }
  }
};

DerivationEngine::DerivationEngine(Tss tss, SearchLimits limits)
    : impl_(std::make_unique<Impl>(std::move(tss), limits)) {}
DerivationEngine::~DerivationEngine() = default;
DerivationEngine::DerivationEngine(DerivationEngine&&) noexcept = default;
DerivationEngine& DerivationEngine::operator=(DerivationEngine&&) noexcept = default;

std::vector<Transition> DerivationEngine::transitions(const Term& p, const Name& action) {
  if (!p.is_closed()) throw Error("derive_transitions requires a closed term");
  check_well_formed(p, impl_->tss.signature);
  if (impl_->tss.actions.count(action) == 0) {
    throw Error("action '" + action + "' is not declared by the TSS");
  }
  Impl::GoalState& state = impl_->saturate(p, action, 0);
  std::vector<Transition> out;
  for (const auto& [key, fact] : state.facts) {
    (void)key;
    out.push_back(Transition{action, fact.target, fact.proof});
  }
  return out;
}

std::vector<Transition> DerivationEngine::transitions(const Term& p) {
  std::vector<Transition> out;
  for (const Name& action : impl_->tss.actions) {
    std::vector<Transition> more = transitions(p, action);
    out.insert(out.end(), more.begin(), more.end());
  }
  return out;
}

bool DerivationEngine::refuses(const Term& p, const Name& action) {
  return transitions(p, action).empty();
}

const Tss& DerivationEngine::tss() const { return impl_->tss; }
const std::vector<TransitionRule>& DerivationEngine::expanded_rules() const {
  return impl_->rules;
}

std::vector<Transition> derive_transitions(const Tss& tss, const Term& p, SearchLimits limits) {
  DerivationEngine engine(tss, limits);
  return engine.transitions(p);
}

std::vector<CompletenessEntry> completeness_check(const Tss& tss, const std::vector<Term>& sample,
                                                  SearchLimits limits) {
  DerivationEngine engine(tss, limits);
  std::vector<CompletenessEntry> out;
  for (const Term& p : sample) {
    for (const Name& action : tss.actions) {
      CompletenessVerdict verdict = engine.transitions(p, action).empty()
                                        ? CompletenessVerdict::Refusal
                                        : CompletenessVerdict::Transition;
      out.push_back(CompletenessEntry{p, action, verdict});
    }
  }
  return out;
}

Lts specified_lts(const Tss& tss, const std::vector<Term>& roots, std::size_t bound,
                  SearchLimits limits) {
  DerivationEngine engine(tss, limits);
  Lts out;
  out.actions = tss.actions;
  std::map<std::string, std::string> display;  // canonical key -> state id
  std::deque<Term> frontier;
  auto admit = [&](const Term& t) -> const std::string* {
    std::string key = canonical_key(t);
    auto it = display.find(key);
    if (it != display.end()) return &it->second;
    if (display.size() >= bound) {
      out.truncated = true;
      return nullptr;
    }
    auto [pos, inserted] = display.emplace(std::move(key), serialize_term(t));
    (void)inserted;
    out.states.insert(pos->second);
    frontier.push_back(t);
    return &pos->second;
  };
  for (const Term& root : roots) {
    if (!root.is_closed()) throw Error("specified_lts requires closed roots");
    admit(root);
  }
  while (!frontier.empty()) {
    Term p = frontier.front();
    frontier.pop_front();
    const std::string& from = display.at(canonical_key(p));
    for (const Transition& t : engine.transitions(p)) {
      const std::string* to = admit(t.target);
      if (to) out.edges.insert(Edge{from, t.action, *to});
    }
  }
  return out;
}

}  // namespace tsslab
