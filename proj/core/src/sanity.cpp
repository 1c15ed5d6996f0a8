#include "tsslab/sanity.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include <json.hpp>

#include "tsslab/parse.hpp"

namespace tsslab {

std::string to_string(Requirement r) {
  switch (r) {
    case Requirement::Var1: return "variable-meaning (1)";
    case Requirement::CompOps2: return "compositionality/operators (2)";
    case Requirement::CompRec3: return "compositionality/recursion (3)";
    case Requirement::Alpha4: return "alpha-invariance (4)";
    case Requirement::Rdp5: return "recursive-definition-principle (5)";
    case Requirement::Congruence9: return "congruence (9)";
  }
  return "?";
}

std::string to_string(SemanticsChoice s) {
  return s == SemanticsChoice::ClosedTerm ? "closed-term" : "process-graph";
}

std::size_t CheckReport::checked_samples() const {
  std::size_t n = 0;
  for (const SampleRecord& r : records) n += !r.vacuous;
  return n;
}

std::string CheckReport::to_text() const {
  std::ostringstream out;
  out << "check " << to_string(requirement) << " under " << to_string(semantics)
      << " semantics, " << kind.describe() << ": " << (pass ? "pass-on-samples" : "FAIL") << "\n";
  out << "  sample space: " << sample_space << "\n";
  if (!syntactic_note.empty()) out << "  syntactic criterion: " << syntactic_note << "\n";
  out << "  samples: " << records.size() << " (" << checked_samples() << " non-vacuous)\n";
  if (!pass) out << "  witness: " << witness << "\n";
  return out.str();
}

std::string CheckReport::to_json() const {
  nlohmann::json j;
  j["requirement"] = to_string(requirement);
  j["semantics"] = to_string(semantics);
  j["equivalence"] = kind.describe();
  j["verdict"] = pass ? "pass-on-samples" : "fail";
  j["sample_space"] = sample_space;
  if (!syntactic_note.empty()) j["syntactic_criterion"] = syntactic_note;
  if (!pass) j["witness"] = witness;
  j["samples"] = nlohmann::json::array();
  for (const SampleRecord& r : records) {
    nlohmann::json jr;
    jr["requirement"] = to_string(requirement);
    jr["inputs"] = r.inputs;
    jr["verdict"] = r.vacuous ? "vacuous" : (r.pass ? "pass" : "fail");
    if (!r.note.empty()) jr["note"] = r.note;
    j["samples"].push_back(std::move(jr));
  }
  return j.dump(2);
}

namespace {

// Evaluates meanings of terms under either semantics, caching closed-term
// explorations in a shared engine.
class Evaluator {
 public:
  Evaluator(const Tss& tss, SemanticsChoice semantics, const SanityOptions& options)
      : tss_(tss), semantics_(semantics), options_(options) {
    if (semantics_ == SemanticsChoice::ClosedTerm) engine_.emplace(tss_, options_.limits);
  }

  bool is_ci() const { return semantics_ == SemanticsChoice::ClosedTerm; }

  const ProcessGraph& ci_meaning(const Term& p) {
    std::string key = canonical_key(p);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    ProcessGraph g = closed_meaning(*engine_, p, options_.bound);
    if (g.truncated) throw SearchBudgetExceeded("meaning exploration truncated");
    return cache_.emplace(std::move(key), std::move(g)).first->second;
  }

  ProcessGraph pg_meaning_of(const Term& t, const GraphValuation& rho) {
    PgOptions pg = options_.pg;
    pg.bound = options_.bound;
    pg.limits = options_.limits;
    PgMeaning m = pg_meaning(tss_, t, rho, options_.family, pg);
    if (m.graph.truncated) throw SearchBudgetExceeded("meaning exploration truncated");
    return std::move(m.graph);
  }

  // Meaning of a term under a valuation represented uniformly: ci valuations
  // substitute closed terms, pg valuations map into graphs.
  ProcessGraph meaning(const Term& t, const Subst& ci_val, const GraphValuation& pg_val) {
    if (is_ci()) return ci_meaning(substitute(t, ci_val));
    return pg_meaning_of(t, pg_val);
  }

 private:
  const Tss& tss_;
  SemanticsChoice semantics_;
  const SanityOptions& options_;
  std::optional<DerivationEngine> engine_;
  std::map<std::string, ProcessGraph> cache_;
};

std::string graph_label(const ProcessGraph& g) {
  return g.name.empty() ? graph_constant_name(g) : g.name;
}

std::string describe_graph_valuation(const GraphValuation& rho) {
  std::string out = "{";
  bool first = true;
  for (const auto& [v, g] : rho.mapping) {
    if (!first) out += ", ";
    first = false;
    out += v + " -> " + graph_label(g);
  }
  return out + "}";
}

std::string replay_graph_valuation(const GraphValuation& rho) {
  std::string out;
  for (const auto& [v, g] : rho.mapping) {
    out += v + " -> " + graph_label(g) + "\n" + serialize_graph(g);
  }
  return out;
}

// Values paired with an equivalent partner, used to instantiate the premises
// of the compositionality and congruence implications.
struct ValuePairs {
  // ci side: indices into pool
  std::vector<Term> pool;
  std::vector<std::pair<std::size_t, std::size_t>> ci_pairs;
  // pg side
  std::vector<std::pair<ProcessGraph, ProcessGraph>> pg_pairs;
  std::string description;
};

// Buckets closed terms by equivalence of their meanings and pairs members of
// a bucket; identical pairs pad the tail.
ValuePairs ci_value_pairs(const Tss& tss, Evaluator& eval, const EquivalenceKind& kind,
                          const SanityOptions& options) {
  ValuePairs out;
  EnumeratedTerms pool =
      enumerate_closed_terms(tss, options.ci_depth, tss.recursion_unfolding, options.max_terms);
  out.pool = pool.terms;
  std::vector<std::vector<std::size_t>> buckets;
  for (std::size_t i = 0; i < out.pool.size(); ++i) {
    const ProcessGraph& g = eval.ci_meaning(out.pool[i]);
    bool placed = false;
    for (auto& bucket : buckets) {
      if (equivalent(g, eval.ci_meaning(out.pool[bucket.front()]), kind)) {
        bucket.push_back(i);
        placed = true;
        break;
      }
    }
    if (!placed) buckets.push_back({i});
  }
  // Round-robin over buckets so early samples draw from many classes.
  std::size_t offset = 0;
  bool more = true;
  while (more && out.ci_pairs.size() < options.max_samples * 2) {
    more = false;
    for (const auto& bucket : buckets) {
      if (bucket.size() < 2 || offset + 1 >= bucket.size()) continue;
      more = true;
      for (std::size_t j = 0; j + offset + 1 < bucket.size() && j <= offset; ++j) {
        out.ci_pairs.push_back({bucket[j], bucket[j + offset + 1]});
      }
    }
    ++offset;
  }
  for (std::size_t i = 0; i < out.pool.size() && out.ci_pairs.size() < options.max_samples * 2;
       ++i) {
    out.ci_pairs.push_back({i, i});
  }
  std::ostringstream desc;
  desc << out.pool.size() << " closed terms of depth <= " << options.ci_depth << " in "
       << buckets.size() << " equivalence classes" << (pool.complete ? "" : " (pool capped)");
  out.description = desc.str();
  return out;
}

// Pairs of family members with equivalent values; for the weak kind also
// tau-self-loop variants, which are weakly equivalent by construction.
ValuePairs pg_value_pairs(const Tss& tss, const EquivalenceKind& kind,
                          const SanityOptions& options) {
  ValuePairs out;
  GraphFamily closed = transition_closure(options.family);
  std::vector<std::vector<std::size_t>> buckets;
  for (std::size_t i = 0; i < closed.members.size(); ++i) {
    bool placed = false;
    for (auto& bucket : buckets) {
      if (equivalent(closed.members[i], closed.members[bucket.front()], kind)) {
        bucket.push_back(i);
        placed = true;
        break;
      }
    }
    if (!placed) buckets.push_back({i});
  }
  for (const auto& bucket : buckets) {
    for (std::size_t a = 0; a < bucket.size(); ++a) {
      for (std::size_t b = a + 1; b < bucket.size(); ++b) {
        out.pg_pairs.push_back({closed.members[bucket[a]], closed.members[bucket[b]]});
      }
    }
  }
  // Minimization orbits: a graph against its quotient, and against a copy
  // with duplicated states. Both sides are equivalent by construction.
  std::size_t orbit_pairs = 0;
  for (const ProcessGraph& g : closed.members) {
    ProcessGraph quotient = minimize(g, kind);
    quotient.name.clear();
    if (!quotient.same_graph(g)) {
      out.pg_pairs.push_back({g, quotient});
      ++orbit_pairs;
    }
    ProcessGraph doubled = g;
    doubled.name.clear();
    for (const std::string& s : g.states) doubled.states.insert(s + "_dup");
    for (const Edge& e : g.edges) {
      doubled.edges.insert(Edge{e.from + "_dup", e.label, e.to + "_dup"});
      doubled.edges.insert(Edge{e.from, e.label, e.to + "_dup"});
    }
    out.pg_pairs.push_back({g, doubled});
    ++orbit_pairs;
  }
  std::size_t loop_pairs = 0;
  if (kind.is_weak() && tss.actions.count(kind.tau)) {
    for (const ProcessGraph& g : closed.members) {
      for (const std::string& s : g.states) {
        ProcessGraph variant = g;
        variant.name.clear();
        variant.actions.insert(kind.tau);
        variant.edges.insert(Edge{s, kind.tau, s});
        if (variant.same_graph(g)) continue;
        out.pg_pairs.push_back({g, variant});
        ++loop_pairs;
      }
    }
  }
  for (const ProcessGraph& g : closed.members) out.pg_pairs.push_back({g, g});
  std::ostringstream desc;
  desc << closed.members.size() << "-member transition-closed family in " << buckets.size()
       << " equivalence classes";
  if (loop_pairs) desc << ", plus " << loop_pairs << " tau-loop variants";
  out.description = desc.str();
  return out;
}

ValuePairs make_value_pairs(const Tss& tss, Evaluator& eval, const EquivalenceKind& kind,
                            SemanticsChoice semantics, const SanityOptions& options) {
  return semantics == SemanticsChoice::ClosedTerm ? ci_value_pairs(tss, eval, kind, options)
                                                  : pg_value_pairs(tss, kind, options);
}

Name fresh_var(const Tss& tss, const std::string& base) {
  Name candidate = base;
  std::size_t i = 0;
  while (tss.signature.contains(candidate)) candidate = base + std::to_string(i++);
  return candidate;
}

// Closed guarded recursion terms built from the prefix operators: one- and
// two-variable specs with prefix-guarded bodies.
std::vector<Term> sample_rec_terms(const Tss& tss, std::mt19937_64& rng, std::size_t count) {
  std::vector<Name> prefixes;
  for (const auto& [sym, arity] : tss.signature.declarations()) {
    if (arity == 1 && sym.rfind("prefix_", 0) == 0) prefixes.push_back(sym);
  }
  std::vector<Term> constants;
  for (const auto& [sym, arity] : tss.signature.declarations()) {
    if (arity == 0) constants.push_back(Term::app(sym));
  }
  std::vector<Term> out;
  if (prefixes.empty()) {
    // No guarding operators: fall back to constant bodies, which are
    // (vacuously) guarded.
    for (const Term& c : constants) {
      if (out.size() >= count) break;
      RecSpec spec;
      spec.bindings.emplace("X", c);
      out.push_back(Term::rec("X", spec));
    }
    return out;
  }
  for (std::size_t i = 0; i < count; ++i) {
    bool two = rng() % 2 == 0;
    std::vector<Name> vars = two ? std::vector<Name>{"X", "Y"} : std::vector<Name>{"X"};
    RecSpec spec;
    for (const Name& v : vars) {
      Term tail = Term::var(vars[rng() % vars.size()]);
      if (!constants.empty() && rng() % 4 == 0) tail = constants[rng() % constants.size()];
      Term body = Term::app(prefixes[rng() % prefixes.size()], {tail});
      if (rng() % 3 == 0) body = Term::app(prefixes[rng() % prefixes.size()], {body});
      spec.bindings.emplace(v, std::move(body));
    }
    out.push_back(Term::rec("X", std::move(spec)));
  }
  return out;
}

CheckReport base_report(Requirement req, EquivalenceKind kind, SemanticsChoice semantics) {
  CheckReport report;
  report.requirement = req;
  report.kind = kind;
  report.semantics = semantics;
  return report;
}

void record(CheckReport& report, std::string inputs, bool pass, bool vacuous = false,
            std::string note = {}) {
  if (!vacuous && !pass && report.pass) {
    report.pass = false;
    report.witness = inputs + (note.empty() ? "" : "; " + note);
  }
  report.records.push_back(SampleRecord{std::move(inputs), pass, vacuous, std::move(note)});
}

}  // namespace

CheckReport check_var_requirement(const Tss& tss, EquivalenceKind kind, SemanticsChoice semantics,
                                  const SanityOptions& options) {
  CheckReport report = base_report(Requirement::Var1, kind, semantics);
  std::vector<std::size_t> offenders;
  for (std::size_t i = 0; i < tss.rules.size(); ++i) {
    if (tss.rules[i].conclusion.source.is_var()) offenders.push_back(i);
  }
  if (offenders.empty()) {
    report.syntactic_note = "no rule has a variable as the left-hand side of its conclusion";
  } else {
    std::ostringstream note;
    note << "variable-conclusion rule(s):";
    for (std::size_t i : offenders) note << " `" << serialize_rule(tss.rules[i]) << "`";
    report.syntactic_note = note.str();
  }

  if (semantics == SemanticsChoice::ClosedTerm) {
    report.sample_space = "trivial: the closed-term meaning of x under rho is rho(x) itself";
    record(report, "x under any closed valuation", true, false,
           "holds by construction of the closed-term semantics");
    return report;
  }

  Name x = fresh_var(tss, "x");
  GraphFamily closed = transition_closure(options.family);
  report.sample_space =
      "one valuation per member of the " + std::to_string(closed.members.size()) +
      "-member transition-closed family";
  for (const ProcessGraph& g : closed.members) {
    GraphValuation rho;
    rho.mapping.emplace(x, g);
    Evaluator eval(tss, semantics, options);
    ProcessGraph meaning = eval.pg_meaning_of(Term::var(x), rho);
    bool ok = equivalent(meaning, g, kind);
    record(report, "rho(" + x + ") = " + graph_label(g), ok, false,
           ok ? ""
              : "meaning of " + x + " is not " + kind.describe() + "-equivalent to rho(" + x +
                    ")\n" + replay_graph_valuation(rho) + "meaning:\n" + serialize_graph(meaning));
  }
  return report;
}

namespace {

// Shared driver for requirement (2) and requirement (9) samples: instantiate
// each variable of t with an equivalent value pair and compare the meanings.
void run_pairwise_samples(CheckReport& report, Evaluator& eval, const EquivalenceKind& kind,
                          SemanticsChoice semantics, const SanityOptions& options,
                          const std::vector<Term>& terms, const ValuePairs& pairs) {
  std::mt19937_64 rng(options.seed);
  std::size_t budget = std::max<std::size_t>(terms.empty() ? 0 : options.max_samples / terms.size(), 1);
  for (const Term& t : terms) {
    std::vector<Name> vars(t.free_vars().begin(), t.free_vars().end());
    if (vars.empty()) {
      record(report, serialize_term(t), true, true, "no free variables: nothing to vary");
      continue;
    }
    std::size_t pair_count = semantics == SemanticsChoice::ClosedTerm ? pairs.ci_pairs.size()
                                                                      : pairs.pg_pairs.size();
    if (pair_count == 0) {
      record(report, serialize_term(t), true, true, "no equivalent value pairs available");
      continue;
    }
    for (std::size_t s = 0; s < budget; ++s) {
      Subst rho_ci, nu_ci;
      GraphValuation rho_pg, nu_pg;
      std::string desc = serialize_term(t) + " with ";
      std::string replay;
      bool premise_ok = true;
      for (const Name& v : vars) {
        std::size_t k = (s == 0 && v == vars.front()) ? 0 : rng() % pair_count;
        if (semantics == SemanticsChoice::ClosedTerm) {
          auto [i, j] = pairs.ci_pairs[k];
          rho_ci.set(v, pairs.pool[i]);
          nu_ci.set(v, pairs.pool[j]);
          desc += v + " -> (" + serialize_term(pairs.pool[i]) + " ~ " +
                  serialize_term(pairs.pool[j]) + ") ";
          premise_ok &= equivalent(eval.ci_meaning(pairs.pool[i]), eval.ci_meaning(pairs.pool[j]),
                                   kind);
        } else {
          const auto& [g, h] = pairs.pg_pairs[k];
          rho_pg.mapping.emplace(v, g);
          nu_pg.mapping.emplace(v, h);
          desc += v + " -> (" + graph_label(g) + " ~ " + graph_label(h) + ") ";
          premise_ok &= equivalent(g, h, kind);
          replay += serialize_graph(g) + serialize_graph(h);
        }
      }
      if (!premise_ok) {
        record(report, desc, true, true, "premise pair not equivalent; sample skipped");
        continue;
      }
      ProcessGraph left = eval.meaning(t, rho_ci, rho_pg);
      ProcessGraph right = eval.meaning(t, nu_ci, nu_pg);
      bool ok = equivalent(left, right, kind);
      record(report, desc, ok, false,
             ok ? ""
                : "meanings differ under " + kind.describe() +
                      (replay.empty() ? "" : "\n" + replay) + "left meaning:\n" +
                      serialize_graph(left) + "right meaning:\n" + serialize_graph(right));
    }
  }
}

}  // namespace

CheckReport check_comp_operators(const Tss& tss, EquivalenceKind kind, SemanticsChoice semantics,
                                 const SanityOptions& options) {
  CheckReport report = base_report(Requirement::CompOps2, kind, semantics);
  Evaluator eval(tss, semantics, options);
  ValuePairs pairs = make_value_pairs(tss, eval, kind, semantics, options);

  std::vector<Term> terms;
  for (const auto& [sym, arity] : tss.signature.declarations()) {
    if (arity == 0) {
      record(report, sym, true, true, "0-ary operator: vacuous");
      continue;
    }
    std::vector<Term> args;
    for (std::size_t i = 0; i < arity; ++i) {
      args.push_back(Term::var(fresh_var(tss, "x" + std::to_string(i + 1))));
    }
    terms.push_back(Term::app(sym, std::move(args)));
  }
  report.sample_space = "argument tuples per operator drawn from " + pairs.description;
  run_pairwise_samples(report, eval, kind, semantics, options, terms, pairs);
  return report;
}

CheckReport check_congruence(const Tss& tss, EquivalenceKind kind, SemanticsChoice semantics,
                             const SanityOptions& options) {
  CheckReport report = base_report(Requirement::Congruence9, kind, semantics);
  Evaluator eval(tss, semantics, options);

  // Explicit samples first: their premises are verified, then the conclusion.
  if (semantics == SemanticsChoice::ProcessGraph) {
    for (const CongruenceGraphSample& sample : options.congruence_graph_samples) {
      bool premise_ok = true;
      for (const auto& [v, g] : sample.rho.mapping) {
        auto it = sample.nu.mapping.find(v);
        premise_ok &= it != sample.nu.mapping.end() && equivalent(g, it->second, kind);
      }
      std::string desc = serialize_term(sample.t) + " with rho = " +
                         describe_graph_valuation(sample.rho) + ", nu = " +
                         describe_graph_valuation(sample.nu);
      if (!premise_ok) {
        record(report, desc, true, true, "rho and nu are not pointwise equivalent");
        continue;
      }
      ProcessGraph left = eval.pg_meaning_of(sample.t, sample.rho);
      ProcessGraph right = eval.pg_meaning_of(sample.t, sample.nu);
      bool ok = equivalent(left, right, kind);
      record(report, desc, ok, false,
             ok ? ""
                : "meanings differ under " + kind.describe() + "\n" +
                      replay_graph_valuation(sample.rho) + replay_graph_valuation(sample.nu) +
                      "left meaning:\n" + serialize_graph(left) + "right meaning:\n" +
                      serialize_graph(right));
    }
  } else {
    for (const CongruenceClosedSample& sample : options.congruence_closed_samples) {
      bool premise_ok = true;
      for (const auto& [v, p] : sample.rho.mapping) {
        auto it = sample.nu.mapping.find(v);
        premise_ok &=
            it != sample.nu.mapping.end() &&
            equivalent(eval.ci_meaning(p), eval.ci_meaning(it->second), kind);
      }
      std::string desc = serialize_term(sample.t) + " with rho = " +
                         serialize_subst(sample.rho.as_subst()) + ", nu = " +
                         serialize_subst(sample.nu.as_subst());
      if (!premise_ok) {
        record(report, desc, true, true, "rho and nu are not pointwise equivalent");
        continue;
      }
      ProcessGraph left = eval.ci_meaning(substitute(sample.t, sample.rho.as_subst()));
      ProcessGraph right = eval.ci_meaning(substitute(sample.t, sample.nu.as_subst()));
      bool ok = equivalent(left, right, kind);
      record(report, desc, ok, false, ok ? "" : "meanings differ under " + kind.describe());
    }
  }

  ValuePairs pairs;
  std::vector<Term> terms = options.congruence_terms;
  if (options.auto_generate) {
    pairs = make_value_pairs(tss, eval, kind, semantics, options);
    for (const auto& [sym, arity] : tss.signature.declarations()) {
      if (arity == 0) continue;
      std::vector<Term> args;
      for (std::size_t i = 0; i < arity; ++i) {
        args.push_back(Term::var(fresh_var(tss, "x" + std::to_string(i + 1))));
      }
      terms.push_back(Term::app(sym, std::move(args)));
    }
    run_pairwise_samples(report, eval, kind, semantics, options, terms, pairs);
  } else if (!terms.empty()) {
    pairs = make_value_pairs(tss, eval, kind, semantics, options);
    run_pairwise_samples(report, eval, kind, semantics, options, terms, pairs);
  }
  report.sample_space = "explicit samples plus valuation pairs from " +
                        (pairs.description.empty() ? std::string("none") : pairs.description);
  return report;
}

CheckReport check_comp_recursion(const Tss& tss, EquivalenceKind kind, SemanticsChoice semantics,
                                 const SanityOptions& options) {
  CheckReport report = base_report(Requirement::CompRec3, kind, semantics);
  Tss working = tss;
  std::string note;
  if (!working.recursion_unfolding) {
    working.recursion_unfolding = true;
    note = "recursion unfolding enabled for this check; ";
  }
  Evaluator eval(working, semantics, options);

  std::vector<RecPairSample> samples = options.rec_samples;
  if (options.auto_generate) {
    std::vector<Name> prefixes;
    for (const auto& [sym, arity] : working.signature.declarations()) {
      if (arity == 1 && sym.rfind("prefix_", 0) == 0) prefixes.push_back(sym);
    }
    if (!prefixes.empty()) {
      const Name& p = prefixes.front();
      RecPairSample unfold_once;
      unfold_once.s.bindings.emplace("X", Term::app(p, {Term::var("X")}));
      unfold_once.s_prime.bindings.emplace("X",
                                           Term::app(p, {Term::app(p, {Term::var("X")})}));
      samples.push_back(unfold_once);
      RecPairSample identical;
      identical.s = unfold_once.s;
      identical.s_prime = unfold_once.s;
      samples.push_back(identical);
      if (prefixes.size() > 1) {
        RecPairSample mismatched;  // premise fails: the sample must be skipped
        mismatched.s.bindings.emplace("X", Term::app(prefixes[0], {Term::var("X")}));
        mismatched.s_prime.bindings.emplace("X", Term::app(prefixes[1], {Term::var("X")}));
        samples.push_back(mismatched);
      }
    }
  }
  report.sample_space =
      note + std::to_string(samples.size()) +
      " spec pairs; the premise quantifies over all assignments of the bound variables and is "
      "sampled at the solution candidates <Y|S> and <Y|S'> only";

  for (const RecPairSample& sample : samples) {
    std::set<Name> domain;
    for (const auto& [y, body] : sample.s.bindings) {
      (void)body;
      domain.insert(y);
    }
    std::set<Name> domain2;
    for (const auto& [y, body] : sample.s_prime.bindings) {
      (void)body;
      domain2.insert(y);
    }
    Term t = Term::rec(sample.x, sample.s);
    Term u = Term::rec(sample.x, sample.s_prime);
    std::string desc = serialize_term(t) + " vs " + serialize_term(u);
    if (domain != domain2) {
      record(report, desc, true, true, "spec domains differ; skipped");
      continue;
    }
    if (!t.is_closed() || !u.is_closed()) {
      record(report, desc, true, true, "open specification pair; skipped");
      continue;
    }
    // Premise: equivalent bodies under sampled assignments of the bound
    // variables. The assignments probed are the solution candidates
    // <Y|S> and <Y|S'> themselves; the premise quantifies over all
    // assignments, so this remains a sample (noted in the report).
    bool premise_ok = true;
    for (const RecSpec* source : {&sample.s, &sample.s_prime}) {
      Subst xi;
      for (const Name& y : domain) xi.set(y, Term::rec(y, *source));
      for (const Name& y : domain) {
        Term left_body = substitute(sample.s.bindings.at(y), xi);
        Term right_body = substitute(sample.s_prime.bindings.at(y), xi);
        if (!left_body.is_closed() || !right_body.is_closed()) {
          premise_ok = false;
          break;
        }
        ProcessGraph left = eval.meaning(left_body, {}, {});
        ProcessGraph right = eval.meaning(right_body, {}, {});
        if (!equivalent(left, right, kind)) {
          premise_ok = false;
          break;
        }
      }
      if (!premise_ok) break;
    }
    if (!premise_ok) {
      record(report, desc, true, true, "premise failed on a sampled assignment; skipped");
      continue;
    }
    ProcessGraph left = eval.meaning(t, {}, {});
    ProcessGraph right = eval.meaning(u, {}, {});
    bool ok = equivalent(left, right, kind);
    record(report, desc, ok, false,
           ok ? "" : "conclusion fails: meanings differ under " + kind.describe());
  }
  return report;
}

CheckReport check_alpha(const Tss& tss, EquivalenceKind kind, SemanticsChoice semantics,
                        const SanityOptions& options) {
  CheckReport report = base_report(Requirement::Alpha4, kind, semantics);
  Tss working = tss;
  std::string note;
  if (!working.recursion_unfolding) {
    working.recursion_unfolding = true;
    note = "recursion unfolding enabled for this check; ";
  }
  Evaluator eval(working, semantics, options);
  std::mt19937_64 rng(options.seed);
  std::vector<Term> terms = sample_rec_terms(working, rng, options.max_samples);
  report.sample_space =
      note + std::to_string(terms.size()) + " random guarded recursion terms, each against an "
      "injective fresh renaming of its binders (plus the identity renaming)";
  if (terms.empty()) {
    record(report, "(no prefix operators: no recursion terms generated)", true, true);
    return report;
  }
  for (const Term& t : terms) {
    // Injective renaming with a fresh range.
    const RecSpec& spec = t.rec_spec();
    Subst renaming;
    std::map<Name, Name> new_names;
    for (const auto& [y, body] : spec.bindings) {
      (void)body;
      Name fresh = fresh_name();
      new_names[y] = fresh;
      renaming.set(y, Term::var(fresh));
    }
    RecSpec renamed;
    for (const auto& [y, body] : spec.bindings) {
      renamed.bindings.emplace(new_names.at(y), substitute(body, renaming));
    }
    Term u = Term::rec(new_names.at(t.rec_var()), std::move(renamed));
    std::string desc = serialize_term(t) + " vs " + serialize_term(u);
    if (!alpha_eq(t, u)) {
      record(report, desc, false, false, "internal: renaming did not produce an alpha-variant");
      continue;
    }
    ProcessGraph left = eval.meaning(t, {}, {});
    ProcessGraph right = eval.meaning(u, {}, {});
    bool ok = equivalent(left, right, kind);
    record(report, desc, ok, false,
           ok ? "" : "alpha-variants have inequivalent meanings under " + kind.describe());
    ProcessGraph same = eval.meaning(t, {}, {});
    record(report, serialize_term(t) + " vs itself (identity renaming)",
           equivalent(left, same, kind), false);
    if (report.records.size() >= options.max_samples * 2) break;
  }
  return report;
}

CheckReport check_rdp(const Tss& tss, EquivalenceKind kind, SemanticsChoice semantics,
                      const SanityOptions& options) {
  CheckReport report = base_report(Requirement::Rdp5, kind, semantics);
  Tss working = tss;
  std::string note;
  if (!working.recursion_unfolding) {
    working.recursion_unfolding = true;
    note = "recursion unfolding enabled for this check; ";
  }
  Evaluator eval(working, semantics, options);
  std::mt19937_64 rng(options.seed);

  std::vector<Term> terms;
  for (const RecPairSample& sample : options.rec_samples) {
    terms.push_back(Term::rec(sample.x, sample.s));
  }
  if (options.auto_generate) {
    std::vector<Name> prefixes;
    for (const auto& [sym, arity] : working.signature.declarations()) {
      if (arity == 1 && sym.rfind("prefix_", 0) == 0) prefixes.push_back(sym);
    }
    if (!prefixes.empty()) {
      RecSpec loop;
      loop.bindings.emplace("X", Term::app(prefixes[0], {Term::var("X")}));
      terms.push_back(Term::rec("X", loop));
      if (prefixes.size() > 1) {
        RecSpec mutual;
        mutual.bindings.emplace("X", Term::app(prefixes[0], {Term::var("Y")}));
        mutual.bindings.emplace("Y", Term::app(prefixes[1], {Term::var("X")}));
        terms.push_back(Term::rec("X", mutual));
      }
    }
    std::vector<Term> random = sample_rec_terms(working, rng, options.max_samples);
    terms.insert(terms.end(), random.begin(), random.end());
  }
  report.sample_space = note + std::to_string(terms.size()) +
                        " guarded recursive specifications: rec X { S } vs its unfolding";
  if (terms.empty()) {
    record(report, "(no recursion terms available)", true, true);
    return report;
  }
  for (const Term& t : terms) {
    const RecSpec& spec = t.rec_spec();
    Term unfolded = unfold_abbrev(spec, spec.bindings.at(t.rec_var()));
    std::string desc = serialize_term(t) + " vs " + serialize_term(unfolded);
    if (!t.is_closed()) {
      record(report, desc, true, true, "open specification; skipped");
      continue;
    }
    ProcessGraph left = eval.meaning(t, {}, {});
    ProcessGraph right = eval.meaning(unfolded, {}, {});
    bool ok = equivalent(left, right, kind);
    record(report, desc, ok, false,
           ok ? "" : "rec X { S } is not equivalent to its unfolding under " + kind.describe());
  }
  return report;
}

std::string ConservativeReport::table() const {
  auto cell = [](const LiftVerdict& v) {
    switch (v.verdict) {
      case LiftVerdict::V::Related: return "valid";
      case LiftVerdict::V::Unrelated: return "invalid";
      case LiftVerdict::V::Unknown: return "unknown";
    }
    return "unknown";
  };
  std::ostringstream out;
  out << "translation validity (related = valid)\n";
  out << "  semantics        before +Q   after +Q\n";
  out << "  closed-term      " << cell(ci_before) << "\t" << cell(ci_after) << "\n";
  out << "  process-graph    " << cell(pg_before) << "\t" << cell(pg_after) << "\n";
  return out.str();
}

ConservativeReport conservative_extension_demo(const Tss& p1, const Tss& p2, const Tss& q,
                                               const std::map<Name, Name>& translation,
                                               EquivalenceKind kind,
                                               const SanityOptions& options) {
  if (!p1.signature.disjoint_with(q.signature) || !p2.signature.disjoint_with(q.signature)) {
    throw SignatureOverlap("the extension TSS must have a signature disjoint from both languages");
  }
  for (const auto& [sym, arity] : p1.signature.declarations()) {
    Name image = sym;
    auto it = translation.find(sym);
    if (it != translation.end()) image = it->second;
    auto target_arity = p2.signature.arity(image);
    if (!target_arity || *target_arity != arity) {
      throw Error("translation is not total on the source signature: '" + sym + "' maps to '" +
                  image + "' which is not a matching declaration of the target");
    }
  }

  Tss p1_extended = tss_sum(p1, q);
  ConservativeReport report;
  auto combine = [](LiftVerdict acc, LiftVerdict next) {
    if (acc.verdict == LiftVerdict::V::Unrelated) return acc;
    if (next.verdict == LiftVerdict::V::Unrelated) return next;
    if (acc.verdict == LiftVerdict::V::Unknown) return acc;
    return next;
  };
  auto validity = [&](const Tss& tss, bool pg) {
    LiftVerdict acc;
    acc.coverage = "no remapped symbols: validity is trivial";
    for (const auto& [sym, image] : translation) {
      if (sym == image) continue;
      std::size_t arity = *tss.signature.arity(sym);
      std::vector<Term> args;
      for (std::size_t i = 0; i < arity; ++i) {
        args.push_back(Term::var(fresh_var(tss, "x" + std::to_string(i + 1))));
      }
      Term lhs = Term::app(sym, args);
      Term rhs = Term::app(image, args);
      CiOptions ci;
      ci.depth = options.ci_depth;
      ci.bound = options.bound;
      ci.limits = options.limits;
      LiftVerdict v = pg ? lift_pg(tss, lhs, rhs, kind, options.family, options.pg)
                         : lift_ci(tss, lhs, rhs, kind, ci);
      acc = combine(acc, v);
      if (acc.verdict == LiftVerdict::V::Unrelated) break;
    }
    return acc;
  };
  report.ci_before = validity(p1, false);
  report.ci_after = validity(p1_extended, false);
  report.pg_before = validity(p1, true);
  report.pg_after = validity(p1_extended, true);
  return report;
}

}  // namespace tsslab
