#include <doctest.h>

#include <random>

#include "support/corpus.hpp"
#include "support/oracles.hpp"
#include "tsslab/equivalence.hpp"
#include "tsslab/parse.hpp"
#include "tsslab/semantics.hpp"

using namespace tsslab;

namespace {

ProcessGraph chain() { return testing::corpus_family("tauchain").members.front(); }

GraphValuation val(const Name& var, ProcessGraph g) {
  GraphValuation rho;
  rho.mapping.emplace(var, std::move(g));
  return rho;
}

}  // namespace

TEST_CASE("closed meanings") {
  Tss ex1 = testing::corpus_tss("ex1");
  ProcessGraph g = closed_meaning(ex1, parse_term("a.0", ex1.signature));
  CHECK(g.states.size() == 2);
  CHECK(g.edges.size() == 1);
  CHECK(g.root == "a.0");

  ProcessGraph stuck = closed_meaning(ex1, parse_term("0", ex1.signature));
  CHECK(stuck.states.size() == 1);
  CHECK(stuck.edges.empty());

  Tss sec9 = testing::corpus_tss("sec9-counter");
  ProcessGraph c = closed_meaning(sec9, parse_term("c", sec9.signature));
  CHECK(c.states.size() == 1);
  CHECK(c.edges.empty());
}

TEST_CASE("closed-term meanings are substitution instances") {
  Tss ex1 = testing::corpus_tss("ex1");
  ClosedValuation rho;
  rho.mapping.emplace("x", parse_term("a.0", ex1.signature));

  CHECK(closed_term_meaning(ex1, Term::var("x"), rho) == parse_term("a.0", ex1.signature));
  CHECK(closed_term_meaning(ex1, parse_term("f(x)", ex1.signature), rho) ==
        parse_term("f(a.0)", ex1.signature));

  Term rec_open = parse_term("rec X { X = a.x; }", ex1.signature);
  ClosedValuation zero;
  zero.mapping.emplace("x", parse_term("0", ex1.signature));
  CHECK(closed_term_meaning(ex1, rec_open, zero) ==
        parse_term("rec X { X = a.0; }", ex1.signature));

  CHECK_THROWS_AS(closed_term_meaning(ex1, Term::var("y"), rho), UnmappedFreeVariable);
}

TEST_CASE("purity analysis") {
  CHECK(is_pure(testing::corpus_tss("ex1")).pure);
  CHECK(is_pure(testing::corpus_tss("sec10-seq")).pure);
  CHECK(is_pure(testing::corpus_tss("sec11-transclosure")).pure);
  CHECK(is_pure(testing::corpus_tss("sec13-intersection")).pure);

  Tss model2 = testing::corpus_tss("ex8-model2");
  PurityReport r2 = is_pure(model2);
  CHECK_FALSE(r2.pure);
  REQUIRE(r2.offending.size() == 1);
  CHECK(r2.offending.begin()->second == std::set<Name>{"x"});
  CHECK(r2.describe(model2).find("x") != std::string::npos);

  PurityReport r1 = is_pure(testing::corpus_tss("ex8-model1"));
  CHECK_FALSE(r1.pure);
  REQUIRE(r1.offending.size() == 1);
  CHECK(r1.offending.begin()->second == std::set<Name>{"x", "y", "z"});

  CHECK_FALSE(is_pure(testing::corpus_tss("sec9-counter")).pure);
}

TEST_CASE("purity agrees with the independent fixpoint") {
  for (const char* name : {"ex1", "ex8-model1", "ex8-model2", "sec9-counter", "sec10-seq",
                           "sec11-transclosure", "sec12-p0", "sec12-pf", "sec12-qtau",
                           "sec13-intersection"}) {
    CAPTURE(name);
    Tss tss = testing::corpus_tss(name);
    PurityReport report = is_pure(tss);
    for (std::size_t i = 0; i < tss.rules.size(); ++i) {
      std::set<Name> expected = oracle::naive_unbound_vars(tss.rules[i]);
      auto it = report.offending.find(i);
      std::set<Name> actual = it == report.offending.end() ? std::set<Name>{} : it->second;
      CHECK(actual == expected);
    }
  }
}

TEST_CASE("process-graph meaning of id and f") {
  Tss ex1 = testing::corpus_tss("ex1");
  GraphValuation rho = val("x", chain());

  PgMeaning id_meaning = pg_meaning(ex1, parse_term("id(x)", ex1.signature), rho, {});
  CHECK(id_meaning.adequacy.kind == AdequacyStatus::Kind::PureHenceManifest);
  CHECK(id_meaning.graph.states.size() == 3);
  CHECK(id_meaning.graph.edges.size() == 2);
  CHECK(strong_bisim(id_meaning.graph, chain()).related);

  PgMeaning f_meaning = pg_meaning(ex1, parse_term("f(x)", ex1.signature), rho, {});
  CHECK(f_meaning.graph.states.size() == 1);
  CHECK(f_meaning.graph.edges.empty());

  // The family used is the transition closure of the valuation's range.
  CHECK(id_meaning.family_used.size() == 3);
}

TEST_CASE("pure closed terms mean the same under both semantics") {
  Tss ex1 = testing::corpus_tss("ex1");
  for (const char* text : {"a.0", "f(b.0)", "id(c.a.0)", "0"}) {
    Term p = parse_term(text, ex1.signature);
    ProcessGraph direct = closed_meaning(ex1, p);
    PgMeaning via_pg = pg_meaning(ex1, p, {}, {});
    CHECK(via_pg.graph.same_graph(direct));
  }
}

TEST_CASE("meaning under a graph valuation requires coverage") {
  Tss ex1 = testing::corpus_tss("ex1");
  CHECK_THROWS_AS(pg_meaning(ex1, parse_term("f(x)", ex1.signature), {}, {}),
                  UnmappedFreeVariable);
}

TEST_CASE("adequacy probes falsify the open-target rule") {
  Tss model2 = testing::corpus_tss("ex8-model2");
  Term c = parse_term("c", model2.signature);

  ProcessGraph extra;
  extra.states = {"s"};
  extra.actions = {"a"};
  extra.root = "s";

  GraphFamily base;  // empty is transition-closed
  GraphFamily enlarged;
  enlarged.add(extra);
  PgOptions options;
  ProbeOutcome outcome = adequacy_probe(model2, c, {}, base, {transition_closure(enlarged)},
                                        options);
  CHECK_FALSE(outcome.pass);
  CHECK(outcome.counterexample.find("gains the transition") != std::string::npos);
  CHECK(outcome.counterexample.find("c -a-> " + graph_constant_name(extra)) !=
        std::string::npos);

  // The default probes reject a process-graph meaning outright.
  CHECK_THROWS_AS(pg_meaning(model2, c, {}, {}), NonAdequate);
}

TEST_CASE("adequacy depends on shared-target graphs for the two-premise rule") {
  Tss model1 = testing::corpus_tss("ex8-model1");
  Term c = parse_term("c", model1.signature);
  GraphFamily trees = transition_closure(testing::corpus_family("trees"));
  GraphFamily diamond = transition_closure(testing::corpus_family("diamond"));

  PgOptions quiet;
  quiet.run_probes = false;

  PgMeaning with_trees = pg_meaning(model1, c, {}, trees, quiet);
  CHECK(with_trees.graph.edges.empty());  // no shared target anywhere

  PgMeaning with_diamond = pg_meaning(model1, c, {}, diamond, quiet);
  bool has_a_step = false;
  for (const Edge& e : with_diamond.graph.edges) {
    has_a_step |= e.from == "c" && e.label == "a" && e.to == "0";
  }
  CHECK(has_a_step);

  GraphFamily enlarged = trees;
  for (const ProcessGraph& g : diamond.members) enlarged.add(g);
  ProbeOutcome outcome =
      adequacy_probe(model1, c, {}, trees, {transition_closure(enlarged)}, quiet);
  CHECK_FALSE(outcome.pass);
  CHECK(outcome.counterexample.find("c -a-> 0") != std::string::npos);
}

TEST_CASE("substitution lemma holds for the pure f/id TSS") {
  Tss ex1 = testing::corpus_tss("ex1");
  std::mt19937_64 rng(11);
  GraphFamily closed = transition_closure(testing::corpus_family("tauchain"));

  EnumeratedTerms pool = enumerate_closed_terms(ex1, 3, false, 30);
  std::vector<Term> open_terms = {
      parse_term("f(x)", ex1.signature), parse_term("id(x)", ex1.signature),
      parse_term("f(id(x))", ex1.signature), parse_term("a.x", ex1.signature),
      Term::var("x")};
  for (int i = 0; i < 10; ++i) {
    const Term& t = open_terms[rng() % open_terms.size()];
    Subst sigma;
    Term image = pool.terms[rng() % pool.terms.size()];
    sigma.set("x", image);

    GraphValuation rho = val("x", closed.members[rng() % closed.members.size()]);

    // left: interpret t[sigma] under rho; right: interpret t under rho-after-sigma.
    PgMeaning left = pg_meaning(ex1, substitute(t, sigma), rho, closed);
    GraphValuation composed = val("x", closed_meaning(ex1, image));
    PgMeaning right = pg_meaning(ex1, t, composed, closed);
    CHECK(strong_bisim(left.graph, right.graph).related);
  }
}

TEST_CASE("random graph families are deterministic in the seed") {
  GraphFamily a = random_graph_family({"a", "b"}, 5, 4, 123);
  GraphFamily b = random_graph_family({"a", "b"}, 5, 4, 123);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.members[i].same_graph(b.members[i]));
}

TEST_CASE("pg meanings are their own reachable parts") {
  Tss ex1 = testing::corpus_tss("ex1");
  GraphFamily family = testing::corpus_family("tauchain");
  for (const char* text : {"id(x)", "f(x)", "a.id(x)", "f(id(x))"}) {
    Term t = parse_term(text, ex1.signature);
    GraphValuation rho = val("x", chain());
    ProcessGraph g = pg_meaning(ex1, t, rho, family).graph;
    CHECK(reachable_part(g).same_graph(g));
  }
}

TEST_CASE("probes on a pure TSS always pass") {
  Tss ex1 = testing::corpus_tss("ex1");
  Term t = parse_term("f(x)", ex1.signature);
  GraphValuation rho = val("x", chain());
  GraphFamily base = transition_closure(testing::corpus_family("tauchain"));
  GraphFamily enlarged = base;
  for (const ProcessGraph& g : random_graph_family(ex1.actions, 4, 4, 5).members) {
    enlarged.add(g);
  }
  ProbeOutcome outcome =
      adequacy_probe(ex1, t, rho, base, {transition_closure(enlarged)}, {});
  CHECK(outcome.pass);
}
