#include <doctest.h>

#include <random>

#include "support/corpus.hpp"
#include "support/oracles.hpp"
#include "tsslab/engine.hpp"
#include "tsslab/equivalence.hpp"
#include "tsslab/graph.hpp"
#include "tsslab/parse.hpp"

using namespace tsslab;

namespace {

ProcessGraph chain() { return testing::corpus_family("tauchain").members.front(); }

}  // namespace

TEST_CASE("reachable part") {
  ProcessGraph g = chain();
  CHECK(reachable_part(g).same_graph(g));

  ProcessGraph mid = g;
  mid.root = "s1";
  ProcessGraph suffix = reachable_part(mid);
  CHECK(suffix.states == std::set<std::string>{"s1", "s2"});
  CHECK(suffix.edges.size() == 1);
  CHECK(suffix.root == "s1");

  ProcessGraph isolated = g;
  isolated.states.insert("lonely");
  isolated.edges.insert(Edge{"lonely", "c", "lonely"});
  CHECK(reachable_part(isolated).same_graph(g));
}

TEST_CASE("graph step reroots along root edges") {
  GraphFamily family = transition_closure(testing::corpus_family("tauchain"));
  ProcessGraph g = chain();

  std::vector<ProcessGraph> tau_steps = graph_step(family, g, "tau");
  REQUIRE(tau_steps.size() == 1);
  CHECK(tau_steps.front().root == "s1");
  CHECK(tau_steps.front().states == g.states);
  CHECK(family.contains(tau_steps.front()));

  CHECK(graph_step(family, g, "c").empty());

  ProcessGraph outside;
  outside.states = {"q"};
  outside.root = "q";
  CHECK_THROWS_AS(graph_step(family, outside, "tau"), GNotInFamily);

  ProcessGraph fork;
  fork.states = {"r", "u", "v"};
  fork.actions = {"a"};
  fork.root = "r";
  fork.edges = {Edge{"r", "a", "u"}, Edge{"r", "a", "v"}};
  GraphFamily fork_family = transition_closure(GraphFamily{{fork}});
  CHECK(graph_step(fork_family, fork, "a").size() == 2);
}

TEST_CASE("transition closure") {
  GraphFamily closed = transition_closure(testing::corpus_family("tauchain"));
  CHECK(closed.size() == 3);  // one rooting per chain state

  ProcessGraph single;
  single.states = {"s"};
  single.root = "s";
  GraphFamily singleton{{single}};
  CHECK(transition_closure(singleton).size() == 1);

  ProcessGraph cycle;
  cycle.states = {"p", "q"};
  cycle.actions = {"a"};
  cycle.root = "p";
  cycle.edges = {Edge{"p", "a", "q"}, Edge{"q", "a", "p"}};
  CHECK(transition_closure(GraphFamily{{cycle}}).size() == 2);
}

TEST_CASE("transition closure is a closure operator") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 30; ++i) {
    GraphFamily family;
    family.add(oracle::random_graph(rng, 4, 2));
    family.add(oracle::random_graph(rng, 4, 2));
    GraphFamily closed = transition_closure(family);
    // extensive
    for (const ProcessGraph& g : family.members) CHECK(closed.contains(g));
    // idempotent
    CHECK(transition_closure(closed).size() == closed.size());
    CHECK(is_transition_closed(closed));
    // monotone: closing a subfamily stays inside
    GraphFamily sub;
    sub.add(family.members.front());
    for (const ProcessGraph& g : transition_closure(sub).members) {
      CHECK(closed.contains(g));
    }
  }
}

TEST_CASE("embedding a family as constants") {
  Tss ex1 = testing::corpus_tss("ex1");

  CHECK(embed(ex1, {}).same_content(ex1));

  GraphFamily closed = transition_closure(testing::corpus_family("tauchain"));
  Tss extended = embed(ex1, closed);
  CHECK(extended.signature.declarations().size() ==
        ex1.signature.declarations().size() + 3);
  CHECK(extended.rules.size() == ex1.rules.size() + 2);  // tau-step and c-step axioms

  ProcessGraph loop;
  loop.states = {"s"};
  loop.actions = {"a"};
  loop.root = "s";
  loop.edges = {Edge{"s", "a", "s"}};
  Tss with_loop = embed(ex1, transition_closure(GraphFamily{{loop}}));
  CHECK(with_loop.signature.declarations().size() == ex1.signature.declarations().size() + 1);
  REQUIRE(with_loop.rules.size() == ex1.rules.size() + 1);
  const TransitionRule& axiom = with_loop.rules.back();
  CHECK(axiom.premises.empty());
  CHECK(axiom.conclusion.source == *axiom.conclusion.target);

  GraphFamily not_closed = testing::corpus_family("tauchain");
  CHECK_THROWS_AS(embed(ex1, not_closed), NotTransitionClosed);
}

TEST_CASE("embedding is conservative on graph-free terms") {
  Tss ex1 = testing::corpus_tss("ex1");
  GraphFamily closed = transition_closure(testing::corpus_family("tauchain"));
  Tss extended = embed(ex1, closed);
  for (const char* text : {"a.0", "f(a.0)", "id(b.0)", "0", "f(id(c.a.0))"}) {
    Term p = parse_term(text, ex1.signature);
    auto plain = derive_transitions(ex1, p);
    auto rich = derive_transitions(extended, p);
    REQUIRE(plain.size() == rich.size());
    for (std::size_t i = 0; i < plain.size(); ++i) {
      CHECK(plain[i].action == rich[i].action);
      CHECK(plain[i].target == rich[i].target);
    }
  }
}

TEST_CASE("graph constants are canonical") {
  ProcessGraph g = chain();
  ProcessGraph same = g;
  same.name = "different-display-name";
  CHECK(graph_constant_name(g) == graph_constant_name(same));
  ProcessGraph rerooted = g;
  rerooted.root = "s1";
  CHECK(graph_constant_name(g) != graph_constant_name(rerooted));
  CHECK(graph_constant_name(g).rfind("g_", 0) == 0);
}

TEST_CASE("dot export marks the root with an incoming arrow") {
  std::string dot = to_dot(chain());
  CHECK(dot.find("__root ->") != std::string::npos);
  CHECK(dot.find("label=\"tau\"") != std::string::npos);

  Lts lts;
  lts.states = {"p", "q"};
  lts.actions = {"a"};
  lts.edges = {Edge{"p", "a", "q"}};
  std::string lts_dot = to_dot(lts);
  CHECK(lts_dot.find("__root") == std::string::npos);
  CHECK(lts_dot.find("digraph") != std::string::npos);
}

TEST_CASE("graph validation") {
  ProcessGraph bad;
  bad.states = {"s"};
  bad.root = "t";
  CHECK_THROWS_AS(bad.validate(), Error);
  bad.root = "s";
  bad.edges = {Edge{"s", "a", "s"}};
  CHECK_THROWS_AS(bad.validate(), Error);  // label not in the action set
  bad.actions = {"a"};
  CHECK_NOTHROW(bad.validate());
}

TEST_CASE("reachable part is idempotent and preserves behaviour") {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 100; ++i) {
    ProcessGraph g = oracle::random_graph(rng, 6, 3);
    ProcessGraph once = reachable_part(g);
    CHECK(reachable_part(once).same_graph(once));
    CHECK(strong_bisim(g, once).related);
    CHECK(oracle::naive_strong_bisim(g, once));
  }
}
