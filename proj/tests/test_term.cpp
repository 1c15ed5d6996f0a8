#include <doctest.h>

#include <random>

#include "support/oracles.hpp"
#include "tsslab/term.hpp"

using namespace tsslab;

namespace {

Term v(const char* name) { return Term::var(name); }
Term c(const char* sym) { return Term::app(sym); }

Term prefix(const char* action, Term body) {
  return Term::app(std::string("prefix_") + action, {std::move(body)});
}

Term aloop(const char* var) {
  RecSpec spec;
  spec.bindings.emplace(var, prefix("a", Term::var(var)));
  return Term::rec(var, spec);
}

}  // namespace

TEST_CASE("signature declarations") {
  Signature sig;
  sig.declare("f", 1);
  sig.declare("f", 1);
  CHECK_THROWS_AS(sig.declare("f", 2), SignatureError);
  CHECK(sig.arity("f") == 1);
  CHECK_FALSE(sig.contains("g"));

  Signature other{{"g", 0}};
  CHECK(sig.disjoint_with(other));
  Signature both = Signature::disjoint_union(sig, other);
  CHECK(both.contains("f"));
  CHECK(both.contains("g"));
  CHECK_THROWS_AS(Signature::disjoint_union(both, other), SignatureOverlap);
}

TEST_CASE("free variables") {
  CHECK(v("x").free_vars() == std::set<Name>{"x"});

  RecSpec s;
  s.bindings.emplace("X", Term::app("f", {v("X"), v("y")}));
  CHECK(Term::rec("X", s).free_vars() == std::set<Name>{"y"});

  RecSpec inner;
  inner.bindings.emplace("Y", Term::app("g", {v("x"), v("Y")}));
  Term t = Term::app("f", {v("x"), Term::rec("Y", inner)});
  CHECK(t.free_vars() == std::set<Name>{"x"});
}

TEST_CASE("rec construction invariants") {
  RecSpec s;
  CHECK_THROWS_AS(Term::rec("X", s), Error);
  s.bindings.emplace("Y", c("0"));
  CHECK_THROWS_AS(Term::rec("X", s), Error);
  CHECK_NOTHROW(Term::rec("Y", s));
}

TEST_CASE("substitution basics") {
  Term image = Term::app("f", {v("y")});
  CHECK(substitute(v("x"), Subst::single("x", image)) == image);

  // z is not free: the term is untouched.
  Term loop = aloop("X");
  CHECK(substitute(loop, Subst::single("z", c("0"))) == loop);
}

TEST_CASE("substitution avoids capture") {
  // rec X { X = g(X, y) } [y := X] must rename the binder.
  RecSpec s;
  s.bindings.emplace("X", Term::app("g", {v("X"), v("y")}));
  Term t = Term::rec("X", s);
  Term result = substitute(t, Subst::single("y", v("X")));

  RecSpec expected_spec;
  expected_spec.bindings.emplace("Z", Term::app("g", {v("Z"), v("X")}));
  Term expected = Term::rec("Z", expected_spec);
  CHECK(alpha_eq(result, expected));
  CHECK(oracle::naive_alpha_eq(result, expected));
  CHECK(result.free_vars() == std::set<Name>{"X"});
}

TEST_CASE("alpha equivalence examples") {
  CHECK(alpha_eq(aloop("X"), aloop("Y")));

  RecSpec b;
  b.bindings.emplace("X", prefix("b", v("X")));
  CHECK_FALSE(alpha_eq(aloop("X"), Term::rec("X", b)));

  CHECK_FALSE(alpha_eq(Term::app("f", {v("x")}), Term::app("f", {v("y")})));
}

TEST_CASE("alpha equivalence with mutual and unused bindings") {
  RecSpec s1;
  s1.bindings.emplace("X", prefix("a", v("Y")));
  s1.bindings.emplace("Y", prefix("b", v("X")));
  RecSpec s2;
  s2.bindings.emplace("U", prefix("a", v("W")));
  s2.bindings.emplace("W", prefix("b", v("U")));
  CHECK(alpha_eq(Term::rec("X", s1), Term::rec("U", s2)));
  CHECK(oracle::naive_alpha_eq(Term::rec("X", s1), Term::rec("U", s2)));

  // Bindings unreachable from the distinguished variable still matter.
  RecSpec u1;
  u1.bindings.emplace("X", prefix("a", v("X")));
  u1.bindings.emplace("Y", prefix("b", c("0")));
  u1.bindings.emplace("Z", prefix("a", c("0")));
  RecSpec u2;
  u2.bindings.emplace("X", prefix("a", v("X")));
  u2.bindings.emplace("Q", prefix("a", c("0")));
  u2.bindings.emplace("R", prefix("b", c("0")));
  CHECK(alpha_eq(Term::rec("X", u1), Term::rec("X", u2)));
  u2.bindings.at("Q") = prefix("b", c("0"));
  CHECK_FALSE(alpha_eq(Term::rec("X", u1), Term::rec("X", u2)));
}

TEST_CASE("unfold abbreviation") {
  RecSpec s;
  s.bindings.emplace("X", prefix("a", v("X")));
  Term loop = Term::rec("X", s);
  CHECK(unfold_abbrev(s, prefix("a", v("X"))) == prefix("a", loop));
  CHECK(unfold_abbrev(s, c("0")) == c("0"));

  RecSpec mutual;
  mutual.bindings.emplace("X", prefix("a", v("Y")));
  mutual.bindings.emplace("Y", prefix("b", v("X")));
  CHECK(unfold_abbrev(mutual, v("X")) == Term::rec("X", mutual));
}

TEST_CASE("well-formedness checks") {
  Signature sig{{"f", 2}, {"0", 0}};
  CHECK_NOTHROW(check_well_formed(Term::app("f", {v("x"), c("0")}), sig));
  CHECK_THROWS_AS(check_well_formed(Term::app("f", {v("x")}), sig), SignatureError);
  CHECK_THROWS_AS(check_well_formed(Term::app("g", {}), sig), SignatureError);
  CHECK_THROWS_AS(check_well_formed(v("f"), sig), SignatureError);
}

TEST_CASE("alpha equivalence is an equivalence relation on random terms") {
  std::mt19937_64 rng(42);
  std::vector<Term> terms;
  for (int i = 0; i < 1000; ++i) terms.push_back(oracle::random_term(rng, 6));
  for (const Term& t : terms) CHECK(alpha_eq(t, t));
  // Symmetry and transitivity through the canonical key, probed pairwise on a slice.
  for (std::size_t i = 0; i + 2 < terms.size(); i += 97) {
    bool ij = alpha_eq(terms[i], terms[i + 1]);
    bool ji = alpha_eq(terms[i + 1], terms[i]);
    CHECK(ij == ji);
    if (ij && alpha_eq(terms[i + 1], terms[i + 2])) CHECK(alpha_eq(terms[i], terms[i + 2]));
  }
}

TEST_CASE("alpha equivalence agrees with the exhaustive oracle") {
  std::mt19937_64 rng(43);
  for (int i = 0; i < 400; ++i) {
    Term t = oracle::random_term(rng, 5);
    Term u = oracle::random_term(rng, 5);
    CHECK(alpha_eq(t, u) == oracle::naive_alpha_eq(t, u));
  }
  // Renamed variants must always be alpha-equal.
  for (int i = 0; i < 200; ++i) {
    Term t = oracle::random_term(rng, 5);
    if (!t.is_rec()) continue;
    const RecSpec& spec = t.rec_spec();
    Subst renaming;
    std::map<Name, Name> names;
    for (const auto& [y, body] : spec.bindings) {
      (void)body;
      Name fresh = fresh_name();
      names[y] = fresh;
      renaming.set(y, Term::var(fresh));
    }
    RecSpec renamed;
    for (const auto& [y, body] : spec.bindings) {
      renamed.bindings.emplace(names.at(y), substitute(body, renaming));
    }
    Term u = Term::rec(names.at(t.rec_var()), renamed);
    CHECK(alpha_eq(t, u));
    CHECK(oracle::naive_alpha_eq(t, u));
  }
}

TEST_CASE("substitution properties on random terms") {
  std::mt19937_64 rng(44);
  for (int i = 0; i < 400; ++i) {
    Term t = oracle::random_term(rng, 6);

    // Identity substitution on the free variables.
    Subst identity;
    for (const Name& x : t.free_vars()) identity.set(x, Term::var(x));
    CHECK(alpha_eq(substitute(t, identity), t));

    // Free-variable equation.
    Subst sigma;
    sigma.set("x", oracle::random_term(rng, 3, false));
    sigma.set("y", oracle::random_term(rng, 3, false));
    Term result = substitute(t, sigma);
    std::set<Name> expected;
    for (const Name& fv : t.free_vars()) {
      if (const Term* image = sigma.find(fv)) {
        expected.insert(image->free_vars().begin(), image->free_vars().end());
      } else {
        expected.insert(fv);
      }
    }
    CHECK(result.free_vars() == expected);
  }
}

TEST_CASE("substitution respects alpha equivalence") {
  std::mt19937_64 rng(45);
  for (int i = 0; i < 200; ++i) {
    Term t = oracle::random_term(rng, 5);
    if (!t.is_rec()) continue;
    const RecSpec& spec = t.rec_spec();
    Subst renaming;
    std::map<Name, Name> names;
    for (const auto& [y, body] : spec.bindings) {
      (void)body;
      Name fresh = fresh_name();
      names[y] = fresh;
      renaming.set(y, Term::var(fresh));
    }
    RecSpec renamed;
    for (const auto& [y, body] : spec.bindings) {
      renamed.bindings.emplace(names.at(y), substitute(body, renaming));
    }
    Term u = Term::rec(names.at(t.rec_var()), renamed);

    Subst sigma;
    sigma.set("x", oracle::random_term(rng, 3, false));
    CHECK(alpha_eq(substitute(t, sigma), substitute(u, sigma)));
  }
}

TEST_CASE("generated names stay out of the surface namespace") {
  Name fresh = fresh_name();
  CHECK(is_generated_name(fresh));
  CHECK_FALSE(is_generated_name("x"));
}
