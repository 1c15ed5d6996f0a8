#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tsslab/equivalence.hpp"

namespace tsslab {

enum class Requirement { Var1, CompOps2, CompRec3, Alpha4, Rdp5, Congruence9 };
enum class SemanticsChoice { ClosedTerm, ProcessGraph };

std::string to_string(Requirement r);
std::string to_string(SemanticsChoice s);

struct SampleRecord {
  std::string inputs;  // replayable, in the TSS/graph text formats
  bool pass = true;
  bool vacuous = false;  // premise of the implication failed; conclusion skipped
  std::string note;
};

// Result of one sample-based check. The checks are falsifiers: `pass` means
// pass-on-samples over the stated sample space, `fail` carries a replayable
// witness.
struct CheckReport {
  Requirement requirement = Requirement::Var1;
  SemanticsChoice semantics = SemanticsChoice::ClosedTerm;
  EquivalenceKind kind;
  bool pass = true;
  std::string witness;
  std::string sample_space;
  std::string syntactic_note;  // Var1 only: the variable-conclusion criterion
  std::vector<SampleRecord> records;

  std::size_t checked_samples() const;
  std::string to_text() const;
  std::string to_json() const;
};

struct CongruenceGraphSample {
  Term t = Term::var("x");
  GraphValuation rho;
  GraphValuation nu;
};

struct CongruenceClosedSample {
  Term t = Term::var("x");
  ClosedValuation rho;
  ClosedValuation nu;
};

struct RecPairSample {
  Name x = "X";
  RecSpec s;
  RecSpec s_prime;
};

struct SanityOptions {
  std::size_t ci_depth = 3;         // closed-term sample depth
  std::size_t max_samples = 200;
  std::size_t max_terms = 300;      // closed-term pool cap
  std::uint64_t seed = 1;
  std::size_t bound = 10000;
  SearchLimits limits{};
  GraphFamily family;  // process-graph sample space (closed under rerooting)
  PgOptions pg{};

  // Explicit samples; auto-generated ones are appended when auto_generate.
  bool auto_generate = true;
  std::vector<Term> congruence_terms;
  std::vector<CongruenceGraphSample> congruence_graph_samples;
  std::vector<CongruenceClosedSample> congruence_closed_samples;
  std::vector<RecPairSample> rec_samples;
};

// Requirement (1): the meaning of a variable is the chosen valuation's value.
// Also reports the syntactic criterion (no rule with a variable as the
// left-hand side of its conclusion).
CheckReport check_var_requirement(const Tss& tss, EquivalenceKind kind, SemanticsChoice semantics,
                                  const SanityOptions& options = {});

// Requirement (2): equivalent arguments yield equivalent operator meanings.
CheckReport check_comp_operators(const Tss& tss, EquivalenceKind kind, SemanticsChoice semantics,
                                 const SanityOptions& options = {});

// Requirement (3): equivalent bodies yield equivalent recursion meanings.
CheckReport check_comp_recursion(const Tss& tss, EquivalenceKind kind, SemanticsChoice semantics,
                                 const SanityOptions& options = {});

// Requirement (4): invariance under renaming of bound variables.
CheckReport check_alpha(const Tss& tss, EquivalenceKind kind, SemanticsChoice semantics,
                        const SanityOptions& options = {});

// Requirement (5): rec X { S } is equivalent to its unfolding <S_X|S>.
CheckReport check_rdp(const Tss& tss, EquivalenceKind kind, SemanticsChoice semantics,
                      const SanityOptions& options = {});

// Requirement (9): equivalent valuations yield equivalent term meanings.
CheckReport check_congruence(const Tss& tss, EquivalenceKind kind, SemanticsChoice semantics,
                             const SanityOptions& options = {});

// Translation validity before and after summing Q onto the source language:
// for every remapped symbol f -> g, compares f(x...) against g(x...) under
// both liftings. Reports the 2x2 (semantics x before/after) table.
struct ConservativeReport {
  LiftVerdict ci_before;
  LiftVerdict ci_after;
  LiftVerdict pg_before;
  LiftVerdict pg_after;

  std::string table() const;
};

ConservativeReport conservative_extension_demo(const Tss& p1, const Tss& p2, const Tss& q,
                                               const std::map<Name, Name>& translation,
                                               EquivalenceKind kind,
                                               const SanityOptions& options = {});

}  // namespace tsslab
