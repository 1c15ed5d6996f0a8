#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tsslab/errors.hpp"

namespace tsslab {

using Name = std::string;

// A set of function declarations (symbol, arity). Function symbols live in a
// namespace disjoint from variables; a name is a symbol iff it is declared.
class Signature {
 public:
  Signature() = default;
  Signature(std::initializer_list<std::pair<Name, std::size_t>> decls);

  // Throws SignatureError when the symbol is already declared with a different arity.
  void declare(const Name& symbol, std::size_t arity);

  std::optional<std::size_t> arity(const Name& symbol) const;
  bool contains(const Name& symbol) const { return decls_.count(symbol) != 0; }
  const std::map<Name, std::size_t>& declarations() const { return decls_; }
  bool empty() const { return decls_.empty(); }

  bool disjoint_with(const Signature& other) const;
  // Throws SignatureOverlap when the signatures share a symbol.
  static Signature disjoint_union(const Signature& a, const Signature& b);

  bool operator==(const Signature& other) const { return decls_ == other.decls_; }

 private:
  std::map<Name, std::size_t> decls_;
};

enum class TermKind { Var, App, Rec };

class Term;

// A finite recursive specification {X = S_X | X in V_S}.
// The domain must be nonempty; each bound variable maps to exactly one body.
struct RecSpec;

// Immutable term over a signature: a variable, an application f(t1,...,tn),
// or a recursion rec X { ... } binding the spec's domain in all bodies.
// Copying shares structure; all operations on terms are pure.
class Term {
 public:
  static Term var(Name name);
  static Term app(Name symbol, std::vector<Term> args = {});
  // Throws Error when x is not in the domain of the spec or the spec is empty.
  static Term rec(Name x, RecSpec spec);

  TermKind kind() const;
  bool is_var() const { return kind() == TermKind::Var; }
  bool is_app() const { return kind() == TermKind::App; }
  bool is_rec() const { return kind() == TermKind::Rec; }

  const Name& var_name() const;             // Var
  const Name& symbol() const;               // App
  const std::vector<Term>& args() const;    // App
  const Name& rec_var() const;              // Rec
  const RecSpec& rec_spec() const;          // Rec

  // Variables with a free occurrence; cached at construction.
  const std::set<Name>& free_vars() const;
  bool is_closed() const { return free_vars().empty(); }

  std::size_t depth() const;

  // Structural equality, including bound-variable names. See alpha_eq for
  // equality up to renaming of binders.
  bool operator==(const Term& other) const;
  bool operator!=(const Term& other) const { return !(*this == other); }

 private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct RecSpec {
  std::map<Name, Term> bindings;

  RecSpec() = default;
  RecSpec(std::initializer_list<std::pair<const Name, Term>> b) : bindings(b) {}

  bool operator==(const RecSpec& other) const { return bindings == other.bindings; }
};

// Partial map from variables to terms, read as the identity outside its domain.
class Subst {
 public:
  Subst() = default;
  static Subst single(Name var, Term image);

  void set(Name var, Term image);
  const Term* find(const Name& var) const;
  bool contains(const Name& var) const { return map_.count(var) != 0; }
  bool empty() const { return map_.empty(); }
  const std::map<Name, Term>& mapping() const { return map_; }

  // The substitution restricted away from the given variables.
  Subst without(const std::set<Name>& vars) const;

 private:
  std::map<Name, Term> map_;
};

// Capture-avoiding substitution of every free occurrence of dom(sigma).
// Binders are renamed to generated names when an image would be captured.
Term substitute(const Term& t, const Subst& sigma);

// <t|S>: t with every free Y in dom(S) replaced by rec Y { S }.
Term unfold_abbrev(const RecSpec& spec, const Term& t);

// Deterministic serialization in which bound variables are replaced by
// traversal-indexed names. Two terms get equal keys iff they are
// alpha-equivalent; the key doubles as a hashable state identity.
std::string canonical_key(const Term& t);

bool alpha_eq(const Term& t, const Term& u);

// Fresh generated variable name (reserved "%" space, outside surface syntax).
Name fresh_name();
bool is_generated_name(const Name& name);

// Checks arities against the signature and that no variable clashes with a
// declared symbol. Throws SignatureError on violation.
void check_well_formed(const Term& t, const Signature& sig);

}  // namespace tsslab
