#include "tsslab/term.hpp"

#include <algorithm>
#include <atomic>
#include <deque>
#include <sstream>

namespace tsslab {

Signature::Signature(std::initializer_list<std::pair<Name, std::size_t>> decls) {
  for (const auto& [sym, ar] : decls) declare(sym, ar);
}

void Signature::declare(const Name& symbol, std::size_t arity) {
  auto it = decls_.find(symbol);
  if (it != decls_.end() && it->second != arity) {
    throw SignatureError("symbol '" + symbol + "' declared with arities " +
                         std::to_string(it->second) + " and " + std::to_string(arity));
  }
  decls_[symbol] = arity;
}

std::optional<std::size_t> Signature::arity(const Name& symbol) const {
  auto it = decls_.find(symbol);
  if (it == decls_.end()) return std::nullopt;
  return it->second;
}

bool Signature::disjoint_with(const Signature& other) const {
  for (const auto& [sym, ar] : decls_) {
    (void)ar;
    if (other.contains(sym)) return false;
  }
  return true;
}

Signature Signature::disjoint_union(const Signature& a, const Signature& b) {
  if (!a.disjoint_with(b)) {
    for (const auto& [sym, ar] : a.declarations()) {
      (void)ar;
      if (b.contains(sym)) throw SignatureOverlap("signatures share symbol '" + sym + "'");
    }
  }
  Signature out = a;
  for (const auto& [sym, ar] : b.declarations()) out.declare(sym, ar);
  return out;
}

struct Term::Node {
  TermKind kind;
  Name name;                    // variable name / symbol / recursion variable
  std::vector<Term> args;      // App
  std::optional<RecSpec> spec;  // Rec
  std::set<Name> free;
};

Term Term::var(Name name) {
  auto node = std::make_shared<Node>();
  node->kind = TermKind::Var;
  node->free.insert(name);
  node->name = std::move(name);
  return Term(std::move(node));
}

Term Term::app(Name symbol, std::vector<Term> args) {
  auto node = std::make_shared<Node>();
  node->kind = TermKind::App;
  node->name = std::move(symbol);
  for (const Term& a : args) node->free.insert(a.free_vars().begin(), a.free_vars().end());
  node->args = std::move(args);
  return Term(std::move(node));
}

Term Term::rec(Name x, RecSpec spec) {
  if (spec.bindings.empty()) throw Error("recursive specification must be nonempty");
  if (spec.bindings.count(x) == 0) {
    throw Error("recursion variable '" + x + "' is not bound by the specification");
  }
  auto node = std::make_shared<Node>();
  node->kind = TermKind::Rec;
  node->name = std::move(x);
  for (const auto& [y, body] : spec.bindings) {
    (void)y;
    node->free.insert(body.free_vars().begin(), body.free_vars().end());
  }
  for (const auto& [y, body] : spec.bindings) {
    (void)body;
    node->free.erase(y);
  }
  node->spec = std::move(spec);
  return Term(std::move(node));
}

TermKind Term::kind() const { return node_->kind; }
const Name& Term::var_name() const { return node_->name; }
const Name& Term::symbol() const { return node_->name; }
const std::vector<Term>& Term::args() const { return node_->args; }
const Name& Term::rec_var() const { return node_->name; }
const RecSpec& Term::rec_spec() const { return *node_->spec; }
const std::set<Name>& Term::free_vars() const { return node_->free; }

std::size_t Term::depth() const {
  switch (kind()) {
    case TermKind::Var:
      return 1;
    case TermKind::App: {
      std::size_t d = 0;
      for (const Term& a : args()) d = std::max(d, a.depth());
      return 1 + d;
    }
    case TermKind::Rec: {
      std::size_t d = 0;
      for (const auto& [y, body] : rec_spec().bindings) {
        (void)y;
        d = std::max(d, body.depth());
      }
      return 1 + d;
    }
  }
  return 0;
}

bool Term::operator==(const Term& other) const {
  if (node_ == other.node_) return true;
  if (kind() != other.kind()) return false;
  switch (kind()) {
    case TermKind::Var:
      return var_name() == other.var_name();
    case TermKind::App:
      return symbol() == other.symbol() && args() == other.args();
    case TermKind::Rec:
      return rec_var() == other.rec_var() && rec_spec() == other.rec_spec();
  }
  return false;
}

Subst Subst::single(Name var, Term image) {
  Subst s;
  s.set(std::move(var), std::move(image));
  return s;
}

void Subst::set(Name var, Term image) { map_.insert_or_assign(std::move(var), std::move(image)); }

const Term* Subst::find(const Name& var) const {
  auto it = map_.find(var);
  return it == map_.end() ? nullptr : &it->second;
}

Subst Subst::without(const std::set<Name>& vars) const {
  Subst out;
  for (const auto& [v, t] : map_) {
    if (vars.count(v) == 0) out.set(v, t);
  }
  return out;
}

namespace {

std::atomic<unsigned long long> g_fresh_counter{0};

}  // namespace

Name fresh_name() { return "%" + std::to_string(++g_fresh_counter); }

bool is_generated_name(const Name& name) { return !name.empty() && name[0] == '%'; }

Term substitute(const Term& t, const Subst& sigma) {
  switch (t.kind()) {
    case TermKind::Var: {
      const Term* image = sigma.find(t.var_name());
      return image ? *image : t;
    }
    case TermKind::App: {
      bool touched = false;
      for (const auto& [v, image] : sigma.mapping()) {
        (void)image;
        if (t.free_vars().count(v)) {
          touched = true;
          break;
        }
      }
      if (!touched) return t;
      std::vector<Term> args;
      args.reserve(t.args().size());
      for (const Term& a : t.args()) args.push_back(substitute(a, sigma));
      return Term::app(t.symbol(), std::move(args));
    }
    case TermKind::Rec: {
      const RecSpec& spec = t.rec_spec();
      std::set<Name> bound;
      for (const auto& [y, body] : spec.bindings) {
        (void)body;
        bound.insert(y);
      }
      // Binders shadow the substitution; only entries hitting a free variable act.
      Subst effective;
      std::set<Name> image_free;
      for (const auto& [v, image] : sigma.mapping()) {
        if (bound.count(v) == 0 && t.free_vars().count(v)) {
          effective.set(v, image);
          image_free.insert(image.free_vars().begin(), image.free_vars().end());
        }
      }
      if (effective.empty()) return t;

      Name rec_var = t.rec_var();
      const RecSpec* body_spec = &spec;
      RecSpec renamed;
      Subst renaming;
      bool capture = false;
      for (const Name& y : bound) {
        if (image_free.count(y)) {
          capture = true;
          break;
        }
      }
      if (capture) {
        std::map<Name, Name> new_names;
        for (const Name& y : bound) {
          Name fresh = image_free.count(y) ? fresh_name() : y;
          if (fresh != y) renaming.set(y, Term::var(fresh));
          new_names[y] = fresh;
        }
        for (const auto& [y, body] : spec.bindings) {
          renamed.bindings.emplace(new_names.at(y), substitute(body, renaming));
        }
        rec_var = new_names.at(rec_var);
        body_spec = &renamed;
      }
      RecSpec out;
      for (const auto& [y, body] : body_spec->bindings) {
        out.bindings.emplace(y, substitute(body, effective));
      }
      return Term::rec(rec_var, std::move(out));
    }
  }
  throw Error("unreachable term kind");
}

Term unfold_abbrev(const RecSpec& spec, const Term& t) {
  Subst sigma;
  for (const auto& [y, body] : spec.bindings) {
    (void)body;
    sigma.set(y, Term::rec(y, spec));
  }
  return substitute(t, sigma);
}

namespace {

// Scratch state for canonical_key: binder occurrences are numbered in
// traversal order so the key is invariant under renaming of bound variables.
struct Canonicalizer {
  std::size_t next_index = 0;

  void serialize(const Term& t, const std::map<Name, std::string>& env, std::string& out) {
    switch (t.kind()) {
      case TermKind::Var: {
        auto it = env.find(t.var_name());
        out += it == env.end() ? t.var_name() : it->second;
        return;
      }
      case TermKind::App: {
        out += t.symbol();
        out += '(';
        bool first = true;
        for (const Term& a : t.args()) {
          if (!first) out += ',';
          first = false;
          serialize(a, env, out);
        }
        out += ')';
        return;
      }
      case TermKind::Rec: {
        const RecSpec& spec = t.rec_spec();
        std::vector<Name> order = binder_order(t, env);
        std::map<Name, std::string> inner = env;
        for (const Name& y : order) inner[y] = "%" + std::to_string(next_index++);
        out += "rec ";
        out += inner.at(t.rec_var());
        out += '{';
        for (const Name& y : order) {
          out += inner.at(y);
          out += '=';
          serialize(spec.bindings.at(y), inner, out);
          out += ';';
        }
        out += '}';
        return;
      }
    }
  }

  // First occurrences of spec variables during a left-to-right scan of the
  // bodies, starting from the distinguished variable. Binders unreachable from
  // it are appended afterwards, ordered by iterated body signatures.
  std::vector<Name> binder_order(const Term& t, const std::map<Name, std::string>& env) {
    const RecSpec& spec = t.rec_spec();
    std::set<Name> domain;
    for (const auto& [y, body] : spec.bindings) {
      (void)body;
      domain.insert(y);
    }
    std::vector<Name> order{t.rec_var()};
    std::set<Name> seen{t.rec_var()};
    for (std::size_t i = 0; i < order.size(); ++i) {
      scan(spec.bindings.at(order[i]), domain, {}, seen, order);
    }
    if (order.size() < domain.size()) {
      append_unreachable(spec, env, domain, seen, order);
    }
    return order;
  }

  void scan(const Term& t, const std::set<Name>& domain, std::set<Name> shadowed,
            std::set<Name>& seen, std::vector<Name>& order) {
    switch (t.kind()) {
      case TermKind::Var:
        if (domain.count(t.var_name()) && !shadowed.count(t.var_name()) &&
            !seen.count(t.var_name())) {
          seen.insert(t.var_name());
          order.push_back(t.var_name());
        }
        return;
      case TermKind::App:
        for (const Term& a : t.args()) scan(a, domain, shadowed, seen, order);
        return;
      case TermKind::Rec: {
        std::set<Name> inner = shadowed;
        for (const auto& [y, body] : t.rec_spec().bindings) {
          (void)body;
          inner.insert(y);
        }
        for (const auto& [y, body] : t.rec_spec().bindings) {
          (void)y;
          scan(body, domain, inner, seen, order);
        }
        return;
      }
    }
  }

  // Signature-refinement ordering for binders not referenced from the
  // distinguished variable. Ties after the refinement stabilises are
  // symmetric for desk-scale specs and broken by name.
  void append_unreachable(const RecSpec& spec, const std::map<Name, std::string>& env,
                          const std::set<Name>& domain, const std::set<Name>& seen,
                          std::vector<Name>& order) {
    std::vector<Name> rest;
    for (const Name& y : domain) {
      if (!seen.count(y)) rest.push_back(y);
    }
    std::map<Name, std::string> rank;
    for (const Name& y : rest) rank[y] = "?";
    for (std::size_t iter = 0; iter <= rest.size(); ++iter) {
      std::map<Name, std::string> sig;
      for (const Name& y : rest) {
        std::map<Name, std::string> probe = env;
        for (std::size_t i = 0; i < order.size(); ++i) probe[order[i]] = "!" + std::to_string(i);
        for (const Name& z : rest) probe[z] = "?" + rank[z];
        Canonicalizer sub;
        std::string s;
        sub.serialize(spec.bindings.at(y), probe, s);
        sig[y] = s;
      }
      std::map<Name, std::string> next_rank;
      std::vector<std::string> sorted;
      for (const auto& [y, s] : sig) sorted.push_back(s);
      std::sort(sorted.begin(), sorted.end());
      sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
      for (const Name& y : rest) {
        auto pos = std::lower_bound(sorted.begin(), sorted.end(), sig[y]) - sorted.begin();
        next_rank[y] = std::to_string(pos);
      }
      if (next_rank == rank) break;
      rank = next_rank;
    }
    std::stable_sort(rest.begin(), rest.end(), [&](const Name& a, const Name& b) {
      if (rank[a] != rank[b]) return rank[a] < rank[b];
      return a < b;
    });
    for (const Name& y : rest) order.push_back(y);
  }
};

}  // namespace

std::string canonical_key(const Term& t) {
  Canonicalizer c;
  std::string out;
  c.serialize(t, {}, out);
  return out;
}

bool alpha_eq(const Term& t, const Term& u) { return canonical_key(t) == canonical_key(u); }

void check_well_formed(const Term& t, const Signature& sig) {
  switch (t.kind()) {
    case TermKind::Var:
      if (sig.contains(t.var_name())) {
        throw SignatureError("variable '" + t.var_name() + "' clashes with a declared symbol");
      }
      return;
    case TermKind::App: {
      auto ar = sig.arity(t.symbol());
      if (!ar) throw SignatureError("undeclared symbol '" + t.symbol() + "'");
      if (*ar != t.args().size()) {
        throw SignatureError("symbol '" + t.symbol() + "' has arity " + std::to_string(*ar) +
                             " but is applied to " + std::to_string(t.args().size()) +
                             " arguments");
      }
      for (const Term& a : t.args()) check_well_formed(a, sig);
      return;
    }
    case TermKind::Rec:
      for (const auto& [y, body] : t.rec_spec().bindings) {
        if (sig.contains(y)) {
          throw SignatureError("bound variable '" + y + "' clashes with a declared symbol");
        }
        check_well_formed(body, sig);
      }
      return;
  }
}

}  // namespace tsslab
