#pragma once

#include <string>

#include "tsslab/engine.hpp"
#include "tsslab/graph.hpp"
#include "tsslab/tss.hpp"

namespace tsslab {

// Text formats are documented in docs/formats.md. Parsers throw ParseError
// with line/column context; parse(serialize(x)) is the identity up to
// canonical ordering of declarations and rules.

Tss parse_tss(const std::string& text);
ProcessGraph parse_graph(const std::string& text);
GraphFamily parse_graph_family(const std::string& text);
Term parse_term(const std::string& text, const Signature& sig);

// Surface syntax with prefix sugar: app("prefix_a", {t}) prints as "a.t".
std::string serialize_term(const Term& t);
std::string serialize_literal(const Literal& lit);
std::string serialize_rule(const TransitionRule& rule);
// Canonical form: sorted action list, sorted declarations, rules sorted
// lexicographically by their serialization.
std::string serialize_tss(const Tss& tss);
std::string serialize_graph(const ProcessGraph& g);
std::string serialize_family(const GraphFamily& family);
std::string serialize_lts(const Lts& lts);
std::string serialize_subst(const Subst& sigma);

}  // namespace tsslab
