#include "tsslab/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "tsslab/equivalence.hpp"
#include "tsslab/parse.hpp"
#include "tsslab/sanity.hpp"
#include "tsslab/semantics.hpp"
#include "tsslab/workspace.hpp"

namespace tsslab {

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUnknown = 2;
constexpr int kExitUsage = 64;
constexpr int kExitData = 65;
constexpr int kExitInternal = 70;

EquivalenceKind parse_kind(const std::string& eq, const std::string& tau) {
  if (eq == "strong") return EquivalenceKind::strong();
  if (eq == "weak") return EquivalenceKind::weak(tau);
  throw CLI::ValidationError("--eq", "expected 'strong' or 'weak'");
}

void print_proof(std::ostream& out, const ProofTree& tree, const DerivationEngine& engine,
                 std::size_t indent) {
  out << std::string(indent * 2, ' ') << serialize_literal(tree.root);
  if (tree.rule) {
    if (tree.rule->via_unfolding) {
      out << "   [recursion unfolding]";
    } else {
      out << "   [rule: " << serialize_rule(engine.expanded_rules()[tree.rule->rule_index])
          << " with " << serialize_subst(tree.rule->sigma) << "]";
    }
  } else if (!tree.root.positive) {
    out << "   [refusal established by stratified saturation]";
  }
  out << "\n";
  for (const ProofTree& child : tree.children) print_proof(out, child, engine, indent + 1);
}

struct CommonArgs {
  std::string tss_path;
  std::string family_path;
  std::string eq = "strong";
  std::string tau = "tau";
  std::size_t bound = 10000;
  std::size_t depth = 4;
  std::size_t samples = 200;
  std::uint64_t seed = 1;
  bool unfolding = false;
  bool assume_guarded = false;
};

Tss load_tss(Workspace& ws, const CommonArgs& args) {
  Tss tss = ws.load_tss_file(args.tss_path);
  if (args.unfolding) tss.recursion_unfolding = true;
  return tss;
}

void register_aliases(Workspace& ws, const std::vector<std::string>& alias_args,
                      const Signature& sig) {
  for (const std::string& entry : alias_args) {
    std::size_t eq_pos = entry.find('=');
    if (eq_pos == std::string::npos) throw Error("--alias expects NAME=TERM");
    ws.add_term_alias(entry.substr(0, eq_pos), parse_term(entry.substr(eq_pos + 1), sig));
  }
}

Term resolve_term(const Workspace& ws, const std::string& text, const Signature& sig) {
  if (!text.empty() && text[0] == '@') {
    if (const Term* aliased = ws.term_alias(text.substr(1))) return *aliased;
    throw Error("no term alias named '" + text.substr(1) + "'");
  }
  return parse_term(text, sig);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"tss-lab: a workbench for transition system specifications"};
  app.require_subcommand(1);

  CommonArgs common;
  Workspace ws;
  std::vector<std::string> alias_args;

  auto add_common = [&common](CLI::App* cmd, bool with_eq = true) {
    cmd->add_option("--bound", common.bound, "state bound for explorations");
    cmd->add_flag("--unfolding", common.unfolding,
                  "enable the recursion-unfolding rule scheme for rec terms");
    cmd->add_flag("--assume-guarded", common.assume_guarded,
                  "caller vouches that recursive specifications are guarded (not checked)");
    cmd->add_option("--seed", common.seed, "seed for randomized probes and samples");
    if (with_eq) {
      cmd->add_option("--eq", common.eq, "equivalence: strong or weak")
          ->check(CLI::IsMember({"strong", "weak"}));
      cmd->add_option("--tau", common.tau, "silent action for the weak equivalence");
    }
  };

  // derive
  std::string term_text;
  bool show_proofs = false;
  CLI::App* derive = app.add_subcommand("derive", "derive the transitions of a closed term");
  derive->add_option("--tss", common.tss_path, "TSS file")->required();
  derive->add_option("term", term_text, "closed term")->required();
  derive->add_flag("--proofs", show_proofs, "print a witness proof tree per transition");
  derive->add_option("--alias", alias_args, "term alias NAME=TERM; use @NAME in term positions")
      ->allow_extra_args(false);
  add_common(derive, false);

  // lts
  std::vector<std::string> root_texts;
  CLI::App* lts_cmd = app.add_subcommand("lts", "bounded LTS exploration from root terms");
  lts_cmd->add_option("--tss", common.tss_path, "TSS file")->required();
  lts_cmd->add_option("--root", root_texts, "root terms")->required()->allow_extra_args(false);
  add_common(lts_cmd, false);

  // pure
  CLI::App* pure_cmd = app.add_subcommand("pure", "purity analysis (rule-bound variables)");
  pure_cmd->add_option("--tss", common.tss_path, "TSS file")->required();

  // stratify
  CLI::App* strat_cmd = app.add_subcommand("stratify", "find a stratification");
  strat_cmd->add_option("--tss", common.tss_path, "TSS file")->required();

  // meaning
  std::string semantics = "ci";
  std::vector<std::string> val_args;
  std::vector<std::string> gval_args;
  CLI::App* meaning_cmd = app.add_subcommand("meaning", "evaluate a term's meaning");
  meaning_cmd->add_option("--tss", common.tss_path, "TSS file")->required();
  meaning_cmd->add_option("--semantics", semantics, "ci (closed-term) or pg (process graph)")
      ->check(CLI::IsMember({"ci", "pg"}));
  meaning_cmd->add_option("--family", common.family_path, "graph family file (pg semantics)");
  meaning_cmd->add_option("--val", val_args, "closed-term binding x=TERM (ci semantics)")
      ->allow_extra_args(false);
  meaning_cmd->add_option("--gval", gval_args, "graph binding x=GRAPHNAME (pg semantics)")
      ->allow_extra_args(false);
  meaning_cmd->add_option("term", term_text, "term to interpret")->required();
  meaning_cmd
      ->add_option("--alias", alias_args, "term alias NAME=TERM; use @NAME in term positions")
      ->allow_extra_args(false);
  add_common(meaning_cmd, false);

  // bisim
  std::vector<std::string> graph_files;
  std::vector<std::string> graph_names;
  CLI::App* bisim_cmd = app.add_subcommand("bisim", "compare two graphs");
  bisim_cmd->add_option("--graphs", graph_files, "graph file(s) to load")
      ->required()
      ->allow_extra_args(false);
  bisim_cmd->add_option("names", graph_names, "two graph names")->expected(2);
  add_common(bisim_cmd);

  // lift
  std::vector<std::string> lift_terms;
  CLI::App* lift_cmd = app.add_subcommand("lift", "compare open terms under a lifting");
  lift_cmd->add_option("--tss", common.tss_path, "TSS file")->required();
  lift_cmd->add_option("--semantics", semantics, "ci or pg")
      ->check(CLI::IsMember({"ci", "pg"}));
  lift_cmd->add_option("--family", common.family_path, "graph family file (pg lifting)");
  lift_cmd->add_option("--depth", common.depth, "closed-term enumeration depth (ci lifting)");
  lift_cmd->add_option("terms", lift_terms, "two terms")->expected(2);
  lift_cmd->add_option("--alias", alias_args, "term alias NAME=TERM; use @NAME in term positions")
      ->allow_extra_args(false);
  add_common(lift_cmd);

  // check
  std::string req;
  std::string json_path;
  std::string p1_path, p2_path, q_path;
  std::vector<std::string> map_args;
  CLI::App* check_cmd = app.add_subcommand("check", "run a sanity-requirement checker");
  check_cmd
      ->add_option("--req", req,
                   "requirement: var, ops, rec, alpha, rdp, congruence, conservative")
      ->required()
      ->check(CLI::IsMember({"var", "ops", "rec", "alpha", "rdp", "congruence", "conservative"}));
  check_cmd->add_option("--tss", common.tss_path, "TSS file");
  check_cmd->add_option("--semantics", semantics, "ci or pg")
      ->check(CLI::IsMember({"ci", "pg"}));
  check_cmd->add_option("--family", common.family_path, "graph family file");
  check_cmd->add_option("--samples", common.samples, "sample budget");
  check_cmd->add_option("--ci-depth", common.depth, "closed-term sample depth");
  check_cmd->add_option("--json", json_path, "write the machine-readable report here");
  check_cmd->add_option("--p1", p1_path, "source TSS (conservative demo)");
  check_cmd->add_option("--p2", p2_path, "target TSS (conservative demo)");
  check_cmd->add_option("--q", q_path, "extension TSS (conservative demo)");
  check_cmd->add_option("--map", map_args, "translation entry f=g (conservative demo)")
      ->allow_extra_args(false);
  add_common(check_cmd);

  // sum
  std::vector<std::string> sum_paths;
  CLI::App* sum_cmd = app.add_subcommand("sum", "sum TSSs with disjoint signatures");
  sum_cmd->add_option("--tss", sum_paths, "TSS files (two or more)")->required()->allow_extra_args(false);

  // minimize
  CLI::App* min_cmd = app.add_subcommand("minimize", "quotient a graph by bisimilarity");
  min_cmd->add_option("--graphs", graph_files, "graph file(s) to load")
      ->required()
      ->allow_extra_args(false);
  min_cmd->add_option("name", graph_names, "graph name")->expected(1);
  add_common(min_cmd);

  // export-dot
  std::string dot_out;
  CLI::App* dot_cmd = app.add_subcommand("export-dot", "emit dot for a graph or explored LTS");
  dot_cmd->add_option("--graphs", graph_files, "graph file(s) to load")->allow_extra_args(false);
  dot_cmd->add_option("--tss", common.tss_path, "TSS file (explore from --root)");
  dot_cmd->add_option("--root", root_texts, "root terms for LTS exploration")->allow_extra_args(false);
  dot_cmd->add_option("name", graph_names, "graph name (with --graphs)");
  dot_cmd->add_option("--out", dot_out, "output file (default stdout)");
  add_common(dot_cmd, false);

  std::vector<const char*> argv;
  argv.push_back("tss-lab");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  SearchLimits limits;
  auto sanity_options = [&](const GraphFamily& family) {
    SanityOptions opts;
    opts.ci_depth = common.depth;
    opts.max_samples = common.samples;
    opts.seed = common.seed;
    opts.bound = common.bound;
    opts.family = family;
    opts.pg.seed = common.seed;
    return opts;
  };

  if (*derive) {
    Tss tss = load_tss(ws, common);
    register_aliases(ws, alias_args, tss.signature);
    Term p = resolve_term(ws, term_text, tss.signature);
    DerivationEngine engine(tss, limits);
    std::vector<Transition> transitions = engine.transitions(p);
    for (const Transition& t : transitions) {
      out << serialize_term(p) << " -" << t.action << "-> " << serialize_term(t.target) << "\n";
      if (show_proofs) print_proof(out, t.proof, engine, 1);
    }
    if (transitions.empty()) out << serialize_term(p) << " has no transitions\n";
    return kExitPass;
  }

  if (*lts_cmd) {
    Tss tss = load_tss(ws, common);
    std::vector<Term> roots;
    for (const std::string& text : root_texts) roots.push_back(parse_term(text, tss.signature));
    Lts lts = specified_lts(tss, roots, common.bound, limits);
    out << serialize_lts(lts);
    return lts.truncated ? kExitUnknown : kExitPass;
  }

  if (*pure_cmd) {
    Tss tss = ws.load_tss_file(common.tss_path);
    PurityReport report = is_pure(tss);
    out << report.describe(tss) << "\n";
    return report.pure ? kExitPass : kExitFail;
  }

  if (*strat_cmd) {
    Tss tss = ws.load_tss_file(common.tss_path);
    std::optional<Stratification> strat = stratify(tss);
    if (!strat) {
      out << "no stratification found\n";
      return kExitFail;
    }
    out << strat->describe() << "\n";
    return kExitPass;
  }

  if (*meaning_cmd) {
    Tss tss = load_tss(ws, common);
    register_aliases(ws, alias_args, tss.signature);
    Term t = resolve_term(ws, term_text, tss.signature);
    if (semantics == "ci") {
      ClosedValuation rho;
      for (const std::string& binding : val_args) {
        std::size_t eq_pos = binding.find('=');
        if (eq_pos == std::string::npos) throw Error("--val expects x=TERM");
        rho.mapping.emplace(binding.substr(0, eq_pos),
                            parse_term(binding.substr(eq_pos + 1), tss.signature));
      }
      if (t.free_vars().empty() && val_args.empty()) {
        ProcessGraph g = closed_meaning(tss, t, common.bound, limits);
        out << serialize_graph(g);
        return g.truncated ? kExitUnknown : kExitPass;
      }
      out << serialize_term(closed_term_meaning(tss, t, rho)) << "\n";
      return kExitPass;
    }
    GraphFamily family;
    if (!common.family_path.empty()) family = ws.load_graphs_file(common.family_path);
    GraphValuation rho;
    for (const std::string& binding : gval_args) {
      std::size_t eq_pos = binding.find('=');
      if (eq_pos == std::string::npos) throw Error("--gval expects x=GRAPHNAME");
      rho.mapping.emplace(binding.substr(0, eq_pos), ws.graph(binding.substr(eq_pos + 1)));
    }
    PgOptions pg;
    pg.bound = common.bound;
    pg.limits = limits;
    pg.seed = common.seed;
    PgMeaning m = pg_meaning(tss, t, rho, family, pg);
    out << serialize_graph(m.graph);
    out << "adequacy: " << m.adequacy.describe() << "\n";
    return m.graph.truncated ? kExitUnknown : kExitPass;
  }

  if (*bisim_cmd) {
    for (const std::string& path : graph_files) ws.load_graphs_file(path);
    const ProcessGraph& g = ws.graph(graph_names.at(0));
    const ProcessGraph& h = ws.graph(graph_names.at(1));
    EquivalenceKind kind = parse_kind(common.eq, common.tau);
    if (kind.is_weak()) {
      bool related = weak_bisim(g, h, kind.tau);
      out << (related ? "weakly bisimilar" : "not weakly bisimilar") << "\n";
      return related ? kExitPass : kExitFail;
    }
    BisimResult result = strong_bisim(g, h);
    out << (result.related ? "strongly bisimilar" : "not strongly bisimilar") << "\n";
    if (result.distinguishing) out << "distinguishing formula: " << *result.distinguishing << "\n";
    return result.related ? kExitPass : kExitFail;
  }

  if (*lift_cmd) {
    Tss tss = load_tss(ws, common);
    register_aliases(ws, alias_args, tss.signature);
    Term t = resolve_term(ws, lift_terms.at(0), tss.signature);
    Term u = resolve_term(ws, lift_terms.at(1), tss.signature);
    EquivalenceKind kind = parse_kind(common.eq, common.tau);
    LiftVerdict verdict;
    if (semantics == "ci") {
      if (tss.recursion_unfolding && !common.assume_guarded) {
        err << "note: recursion images are enumerated; pass --assume-guarded to acknowledge "
               "that unguarded specifications may diverge\n";
      }
      CiOptions options;
      options.depth = common.depth;
      options.bound = common.bound;
      options.limits = limits;
      verdict = lift_ci(tss, t, u, kind, options);
    } else {
      if (common.family_path.empty()) {
        err << "usage error: --semantics pg requires --family\n";
        return kExitUsage;
      }
      GraphFamily family = ws.load_graphs_file(common.family_path);
      PgOptions options;
      options.bound = common.bound;
      options.limits = limits;
      options.seed = common.seed;
      verdict = lift_pg(tss, t, u, kind, family, options);
    }
    switch (verdict.verdict) {
      case LiftVerdict::V::Related:
        out << "related on the enumerated domain (" << verdict.coverage << ")\n";
        break;
      case LiftVerdict::V::Unrelated:
        out << "unrelated; witness: " << verdict.witness << "\n";
        break;
      case LiftVerdict::V::Unknown:
        out << "unknown (" << verdict.coverage << ")\n";
        break;
    }
    return verdict.exit_code();
  }

  if (*check_cmd) {
    EquivalenceKind kind = parse_kind(common.eq, common.tau);
    if (req == "conservative") {
      if (p1_path.empty() || p2_path.empty() || q_path.empty()) {
        err << "usage error: --req conservative requires --p1, --p2 and --q\n";
        return kExitUsage;
      }
      Tss p1 = ws.load_tss_file(p1_path);
      Tss p2 = ws.load_tss_file(p2_path);
      Tss q = ws.load_tss_file(q_path);
      std::map<Name, Name> translation;
      for (const std::string& entry : map_args) {
        std::size_t eq_pos = entry.find('=');
        if (eq_pos == std::string::npos) throw Error("--map expects f=g");
        translation.emplace(entry.substr(0, eq_pos), entry.substr(eq_pos + 1));
      }
      GraphFamily family;
      if (!common.family_path.empty()) family = ws.load_graphs_file(common.family_path);
      SanityOptions opts = sanity_options(family);
      opts.ci_depth = common.depth;
      ConservativeReport report = conservative_extension_demo(p1, p2, q, translation, kind, opts);
      out << report.table();
      return kExitPass;
    }
    if (common.tss_path.empty()) {
      err << "usage error: --tss is required\n";
      return kExitUsage;
    }
    Tss tss = load_tss(ws, common);
    GraphFamily family;
    if (!common.family_path.empty()) family = ws.load_graphs_file(common.family_path);
    SanityOptions opts = sanity_options(family);
    SemanticsChoice sem =
        semantics == "ci" ? SemanticsChoice::ClosedTerm : SemanticsChoice::ProcessGraph;
    CheckReport report;
    if (req == "var") report = check_var_requirement(tss, kind, sem, opts);
    else if (req == "ops") report = check_comp_operators(tss, kind, sem, opts);
    else if (req == "rec") report = check_comp_recursion(tss, kind, sem, opts);
    else if (req == "alpha") report = check_alpha(tss, kind, sem, opts);
    else if (req == "rdp") report = check_rdp(tss, kind, sem, opts);
    else report = check_congruence(tss, kind, sem, opts);
    out << report.to_text();
    if (!json_path.empty()) {
      std::ofstream json_out(json_path);
      if (!json_out) throw Error("cannot write '" + json_path + "'");
      json_out << report.to_json() << "\n";
    }
    return report.pass ? kExitPass : kExitFail;
  }

  if (*sum_cmd) {
    if (sum_paths.size() < 2) {
      err << "usage error: sum needs at least two --tss files\n";
      return kExitUsage;
    }
    Tss acc = ws.load_tss_file(sum_paths[0]);
    for (std::size_t i = 1; i < sum_paths.size(); ++i) {
      acc = tss_sum(acc, ws.load_tss_file(sum_paths[i]));
    }
    out << serialize_tss(acc);
    return kExitPass;
  }

  if (*min_cmd) {
    for (const std::string& path : graph_files) ws.load_graphs_file(path);
    EquivalenceKind kind = parse_kind(common.eq, common.tau);
    out << serialize_graph(minimize(ws.graph(graph_names.at(0)), kind));
    return kExitPass;
  }

  if (*dot_cmd) {
    std::string dot;
    if (!graph_files.empty()) {
      for (const std::string& path : graph_files) ws.load_graphs_file(path);
      if (graph_names.empty()) {
        err << "usage error: export-dot with --graphs needs a graph name\n";
        return kExitUsage;
      }
      dot = to_dot(ws.graph(graph_names.at(0)));
    } else if (!common.tss_path.empty()) {
      Tss tss = load_tss(ws, common);
      std::vector<Term> roots;
      for (const std::string& text : root_texts) roots.push_back(parse_term(text, tss.signature));
      dot = to_dot(specified_lts(tss, roots, common.bound, limits));
    } else {
      err << "usage error: export-dot needs --graphs or --tss\n";
      return kExitUsage;
    }
    if (dot_out.empty()) {
      out << dot;
    } else {
      std::ofstream file(dot_out);
      if (!file) throw Error("cannot write '" + dot_out + "'");
      file << dot;
    }
    return kExitPass;
  }

  err << "usage error: no subcommand\n";
  return kExitUsage;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return run(args, out, err);
  } catch (const ParseError& e) {
    err << "input error: " << e.what() << "\n";
    return kExitData;
  } catch (const NonAdequate& e) {
    err << "no process-graph meaning: " << e.what() << "\n";
    return kExitFail;
  } catch (const SearchBudgetExceeded& e) {
    err << "unknown: " << e.what() << "\n";
    return kExitUnknown;
  } catch (const Error& e) {
    err << "input error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace tsslab
