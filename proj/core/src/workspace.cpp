#include "tsslab/workspace.hpp"

#include <fstream>
#include <sstream>

#include "tsslab/parse.hpp"

namespace tsslab {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file '" + path + "'");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

namespace {

std::string file_stem(const std::string& path) {
  std::size_t slash = path.find_last_of("/\\");
  std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
  std::size_t dot = base.find_last_of('.');
  return dot == std::string::npos ? base : base.substr(0, dot);
}

}  // namespace

const Tss& Workspace::load_tss_file(const std::string& path) {
  Tss tss = parse_tss(read_file(path));
  std::string name = tss.name;
  add_tss(std::move(tss));
  return tsses_.at(name);
}

const GraphFamily& Workspace::load_graphs_file(const std::string& path) {
  GraphFamily family = parse_graph_family(read_file(path));
  for (const ProcessGraph& g : family.members) add_graph(g);
  std::string name = file_stem(path);
  add_family(name, std::move(family));
  return families_.at(name);
}

void Workspace::add_tss(Tss tss) {
  if (!tsses_.emplace(tss.name, tss).second) {
    throw Error("duplicate TSS name '" + tss.name + "'");
  }
}

void Workspace::add_graph(ProcessGraph g) {
  std::string name = g.name.empty() ? graph_constant_name(g) : g.name;
  if (!graphs_.emplace(name, std::move(g)).second) {
    throw Error("duplicate graph name '" + name + "'");
  }
}

void Workspace::add_family(std::string name, GraphFamily family) {
  if (!families_.emplace(std::move(name), std::move(family)).second) {
    throw Error("duplicate family name");
  }
}

void Workspace::add_term_alias(std::string name, Term t) {
  if (!aliases_.emplace(std::move(name), std::move(t)).second) {
    throw Error("duplicate term alias");
  }
}

const Tss& Workspace::tss(const std::string& name) const {
  auto it = tsses_.find(name);
  if (it == tsses_.end()) throw Error("no TSS named '" + name + "'");
  return it->second;
}

const ProcessGraph& Workspace::graph(const std::string& name) const {
  auto it = graphs_.find(name);
  if (it == graphs_.end()) throw Error("no graph named '" + name + "'");
  return it->second;
}

const GraphFamily& Workspace::family(const std::string& name) const {
  auto it = families_.find(name);
  if (it == families_.end()) throw Error("no family named '" + name + "'");
  return it->second;
}

const Term* Workspace::term_alias(const std::string& name) const {
  auto it = aliases_.find(name);
  return it == aliases_.end() ? nullptr : &it->second;
}

}  // namespace tsslab
