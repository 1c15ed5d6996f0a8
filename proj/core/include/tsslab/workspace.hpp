#pragma once

#include <map>
#include <string>

#include "tsslab/graph.hpp"
#include "tsslab/tss.hpp"

namespace tsslab {

// Named objects loaded from files. Names are unique per kind: TSS and graph
// names come from their headers, family names from the file stem.
class Workspace {
 public:
  const Tss& load_tss_file(const std::string& path);
  // Registers every graph block by name and the whole file as a family.
  const GraphFamily& load_graphs_file(const std::string& path);

  void add_tss(Tss tss);
  void add_graph(ProcessGraph g);
  void add_family(std::string name, GraphFamily family);
  void add_term_alias(std::string name, Term t);

  const Tss& tss(const std::string& name) const;
  const ProcessGraph& graph(const std::string& name) const;
  const GraphFamily& family(const std::string& name) const;
  const Term* term_alias(const std::string& name) const;

  const std::map<std::string, Tss>& tsses() const { return tsses_; }
  const std::map<std::string, GraphFamily>& families() const { return families_; }

 private:
  std::map<std::string, Tss> tsses_;
  std::map<std::string, ProcessGraph> graphs_;
  std::map<std::string, GraphFamily> families_;
  std::map<std::string, Term> aliases_;
};

std::string read_file(const std::string& path);

}  // namespace tsslab
