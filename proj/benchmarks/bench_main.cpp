#include <benchmark/benchmark.h>

#include "tsslab/equivalence.hpp"
#include "tsslab/parse.hpp"
#include "tsslab/semantics.hpp"

namespace {

const char* kEx1 = R"(tss ex1
actions: a, b, c, tau;
sig: 0/0, f/1, id/1, prefix_a/1, prefix_b/1, prefix_c/1;
|- a.x -a-> x
|- b.x -b-> x
|- c.x -c-> x
forall al in {a,b,c}: x -al-> x1 |- f(x) -al-> f(x1)
forall al in {a,b,c,tau}: x -al-> x1 |- id(x) -al-> id(x1)
)";

tsslab::Term deep_chain(const tsslab::Tss& tss, std::size_t depth) {
  tsslab::Term t = tsslab::Term::app("0");
  for (std::size_t i = 0; i < depth; ++i) {
    t = tsslab::Term::app(i % 2 ? "prefix_a" : "prefix_b", {t});
  }
  (void)tss;
  return t;
}

void BM_DeriveChain(benchmark::State& state) {
  tsslab::Tss tss = tsslab::parse_tss(kEx1);
  tsslab::Term root = deep_chain(tss, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    tsslab::ProcessGraph g = tsslab::closed_meaning(tss, root);
    benchmark::DoNotOptimize(g.states.size());
  }
}
BENCHMARK(BM_DeriveChain)->Arg(8)->Arg(16)->Arg(32);

tsslab::ProcessGraph random_graph(std::size_t states, std::uint64_t seed) {
  tsslab::GraphFamily family =
      tsslab::random_graph_family({"a", "b", "c"}, 1, states, seed);
  return family.members.front();
}

void BM_StrongBisim(benchmark::State& state) {
  tsslab::ProcessGraph g = random_graph(static_cast<std::size_t>(state.range(0)), 7);
  tsslab::ProcessGraph h = random_graph(static_cast<std::size_t>(state.range(0)), 8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(tsslab::strong_bisim(g, h).related);
  }
}
BENCHMARK(BM_StrongBisim)->Arg(8)->Arg(32)->Arg(64);

void BM_ParseRoundTrip(benchmark::State& state) {
  for (auto _ : state) {
    tsslab::Tss tss = tsslab::parse_tss(kEx1);
    benchmark::DoNotOptimize(tsslab::serialize_tss(tss).size());
  }
}
BENCHMARK(BM_ParseRoundTrip);

}  // namespace

BENCHMARK_MAIN();
