#include <benchmark/benchmark.h>

#include <fstream>
#include <random>
#include <sstream>

#include "corpus.hpp"
#include "slprove/problem.hpp"
#include "slprove/prover.hpp"
#include "slprove/semantics.hpp"

namespace {

using namespace slp;

ProblemFile load(const std::string& name) {
  std::ifstream in(std::string(SLPROVE_TEST_DATA_DIR) + "/" + name);
  std::stringstream text;
  text << in.rdbuf();
  return parse_problem(text.str());
}

void BM_ProveChain(benchmark::State& state) {
  RuleSet rs = testing::list_rule_set();
  Sequent s = testing::chain_sequent(static_cast<int>(state.range(0)), "list");
  std::size_t nodes = 0;
  for (auto _ : state) {
    Verdict v = prove(rs, s);
    nodes = v.stats.sequents;
    benchmark::DoNotOptimize(v.valid);
  }
  state.counters["sequents"] = static_cast<double>(nodes);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ProveChain)->RangeMultiplier(2)->Range(4, 64)->Complexity();

void BM_ProveWorkedExample(benchmark::State& state) {
  ProblemFile p = load("worked_example.slp");
  RuleSet rs = p.rule_set();
  for (auto _ : state) benchmark::DoNotOptimize(prove(rs, p.queries[0].sequent).valid);
}
BENCHMARK(BM_ProveWorkedExample);

void BM_ProveStructures(benchmark::State& state) {
  ProblemFile p = load("structures.slp");
  RuleSet rs = p.rule_set();
  for (auto _ : state)
    for (const auto& q : p.queries) benchmark::DoNotOptimize(prove(rs, q.sequent).valid);
}
BENCHMARK(BM_ProveStructures);

void BM_Normalize(benchmark::State& state) {
  std::mt19937 rng(1);
  RuleSet rs = testing::random_rule_set(rng);
  std::vector<Sequent> ss;
  for (int i = 0; i < 64; ++i) ss.push_back(testing::random_sequent(rng, rs, 4));
  for (auto _ : state)
    for (const auto& s : ss) benchmark::DoNotOptimize(normalize(s).key);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ss.size()));
}
BENCHMARK(BM_Normalize);

void BM_Countermodel(benchmark::State& state) {
  ProblemFile p = load("structures.slp");
  RuleSet rs = p.rule_set();
  Sequent s = parse_sequent(p.signature, "dll(x, y) |- dll(x, z)");
  Bounds b{static_cast<int>(state.range(0)), 5, -1};
  for (auto _ : state) benchmark::DoNotOptimize(find_countermodel(rs, s, b).has_value());
}
BENCHMARK(BM_Countermodel)->DenseRange(1, 4);

}  // namespace

BENCHMARK_MAIN();
