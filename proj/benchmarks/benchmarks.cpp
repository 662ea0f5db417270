#include "csm/bisim.hpp"
#include "csm/eval.hpp"
#include "csm/reducer.hpp"

#include "csm/fixtures.hpp"

#include <benchmark/benchmark.h>

using namespace csm;

namespace {

void BM_BuildChain(benchmark::State& state) {
    CsmSystem sys = fixtures::chain(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(build_rg(sys));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BuildChain)->Arg(256)->Arg(1024)->Arg(4096)->Complexity();

void BM_BuildProduct(benchmark::State& state) {
    CsmSystem sys = fixtures::random_system(static_cast<std::uint64_t>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(build_rg(sys));
}
BENCHMARK(BM_BuildProduct)->Arg(97)->Arg(131);

void BM_ReduceChain(benchmark::State& state) {
    Graph rgm = strip_ears(build_rg(fixtures::chain(static_cast<std::size_t>(state.range(0)))));
    PropSet props;
    ReductionContext ctx = make_reduction_context(props, rgm.info);
    ctx.record_decisions = false;
    for (auto _ : state)
        benchmark::DoNotOptimize(reduce_offline(rgm, ctx));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ReduceChain)->Arg(256)->Arg(1024)->Arg(4096)->Complexity();

void BM_ReduceClique(benchmark::State& state) {
    Graph rgm =
        strip_ears(build_rg(fixtures::near_clique(static_cast<std::size_t>(state.range(0)))));
    PropSet props;
    ReductionContext ctx = make_reduction_context(props, rgm.info);
    ctx.record_decisions = false;
    for (auto _ : state)
        benchmark::DoNotOptimize(reduce_offline(rgm, ctx));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ReduceClique)->Arg(16)->Arg(32)->Arg(64)->Complexity();

void BM_ReduceOnlineLadder(benchmark::State& state) {
    CsmSystem sys = fixtures::rhombus_ladder(static_cast<std::size_t>(state.range(0)));
    PropSet props;
    for (auto _ : state) {
        OnlineSource source = system_source(sys);
        ReductionContext ctx = make_reduction_context(props, source.info);
        ctx.record_decisions = false;
        benchmark::DoNotOptimize(reduce_online(source, ctx));
    }
}
BENCHMARK(BM_ReduceOnlineLadder)->Arg(64)->Arg(256);

void BM_EvalResponse(benchmark::State& state) {
    Graph rgm = strip_ears(build_rg(fixtures::chain(static_cast<std::size_t>(state.range(0)), true)));
    TemporalFormula f = parse_temporal("AG (!t -> AF t)");
    for (auto _ : state)
        benchmark::DoNotOptimize(evaluate(rgm, f));
}
BENCHMARK(BM_EvalResponse)->Arg(256)->Arg(1024);

void BM_StutterClasses(benchmark::State& state) {
    CsmSystem sys = fixtures::random_system(static_cast<std::uint64_t>(state.range(0)));
    Graph rgm = strip_ears(build_rg(sys));
    PropSet props = complete_props(fixtures::random_base_formula(sys, 3), rgm);
    ReductionContext ctx = make_reduction_context(props, rgm.info);
    auto [rrg, rep] = reduce_offline(rgm, ctx);
    Labeling lf = label(rgm, props), lr = label(rrg, props);
    for (auto _ : state)
        benchmark::DoNotOptimize(stuttering_classes(rgm, lf, rrg, lr));
}
BENCHMARK(BM_StutterClasses)->Arg(97)->Arg(131);

} // namespace

BENCHMARK_MAIN();
