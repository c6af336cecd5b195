#include <benchmark/benchmark.h>

#include <bpcross/engine.hpp>
#include <bpcross/law.hpp>
#include <bpcross/sim.hpp>
#include <bpcross/validate.hpp>

using namespace bpcross;

namespace
{

OffspringLaw law3()
{
    return OffspringLaw::make({{0, 1.0}, {2, 0.6}, {3, 0.3}});
}

CoeffTable filled(std::size_t dims, int order)
{
    CoeffTable table(TableForm::marginal, dims, {std::nullopt, order});
    std::vector<int> k(dims, 0);
    // Odometer over the box, keeping the simplex.
    for (;;)
    {
        int sum = 0;
        for (int x : k)
            sum += x;
        if (sum <= order)
            table.set(MultiIndex(k), 1.0 / (1 + sum));
        std::size_t a = 0;
        while (a < dims && ++k[a] > order)
            k[a++] = 0;
        if (a == dims)
            break;
    }
    return table;
}

} // namespace

static void BM_SparseConvolve(benchmark::State& state)
{
    const int order = static_cast<int>(state.range(0));
    auto a = filled(2, order);
    for (auto _ : state)
        benchmark::DoNotOptimize(convolve(a, a, a.truncation()));
}
BENCHMARK(BM_SparseConvolve)->Arg(8)->Arg(16);

static void BM_CrossingDistribution(benchmark::State& state)
{
    auto law = law3();
    CrossingSet set({0, 3});
    const int order = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(crossing_distribution(law, set, 1.0, order));
}
BENCHMARK(BM_CrossingDistribution)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_JointDistribution(benchmark::State& state)
{
    auto law = OffspringLaw::make({{0, 1.5}, {2, 0.5}});
    CrossingSet set({0});
    for (auto _ : state)
        benchmark::DoNotOptimize(joint_distribution(law, set, 1.0, 60, 25));
}
BENCHMARK(BM_JointDistribution)->Unit(benchmark::kMillisecond);

static void BM_Uniformization(benchmark::State& state)
{
    auto law = OffspringLaw::make({{0, 1.5}, {2, 0.5}});
    CrossingSet set({0});
    for (auto _ : state)
        benchmark::DoNotOptimize(uniformization_distribution(law, set, 1, 1.0, 60, 25));
}
BENCHMARK(BM_Uniformization)->Unit(benchmark::kMillisecond);

static void BM_SimulatePath(benchmark::State& state)
{
    auto law = law3();
    CrossingSet set({0, 3});
    PathSimulator sim(law, set);
    Xoshiro256 rng(1);
    for (auto _ : state)
        benchmark::DoNotOptimize(sim.run(1, 1.0, rng));
}
BENCHMARK(BM_SimulatePath);

static void BM_MonteCarlo(benchmark::State& state)
{
    auto law = OffspringLaw::make({{0, 1.0}, {2, 1.0}});
    CrossingSet set({0});
    const auto threads = static_cast<unsigned>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(monte_carlo(law, set, 1, 1.0, 20000, 7, threads));
}
BENCHMARK(BM_MonteCarlo)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK_MAIN();
