#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "chordc/codec.hpp"
#include "chordc/derivation.hpp"
#include "chordc/semantics.hpp"

using namespace chordc;

namespace {

Term load(const std::string& name)
{
    std::ifstream in(std::string(CHORDC_MODELS_DIR) + "/" + name, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return model_term(parse_model(buf.str()));
}

// Chain of n leaves over three roles, alternating strong and weak steps with
// a local choice every third position.
Term synthetic(int n)
{
    auto step = [](int k) {
        const std::string name = "C" + std::to_string(k);
        switch (k % 3) {
        case 0: return Term::sub_collab(name, {"a"}, {"b"}, {"a", "b"});
        case 1: return Term::sub_collab(name, {"b"}, {"c"}, {"b", "c"});
        default: return Term::sub_collab(name, {"c"}, {"a"}, {"a", "c"});
        }
    };
    Term t = step(n - 1);
    for (int k = n - 2; k >= 0; --k) {
        if (k % 3 == 2)
            t = Term::choice(step(k), Term::sub_collab("D" + std::to_string(k), {"c"}, {"c"}, {"c"}));
        else
            t = Term::binary(k % 2 ? TermKind::WeakSeq : TermKind::StrongSeq, step(k), t);
    }
    return t;
}

void BM_DeriveTelemedicine(benchmark::State& state)
{
    const Term t = load("telemedicine.json");
    const RoleSetTable sets = role_sets(t);
    for (auto _ : state) benchmark::DoNotOptimize(derive_all(t, sets));
}
BENCHMARK(BM_DeriveTelemedicine);

void BM_OracleTelemedicine(benchmark::State& state)
{
    const Term t = load("telemedicine.json");
    for (auto _ : state) benchmark::DoNotOptimize(oracle_traces(t));
}
BENCHMARK(BM_OracleTelemedicine);

void BM_ExploreTelemedicine(benchmark::State& state)
{
    const Term t = load("telemedicine.json");
    const auto machines = derive_all(t, role_sets(t));
    for (auto _ : state) benchmark::DoNotOptimize(explore_system(machines, t));
}
BENCHMARK(BM_ExploreTelemedicine);

void BM_CheckSynthetic(benchmark::State& state)
{
    const Term t = synthetic(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(check_realizability(t));
}
BENCHMARK(BM_CheckSynthetic)->Arg(3)->Arg(6)->Arg(9);

}  // namespace

BENCHMARK_MAIN();
