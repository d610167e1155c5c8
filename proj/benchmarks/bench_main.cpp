#include "vemcdr/assembly.hpp"
#include "vemcdr/harness.hpp"

#include <benchmark/benchmark.h>

using namespace vemcdr;

namespace {

CoefficientSet layer_coeffs()
{
    CoefficientSet cs;
    cs.epsilon = 1e-6;
    cs.b = [](const Point&) { return Point(2.0, 1.0); };
    cs.c = [](const Point&) { return 1.0; };
    cs.f = [](const Point&) { return 1.0; };
    cs.div_b = [](const Point&) { return 0.0; };
    return cs;
}

void BM_Projectors(benchmark::State& state)
{
    const PolyMesh mesh = generate_mesh(MeshKind::hex_dominant, 4, 4);
    const CellGeometry g = cell_geometry(mesh, 5);
    const int k = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(build_projectors(g, k));
}
BENCHMARK(BM_Projectors)->DenseRange(1, 4);

void BM_Assemble(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const PolyMesh mesh = generate_mesh(MeshKind::quad, n, n);
    const DofMap dofs(mesh, 2);
    const CoefficientSet cs = layer_coeffs();
    const AssemblyOptions opts{static_cast<unsigned>(state.range(1))};
    for (auto _ : state)
        benchmark::DoNotOptimize(assemble(mesh, dofs, cs, {}, opts));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(mesh.num_cells()));
}
BENCHMARK(BM_Assemble)->Args({16, 1})->Args({32, 1})->Args({32, 4})->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_Solve(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const PolyMesh mesh = generate_mesh(MeshKind::quad, n, n);
    const DofMap dofs(mesh, 2);
    const CoefficientSet cs = layer_coeffs();
    AssemblyResult r = assemble(mesh, dofs, cs, {});
    apply_dirichlet(r.system, dirichlet_values(mesh, dofs, cs.u_b));
    const SolveOptions opts{static_cast<SolverKind>(state.range(1))};
    for (auto _ : state)
        benchmark::DoNotOptimize(solve(r.system, opts));
    state.SetLabel(to_string(opts.method));
}
BENCHMARK(BM_Solve)
    ->Args({32, static_cast<int>(SolverKind::direct)})
    ->Args({32, static_cast<int>(SolverKind::bicgstab)})
    ->Args({32, static_cast<int>(SolverKind::gmres)})
    ->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
