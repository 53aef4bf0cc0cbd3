// Serial reference vs OpenMP kernels. Each benchmark pair runs the same
// input through both namespaces; the argument is the problem size.

#include <numeric>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "segcut/kernels.hpp"
#include "segcut/mesh.hpp"
#include "support/synthetic.hpp"

using namespace segcut;

namespace {

struct EdgeInput {
    std::vector<Vec3> normals, colors;
    std::vector<VertexPair> edges;
};

EdgeInput edge_input(int side) {
    std::mt19937 rng(1);
    const TriMesh m = testing::random_mesh(rng, side, side);
    EdgeInput in;
    in.colors = m.colors;
    in.normals = compute_vertex_normals(m).normals;
    in.edges = vertex_adjacency(m).edges;
    return in;
}

template <auto Kernel>
void bm_edge_weights(benchmark::State& state) {
    const auto in = edge_input(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(in.normals, in.colors, in.edges, 0.25));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(in.edges.size()));
}

template <auto Kernel>
void bm_segment_means(benchmark::State& state) {
    std::mt19937 rng(2);
    const auto segments = static_cast<std::size_t>(state.range(0));
    const RowMatrix rows = testing::random_rows(rng, static_cast<int>(segments * 50), 32);
    std::vector<std::vector<std::uint32_t>> members(segments);
    for (std::uint32_t v = 0; v < rows.rows(); ++v) members[v % segments].push_back(v);
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(rows, members));
}

template <auto Kernel>
void bm_cosine(benchmark::State& state) {
    std::mt19937 rng(3);
    const RowMatrix rows = testing::random_rows(rng, static_cast<int>(state.range(0)), 96);
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(rows));
}

template <auto Kernel>
void bm_restrict_saliency(benchmark::State& state) {
    std::mt19937 rng(4);
    const auto n = static_cast<int>(state.range(0));
    const RowMatrix a = kernels::serial::cosine_similarity(testing::random_rows(rng, n, 16));
    std::vector<std::uint32_t> active;
    for (std::uint32_t i = 0; i < static_cast<std::uint32_t>(n); i += 1 + i % 3) active.push_back(i);
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(a, active, 0.3, 1e-5));
}

template <auto Kernel>
void bm_normalized_affinity(benchmark::State& state) {
    std::mt19937 rng(5);
    const RowMatrix w = testing::random_saliency(rng, static_cast<int>(state.range(0)), 0.4);
    Eigen::VectorXd degree;
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(w, degree));
}

}  // namespace

BENCHMARK(bm_edge_weights<kernels::serial::edge_weights>)->Name("edge_weights/serial")->Arg(128)->Arg(512);
BENCHMARK(bm_edge_weights<kernels::parallel::edge_weights>)->Name("edge_weights/parallel")->Arg(128)->Arg(512);
BENCHMARK(bm_segment_means<kernels::serial::segment_means>)->Name("segment_means/serial")->Arg(500)->Arg(2000);
BENCHMARK(bm_segment_means<kernels::parallel::segment_means>)->Name("segment_means/parallel")->Arg(500)->Arg(2000);
BENCHMARK(bm_cosine<kernels::serial::cosine_similarity>)->Name("cosine/serial")->Arg(500)->Arg(2000);
BENCHMARK(bm_cosine<kernels::parallel::cosine_similarity>)->Name("cosine/parallel")->Arg(500)->Arg(2000);
BENCHMARK(bm_restrict_saliency<kernels::serial::restrict_saliency>)->Name("restrict_saliency/serial")->Arg(500)->Arg(2000);
BENCHMARK(bm_restrict_saliency<kernels::parallel::restrict_saliency>)->Name("restrict_saliency/parallel")->Arg(500)->Arg(2000);
BENCHMARK(bm_normalized_affinity<kernels::serial::normalized_affinity>)->Name("normalized_affinity/serial")->Arg(500)->Arg(2000);
BENCHMARK(bm_normalized_affinity<kernels::parallel::normalized_affinity>)->Name("normalized_affinity/parallel")->Arg(500)->Arg(2000);

BENCHMARK_MAIN();
