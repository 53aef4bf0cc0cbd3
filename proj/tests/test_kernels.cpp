#include <doctest.h>

#include <cstring>
#include <numeric>
#include <random>

#include "segcut/kernels.hpp"
#include "support/synthetic.hpp"

using namespace segcut;
namespace ser = kernels::serial;
namespace par = kernels::parallel;

namespace {

bool bit_equal(const RowMatrix& a, const RowMatrix& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() &&
           std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

}  // namespace

TEST_CASE("edge_weights: serial and parallel agree bit for bit") {
    std::mt19937 rng(1);
    for (int trial = 0; trial < 5; ++trial) {
        const auto mesh = compute_vertex_normals(testing::random_mesh(rng, 30 + trial, 25, 0.7));
        const auto edges = vertex_adjacency(mesh).edges;
        for (double a : {0.0, 0.25, 1.0}) {
            const auto s = ser::edge_weights(mesh.normals, mesh.colors, edges, a);
            const auto p = par::edge_weights(mesh.normals, mesh.colors, edges, a);
            REQUIRE(s.size() == edges.size());
            CHECK(std::memcmp(s.data(), p.data(), s.size() * sizeof(double)) == 0);
            for (double w : s) CHECK((w >= 0.0 && w <= 2.0));
        }
    }
}

TEST_CASE("edge_weights: known values") {
    const std::vector<Vec3> n{Vec3(0, 0, 1), Vec3(0, 0, 1), Vec3(1, 0, 0)};
    const std::vector<Vec3> c{Vec3(0, 0, 0), Vec3(1, 1, 1), Vec3(0, 0, 0)};
    const std::vector<VertexPair> e{{0, 1}, {0, 2}};
    const auto w = ser::edge_weights(n, c, e, 0.25);
    CHECK(w[0] == doctest::Approx(0.25).epsilon(1e-15));  // same normal, opposite colors
    CHECK(w[1] == doctest::Approx(0.75).epsilon(1e-15));  // orthogonal normals, same color
}

TEST_CASE("segment_means, cosine, saliency and normalization: serial equals parallel") {
    std::mt19937 rng(2);
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 40 + 17 * trial;
        const auto g = testing::random_segment_graph(rng, static_cast<std::size_t>(n));
        const auto vrows = testing::random_rows(rng, static_cast<int>(g.vertex_count()), 6);
        const auto ms = ser::segment_means(vrows, g.segment_vertices);
        CHECK(bit_equal(ms, par::segment_means(vrows, g.segment_vertices)));

        const auto cs = ser::cosine_similarity(ms);
        CHECK(bit_equal(cs, par::cosine_similarity(ms)));

        std::vector<std::uint32_t> active;
        for (std::uint32_t i = 0; i < static_cast<std::uint32_t>(n); ++i)
            if (i % 3 != 1) active.push_back(i);
        const auto ws = ser::restrict_saliency(cs, active, 0.3, 1e-5);
        CHECK(bit_equal(ws, par::restrict_saliency(cs, active, 0.3, 1e-5)));
        CHECK(ws.rows() == static_cast<Eigen::Index>(active.size()));

        Eigen::VectorXd ds, dp;
        const auto ns = ser::normalized_affinity(ws, ds);
        const auto np = par::normalized_affinity(ws, dp);
        CHECK(bit_equal(ns, np));
        CHECK(std::memcmp(ds.data(), dp.data(), sizeof(double) * static_cast<std::size_t>(ds.size())) == 0);
        for (Eigen::Index i = 0; i < ws.rows(); ++i) {
            CHECK(ds[i] == doctest::Approx(ws.row(i).sum()).epsilon(1e-14));
            for (Eigen::Index j = 0; j < ws.cols(); ++j)
                CHECK(ns(i, j) == doctest::Approx(ws(i, j) / std::sqrt(ds[i] * ds[j])).epsilon(1e-14));
        }
    }
}

TEST_CASE("restrict_saliency: picks active rows and thresholds inclusively") {
    RowMatrix a(3, 3);
    a << 1.0, 0.55, 0.2, 0.55, 1.0, 0.7, 0.2, 0.7, 1.0;
    const std::vector<std::uint32_t> active{0, 2};
    const auto w = ser::restrict_saliency(a, active, 0.2, 1e-5);
    RowMatrix expect(2, 2);
    expect << 1.0, 1.0, 1.0, 1.0;
    CHECK(w == expect);
    const auto w2 = ser::restrict_saliency(a, std::vector<std::uint32_t>{0, 1, 2}, 0.55, 1e-5);
    CHECK(w2(0, 1) == 1.0);
    CHECK(w2(0, 2) == 1e-5);
    CHECK(w2(1, 2) == 1.0);
}
