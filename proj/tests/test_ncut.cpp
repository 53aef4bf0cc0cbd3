#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "segcut/error.hpp"
#include "segcut/ncut.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace segcut;

namespace {

double residual(const RowMatrix& w, const EigenPair& p) {
    const Eigen::VectorXd d = w.rowwise().sum();
    const Eigen::VectorXd lhs = d.cwiseProduct(p.v) - w * p.v;
    return (lhs - p.lambda * d.cwiseProduct(p.v)).norm();
}

RowMatrix two_cliques(int k, double eps) {
    RowMatrix w = RowMatrix::Constant(2 * k, 2 * k, eps);
    w.topLeftCorner(k, k).setOnes();
    w.bottomRightCorner(k, k).setOnes();
    return w;
}

std::vector<std::uint32_t> iota_ids(std::size_t n) {
    std::vector<std::uint32_t> ids(n);
    std::iota(ids.begin(), ids.end(), 0u);
    return ids;
}

bool connected_under(const std::vector<std::uint32_t>& ids, const SegmentGraph& seg) {
    const std::set<std::uint32_t> in(ids.begin(), ids.end());
    std::set<std::uint32_t> reached{ids.front()};
    std::vector<std::uint32_t> stack{ids.front()};
    while (!stack.empty()) {
        const auto x = stack.back();
        stack.pop_back();
        for (auto [a, b] : seg.adjacency) {
            const std::uint32_t y = a == x ? b : b == x ? a : UINT32_MAX;
            if (y != UINT32_MAX && in.count(y) && reached.insert(y).second) stack.push_back(y);
        }
    }
    return reached.size() == in.size();
}

std::set<std::vector<std::uint32_t>> mask_sets(const PseudoMaskSet& s) {
    std::set<std::vector<std::uint32_t>> out;
    for (const auto& m : s.masks) out.insert(m.segment_ids);
    return out;
}

NCutParams params(std::size_t min_fg, Separation sep = Separation::Max, double tau = 0.65) {
    NCutParams p;
    p.tau_cut = tau;
    p.min_foreground_segments = min_fg;
    p.separation = sep;
    return p;
}

}  // namespace

TEST_CASE("eigvec: two epsilon-joined 3-cliques separate by sign") {
    const auto w = two_cliques(3, 1e-5);
    const auto p = second_smallest_generalized_eigvec(w);
    const auto oracle = testing::dense_generalized_spectrum(w);
    CHECK(std::abs(p.lambda - oracle.values[1]) <= 1e-9);
    CHECK(residual(w, p) <= 1e-8 * p.v.norm());
    CHECK(std::abs(p.v.norm() - 1.0) <= 1e-12);
    for (int i = 1; i < 3; ++i) {
        CHECK(p.v[i] * p.v[0] > 0);
        CHECK(p.v[3 + i] * p.v[3] > 0);
    }
    CHECK(p.v[0] * p.v[3] < 0);
    // The oracle's vector spans the same line.
    Eigen::VectorXd o = oracle.vectors.col(1).normalized();
    CHECK(std::abs(std::abs(o.dot(p.v)) - 1.0) <= 1e-9);
}

TEST_CASE("eigvec: complete graph N=4") {
    const RowMatrix w = RowMatrix::Ones(4, 4);
    const auto oracle = testing::dense_generalized_spectrum(w);
    CHECK(std::abs(oracle.values[0]) <= 1e-12);
    const Eigen::VectorXd c = oracle.vectors.col(0).normalized();
    CHECK((c.array() - c[0]).abs().maxCoeff() <= 1e-12);
    const auto p = second_smallest_generalized_eigvec(w);
    CHECK(std::abs(p.lambda - oracle.values[1]) <= 1e-9);
    CHECK(residual(w, p) <= 1e-8);
}

TEST_CASE("eigvec: N=2 is antisymmetric with sign fixed") {
    RowMatrix w(2, 2);
    w << 1, 1e-5, 1e-5, 1;
    const auto p = second_smallest_generalized_eigvec(w);
    CHECK(std::abs(p.v[0] + p.v[1]) <= 1e-12);
    CHECK(p.v[0] > 0);  // largest magnitude positive, first index on ties
    CHECK(residual(w, p) <= 1e-8);
}

TEST_CASE("eigvec: random saliency matrices match the dense oracle") {
    std::mt19937 rng(77);
    std::uniform_int_distribution<int> size(2, 40);
    std::uniform_real_distribution<double> dens(0.05, 0.95);
    for (int trial = 0; trial < 60; ++trial) {
        const auto w = testing::random_saliency(rng, size(rng), dens(rng));
        const auto p = second_smallest_generalized_eigvec(w);
        const auto oracle = testing::dense_generalized_spectrum(w);
        CHECK(std::abs(p.lambda - oracle.values[1]) <= 1e-9);
        CHECK(residual(w, p) <= 1e-8 * p.v.norm());
        Eigen::Index arg;
        p.v.cwiseAbs().maxCoeff(&arg);
        CHECK(p.v[arg] > 0);
    }
}

TEST_CASE("eigvec: restricted overload equals explicit submatrix") {
    std::mt19937 rng(3);
    const auto w = testing::random_saliency(rng, 12, 0.4);
    const std::vector<std::uint32_t> active{1, 2, 5, 7, 8, 11};
    RowMatrix sub(6, 6);
    for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b) sub(a, b) = w(active[a], active[b]);
    const auto x = second_smallest_generalized_eigvec(AffinityMatrix{w, AffinityKind::Saliency}, active);
    const auto y = second_smallest_generalized_eigvec(sub);
    CHECK(x.lambda == y.lambda);
    CHECK(x.v == y.v);
    CHECK_THROWS_AS(second_smallest_generalized_eigvec(AffinityMatrix{w, AffinityKind::Saliency},
                                                       std::vector<std::uint32_t>{3}),
                    ParameterError);
}

TEST_CASE("bipartition examples") {
    Eigen::VectorXd v(3);
    v << 0.5, 0.5, -1.0;
    CHECK(bipartition(v) == BinaryMask{1, 1, 0});
    CHECK(bipartition(Eigen::VectorXd::Constant(5, 0.3)) == BinaryMask(5, 1));
    Eigen::VectorXd w(4);
    w << 3, 1, -1, -3;
    CHECK(bipartition(w) == BinaryMask{1, 1, 0, 0});
}

TEST_CASE("bipartition: non-constant vectors give both labels") {
    std::mt19937 rng(5);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 200; ++trial) {
        Eigen::VectorXd v(2 + trial % 30);
        for (auto& x : v) x = g(rng);
        const auto m = bipartition(v);
        CHECK(std::count(m.begin(), m.end(), 1) >= 1);
        CHECK(std::count(m.begin(), m.end(), 0) >= 1);
        for (Eigen::Index i = 0; i < v.size(); ++i) CHECK((m[i] == 1) == (v[i] >= v.mean()));
    }
}

TEST_CASE("invert_if_majority examples") {
    BinaryMask m{1, 1, 0};
    Eigen::VectorXd v(3);
    v << 1, 2, -3;
    CHECK(invert_if_majority(m, v));
    CHECK(m == BinaryMask{0, 0, 1});
    CHECK(v == Eigen::Vector3d(-1, -2, 3));

    BinaryMask m2{1, 0, 0, 0};
    Eigen::VectorXd v2 = Eigen::Vector4d(1, 2, 3, 4);
    CHECK_FALSE(invert_if_majority(m2, v2));
    CHECK(m2 == BinaryMask{1, 0, 0, 0});

    BinaryMask m3{1, 1, 0, 0};
    Eigen::VectorXd v3 = Eigen::Vector4d(1, 2, 3, 4);
    CHECK_FALSE(invert_if_majority(m3, v3));
    CHECK(v3 == Eigen::Vector4d(1, 2, 3, 4));
}

TEST_CASE("invert_if_majority: popcount bound after inversion") {
    std::mt19937 rng(6);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 1 + trial % 17;
        BinaryMask m(n);
        for (auto& x : m) x = rng() % 2;
        Eigen::VectorXd v = Eigen::VectorXd::Random(static_cast<Eigen::Index>(n));
        invert_if_majority(m, v);
        CHECK(static_cast<std::size_t>(std::count(m.begin(), m.end(), 1)) <= (n + 1) / 2);
    }
}

TEST_CASE("separate_components: strategy examples") {
    // a=0, b=1 adjacent; c=2 isolated from them; d=3 background.
    const auto seg = testing::segment_graph({5, 5, 30, 1}, {{0, 1}, {2, 3}});
    const auto active = iota_ids(4);
    const BinaryMask m{1, 1, 1, 0};
    Eigen::VectorXd v(4);
    v << 0.9, 0.2, 0.5, -1.0;
    CHECK(separate_components(m, v, active, seg, Separation::Max) == BinaryMask{1, 1, 0, 0});
    CHECK(separate_components(m, v, active, seg, Separation::Avg) == BinaryMask{1, 1, 0, 0});
    CHECK(separate_components(m, v, active, seg, Separation::Largest) == BinaryMask{0, 0, 1, 0});
    CHECK(separate_components(m, v, active, seg, Separation::NoSep) == m);

    Eigen::VectorXd v2(4);
    v2 << 0.1, 0.2, 0.5, -1.0;
    CHECK(separate_components(m, v2, active, seg, Separation::Avg) == BinaryMask{0, 0, 1, 0});

    const BinaryMask connected{1, 1, 0, 0};
    for (auto s : {Separation::Max, Separation::Avg, Separation::Largest, Separation::NoSep})
        CHECK(separate_components(connected, v, active, seg, s) == connected);

    CHECK_THROWS_AS(separate_components(BinaryMask(4, 0), v, active, seg, Separation::Max), ParameterError);
}

TEST_CASE("separate_components: respects the active subset") {
    // Chain 0-1-2-3; with 1 inactive, 0 and 2 are disconnected.
    const auto seg = testing::segment_graph({1, 1, 1, 1}, {{0, 1}, {1, 2}, {2, 3}});
    const std::vector<std::uint32_t> active{0, 2, 3};
    Eigen::VectorXd v(3);
    v << 0.1, 0.9, 0.3;
    CHECK(separate_components(BinaryMask{1, 1, 1}, v, active, seg, Separation::Max) == BinaryMask{0, 1, 1});
}

TEST_CASE("ncut_cost: epsilon-joined cliques, complement symmetry, errors") {
    const double eps = 1e-5;
    const auto w = two_cliques(3, eps);
    const double expected = 2.0 * (9 * eps) / (9.0 + 9 * eps);
    CHECK(std::abs(ncut_cost(BinaryMask{1, 1, 1, 0, 0, 0}, w) - expected) <= 1e-18);

    std::mt19937 rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        const auto r = testing::random_saliency(rng, 7, 0.5);
        BinaryMask a(7);
        for (auto& x : a) x = rng() % 2;
        a[0] = 1;
        a[1] = 0;
        BinaryMask b(7);
        for (int i = 0; i < 7; ++i) b[i] = a[i] ? 0 : 1;
        CHECK(std::abs(ncut_cost(a, r) - ncut_cost(b, r)) <= 1e-14);
        std::set<int> as;
        for (int i = 0; i < 7; ++i)
            if (a[i]) as.insert(i);
        CHECK(std::abs(ncut_cost(a, r) - testing::ncut_cost_sets(as, r)) <= 1e-12);
    }
    CHECK_THROWS_AS(ncut_cost(BinaryMask(6, 0), w), ParameterError);
    CHECK_THROWS_AS(ncut_cost(BinaryMask(6, 1), w), ParameterError);
}

TEST_CASE("ncut_cost: spectral cut of epsilon-joined cliques is the exhaustive minimum") {
    std::mt19937 rng(403);
    for (int trial = 0; trial < 50; ++trial) {
        const int a = 1 + static_cast<int>(rng() % 5), b = 2 + static_cast<int>(rng() % 5);
        RowMatrix w = RowMatrix::Constant(a + b, a + b, 1e-5);
        w.topLeftCorner(a, a).setOnes();
        w.bottomRightCorner(b, b).setOnes();
        const auto m = bipartition(second_smallest_generalized_eigvec(w).v);
        CHECK(std::abs(ncut_cost(m, w) - testing::exhaustive_min_ncut(w)) <= 1e-15);
    }
}

TEST_CASE("ncut_cost: 4-node spectral cut within 1.05 of the exhaustive minimum") {
    // Random {epsilon, 1} graphs of random density; complete graphs have no
    // cut to compare and are skipped.
    std::mt19937 rng(404);
    std::uniform_real_distribution<double> density(0.2, 0.8);
    double worst = 1.0;
    int compared = 0;
    while (compared < 100) {
        const auto w = testing::random_saliency(rng, 4, density(rng));
        if ((w.array() == 1.0).all()) continue;
        const auto m = bipartition(second_smallest_generalized_eigvec(w).v);
        worst = std::max(worst, ncut_cost(m, w) / testing::exhaustive_min_ncut(w));
        ++compared;
    }
    MESSAGE("worst 4-node ratio " << worst);
    CHECK(worst <= 1.05);
}

TEST_CASE("masked_ncut: planted clusters with a background are recovered exactly") {
    std::mt19937 rng(31);
    for (std::size_t k : {2u, 3u, 5u}) {
        for (int trial = 0; trial < 5; ++trial) {
            const std::vector<std::size_t> sizes(k, 10);
            const auto sc = testing::planted_scene(rng, sizes, 10 * k + 5);
            const auto out = masked_ncut(sc.features, sc.seg, params(2));
            std::set<std::vector<std::uint32_t>> expect(sc.objects.begin(), sc.objects.end());
            CHECK(mask_sets(out) == expect);
        }
    }
}

TEST_CASE("masked_ncut: three equal clusters without a background yield two whole clusters") {
    // The last remaining cluster is homogeneous: its saliency block is all
    // ones, the vector is constant, inversion empties the foreground and the
    // loop stops. See the all-identical case below.
    std::mt19937 rng(32);
    for (int trial = 0; trial < 5; ++trial) {
        const auto sc = testing::planted_scene(rng, {10, 10, 10}, 0);
        const auto out = masked_ncut(sc.features, sc.seg, params(2));
        REQUIRE(out.masks.size() == 2);
        std::set<std::vector<std::uint32_t>> clusters(sc.objects.begin(), sc.objects.end());
        for (const auto& m : out.masks) CHECK(clusters.count(m.segment_ids) == 1);
    }
}

TEST_CASE("masked_ncut: homogeneous scene emits nothing") {
    const auto seg = testing::segment_graph(std::vector<std::size_t>(12, 3), {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}});
    const RowMatrix f = RowMatrix::Ones(12, 4);
    CHECK(masked_ncut(FeatureMatrix{f, Modality::Other}, seg, params(1)).masks.empty());
}

TEST_CASE("masked_ncut: min_foreground 8 output is a prefix of the 2 output") {
    std::mt19937 rng(33);
    std::uniform_int_distribution<int> obj(1, 12);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::size_t> sizes(1 + trial % 5);
        for (auto& s : sizes) s = static_cast<std::size_t>(obj(rng));
        const auto sc = testing::planted_scene(rng, sizes, 40, 0, 0.15);
        const auto dense = masked_ncut(sc.features, sc.seg, params(2));
        const auto sparse = masked_ncut(sc.features, sc.seg, params(8));
        REQUIRE(sparse.masks.size() <= dense.masks.size());
        for (std::size_t i = 0; i < sparse.masks.size(); ++i) CHECK(sparse.masks[i] == dense.masks[i]);
    }
}

TEST_CASE("masked_ncut: properties over random instances") {
    std::mt19937 rng(34);
    std::uniform_int_distribution<int> nseg(2, 50);
    std::uniform_real_distribution<double> tau(0.1, 0.9);
    const Separation seps[] = {Separation::Max, Separation::Avg, Separation::Largest, Separation::NoSep};
    for (int trial = 0; trial < 150; ++trial) {
        const auto n = static_cast<std::size_t>(nseg(rng));
        const auto seg = testing::random_segment_graph(rng, n, 0.05);
        const auto f = testing::random_rows(rng, static_cast<int>(n), 2 + trial % 6);
        NCutParams p = params(1 + trial % 4, seps[trial % 4], tau(rng));
        p.max_instances = 1 + trial % 25;
        const auto out = masked_ncut(FeatureMatrix{f, Modality::Other}, seg, p);
        CHECK(out.masks.size() <= p.max_instances);
        std::set<std::uint32_t> used;
        for (std::size_t i = 0; i < out.masks.size(); ++i) {
            const auto& m = out.masks[i];
            REQUIRE_FALSE(m.segment_ids.empty());
            CHECK(std::is_sorted(m.segment_ids.begin(), m.segment_ids.end()));
            CHECK(m.segment_ids.size() >= p.min_foreground_segments);
            if (p.separation != Separation::NoSep) CHECK(connected_under(m.segment_ids, seg));
            for (auto s : m.segment_ids) CHECK(used.insert(s).second);
            CHECK(m.confidence == 1.0 / (1.0 + static_cast<double>(i)));
            CHECK(m.source == MaskSource{MaskSource::Kind::NCut, static_cast<int>(i)});
            if (i > 0) CHECK(m.confidence < out.masks[i - 1].confidence);
        }
        CHECK(masked_ncut(FeatureMatrix{f, Modality::Other}, seg, p) == out);
        const RowMatrix scaled = f * 7.3;
        CHECK(masked_ncut(FeatureMatrix{scaled, Modality::Other}, seg, p) == out);
    }
}

TEST_CASE("masked_ncut: parameter and size errors") {
    const auto seg = testing::segment_graph({1, 1, 1}, {{0, 1}, {1, 2}});
    const FeatureMatrix f{RowMatrix::Identity(3, 3), Modality::Other};
    CHECK_THROWS_AS(masked_ncut(FeatureMatrix{RowMatrix::Ones(1, 3), Modality::Other}, testing::segment_graph({1}, {}), params(1)),
                    ParameterError);
    CHECK_THROWS_AS(masked_ncut(FeatureMatrix{RowMatrix::Identity(2, 2), Modality::Other}, seg, params(1)), DataError);
    auto bad = params(1);
    bad.tau_cut = 1.0;
    CHECK_THROWS_AS(masked_ncut(f, seg, bad), ParameterError);
    bad = params(0);
    CHECK_THROWS_AS(masked_ncut(f, seg, bad), ParameterError);
    CHECK_THROWS_AS(masked_ncut(threshold_saliency(cosine_similarity(f), 0.5, 1e-5), seg, params(1)), ParameterError);
}
