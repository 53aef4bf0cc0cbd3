#include "segcut/ncut.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <lapacke.h>

#include "segcut/error.hpp"

namespace segcut {

void NCutParams::validate() const {
    if (!(tau_cut > 0.0 && tau_cut < 1.0)) throw ParameterError("tau_cut must lie in (0,1)");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ParameterError("epsilon must lie in (0,1)");
    if (max_instances < 1) throw ParameterError("max_instances must be >= 1");
    if (min_foreground_segments < 1) throw ParameterError("min_foreground_segments must be >= 1");
}

namespace {

void fix_sign(Eigen::VectorXd& v) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < v.size(); ++i)
        if (std::abs(v[i]) > std::abs(v[best])) best = i;
    if (v[best] < 0.0) v = -v;
}

}  // namespace

EigenPair second_smallest_generalized_eigvec(const RowMatrix& w) {
    const auto n = w.rows();
    if (n < 2 || w.cols() != n) throw ParameterError("eigen solve needs a square matrix with at least 2 rows");

    Eigen::VectorXd degree;
    // I - D^{-1/2} W D^{-1/2} shares its spectrum with the generalized problem.
    RowMatrix b = -kernels::parallel::normalized_affinity(w, degree);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(degree[i] > 0.0)) throw DataError("eigen solve: row " + std::to_string(i) + " has non-positive degree");
        b(i, i) += 1.0;
    }

    lapack_int found = 0;
    Eigen::VectorXd values(n);
    Eigen::VectorXd u(n);
    std::vector<lapack_int> support(2);
    const lapack_int info = LAPACKE_dsyevr(LAPACK_ROW_MAJOR, 'V', 'I', 'U', static_cast<lapack_int>(n), b.data(),
                                           static_cast<lapack_int>(n), 0.0, 0.0, 2, 2, 0.0, &found, values.data(),
                                           u.data(), 1, support.data());
    if (info != 0 || found != 1) throw DataError("eigen solve failed (dsyevr info " + std::to_string(info) + ")");

    EigenPair out;
    out.lambda = values[0];
    out.v = u.array() / degree.array().sqrt();
    out.v.normalize();
    fix_sign(out.v);
    return out;
}

EigenPair second_smallest_generalized_eigvec(const AffinityMatrix& w, std::span<const std::uint32_t> active) {
    if (active.size() < 2) throw ParameterError("eigen solve needs at least 2 active segments");
    RowMatrix sub(static_cast<Eigen::Index>(active.size()), static_cast<Eigen::Index>(active.size()));
    for (std::size_t a = 0; a < active.size(); ++a)
        for (std::size_t b = 0; b < active.size(); ++b) sub(a, b) = w.values(active[a], active[b]);
    return second_smallest_generalized_eigvec(sub);
}

BinaryMask bipartition(const Eigen::VectorXd& v) {
    BinaryMask m(static_cast<std::size_t>(v.size()), 0);
    if (v.size() == 0) return m;
    const double mean = v.mean();
    const double spread = (v.array() - mean).abs().maxCoeff();
    const double tol = 1e-10 * spread;
    for (Eigen::Index i = 0; i < v.size(); ++i) m[i] = v[i] >= mean - tol ? 1 : 0;
    return m;
}

bool invert_if_majority(BinaryMask& m, Eigen::VectorXd& v) {
    const auto ones = static_cast<std::size_t>(std::count(m.begin(), m.end(), 1));
    if (2 * ones <= m.size()) return false;
    for (auto& x : m) x = x ? 0 : 1;
    v = -v;
    return true;
}

BinaryMask separate_components(const BinaryMask& m, const Eigen::VectorXd& v, std::span<const std::uint32_t> active,
                               const SegmentGraph& seg, Separation strategy) {
    if (m.size() != active.size() || static_cast<std::size_t>(v.size()) != active.size())
        throw ParameterError("separate_components: mask, vector and active set differ in length");
    if (std::find(m.begin(), m.end(), 1) == m.end()) throw ParameterError("separate_components: empty foreground");
    if (strategy == Separation::NoSep) return m;

    std::vector<int> pos(seg.segment_count(), -1);
    for (std::size_t i = 0; i < active.size(); ++i) pos[active[i]] = static_cast<int>(i);
    const auto nb = seg.neighbors();

    // Label foreground components in order of their smallest position.
    std::vector<int> comp(active.size(), -1);
    int n_comp = 0;
    std::vector<std::size_t> stack;
    for (std::size_t start = 0; start < active.size(); ++start) {
        if (!m[start] || comp[start] >= 0) continue;
        comp[start] = n_comp;
        stack.assign(1, start);
        while (!stack.empty()) {
            const auto cur = stack.back();
            stack.pop_back();
            for (auto other : nb[active[cur]]) {
                const int p = pos[other];
                if (p < 0 || !m[p] || comp[p] >= 0) continue;
                comp[p] = n_comp;
                stack.push_back(static_cast<std::size_t>(p));
            }
        }
        ++n_comp;
    }
    if (n_comp == 1) return m;

    int keep = 0;
    if (strategy == Separation::Max) {
        std::size_t best = active.size();
        for (std::size_t i = 0; i < active.size(); ++i)
            if (m[i] && (best == active.size() || v[i] > v[best])) best = i;
        keep = comp[best];
    } else {
        std::vector<double> sum(n_comp, 0.0);
        std::vector<std::size_t> count(n_comp, 0), vertices(n_comp, 0);
        for (std::size_t i = 0; i < active.size(); ++i) {
            if (!m[i]) continue;
            sum[comp[i]] += v[i];
            ++count[comp[i]];
            vertices[comp[i]] += seg.segment_vertices[active[i]].size();
        }
        for (int c = 1; c < n_comp; ++c) {
            if (strategy == Separation::Avg) {
                if (sum[c] / count[c] > sum[keep] / count[keep]) keep = c;
            } else if (vertices[c] > vertices[keep]) {
                keep = c;
            }
        }
    }
    BinaryMask out(active.size(), 0);
    for (std::size_t i = 0; i < active.size(); ++i) out[i] = comp[i] == keep ? 1 : 0;
    return out;
}

double ncut_cost(const BinaryMask& in_a, const RowMatrix& w) {
    const auto n = w.rows();
    if (static_cast<Eigen::Index>(in_a.size()) != n) throw ParameterError("ncut_cost: mask length differs from matrix");
    const auto ones = std::count(in_a.begin(), in_a.end(), 1);
    if (ones == 0 || ones == n) throw ParameterError("ncut_cost: mask must be a proper non-empty subset");
    double cut = 0.0, assoc_a = 0.0, assoc_b = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double row = w.row(i).sum();
        (in_a[i] ? assoc_a : assoc_b) += row;
        if (!in_a[i]) continue;
        for (Eigen::Index j = 0; j < n; ++j)
            if (!in_a[j]) cut += w(i, j);
    }
    return cut / assoc_a + cut / assoc_b;
}

PseudoMaskSet masked_ncut(const AffinityMatrix& affinity, const SegmentGraph& seg, const NCutParams& params) {
    params.validate();
    const auto n = seg.segment_count();
    if (n < 2) throw ParameterError("masked_ncut needs at least 2 segments");
    if (affinity.kind != AffinityKind::RawCosine) throw ParameterError("masked_ncut expects a raw similarity matrix");
    if (static_cast<std::size_t>(affinity.size()) != n)
        throw DataError("masked_ncut: affinity is " + std::to_string(affinity.size()) + "x" +
                        std::to_string(affinity.size()) + " for " + std::to_string(n) + " segments");

    PseudoMaskSet out;
    std::vector<std::uint32_t> active(n);
    std::iota(active.begin(), active.end(), 0u);

    for (std::size_t iteration = 0; iteration < params.max_instances && active.size() >= 2; ++iteration) {
        const RowMatrix w = kernels::parallel::restrict_saliency(affinity.values, active, params.tau_cut, params.epsilon);

        Eigen::VectorXd v;
        if ((w.array() == 1.0).all()) {
            // One salient region and no cut to make: the Fiedler space is
            // fully degenerate, so the vector is taken as constant.
            v = Eigen::VectorXd::Constant(w.rows(), 1.0 / std::sqrt(static_cast<double>(w.rows())));
        } else {
            v = second_smallest_generalized_eigvec(w).v;
        }

        BinaryMask m = bipartition(v);
        invert_if_majority(m, v);
        if (std::find(m.begin(), m.end(), 1) == m.end()) break;
        m = separate_components(m, v, active, seg, params.separation);
        if (static_cast<std::size_t>(std::count(m.begin(), m.end(), 1)) < params.min_foreground_segments) break;

        InstanceMask mask;
        mask.confidence = 1.0 / (1.0 + static_cast<double>(iteration));
        mask.source = {MaskSource::Kind::NCut, static_cast<int>(iteration)};
        std::vector<std::uint32_t> remaining;
        remaining.reserve(active.size());
        for (std::size_t i = 0; i < active.size(); ++i) (m[i] ? mask.segment_ids : remaining).push_back(active[i]);
        out.masks.push_back(std::move(mask));
        active = std::move(remaining);
    }
    return out;
}

PseudoMaskSet masked_ncut(const FeatureMatrix& features, const SegmentGraph& seg, const NCutParams& params) {
    if (static_cast<std::size_t>(features.rows.rows()) != seg.segment_count())
        throw DataError("masked_ncut: " + std::to_string(features.rows.rows()) + " feature rows for " +
                        std::to_string(seg.segment_count()) + " segments");
    return masked_ncut(cosine_similarity(features), seg, params);
}

}  // namespace segcut
