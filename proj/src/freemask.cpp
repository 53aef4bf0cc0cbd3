#include "segcut/freemask.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "segcut/error.hpp"

namespace segcut {

void FreeMaskParams::validate() const {
    if (n_seeds < 1) throw ParameterError("freemask: n_seeds must be >= 1");
    if (!(tau_sim > 0.0 && tau_sim < 1.0)) throw ParameterError("freemask: tau_sim must lie in (0,1)");
    if (!(nms_iou > 0.0 && nms_iou <= 1.0)) throw ParameterError("freemask: nms_iou must lie in (0,1]");
    if (max_kept < 1) throw ParameterError("freemask: max_kept must be >= 1");
}

std::vector<std::uint32_t> farthest_point_sampling(const FeatureMatrix& f, std::size_t n_seeds) {
    const auto n = static_cast<std::size_t>(f.rows.rows());
    if (n_seeds > n) throw ParameterError("farthest_point_sampling: n_seeds exceeds row count");
    std::vector<std::uint32_t> seeds;
    if (n_seeds == 0) return seeds;
    seeds.reserve(n_seeds);

    std::uint32_t first = 0;
    for (std::uint32_t i = 1; i < n; ++i)
        if (f.rows.row(i).squaredNorm() > f.rows.row(first).squaredNorm()) first = i;
    seeds.push_back(first);

    std::vector<double> min_dist(n, std::numeric_limits<double>::infinity());
    std::vector<std::uint8_t> chosen(n, 0);
    chosen[first] = 1;
    while (seeds.size() < n_seeds) {
        const auto last = seeds.back();
        std::uint32_t best = 0;
        double best_d = -1.0;
        for (std::uint32_t i = 0; i < n; ++i) {
            min_dist[i] = std::min(min_dist[i], (f.rows.row(i) - f.rows.row(last)).squaredNorm());
            if (!chosen[i] && min_dist[i] > best_d) {
                best_d = min_dist[i];
                best = i;
            }
        }
        chosen[best] = 1;
        seeds.push_back(best);
    }
    return seeds;
}

std::vector<std::vector<std::uint32_t>> salient_regions(const FeatureMatrix& f, const std::vector<std::uint32_t>& seeds,
                                                        double tau_sim) {
    const auto n = f.rows.rows();
    for (auto s : seeds)
        if (s >= n) throw ParameterError("salient_regions: seed out of range");
    Eigen::VectorXd norms = f.rows.rowwise().norm();
    std::vector<std::vector<std::uint32_t>> out(seeds.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t k = 0; k < static_cast<std::int64_t>(seeds.size()); ++k) {
        const auto s = seeds[k];
        for (Eigen::Index j = 0; j < n; ++j) {
            double sim = 0.0;
            if (j == s) sim = 1.0;
            else if (norms[s] > 0.0 && norms[j] > 0.0) sim = f.rows.row(s).dot(f.rows.row(j)) / (norms[s] * norms[j]);
            if (sim >= tau_sim) out[k].push_back(static_cast<std::uint32_t>(j));
        }
    }
    return out;
}

double maskness_score(const std::vector<std::uint32_t>& mask, const AffinityMatrix& a, const SegmentGraph& seg) {
    if (mask.empty()) throw ParameterError("maskness_score: empty mask");
    double sum = 0.0;
    std::size_t vertices = 0;
    for (auto i : mask) {
        vertices += seg.segment_vertices[i].size();
        for (auto j : mask) sum += a.values(i, j);
    }
    const double mean_sim = sum / static_cast<double>(mask.size() * mask.size());
    return mean_sim * static_cast<double>(vertices) / static_cast<double>(seg.vertex_count());
}

std::vector<std::size_t> nms(const std::vector<std::vector<std::uint32_t>>& masks, const std::vector<double>& scores,
                             const SegmentGraph& seg, double nms_iou, std::size_t max_kept) {
    if (masks.size() != scores.size()) throw ParameterError("nms: masks and scores differ in length");
    std::vector<std::size_t> order(masks.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] > scores[b]; });

    std::vector<std::vector<std::uint32_t>> vertex_sets(masks.size());
    for (std::size_t i = 0; i < masks.size(); ++i) {
        InstanceMask tmp;
        tmp.segment_ids = masks[i];
        std::sort(tmp.segment_ids.begin(), tmp.segment_ids.end());
        vertex_sets[i] = tmp.vertex_ids(seg);
    }

    std::vector<std::size_t> kept;
    for (auto idx : order) {
        if (kept.size() >= max_kept) break;
        const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](auto k) {
            return sorted_iou(vertex_sets[idx], vertex_sets[k]) >= nms_iou;
        });
        if (!suppressed) kept.push_back(idx);
    }
    return kept;
}

PseudoMaskSet freemask_generate(const FeatureMatrix& f, const SegmentGraph& seg, const FreeMaskParams& params) {
    params.validate();
    const auto n = static_cast<std::size_t>(f.rows.rows());
    if (n < 1) throw ParameterError("freemask_generate: no segments");
    if (n != seg.segment_count())
        throw DataError("freemask_generate: " + std::to_string(n) + " feature rows for " +
                        std::to_string(seg.segment_count()) + " segments");

    const auto seeds = farthest_point_sampling(f, std::min(params.n_seeds, n));
    const auto regions = salient_regions(f, seeds, params.tau_sim);
    const AffinityMatrix a = cosine_similarity(f);
    std::vector<double> scores(regions.size());
    for (std::size_t i = 0; i < regions.size(); ++i) scores[i] = maskness_score(regions[i], a, seg);
    const auto kept = nms(regions, scores, seg, params.nms_iou, params.max_kept);

    // Rescale to (0,1]: divide by the best score, floor at a tiny positive value.
    const double top = kept.empty() ? 1.0 : scores[kept.front()];
    PseudoMaskSet out;
    for (auto k : kept) {
        InstanceMask m;
        m.segment_ids = regions[k];
        const double c = top > 0.0 ? scores[k] / top : 1.0;
        m.confidence = std::clamp(c, 1e-6, 1.0);
        m.source = {MaskSource::Kind::FreeMask, 0};
        out.masks.push_back(std::move(m));
    }
    return out;
}

}  // namespace segcut
