#pragma once

#include <cstdint>
#include <vector>

#include "segcut/features.hpp"
#include "segcut/masks.hpp"

namespace segcut {

struct FreeMaskParams {
    std::size_t n_seeds = 64;
    double tau_sim = 0.8;
    double nms_iou = 0.5;
    std::size_t max_kept = 64;

    void validate() const;
};

/// Farthest point sampling in feature space, starting from the row of
/// largest norm. Ties go to the smallest index.
std::vector<std::uint32_t> farthest_point_sampling(const FeatureMatrix& f, std::size_t n_seeds);

/// For each seed, the sorted set {j : cos(F_seed, F_j) >= tau_sim}.
std::vector<std::vector<std::uint32_t>> salient_regions(const FeatureMatrix& f, const std::vector<std::uint32_t>& seeds,
                                                        double tau_sim);

/// Mean pairwise similarity inside the mask times its share of vertices.
double maskness_score(const std::vector<std::uint32_t>& mask, const AffinityMatrix& a, const SegmentGraph& seg);

/// Greedy vertex-IoU suppression. Returns indices into `masks`, best first.
std::vector<std::size_t> nms(const std::vector<std::vector<std::uint32_t>>& masks, const std::vector<double>& scores,
                             const SegmentGraph& seg, double nms_iou, std::size_t max_kept);

PseudoMaskSet freemask_generate(const FeatureMatrix& f, const SegmentGraph& seg, const FreeMaskParams& params);

}  // namespace segcut
