#pragma once

#include <vector>

#include "segcut/masks.hpp"

namespace segcut {

enum class IouLevel { Segment, Vertex };

struct MergePolicy {
    std::size_t top_k = 50;
    /// A candidate enters only if its IoU with every mask already in the
    /// result is at most this bound.
    double min_novelty_iou = 0.3;
    IouLevel level = IouLevel::Segment;
    int cycle = 1;

    void validate() const;
};

/// Densifies `existing` with the most confident novel candidates. The
/// output always starts with `existing`, unchanged. `seg` is required for
/// vertex-level IoU only.
PseudoMaskSet merge_predictions(const PseudoMaskSet& existing, const std::vector<InstanceMask>& candidates,
                                const MergePolicy& policy, const SegmentGraph* seg = nullptr);

}  // namespace segcut
