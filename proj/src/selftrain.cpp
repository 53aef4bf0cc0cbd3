#include "segcut/selftrain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "segcut/error.hpp"

namespace segcut {

void MergePolicy::validate() const {
    if (top_k < 1) throw ParameterError("merge: top_k must be >= 1");
    if (!(min_novelty_iou >= 0.0 && min_novelty_iou < 1.0)) throw ParameterError("merge: novelty IoU must lie in [0,1)");
    if (cycle < 0) throw ParameterError("merge: cycle must be >= 0");
}

PseudoMaskSet merge_predictions(const PseudoMaskSet& existing, const std::vector<InstanceMask>& candidates,
                                const MergePolicy& policy, const SegmentGraph* seg) {
    policy.validate();
    if (policy.level == IouLevel::Vertex && seg == nullptr)
        throw ParameterError("merge: vertex-level IoU needs the segment graph");
    for (const auto& c : candidates)
        if (!std::isfinite(c.confidence)) throw DataError("merge: candidate with non-finite confidence");

    auto key = [&](const InstanceMask& m) {
        if (policy.level == IouLevel::Vertex) return m.vertex_ids(*seg);
        auto ids = m.segment_ids;
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        return ids;
    };

    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](auto a, auto b) { return candidates[a].confidence > candidates[b].confidence; });
    if (order.size() > policy.top_k) order.resize(policy.top_k);

    PseudoMaskSet out = existing;
    std::vector<std::vector<std::uint32_t>> keys;
    keys.reserve(out.masks.size() + order.size());
    for (const auto& m : out.masks) keys.push_back(key(m));

    for (auto idx : order) {
        auto k = key(candidates[idx]);
        if (k.empty()) continue;
        const bool novel = std::all_of(keys.begin(), keys.end(),
                                       [&](const auto& other) { return sorted_iou(k, other) <= policy.min_novelty_iou; });
        if (!novel) continue;
        InstanceMask accepted = candidates[idx];
        std::sort(accepted.segment_ids.begin(), accepted.segment_ids.end());
        accepted.segment_ids.erase(std::unique(accepted.segment_ids.begin(), accepted.segment_ids.end()),
                                   accepted.segment_ids.end());
        accepted.source = {MaskSource::Kind::Merged, policy.cycle};
        out.masks.push_back(std::move(accepted));
        keys.push_back(std::move(k));
    }
    return out;
}

}  // namespace segcut
