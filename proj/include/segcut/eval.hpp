#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "segcut/masks.hpp"

namespace segcut {

/// Per-vertex instance ids; 0 marks unannotated vertices, which are ignored.
struct GroundTruthSet {
    std::vector<std::uint32_t> instance_of_vertex;

    /// Sorted vertex lists, one per distinct id >= 1, ordered by id.
    std::vector<std::vector<std::uint32_t>> instances() const;
    std::vector<std::uint32_t> ignored() const;
};

/// A class-agnostic prediction on full-resolution vertices.
struct ScoredMask {
    std::vector<std::uint32_t> vertices;  // sorted
    double confidence = 0.0;
};

struct ThresholdResult {
    double threshold = 0.0;
    double ap = 0.0;
    std::vector<double> precision;
    std::vector<double> recall;
};

struct APReport {
    double ap25 = 0.0;
    double ap50 = 0.0;
    double ap_mean = 0.0;
    /// 0.25 first, then 0.50 ... 0.95.
    std::vector<ThresholdResult> curves;
};

/// One scene for pooled evaluation.
struct EvalScene {
    std::vector<ScoredMask> predictions;
    GroundTruthSet gt;
};

/// IoU after removing `ignore` from both operands; 0 for an empty union.
/// All inputs are sorted vertex lists.
double mask_iou(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b,
                const std::vector<std::uint32_t>& ignore);

/// IoU thresholds of the mean AP: 0.50, 0.55, ..., 0.95.
std::array<double, 10> mean_ap_thresholds();

/// Greedy confidence-ordered matching and all-point interpolated AP.
APReport evaluate_ap(const std::vector<ScoredMask>& preds, const GroundTruthSet& gt);
/// Matches are pooled across scenes before building the PR curve.
APReport evaluate_ap_pooled(const std::vector<EvalScene>& scenes);
/// Mean of per-scene AP values (curves are left empty).
APReport evaluate_ap_per_scene(const std::vector<EvalScene>& scenes);

std::vector<ScoredMask> to_scored_masks(const PseudoMaskSet& set, const SegmentGraph& seg);

GroundTruthSet load_ground_truth(const std::filesystem::path& path);

/// Benchmark-style export: `<dir>/<scene>.txt` holds lines
/// "pred_mask/<scene>_<i>.txt <confidence> 1", each mask file one 0/1 per vertex.
void write_prediction_export(const std::filesystem::path& dir, const std::string& scene,
                             const std::vector<ScoredMask>& preds, std::size_t vertex_count);
std::vector<ScoredMask> read_prediction_export(const std::filesystem::path& index_path, std::size_t vertex_count);

std::string report_json(const APReport& r);
std::string report_table(const APReport& r);

}  // namespace segcut
