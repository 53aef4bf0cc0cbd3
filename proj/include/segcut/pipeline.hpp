#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "segcut/features.hpp"
#include "segcut/freemask.hpp"
#include "segcut/ncut.hpp"
#include "segcut/overseg.hpp"
#include "segcut/selftrain.hpp"

namespace segcut::pipeline {

enum class Generator { NCut, FreeMask };
enum class ModalitySelection { Auto, Geometry3d, Color2d, Both };

/// Everything a command needs. Relative paths are resolved against the
/// scene directory in batch mode.
struct PipelineConfig {
    std::filesystem::path mesh;
    std::filesystem::path features_2d;
    std::filesystem::path features_3d;
    std::filesystem::path gt;
    std::filesystem::path segments;     // default: <out>/segments.txt
    std::filesystem::path masks;        // default: <out>/pseudo_masks.json
    std::filesystem::path candidates;   // merge input
    std::filesystem::path predictions;  // eval input: pseudo-mask JSON or export index
    std::filesystem::path out_dir = "out";
    std::string scene_name;             // default: out directory name

    OversegParams overseg;
    NCutParams ncut;
    FreeMaskParams freemask;
    MergePolicy merge;
    double w2d = 0.5;
    Generator generator = Generator::NCut;
    ModalitySelection modality = ModalitySelection::Auto;
    Aggregation aggregation = Aggregation::Mean;
    bool per_scene_eval = false;

    std::filesystem::path segments_path() const;
    std::filesystem::path masks_path() const;
    std::string scene() const;
};

/// Names of the files each command writes inside `out_dir`.
inline constexpr const char* kSegmentsFile = "segments.txt";
inline constexpr const char* kSidecarFile = "segments.json";
inline constexpr const char* kMasksFile = "pseudo_masks.json";
inline constexpr const char* kMergedFile = "merged_masks.json";
inline constexpr const char* kExportDir = "export";
inline constexpr const char* kEvalJson = "eval.json";
inline constexpr const char* kEvalTable = "eval.txt";
inline constexpr const char* kColoredFile = "colored.ply";

/// Each command returns a one-line summary for logging.
std::string cmd_oversegment(const PipelineConfig& cfg);
std::string cmd_pseudomask(const PipelineConfig& cfg);
std::string cmd_merge(const PipelineConfig& cfg);
std::string cmd_eval(const PipelineConfig& cfg);
std::string cmd_export_colored(const PipelineConfig& cfg);

/// Pools matches over all scenes of a batch; writes the report into `out_dir`.
std::string cmd_eval_batch(const std::vector<PipelineConfig>& scenes, const std::filesystem::path& out_dir,
                           bool per_scene);

/// Similarity matrix for the selected modalities (fused when both).
AffinityMatrix build_affinity(const PipelineConfig& cfg, const SegmentGraph& seg, FeatureMatrix* generator_features);

/// 64 fixed RGB colors for mask visualization; none equals mid-gray.
const std::vector<Vec3>& mask_palette();
TriMesh color_by_masks(TriMesh mesh, const PseudoMaskSet& masks, const SegmentGraph& seg);

struct SceneFailure {
    std::string scene;
    std::string message;
    int exit_code;
};

/// Lines of a scene-list file, blank lines and '#' comments skipped.
std::vector<std::filesystem::path> read_scene_list(const std::filesystem::path& path);

/// Derives a per-scene config: relative inputs resolve against `scene_dir`
/// and outputs go to <out_dir>/<scene name>.
PipelineConfig config_for_scene(const PipelineConfig& base, const std::filesystem::path& scene_dir);

/// Runs `job` for every index on `jobs` worker threads. Failures are
/// collected, not rethrown.
std::vector<SceneFailure> run_parallel(const std::vector<PipelineConfig>& scenes, std::size_t jobs,
                                       const std::function<std::string(const PipelineConfig&)>& job,
                                       const std::function<void(const std::string&)>& log);

}  // namespace segcut::pipeline
