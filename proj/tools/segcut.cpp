// Command-line driver: oversegment | pseudomask | merge | eval | export.
//
// Options may also come from an INI/TOML file given with --config; keys in
// a [<subcommand>] section map to that subcommand's long flags. Command-line
// flags take precedence over the file.

#include <iostream>
#include <map>
#include <thread>

#include <CLI11.hpp>

#include "segcut/error.hpp"
#include "segcut/pipeline.hpp"

namespace {

using namespace segcut;
using namespace segcut::pipeline;

void add_paths(CLI::App* cmd, PipelineConfig& cfg, std::filesystem::path& scene_list, std::size_t& jobs) {
    cmd->add_option("--mesh", cfg.mesh, "Input mesh (PLY)");
    cmd->add_option("--segments", cfg.segments, "Segment label file (default <out>/segments.txt)");
    cmd->add_option("--out", cfg.out_dir, "Output directory")->capture_default_str();
    cmd->add_option("--scene-name", cfg.scene_name, "Scene name used in exported file names");
    cmd->add_option("--scene-list", scene_list, "File with one scene directory per line (batch mode)");
    cmd->add_option("--jobs", jobs, "Scenes processed in parallel")->capture_default_str()->check(CLI::PositiveNumber);
}

void add_overseg(CLI::App* cmd, PipelineConfig& cfg) {
    cmd->add_option("--k", cfg.overseg.k, "Merge scale parameter")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--min-size", cfg.overseg.min_size, "Minimum segment size in vertices")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--color-weight", cfg.overseg.color_weight, "Weight of color in edge weights")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
}

void add_features(CLI::App* cmd, PipelineConfig& cfg) {
    cmd->add_option("--features-3d", cfg.features_3d, "Per-vertex geometric features (FMAT)");
    cmd->add_option("--features-2d", cfg.features_2d, "Per-vertex projected image features (FMAT)");
    cmd->add_option("--modality", cfg.modality, "auto|3d|2d|both")
        ->transform(CLI::CheckedTransformer(std::map<std::string, ModalitySelection>{
            {"auto", ModalitySelection::Auto},
            {"3d", ModalitySelection::Geometry3d},
            {"2d", ModalitySelection::Color2d},
            {"both", ModalitySelection::Both}}));
    cmd->add_option("--w2d", cfg.w2d, "Weight of the 2D similarity when fusing")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--aggregation", cfg.aggregation, "mean|median")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, Aggregation>{{"mean", Aggregation::Mean}, {"median", Aggregation::Median}}));
}

void add_generator(CLI::App* cmd, PipelineConfig& cfg) {
    cmd->add_option("--generator", cfg.generator, "ncut|freemask")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, Generator>{{"ncut", Generator::NCut}, {"freemask", Generator::FreeMask}}));
    cmd->add_option("--tau-cut", cfg.ncut.tau_cut, "Saliency threshold")->capture_default_str();
    cmd->add_option("--epsilon", cfg.ncut.epsilon, "Weight of non-salient pairs")->capture_default_str();
    cmd->add_option("--max-instances", cfg.ncut.max_instances, "Maximum masks per scene")->capture_default_str();
    cmd->add_option("--min-foreground", cfg.ncut.min_foreground_segments, "Minimum foreground segments per cut")
        ->capture_default_str();
    cmd->add_option("--separation", cfg.ncut.separation, "max|avg|largest|none")
        ->transform(CLI::CheckedTransformer(std::map<std::string, Separation>{{"max", Separation::Max},
                                                                               {"avg", Separation::Avg},
                                                                               {"largest", Separation::Largest},
                                                                               {"none", Separation::NoSep}}));
    cmd->add_option("--n-seeds", cfg.freemask.n_seeds, "FreeMask seed count")->capture_default_str();
    cmd->add_option("--tau-sim", cfg.freemask.tau_sim, "FreeMask region threshold")->capture_default_str();
    cmd->add_option("--nms-iou", cfg.freemask.nms_iou, "FreeMask suppression IoU")->capture_default_str();
    cmd->add_option("--max-kept", cfg.freemask.max_kept, "FreeMask maximum masks")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pseudo instance masks from mesh oversegmentation and masked normalized cuts"};
    app.set_config("--config", "", "INI/TOML configuration file");
    app.require_subcommand(1);

    PipelineConfig cfg;
    std::filesystem::path scene_list;
    std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());

    auto* overseg_cmd = app.add_subcommand("oversegment", "Cluster mesh vertices into geometric segments");
    add_paths(overseg_cmd, cfg, scene_list, jobs);
    add_overseg(overseg_cmd, cfg);

    auto* pseudo_cmd = app.add_subcommand("pseudomask", "Generate pseudo instance masks");
    add_paths(pseudo_cmd, cfg, scene_list, jobs);
    add_features(pseudo_cmd, cfg);
    add_generator(pseudo_cmd, cfg);

    auto* merge_cmd = app.add_subcommand("merge", "Add confident novel predictions to a pseudo-mask set");
    add_paths(merge_cmd, cfg, scene_list, jobs);
    merge_cmd->add_option("--masks", cfg.masks, "Existing pseudo-mask JSON (default <out>/pseudo_masks.json)");
    merge_cmd->add_option("--candidates", cfg.candidates, "Candidate predictions (pseudo-mask JSON)");
    merge_cmd->add_option("--top-k", cfg.merge.top_k, "Most confident candidates considered")->capture_default_str();
    merge_cmd->add_option("--novelty-iou", cfg.merge.min_novelty_iou, "Maximum IoU against existing masks")
        ->capture_default_str();
    merge_cmd->add_option("--iou-level", cfg.merge.level, "segment|vertex")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, IouLevel>{{"segment", IouLevel::Segment}, {"vertex", IouLevel::Vertex}}));
    merge_cmd->add_option("--cycle", cfg.merge.cycle, "Self-training cycle tag")->capture_default_str();

    auto* eval_cmd = app.add_subcommand("eval", "Class-agnostic AP@25 / AP@50 / AP");
    add_paths(eval_cmd, cfg, scene_list, jobs);
    eval_cmd->add_option("--gt", cfg.gt, "Ground-truth instance ids, one per vertex");
    eval_cmd->add_option("--predictions", cfg.predictions,
                         "Pseudo-mask JSON (needs --mesh) or export index (default <out>/pseudo_masks.json)");
    eval_cmd->add_flag("--per-scene", cfg.per_scene_eval, "Average per-scene AP instead of pooling matches");

    auto* export_cmd = app.add_subcommand("export", "Write a mesh colored by pseudo masks");
    add_paths(export_cmd, cfg, scene_list, jobs);
    export_cmd->add_option("--masks", cfg.masks, "Pseudo-mask JSON (default <out>/pseudo_masks.json)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    std::function<std::string(const PipelineConfig&)> job;
    if (overseg_cmd->parsed()) job = cmd_oversegment;
    else if (pseudo_cmd->parsed()) job = cmd_pseudomask;
    else if (merge_cmd->parsed()) job = cmd_merge;
    else if (eval_cmd->parsed()) job = cmd_eval;
    else job = cmd_export_colored;

    try {
        cfg.ncut.validate();
        if (cfg.generator == Generator::FreeMask) cfg.freemask.validate();
        cfg.merge.validate();

        if (scene_list.empty()) {
            std::cerr << job(cfg) << "\n";
            return 0;
        }

        std::vector<PipelineConfig> scenes;
        for (const auto& dir : read_scene_list(scene_list)) scenes.push_back(config_for_scene(cfg, dir));
        if (eval_cmd->parsed()) {
            std::cerr << cmd_eval_batch(scenes, cfg.out_dir, cfg.per_scene_eval) << "\n";
            return 0;
        }
        const auto failures = run_parallel(scenes, jobs, job, [](const std::string& line) { std::cerr << line << "\n"; });
        std::cerr << scenes.size() - failures.size() << "/" << scenes.size() << " scenes succeeded\n";
        int code = 0;
        for (const auto& f : failures) {
            std::cerr << "  " << f.scene << ": " << f.message << "\n";
            code = std::max(code, f.exit_code);
        }
        return code;
    } catch (const ParameterError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
