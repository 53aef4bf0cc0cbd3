#include "segcut/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <optional>
#include <thread>

#include <json.hpp>

#include "segcut/error.hpp"
#include "segcut/eval.hpp"
#include "segcut/io.hpp"
#include "segcut/masks.hpp"
#include "segcut/ply.hpp"

namespace segcut::pipeline {

namespace fs = std::filesystem;

fs::path PipelineConfig::segments_path() const { return segments.empty() ? out_dir / kSegmentsFile : segments; }
fs::path PipelineConfig::masks_path() const { return masks.empty() ? out_dir / kMasksFile : masks; }

std::string PipelineConfig::scene() const {
    if (!scene_name.empty()) return scene_name;
    if (!mesh.empty()) return mesh.stem().string();
    return "scene";
}

namespace {

const char* separation_name(Separation s) {
    switch (s) {
        case Separation::Max: return "max";
        case Separation::Avg: return "avg";
        case Separation::Largest: return "largest";
        case Separation::NoSep: return "none";
    }
    return "";
}

struct SceneGeometry {
    TriMesh mesh;
    SegmentGraph seg;
};

SceneGeometry load_geometry(const PipelineConfig& cfg) {
    if (cfg.mesh.empty()) throw ParameterError("--mesh is required");
    SceneGeometry g;
    g.mesh = load_ply(cfg.mesh);
    g.mesh.validate();
    g.seg = load_segments(cfg.segments_path(), g.mesh.vertex_count(), vertex_adjacency(g.mesh));
    return g;
}

ModalitySelection resolve_modality(const PipelineConfig& cfg) {
    if (cfg.modality != ModalitySelection::Auto) return cfg.modality;
    const bool has2d = !cfg.features_2d.empty(), has3d = !cfg.features_3d.empty();
    if (has2d && has3d) return ModalitySelection::Both;
    if (has3d) return ModalitySelection::Geometry3d;
    if (has2d) return ModalitySelection::Color2d;
    throw ParameterError("no feature file given (--features-3d and/or --features-2d)");
}

FeatureMatrix segment_features(const fs::path& path, Modality modality, const SegmentGraph& seg, Aggregation how) {
    if (path.empty())
        throw ParameterError(std::string("missing ") + (modality == Modality::Color2d ? "--features-2d" : "--features-3d"));
    const auto vf = load_vertex_features(path, modality);
    if (static_cast<std::size_t>(vf.rows.rows()) != seg.vertex_count())
        throw DataError(path.string() + ": " + std::to_string(vf.rows.rows()) + " feature rows for " +
                        std::to_string(seg.vertex_count()) + " mesh vertices");
    return aggregate_features(vf, seg, how);
}

RowMatrix unit_rows(const RowMatrix& m, double scale) {
    RowMatrix out = m;
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        const double n = out.row(i).norm();
        if (n > 0.0) out.row(i) *= scale / n;
    }
    return out;
}

nlohmann::json generator_params(const PipelineConfig& cfg, ModalitySelection modality) {
    nlohmann::json p;
    const char* mod = modality == ModalitySelection::Both ? "both" : modality == ModalitySelection::Geometry3d ? "3d" : "2d";
    p["modality"] = mod;
    p["w2d"] = cfg.w2d;
    p["aggregation"] = cfg.aggregation == Aggregation::Mean ? "mean" : "median";
    if (cfg.generator == Generator::NCut) {
        p["generator"] = "ncut";
        p["tau_cut"] = cfg.ncut.tau_cut;
        p["epsilon"] = cfg.ncut.epsilon;
        p["max_instances"] = cfg.ncut.max_instances;
        p["min_foreground_segments"] = cfg.ncut.min_foreground_segments;
        p["separation"] = separation_name(cfg.ncut.separation);
    } else {
        p["generator"] = "freemask";
        p["n_seeds"] = cfg.freemask.n_seeds;
        p["tau_sim"] = cfg.freemask.tau_sim;
        p["nms_iou"] = cfg.freemask.nms_iou;
        p["max_kept"] = cfg.freemask.max_kept;
    }
    return p;
}

std::vector<ScoredMask> load_predictions(const PipelineConfig& cfg, std::size_t gt_vertices) {
    const fs::path preds = cfg.predictions.empty() ? cfg.masks_path() : cfg.predictions;
    if (preds.extension() == ".json") {
        const auto g = load_geometry(cfg);
        if (g.mesh.vertex_count() != gt_vertices)
            throw DataError("ground truth has " + std::to_string(gt_vertices) + " vertices, mesh has " +
                            std::to_string(g.mesh.vertex_count()));
        const auto set = parse_masks(io::read_file(preds), preds.string());
        return to_scored_masks(set, g.seg);
    }
    return read_prediction_export(preds, gt_vertices);
}

EvalScene load_eval_scene(const PipelineConfig& cfg) {
    if (cfg.gt.empty()) throw ParameterError("--gt is required");
    EvalScene s;
    s.gt = load_ground_truth(cfg.gt);
    s.predictions = load_predictions(cfg, s.gt.instance_of_vertex.size());
    return s;
}

void write_report(const APReport& r, const fs::path& out_dir) {
    io::write_file_atomic(out_dir / kEvalJson, report_json(r));
    io::write_file_atomic(out_dir / kEvalTable, report_table(r));
}

}  // namespace

std::string cmd_oversegment(const PipelineConfig& cfg) {
    if (cfg.mesh.empty()) throw ParameterError("--mesh is required");
    TriMesh mesh = load_ply(cfg.mesh);
    mesh.validate();
    const auto seg = oversegment(mesh, cfg.overseg);
    io::write_file_atomic(cfg.out_dir / kSegmentsFile, serialize_segment_labels(seg));
    io::write_file_atomic(cfg.out_dir / kSidecarFile, serialize_segment_sidecar(seg, cfg.overseg));
    return cfg.scene() + ": " + std::to_string(seg.segment_count()) + " segments";
}

AffinityMatrix build_affinity(const PipelineConfig& cfg, const SegmentGraph& seg, FeatureMatrix* generator_features) {
    const auto modality = resolve_modality(cfg);
    if (modality == ModalitySelection::Geometry3d || modality == ModalitySelection::Color2d) {
        const bool is3d = modality == ModalitySelection::Geometry3d;
        auto f = segment_features(is3d ? cfg.features_3d : cfg.features_2d, is3d ? Modality::Geometry3d : Modality::Color2d,
                                  seg, cfg.aggregation);
        auto a = cosine_similarity(f);
        if (generator_features) *generator_features = std::move(f);
        return a;
    }
    auto f2 = segment_features(cfg.features_2d, Modality::Color2d, seg, cfg.aggregation);
    auto f3 = segment_features(cfg.features_3d, Modality::Geometry3d, seg, cfg.aggregation);
    if (generator_features) {
        // Unit rows scaled by sqrt(weight): cosine of the concatenation equals the fused similarity.
        const RowMatrix u2 = unit_rows(f2.rows, std::sqrt(cfg.w2d));
        const RowMatrix u3 = unit_rows(f3.rows, std::sqrt(1.0 - cfg.w2d));
        generator_features->modality = Modality::Other;
        generator_features->rows.resize(u2.rows(), u2.cols() + u3.cols());
        generator_features->rows << u2, u3;
    }
    return fuse_similarities(cosine_similarity(f2), cosine_similarity(f3), cfg.w2d);
}

std::string cmd_pseudomask(const PipelineConfig& cfg) {
    const auto g = load_geometry(cfg);
    const auto modality = resolve_modality(cfg);
    FeatureMatrix features;
    const auto affinity = build_affinity(cfg, g.seg, cfg.generator == Generator::FreeMask ? &features : nullptr);
    const PseudoMaskSet set = cfg.generator == Generator::NCut ? masked_ncut(affinity, g.seg, cfg.ncut)
                                                               : freemask_generate(features, g.seg, cfg.freemask);
    io::write_file_atomic(cfg.out_dir / kMasksFile, serialize_masks(set, generator_params(cfg, modality)));
    write_prediction_export(cfg.out_dir / kExportDir, cfg.scene(), to_scored_masks(set, g.seg), g.mesh.vertex_count());
    return cfg.scene() + ": " + std::to_string(set.masks.size()) + " instances";
}

std::string cmd_merge(const PipelineConfig& cfg) {
    if (cfg.candidates.empty()) throw ParameterError("--candidates is required");
    const auto existing_path = cfg.masks_path();
    nlohmann::json params;
    const auto existing = parse_masks(io::read_file(existing_path), existing_path.string(), &params);
    const auto candidates = parse_masks(io::read_file(cfg.candidates), cfg.candidates.string()).masks;
    std::optional<SceneGeometry> geom;
    if (cfg.merge.level == IouLevel::Vertex) geom = load_geometry(cfg);
    const auto merged = merge_predictions(existing, candidates, cfg.merge, geom ? &geom->seg : nullptr);
    params["merge"] = {{"top_k", cfg.merge.top_k},
                       {"min_novelty_iou", cfg.merge.min_novelty_iou},
                       {"iou_level", cfg.merge.level == IouLevel::Segment ? "segment" : "vertex"},
                       {"cycle", cfg.merge.cycle}};
    io::write_file_atomic(cfg.out_dir / kMergedFile, serialize_masks(merged, params));
    return cfg.scene() + ": " + std::to_string(merged.masks.size() - existing.masks.size()) + " of " +
           std::to_string(candidates.size()) + " candidates accepted, " + std::to_string(merged.masks.size()) + " masks";
}

std::string cmd_eval(const PipelineConfig& cfg) {
    const auto report = evaluate_ap_pooled({load_eval_scene(cfg)});
    write_report(report, cfg.out_dir);
    char buf[128];
    std::snprintf(buf, sizeof(buf), "AP@25 %.4f  AP@50 %.4f  AP %.4f", report.ap25, report.ap50, report.ap_mean);
    return cfg.scene() + ": " + buf;
}

std::string cmd_eval_batch(const std::vector<PipelineConfig>& scenes, const fs::path& out_dir, bool per_scene) {
    std::vector<EvalScene> loaded;
    loaded.reserve(scenes.size());
    for (const auto& s : scenes) loaded.push_back(load_eval_scene(s));
    const auto report = per_scene ? evaluate_ap_per_scene(loaded) : evaluate_ap_pooled(loaded);
    write_report(report, out_dir);
    char buf[128];
    std::snprintf(buf, sizeof(buf), "AP@25 %.4f  AP@50 %.4f  AP %.4f", report.ap25, report.ap50, report.ap_mean);
    return std::to_string(scenes.size()) + " scenes: " + buf;
}

const std::vector<Vec3>& mask_palette() {
    static const std::vector<Vec3> palette = [] {
        std::vector<Vec3> p;
        p.reserve(64);
        for (int i = 0; i < 64; ++i) {
            // Stride 23 is coprime with 64, so neighbors in mask order get distant hues.
            const double h = static_cast<double>((i * 23) % 64) / 64.0 * 6.0;
            const double s = i % 2 == 0 ? 0.85 : 0.55;
            const double v = (i / 2) % 2 == 0 ? 0.95 : 0.7;
            const int sector = static_cast<int>(h) % 6;
            const double f = h - std::floor(h);
            const double pp = v * (1 - s), q = v * (1 - s * f), t = v * (1 - s * (1 - f));
            Vec3 c;
            switch (sector) {
                case 0: c = {v, t, pp}; break;
                case 1: c = {q, v, pp}; break;
                case 2: c = {pp, v, t}; break;
                case 3: c = {pp, q, v}; break;
                case 4: c = {t, pp, v}; break;
                default: c = {v, pp, q}; break;
            }
            for (int k = 0; k < 3; ++k) c[k] = std::round(c[k] * 255.0) / 255.0;
            p.push_back(c);
        }
        return p;
    }();
    return palette;
}

TriMesh color_by_masks(TriMesh mesh, const PseudoMaskSet& masks, const SegmentGraph& seg) {
    if (seg.vertex_count() != mesh.vertex_count())
        throw DataError("segments cover " + std::to_string(seg.vertex_count()) + " vertices, mesh has " +
                        std::to_string(mesh.vertex_count()));
    mesh.colors.assign(mesh.vertex_count(), kDefaultColor);
    const auto& palette = mask_palette();
    // Paint in reverse so the most confident mask wins on overlaps.
    for (std::size_t i = masks.masks.size(); i-- > 0;)
        for (auto v : masks.masks[i].vertex_ids(seg)) mesh.colors[v] = palette[i % palette.size()];
    return mesh;
}

std::string cmd_export_colored(const PipelineConfig& cfg) {
    const auto g = load_geometry(cfg);
    const auto path = cfg.masks_path();
    const auto set = parse_masks(io::read_file(path), path.string());
    const auto colored = color_by_masks(g.mesh, set, g.seg);
    save_ply(colored, cfg.out_dir / kColoredFile, PlyFormat::BinaryLittleEndian);
    return cfg.scene() + ": colored " + std::to_string(set.masks.size()) + " masks";
}

std::vector<fs::path> read_scene_list(const fs::path& path) {
    const auto text = io::read_file(path);
    std::vector<fs::path> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string::npos) nl = text.size();
        std::string line = text.substr(pos, nl - pos);
        pos = nl + 1;
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        fs::path p = line.substr(first);
        if (p.is_relative()) p = path.parent_path() / p;
        out.push_back(p);
    }
    return out;
}

PipelineConfig config_for_scene(const PipelineConfig& base, const fs::path& scene_dir) {
    PipelineConfig cfg = base;
    auto resolve = [&](fs::path& p) {
        if (!p.empty() && p.is_relative()) p = scene_dir / p;
    };
    for (auto* p : {&cfg.mesh, &cfg.features_2d, &cfg.features_3d, &cfg.gt, &cfg.segments, &cfg.masks,
                    &cfg.candidates, &cfg.predictions})
        resolve(*p);
    auto name = scene_dir.filename();
    if (name.empty()) name = scene_dir.parent_path().filename();
    cfg.scene_name = name.string();
    cfg.out_dir = base.out_dir / name;
    return cfg;
}

std::vector<SceneFailure> run_parallel(const std::vector<PipelineConfig>& scenes, std::size_t jobs,
                                       const std::function<std::string(const PipelineConfig&)>& job,
                                       const std::function<void(const std::string&)>& log) {
    std::vector<std::optional<SceneFailure>> failures(scenes.size());
    std::atomic<std::size_t> next{0};
    std::mutex log_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < scenes.size(); i = next++) {
            std::string message;
            try {
                message = job(scenes[i]);
            } catch (const ParameterError& e) {
                failures[i] = SceneFailure{scenes[i].scene(), e.what(), 1};
                message = std::string("FAILED: ") + e.what();
            } catch (const std::exception& e) {
                failures[i] = SceneFailure{scenes[i].scene(), e.what(), 2};
                message = std::string("FAILED: ") + e.what();
            }
            std::lock_guard lock(log_mutex);
            log(failures[i] ? scenes[i].scene() + ": " + message : message);
        }
    };
    const std::size_t n_threads = std::max<std::size_t>(1, std::min(jobs, scenes.size()));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::vector<SceneFailure> out;
    for (auto& f : failures)
        if (f) out.push_back(std::move(*f));
    return out;
}

}  // namespace segcut::pipeline
