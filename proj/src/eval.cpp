#include "segcut/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>

#include "segcut/error.hpp"
#include "segcut/io.hpp"

namespace segcut {

std::vector<std::vector<std::uint32_t>> GroundTruthSet::instances() const {
    std::map<std::uint32_t, std::vector<std::uint32_t>> by_id;
    for (std::uint32_t v = 0; v < instance_of_vertex.size(); ++v)
        if (instance_of_vertex[v] != 0) by_id[instance_of_vertex[v]].push_back(v);
    std::vector<std::vector<std::uint32_t>> out;
    out.reserve(by_id.size());
    for (auto& [id, verts] : by_id) out.push_back(std::move(verts));
    return out;
}

std::vector<std::uint32_t> GroundTruthSet::ignored() const {
    std::vector<std::uint32_t> out;
    for (std::uint32_t v = 0; v < instance_of_vertex.size(); ++v)
        if (instance_of_vertex[v] == 0) out.push_back(v);
    return out;
}

double mask_iou(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b,
                const std::vector<std::uint32_t>& ignore) {
    auto strip = [&](const std::vector<std::uint32_t>& x) {
        if (ignore.empty()) return x;
        std::vector<std::uint32_t> out;
        std::set_difference(x.begin(), x.end(), ignore.begin(), ignore.end(), std::back_inserter(out));
        return out;
    };
    return sorted_iou(strip(a), strip(b));
}

std::array<double, 10> mean_ap_thresholds() {
    std::array<double, 10> t{};
    for (int i = 0; i < 10; ++i) t[i] = (50 + 5 * i) / 100.0;
    return t;
}

namespace {

struct Hit {
    double confidence;
    bool tp;
};

/// Per-prediction TP flags in the given (already confidence-sorted) order.
std::vector<std::uint8_t> match_scene(const std::vector<std::vector<double>>& iou, std::size_t n_gt, double t) {
    std::vector<std::uint8_t> taken(n_gt, 0), tp(iou.size(), 0);
    for (std::size_t p = 0; p < iou.size(); ++p) {
        std::size_t best = n_gt;
        for (std::size_t g = 0; g < n_gt; ++g)
            if (!taken[g] && (best == n_gt || iou[p][g] > iou[p][best])) best = g;
        if (best < n_gt && iou[p][best] >= t) {
            taken[best] = 1;
            tp[p] = 1;
        }
    }
    return tp;
}

ThresholdResult integrate(std::vector<Hit> hits, std::size_t n_gt, double t) {
    ThresholdResult r;
    r.threshold = t;
    std::stable_sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) { return a.confidence > b.confidence; });
    std::size_t tp = 0;
    for (std::size_t i = 0; i < hits.size(); ++i) {
        tp += hits[i].tp ? 1 : 0;
        r.precision.push_back(static_cast<double>(tp) / static_cast<double>(i + 1));
        r.recall.push_back(static_cast<double>(tp) / static_cast<double>(n_gt));
    }
    std::vector<double> envelope = r.precision;
    for (std::size_t i = envelope.size(); i-- > 1;) envelope[i - 1] = std::max(envelope[i - 1], envelope[i]);
    // Recall rises by exactly 1/n_gt at each true positive.
    double area = 0.0;
    for (std::size_t i = 0; i < hits.size(); ++i)
        if (hits[i].tp) area += envelope[i];
    r.ap = area / static_cast<double>(n_gt);
    return r;
}

struct PreparedScene {
    std::vector<double> confidence;              // sorted order
    std::vector<std::vector<double>> iou;        // [pred][gt] in sorted order
    std::size_t n_gt = 0;
};

PreparedScene prepare(const EvalScene& scene) {
    const auto n_vertices = scene.gt.instance_of_vertex.size();
    for (const auto& p : scene.predictions) {
        if (p.vertices.empty()) throw DataError("evaluate_ap: prediction with an empty vertex set");
        if (!std::isfinite(p.confidence)) throw DataError("evaluate_ap: non-finite confidence");
        if (p.vertices.back() >= n_vertices) throw DataError("evaluate_ap: prediction vertex out of range");
    }
    std::vector<std::size_t> order(scene.predictions.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
        return scene.predictions[a].confidence > scene.predictions[b].confidence;
    });
    const auto gts = scene.gt.instances();
    const auto ignore = scene.gt.ignored();
    PreparedScene s;
    s.n_gt = gts.size();
    for (auto idx : order) {
        s.confidence.push_back(scene.predictions[idx].confidence);
        auto& row = s.iou.emplace_back(gts.size());
        for (std::size_t g = 0; g < gts.size(); ++g) row[g] = mask_iou(scene.predictions[idx].vertices, gts[g], ignore);
    }
    return s;
}

std::vector<double> all_thresholds() {
    std::vector<double> t{0.25};
    for (double x : mean_ap_thresholds()) t.push_back(x);
    return t;
}

APReport summarize(std::vector<ThresholdResult> curves) {
    APReport r;
    r.ap25 = curves[0].ap;
    r.ap50 = curves[1].ap;
    double sum = 0.0;
    for (std::size_t i = 1; i < curves.size(); ++i) sum += curves[i].ap;
    // Each term is at most ap50; keep rounding from lifting the mean above it.
    r.ap_mean = std::min(r.ap50, sum / static_cast<double>(curves.size() - 1));
    r.curves = std::move(curves);
    return r;
}

}  // namespace

APReport evaluate_ap_pooled(const std::vector<EvalScene>& scenes) {
    std::vector<PreparedScene> prepared;
    std::size_t n_gt = 0;
    for (const auto& s : scenes) {
        prepared.push_back(prepare(s));
        n_gt += prepared.back().n_gt;
    }
    if (n_gt == 0) throw DataError("evaluate_ap: ground truth has no instances");

    std::vector<ThresholdResult> curves;
    for (double t : all_thresholds()) {
        std::vector<Hit> hits;
        for (const auto& s : prepared) {
            const auto tp = match_scene(s.iou, s.n_gt, t);
            for (std::size_t p = 0; p < tp.size(); ++p) hits.push_back({s.confidence[p], tp[p] != 0});
        }
        curves.push_back(integrate(std::move(hits), n_gt, t));
    }
    return summarize(std::move(curves));
}

APReport evaluate_ap(const std::vector<ScoredMask>& preds, const GroundTruthSet& gt) {
    return evaluate_ap_pooled({EvalScene{preds, gt}});
}

APReport evaluate_ap_per_scene(const std::vector<EvalScene>& scenes) {
    if (scenes.empty()) throw DataError("evaluate_ap: no scenes");
    APReport mean;
    for (const auto& s : scenes) {
        const auto r = evaluate_ap(s.predictions, s.gt);
        mean.ap25 += r.ap25;
        mean.ap50 += r.ap50;
        mean.ap_mean += r.ap_mean;
    }
    const double n = static_cast<double>(scenes.size());
    mean.ap25 /= n;
    mean.ap50 /= n;
    mean.ap_mean /= n;
    return mean;
}

std::vector<ScoredMask> to_scored_masks(const PseudoMaskSet& set, const SegmentGraph& seg) {
    std::vector<ScoredMask> out;
    out.reserve(set.masks.size());
    for (const auto& m : set.masks) out.push_back({m.vertex_ids(seg), m.confidence});
    return out;
}

namespace {

std::vector<std::string_view> lines_of(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        auto line = text.substr(pos, nl - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        out.push_back(line);
        pos = nl + 1;
    }
    return out;
}

std::uint32_t parse_uint(std::string_view tok, const std::string& src, std::size_t line) {
    std::uint32_t v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || p != tok.data() + tok.size())
        throw ParseError(src, "line " + std::to_string(line), "expected a non-negative integer, got '" + std::string(tok) + "'");
    return v;
}

std::string format_double(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, p);
}

}  // namespace

GroundTruthSet load_ground_truth(const std::filesystem::path& path) {
    const auto text = io::read_file(path);
    GroundTruthSet gt;
    const auto lines = lines_of(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        gt.instance_of_vertex.push_back(parse_uint(lines[i], path.string(), i + 1));
    }
    return gt;
}

void write_prediction_export(const std::filesystem::path& dir, const std::string& scene,
                             const std::vector<ScoredMask>& preds, std::size_t vertex_count) {
    std::string index;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const std::string rel = "pred_mask/" + scene + "_" + std::to_string(i) + ".txt";
        std::string mask(vertex_count * 2, '\0');
        for (std::size_t v = 0; v < vertex_count; ++v) {
            mask[2 * v] = '0';
            mask[2 * v + 1] = '\n';
        }
        for (auto v : preds[i].vertices) {
            if (v >= vertex_count) throw DataError("export: mask vertex out of range");
            mask[2 * v] = '1';
        }
        io::write_file_atomic(dir / rel, mask);
        index += rel + " " + format_double(preds[i].confidence) + " 1\n";
    }
    io::write_file_atomic(dir / (scene + ".txt"), index);
}

std::vector<ScoredMask> read_prediction_export(const std::filesystem::path& index_path, std::size_t vertex_count) {
    const auto text = io::read_file(index_path);
    const auto lines = lines_of(text);
    std::vector<ScoredMask> out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        std::istringstream ss{std::string(lines[i])};
        std::string rel;
        double conf = 0.0;
        int label = 0;
        if (!(ss >> rel >> conf >> label))
            throw ParseError(index_path.string(), "line " + std::to_string(i + 1), "expected 'path confidence 1'");
        const auto mask_path = index_path.parent_path() / rel;
        const auto mask_text = io::read_file(mask_path);
        const auto mask_lines = lines_of(mask_text);
        ScoredMask m;
        m.confidence = conf;
        std::size_t v = 0;
        for (std::size_t k = 0; k < mask_lines.size(); ++k) {
            if (mask_lines[k].empty()) continue;
            const auto bit = parse_uint(mask_lines[k], mask_path.string(), k + 1);
            if (bit > 1) throw ParseError(mask_path.string(), "line " + std::to_string(k + 1), "mask value must be 0 or 1");
            if (bit) m.vertices.push_back(static_cast<std::uint32_t>(v));
            ++v;
        }
        if (v != vertex_count)
            throw DataError(mask_path.string() + ": " + std::to_string(v) + " mask values for " +
                            std::to_string(vertex_count) + " vertices");
        out.push_back(std::move(m));
    }
    return out;
}

std::string report_json(const APReport& r) {
    std::ostringstream ss;
    ss << "{\n  \"ap25\": " << format_double(r.ap25) << ",\n  \"ap50\": " << format_double(r.ap50)
       << ",\n  \"ap\": " << format_double(r.ap_mean) << ",\n  \"per_threshold\": [";
    for (std::size_t i = 0; i < r.curves.size(); ++i) {
        const auto& c = r.curves[i];
        ss << (i ? ",\n" : "\n") << "    {\"iou\": " << format_double(c.threshold) << ", \"ap\": " << format_double(c.ap)
           << ", \"precision\": [";
        for (std::size_t k = 0; k < c.precision.size(); ++k) ss << (k ? ", " : "") << format_double(c.precision[k]);
        ss << "], \"recall\": [";
        for (std::size_t k = 0; k < c.recall.size(); ++k) ss << (k ? ", " : "") << format_double(c.recall[k]);
        ss << "]}";
    }
    ss << (r.curves.empty() ? "]\n}\n" : "\n  ]\n}\n");
    return ss.str();
}

std::string report_table(const APReport& r) {
    char buf[256];
    std::string out = "metric      value\n";
    std::snprintf(buf, sizeof(buf), "AP@25   %9.4f\nAP@50   %9.4f\nAP      %9.4f\n", r.ap25, r.ap50, r.ap_mean);
    out += buf;
    if (!r.curves.empty()) {
        out += "\niou     ap       #pred\n";
        for (const auto& c : r.curves) {
            std::snprintf(buf, sizeof(buf), "%.2f  %7.4f  %6zu\n", c.threshold, c.ap, c.precision.size());
            out += buf;
        }
    }
    return out;
}

}  // namespace segcut
