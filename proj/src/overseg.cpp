#include "segcut/overseg.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>

#include <json.hpp>

#include "segcut/error.hpp"
#include "segcut/io.hpp"
#include "segcut/kernels.hpp"
#include "segcut/union_find.hpp"

namespace segcut {

std::vector<std::vector<std::uint32_t>> SegmentGraph::neighbors() const {
    std::vector<std::vector<std::uint32_t>> nb(segment_count());
    for (auto [a, b] : adjacency) {
        nb[a].push_back(b);
        nb[b].push_back(a);
    }
    for (auto& list : nb) std::sort(list.begin(), list.end());
    return nb;
}

SegmentGraph SegmentGraph::from_labels(const std::vector<std::uint32_t>& labels, const EdgeList& edges, bool renumber) {
    SegmentGraph g;
    g.segment_of_vertex.resize(labels.size());
    if (renumber) {
        std::vector<std::uint32_t> remap;
        for (std::size_t v = 0; v < labels.size(); ++v) {
            const auto l = labels[v];
            if (l >= remap.size()) remap.resize(static_cast<std::size_t>(l) + 1, UINT32_MAX);
            if (remap[l] == UINT32_MAX) {
                remap[l] = static_cast<std::uint32_t>(g.segment_vertices.size());
                g.segment_vertices.emplace_back();
            }
            g.segment_of_vertex[v] = remap[l];
        }
    } else {
        const std::uint32_t n = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
        g.segment_vertices.resize(n);
        g.segment_of_vertex = labels;
    }
    for (std::size_t v = 0; v < labels.size(); ++v)
        g.segment_vertices[g.segment_of_vertex[v]].push_back(static_cast<std::uint32_t>(v));
    for (std::size_t s = 0; s < g.segment_vertices.size(); ++s)
        if (g.segment_vertices[s].empty()) throw DataError("segment id " + std::to_string(s) + " has no vertices");

    for (auto [u, v] : edges.edges) {
        if (u >= labels.size() || v >= labels.size()) throw DataError("edge references vertex outside the labeling");
        auto a = g.segment_of_vertex[u];
        auto b = g.segment_of_vertex[v];
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        g.adjacency.emplace_back(a, b);
    }
    std::sort(g.adjacency.begin(), g.adjacency.end());
    g.adjacency.erase(std::unique(g.adjacency.begin(), g.adjacency.end()), g.adjacency.end());
    return g;
}

SegmentGraph oversegment(const TriMesh& input, const OversegParams& params) {
    if (!(params.k > 0.0)) throw ParameterError("oversegment: k must be > 0");
    if (params.min_size < 1) throw ParameterError("oversegment: min_size must be >= 1");
    if (!(params.color_weight >= 0.0 && params.color_weight <= 1.0))
        throw ParameterError("oversegment: color_weight must lie in [0,1]");

    const TriMesh computed = input.has_normals() ? TriMesh{} : compute_vertex_normals(input);
    const TriMesh& mesh = input.has_normals() ? input : computed;
    const EdgeList edges = vertex_adjacency(mesh);
    if (edges.edges.empty()) throw DataError("oversegment: mesh has no edges");

    const auto weights = kernels::parallel::edge_weights(mesh.normals, mesh.colors, edges.edges, params.color_weight);
    // Edges are already sorted by (u, v); a stable sort on weight keeps that as the tie-break.
    std::vector<std::uint32_t> order(edges.edges.size());
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return weights[a] < weights[b]; });

    DisjointSets sets(mesh.vertex_count());
    auto threshold = [&](std::uint32_t root) { return sets.internal(root) + params.k / sets.size(root); };
    for (auto e : order) {
        const auto a = sets.find(edges.edges[e].first);
        const auto b = sets.find(edges.edges[e].second);
        if (a == b) continue;
        const double w = weights[e];
        if (w <= std::min(threshold(a), threshold(b))) sets.join(a, b, w);
    }
    // Small components merge into the neighbor across their lightest edge.
    for (auto e : order) {
        const auto a = sets.find(edges.edges[e].first);
        const auto b = sets.find(edges.edges[e].second);
        if (a == b) continue;
        if (sets.size(a) < params.min_size || sets.size(b) < params.min_size) sets.join(a, b, weights[e]);
    }

    std::vector<std::uint32_t> labels(mesh.vertex_count());
    for (std::uint32_t v = 0; v < labels.size(); ++v) labels[v] = sets.find(v);
    return SegmentGraph::from_labels(labels, edges, true);
}

std::vector<SweepRow> segment_count_sweep(const TriMesh& mesh, double k, const std::vector<std::size_t>& min_sizes,
                                          double color_weight) {
    const TriMesh with_normals = mesh.has_normals() ? mesh : compute_vertex_normals(mesh);
    std::vector<SweepRow> rows;
    rows.reserve(min_sizes.size());
    for (auto m : min_sizes)
        rows.push_back({m, oversegment(with_normals, OversegParams{k, m, color_weight}).segment_count()});
    return rows;
}

std::string serialize_segment_labels(const SegmentGraph& seg) {
    std::string out;
    out.reserve(seg.vertex_count() * 4);
    for (auto s : seg.segment_of_vertex) {
        out += std::to_string(s);
        out += '\n';
    }
    return out;
}

std::string serialize_segment_sidecar(const SegmentGraph& seg, const OversegParams& params) {
    nlohmann::json j;
    j["num_segments"] = seg.segment_count();
    auto adj = nlohmann::json::array();
    for (auto [a, b] : seg.adjacency) adj.push_back({a, b});
    j["adjacency"] = std::move(adj);
    j["params"] = {{"k", params.k}, {"min_size", params.min_size}, {"color_weight", params.color_weight}};
    return j.dump() + "\n";
}

SegmentGraph load_segments(const std::filesystem::path& labels_path, std::size_t vertex_count, const EdgeList& edges) {
    const auto text = io::read_file(labels_path);
    std::vector<std::uint32_t> labels;
    labels.reserve(vertex_count);
    std::size_t line = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string::npos) nl = text.size();
        ++line;
        std::string_view tok(text.data() + pos, nl - pos);
        pos = nl + 1;
        while (!tok.empty() && (tok.back() == '\r' || tok.back() == ' ')) tok.remove_suffix(1);
        if (tok.empty()) continue;
        std::uint32_t v = 0;
        auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc{} || p != tok.data() + tok.size())
            throw ParseError(labels_path.string(), "line " + std::to_string(line), "bad segment id '" + std::string(tok) + "'");
        labels.push_back(v);
    }
    if (labels.size() != vertex_count)
        throw DataError(labels_path.string() + ": " + std::to_string(labels.size()) + " labels for " +
                        std::to_string(vertex_count) + " vertices");
    return SegmentGraph::from_labels(labels, edges, false);
}

}  // namespace segcut
