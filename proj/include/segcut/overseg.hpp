#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "segcut/mesh.hpp"

namespace segcut {

/// Partition of mesh vertices into contiguous segments plus the segment
/// adjacency. Segment ids are dense and ordered by their smallest vertex.
struct SegmentGraph {
    std::vector<std::uint32_t> segment_of_vertex;
    std::vector<std::vector<std::uint32_t>> segment_vertices;
    /// Unique pairs (a < b), sorted.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> adjacency;

    std::size_t segment_count() const { return segment_vertices.size(); }
    std::size_t vertex_count() const { return segment_of_vertex.size(); }

    /// Per-segment neighbor lists derived from `adjacency`.
    std::vector<std::vector<std::uint32_t>> neighbors() const;

    /// Builds the graph from a per-vertex labeling and mesh edges. With
    /// `renumber`, labels are made dense in order of first occurrence;
    /// otherwise they must already be dense (0..N-1, each used).
    static SegmentGraph from_labels(const std::vector<std::uint32_t>& labels, const EdgeList& edges,
                                    bool renumber = true);
};

struct OversegParams {
    double k = 0.01;
    std::size_t min_size = 50;
    double color_weight = 0.25;
};

/// Graph-based clustering over the vertex graph with edge weight
/// (1-a)(1 - n_u.n_v) + a |c_u - c_v| / sqrt(3). Computes normals when the
/// mesh has none.
SegmentGraph oversegment(const TriMesh& mesh, const OversegParams& params);

struct SweepRow {
    std::size_t min_size;
    std::size_t segment_count;
};

std::vector<SweepRow> segment_count_sweep(const TriMesh& mesh, double k, const std::vector<std::size_t>& min_sizes,
                                          double color_weight = 0.25);

/// One segment id per line.
std::string serialize_segment_labels(const SegmentGraph& seg);
/// JSON sidecar {num_segments, adjacency, params}.
std::string serialize_segment_sidecar(const SegmentGraph& seg, const OversegParams& params);

/// Reads a per-vertex label file and rebuilds the graph using mesh edges.
SegmentGraph load_segments(const std::filesystem::path& labels_path, std::size_t vertex_count, const EdgeList& edges);

}  // namespace segcut
