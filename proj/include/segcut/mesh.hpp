#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace segcut {

using Vec3 = Eigen::Vector3d;
using Face = std::array<std::uint32_t, 3>;

/// Triangle mesh of a scanned scene. Positions in meters, colors in [0,1].
///
/// Colors default to mid-gray when the source carries none; normals are
/// empty until loaded or computed.
struct TriMesh {
    std::vector<Vec3> positions;
    std::vector<Vec3> colors;
    std::vector<Vec3> normals;
    std::vector<Face> faces;

    std::size_t vertex_count() const { return positions.size(); }
    bool has_normals() const { return normals.size() == positions.size() && !positions.empty(); }

    /// Checks index range, color range and array sizes; throws DataError.
    void validate() const;
};

inline const Vec3 kDefaultColor{0.5, 0.5, 0.5};

/// Unordered unique vertex pairs (first < second), sorted ascending.
struct EdgeList {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
};

/// Area-weighted vertex normals from face winding. Isolated vertices get zero.
TriMesh compute_vertex_normals(TriMesh mesh);

EdgeList vertex_adjacency(const TriMesh& mesh);

}  // namespace segcut
