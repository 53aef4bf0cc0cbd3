#include "segcut/mesh.hpp"

#include <algorithm>
#include <string>

#include <Eigen/Geometry>

#include "segcut/error.hpp"

namespace segcut {

void TriMesh::validate() const {
    const auto n = positions.size();
    if (colors.size() != n) throw DataError("color count " + std::to_string(colors.size()) + " != vertex count " + std::to_string(n));
    if (!normals.empty() && normals.size() != n)
        throw DataError("normal count " + std::to_string(normals.size()) + " != vertex count " + std::to_string(n));
    for (std::size_t f = 0; f < faces.size(); ++f)
        for (auto idx : faces[f])
            if (idx >= n) throw DataError("face " + std::to_string(f) + " references vertex " + std::to_string(idx) + " out of range");
    for (std::size_t i = 0; i < n; ++i)
        for (int c = 0; c < 3; ++c)
            if (!(colors[i][c] >= 0.0 && colors[i][c] <= 1.0))
                throw DataError("vertex " + std::to_string(i) + " color outside [0,1]");
}

TriMesh compute_vertex_normals(TriMesh mesh) {
    std::vector<Vec3> acc(mesh.positions.size(), Vec3::Zero());
    for (const auto& f : mesh.faces) {
        const Vec3& a = mesh.positions[f[0]];
        const Vec3& b = mesh.positions[f[1]];
        const Vec3& c = mesh.positions[f[2]];
        // |cross| is twice the face area, so the sum is area weighted.
        const Vec3 n = (b - a).cross(c - a);
        for (auto idx : f) acc[idx] += n;
    }
    for (auto& n : acc) {
        const double len = n.norm();
        n = len > 0.0 ? Vec3(n / len) : Vec3::Zero();
    }
    mesh.normals = std::move(acc);
    return mesh;
}

EdgeList vertex_adjacency(const TriMesh& mesh) {
    EdgeList out;
    out.edges.reserve(mesh.faces.size() * 3);
    for (const auto& f : mesh.faces) {
        for (int e = 0; e < 3; ++e) {
            auto u = f[e];
            auto v = f[(e + 1) % 3];
            if (u == v) continue;
            if (u > v) std::swap(u, v);
            out.edges.emplace_back(u, v);
        }
    }
    std::sort(out.edges.begin(), out.edges.end());
    out.edges.erase(std::unique(out.edges.begin(), out.edges.end()), out.edges.end());
    return out;
}

}  // namespace segcut
