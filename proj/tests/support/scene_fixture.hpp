#pragma once

// On-disk synthetic scene: a striped floor plus small two-tone plates
// floating above it, per-vertex features, and ground truth.

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "segcut/features.hpp"
#include "segcut/io.hpp"
#include "segcut/ply.hpp"
#include "support/synthetic.hpp"

namespace segcut::testing {

struct SceneFiles {
    std::filesystem::path dir, mesh, features_3d, features_2d, gt;
    std::size_t vertex_count = 0;
    std::size_t object_count = 0;
};

/// Floor: 40x8 grid in 10 color stripes (10 segments). Object o: a 4x4
/// plate at height 1+o whose halves differ in color (2 segments). With
/// `shared_features`, all objects get the same feature direction.
inline SceneFiles write_scene(const std::filesystem::path& dir, std::size_t objects, std::uint32_t seed,
                              bool shared_features = false) {
    std::mt19937 rng(seed);
    TriMesh mesh = striped_grid(40, 8, 10);
    std::vector<int> owner(mesh.vertex_count(), 0);
    for (std::size_t o = 0; o < objects; ++o) {
        TriMesh plate = grid_mesh(4, 4, 1.0 + static_cast<double>(o));
        const double hue = static_cast<double>(o) / static_cast<double>(objects + 1);
        for (std::size_t v = 0; v < plate.vertex_count(); ++v) {
            plate.positions[v][0] += 6.0 * static_cast<double>(o);
            plate.colors[v] = plate.positions[v][1] < 1.5 ? Vec3(hue, 0.2, 0.9) : Vec3(0.9, hue, 0.1);
        }
        mesh = append(mesh, plate);
        owner.resize(mesh.vertex_count(), static_cast<int>(o) + 1);
    }

    const std::size_t dims = objects + 3;
    std::normal_distribution<double> noise(0.0, 0.03);
    RowMatrix f3(static_cast<Eigen::Index>(mesh.vertex_count()), static_cast<Eigen::Index>(dims));
    RowMatrix f2 = f3;
    for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
        const int cls = owner[v] == 0 ? 0 : shared_features ? 1 : owner[v];
        for (std::size_t d = 0; d < dims; ++d) {
            f3(v, d) = noise(rng) + (static_cast<int>(d) == cls ? 1.0 : 0.0);
            f2(v, d) = noise(rng) + (static_cast<int>(d) == (cls + 1) % static_cast<int>(dims) ? 1.0 : 0.0);
        }
    }

    SceneFiles s;
    s.dir = dir;
    s.mesh = dir / "mesh.ply";
    s.features_3d = dir / "feat3d.fmat";
    s.features_2d = dir / "feat2d.fmat";
    s.gt = dir / "gt.txt";
    s.vertex_count = mesh.vertex_count();
    s.object_count = objects;
    std::filesystem::create_directories(dir);
    save_ply(mesh, s.mesh);
    save_fmat(f3, s.features_3d);
    save_fmat(f2, s.features_2d);
    std::string gt;
    for (int o : owner) gt += std::to_string(o) + "\n";
    io::write_file_atomic(s.gt, gt);
    return s;
}

}  // namespace segcut::testing
