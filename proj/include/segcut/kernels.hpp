#pragma once

// Data-parallel inner loops. Each kernel has an OpenMP version used by the
// library and a serial reference with identical results, kept for tests and
// the benchmark. Every output element is produced by exactly one thread with
// a fixed summation order, so both variants agree bit for bit.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "segcut/mesh.hpp"

namespace segcut {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using VertexPair = std::pair<std::uint32_t, std::uint32_t>;

namespace kernels {

namespace serial {
std::vector<double> edge_weights(std::span<const Vec3> normals, std::span<const Vec3> colors,
                                 std::span<const VertexPair> edges, double color_weight);
RowMatrix segment_means(const RowMatrix& vertex_rows, const std::vector<std::vector<std::uint32_t>>& segment_vertices);
RowMatrix cosine_similarity(const RowMatrix& rows);
RowMatrix restrict_saliency(const RowMatrix& affinity, std::span<const std::uint32_t> active, double tau_cut,
                            double epsilon);
/// D^{-1/2} W D^{-1/2}; the row sums of `w` are written to `degree`.
RowMatrix normalized_affinity(const RowMatrix& w, Eigen::VectorXd& degree);
}  // namespace serial

namespace parallel {
std::vector<double> edge_weights(std::span<const Vec3> normals, std::span<const Vec3> colors,
                                 std::span<const VertexPair> edges, double color_weight);
RowMatrix segment_means(const RowMatrix& vertex_rows, const std::vector<std::vector<std::uint32_t>>& segment_vertices);
RowMatrix cosine_similarity(const RowMatrix& rows);
RowMatrix restrict_saliency(const RowMatrix& affinity, std::span<const std::uint32_t> active, double tau_cut,
                            double epsilon);
/// D^{-1/2} W D^{-1/2}; the row sums of `w` are written to `degree`.
RowMatrix normalized_affinity(const RowMatrix& w, Eigen::VectorXd& degree);
}  // namespace parallel

}  // namespace kernels
}  // namespace segcut
