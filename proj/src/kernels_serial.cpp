#include "kernel_detail.hpp"

namespace segcut::kernels::serial {

std::vector<double> edge_weights(std::span<const Vec3> normals, std::span<const Vec3> colors,
                                 std::span<const VertexPair> edges, double color_weight) {
    std::vector<double> w(edges.size());
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto [u, v] = edges[e];
        w[e] = detail::edge_weight(normals[u], normals[v], colors[u], colors[v], color_weight);
    }
    return w;
}

RowMatrix segment_means(const RowMatrix& vertex_rows, const std::vector<std::vector<std::uint32_t>>& segment_vertices) {
    const auto n = static_cast<Eigen::Index>(segment_vertices.size());
    RowMatrix out(n, vertex_rows.cols());
    for (Eigen::Index s = 0; s < n; ++s)
        detail::accumulate_segment(vertex_rows, segment_vertices[s], out.data() + s * out.cols());
    return out;
}

RowMatrix cosine_similarity(const RowMatrix& rows) {
    const auto n = rows.rows();
    std::vector<double> norms(n);
    for (Eigen::Index i = 0; i < n; ++i) norms[i] = std::sqrt(detail::row_dot(rows, i, i));
    RowMatrix out(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            out(i, j) = detail::cosine(detail::row_dot(rows, i, j), norms[i], norms[j], i == j);
    return out;
}

RowMatrix restrict_saliency(const RowMatrix& affinity, std::span<const std::uint32_t> active, double tau_cut,
                            double epsilon) {
    const auto n = static_cast<Eigen::Index>(active.size());
    RowMatrix w(n, n);
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b) w(a, b) = affinity(active[a], active[b]) >= tau_cut ? 1.0 : epsilon;
    return w;
}

RowMatrix normalized_affinity(const RowMatrix& w, Eigen::VectorXd& degree) {
    const auto n = w.rows();
    degree.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) degree[i] = detail::row_sum(w, i);
    RowMatrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = w(i, j) / std::sqrt(degree[i] * degree[j]);
    return m;
}

}  // namespace segcut::kernels::serial
