#include "segcut/features.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <numeric>

#include "segcut/error.hpp"
#include "segcut/io.hpp"

namespace segcut {
namespace {

constexpr std::size_t kFmatHeader = 4 + 4 + 8 + 8;

template <class T>
T read_le(std::string_view bytes, std::size_t offset) {
    T v;
    std::memcpy(&v, bytes.data() + offset, sizeof(T));
    return v;
}

template <class T>
void put_le(std::string& out, T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out.append(buf, sizeof(T));
}

}  // namespace

VertexFeatures parse_fmat(std::string_view bytes, const std::string& source, Modality modality) {
    static_assert(std::endian::native == std::endian::little);
    if (bytes.size() < kFmatHeader) throw ParseError(source, "byte " + std::to_string(bytes.size()), "truncated header");
    if (bytes.substr(0, 4) != "FMAT") throw ParseError(source, "byte 0", "bad magic, expected 'FMAT'");
    const auto version = read_le<std::uint32_t>(bytes, 4);
    if (version != 1) throw ParseError(source, "byte 4", "unsupported version " + std::to_string(version));
    const auto rows = read_le<std::uint64_t>(bytes, 8);
    const auto cols = read_le<std::uint64_t>(bytes, 16);
    const std::size_t payload_values = (bytes.size() - kFmatHeader) / 4;
    if (cols != 0 && rows > payload_values / cols)
        throw ParseError(source, "byte " + std::to_string(bytes.size()),
                         "truncated payload: header declares " + std::to_string(rows) + "x" + std::to_string(cols) +
                             ", payload holds " + std::to_string(payload_values) + " values");
    const std::size_t expected = kFmatHeader + rows * cols * 4;
    if (bytes.size() != expected)
        throw ParseError(source, "byte " + std::to_string(expected), "payload size does not match header dimensions");

    VertexFeatures vf;
    vf.modality = modality;
    vf.rows.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            const std::size_t off = kFmatHeader + (i * cols + j) * 4;
            const float v = read_le<float>(bytes, off);
            if (!std::isfinite(v))
                throw ParseError(source, "byte " + std::to_string(off),
                                 "non-finite value at row " + std::to_string(i) + " col " + std::to_string(j));
            vf.rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        }
    return vf;
}

VertexFeatures load_vertex_features(const std::filesystem::path& path, Modality modality) {
    return parse_fmat(io::read_file(path), path.string(), modality);
}

std::string serialize_fmat(const RowMatrix& rows) {
    std::string out;
    out.reserve(kFmatHeader + static_cast<std::size_t>(rows.size()) * 4);
    out += "FMAT";
    put_le<std::uint32_t>(out, 1);
    put_le<std::uint64_t>(out, static_cast<std::uint64_t>(rows.rows()));
    put_le<std::uint64_t>(out, static_cast<std::uint64_t>(rows.cols()));
    for (Eigen::Index i = 0; i < rows.rows(); ++i)
        for (Eigen::Index j = 0; j < rows.cols(); ++j) put_le(out, static_cast<float>(rows(i, j)));
    return out;
}

void save_fmat(const RowMatrix& rows, const std::filesystem::path& path) {
    io::write_file_atomic(path, serialize_fmat(rows));
}

FeatureMatrix aggregate_features(const VertexFeatures& vf, const SegmentGraph& seg, Aggregation how) {
    if (static_cast<std::size_t>(vf.rows.rows()) != seg.vertex_count())
        throw DataError("aggregate_features: " + std::to_string(vf.rows.rows()) + " feature rows for " +
                        std::to_string(seg.vertex_count()) + " vertices");
    FeatureMatrix out;
    out.modality = vf.modality;
    if (how == Aggregation::Mean) {
        out.rows = kernels::parallel::segment_means(vf.rows, seg.segment_vertices);
        return out;
    }
    const auto n = static_cast<Eigen::Index>(seg.segment_count());
    const auto d = vf.rows.cols();
    out.rows.resize(n, d);
#pragma omp parallel for schedule(dynamic, 16)
    for (Eigen::Index s = 0; s < n; ++s) {
        const auto& members = seg.segment_vertices[s];
        std::vector<double> col(members.size());
        for (Eigen::Index k = 0; k < d; ++k) {
            for (std::size_t m = 0; m < members.size(); ++m) col[m] = vf.rows(members[m], k);
            std::sort(col.begin(), col.end());
            const auto h = col.size() / 2;
            out.rows(s, k) = col.size() % 2 == 1 ? col[h] : 0.5 * (col[h - 1] + col[h]);
        }
    }
    return out;
}

AffinityMatrix cosine_similarity(const FeatureMatrix& f) {
    return AffinityMatrix{kernels::parallel::cosine_similarity(f.rows), AffinityKind::RawCosine};
}

AffinityMatrix fuse_similarities(const AffinityMatrix& a2d, const AffinityMatrix& a3d, double w2d) {
    if (a2d.values.rows() != a3d.values.rows() || a2d.values.cols() != a3d.values.cols())
        throw DataError("fuse_similarities: dimension mismatch " + std::to_string(a2d.values.rows()) + " vs " +
                        std::to_string(a3d.values.rows()));
    if (a2d.kind != AffinityKind::RawCosine || a3d.kind != AffinityKind::RawCosine)
        throw ParameterError("fuse_similarities: inputs must be raw cosine similarities");
    if (!(w2d >= 0.0 && w2d <= 1.0)) throw ParameterError("fuse_similarities: w2d must lie in [0,1]");
    if (w2d == 0.0) return a3d;
    if (w2d == 1.0) return a2d;
    return AffinityMatrix{w2d * a2d.values + (1.0 - w2d) * a3d.values, AffinityKind::RawCosine};
}

AffinityMatrix threshold_saliency(const AffinityMatrix& a, double tau_cut, double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ParameterError("threshold_saliency: epsilon must lie in (0,1)");
    std::vector<std::uint32_t> all(static_cast<std::size_t>(a.size()));
    std::iota(all.begin(), all.end(), 0u);
    return AffinityMatrix{kernels::parallel::restrict_saliency(a.values, all, tau_cut, epsilon), AffinityKind::Saliency};
}

}  // namespace segcut
