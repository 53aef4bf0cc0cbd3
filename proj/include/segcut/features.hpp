#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "segcut/kernels.hpp"
#include "segcut/overseg.hpp"

namespace segcut {

enum class Modality { Geometry3d, Color2d, Other };

/// V x D per-vertex feature field, one modality.
struct VertexFeatures {
    RowMatrix rows;
    Modality modality = Modality::Other;
};

/// N x D per-segment features.
struct FeatureMatrix {
    RowMatrix rows;
    Modality modality = Modality::Other;
};

enum class AffinityKind { RawCosine, Saliency };

struct AffinityMatrix {
    RowMatrix values;
    AffinityKind kind = AffinityKind::RawCosine;

    Eigen::Index size() const { return values.rows(); }
};

enum class Aggregation { Mean, Median };

// FMAT: "FMAT", u32 version (1), u64 rows, u64 cols, rows*cols float32, all little endian.
VertexFeatures parse_fmat(std::string_view bytes, const std::string& source = "<memory>",
                          Modality modality = Modality::Other);
VertexFeatures load_vertex_features(const std::filesystem::path& path, Modality modality = Modality::Other);
std::string serialize_fmat(const RowMatrix& rows);
void save_fmat(const RowMatrix& rows, const std::filesystem::path& path);

FeatureMatrix aggregate_features(const VertexFeatures& vf, const SegmentGraph& seg,
                                 Aggregation how = Aggregation::Mean);

/// Pairwise cosine similarity. Zero-norm rows give 0 off the diagonal and 1 on it.
AffinityMatrix cosine_similarity(const FeatureMatrix& f);

/// w2d * a2d + (1 - w2d) * a3d.
AffinityMatrix fuse_similarities(const AffinityMatrix& a2d, const AffinityMatrix& a3d, double w2d);

/// Entries >= tau_cut become 1, all others epsilon.
AffinityMatrix threshold_saliency(const AffinityMatrix& a, double tau_cut, double epsilon);

}  // namespace segcut
