#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "segcut/features.hpp"
#include "segcut/masks.hpp"
#include "segcut/overseg.hpp"

namespace segcut {

/// Foreground component selection after a cut.
enum class Separation {
    Max,      ///< component holding the largest eigenvector entry
    Avg,      ///< component with the highest mean entry
    Largest,  ///< component covering the most vertices
    NoSep     ///< keep the whole foreground
};

struct NCutParams {
    double tau_cut = 0.65;
    double epsilon = 1e-5;
    std::size_t max_instances = 20;
    std::size_t min_foreground_segments = 8;
    Separation separation = Separation::Max;

    void validate() const;
};

using BinaryMask = std::vector<std::uint8_t>;

struct EigenPair {
    double lambda = 0.0;
    Eigen::VectorXd v;
};

/// Second-smallest eigenpair of (D - W) v = lambda D v for a symmetric W
/// with positive row sums. v has unit norm and its largest-magnitude entry
/// is positive (first such index on ties).
EigenPair second_smallest_generalized_eigvec(const RowMatrix& w);

/// Same, restricted to the `active` rows and columns of a full matrix.
EigenPair second_smallest_generalized_eigvec(const AffinityMatrix& w, std::span<const std::uint32_t> active);

/// m_i = 1 iff v_i >= mean(v). Entries within round-off of the mean count as
/// foreground so exactly tied blocks are never split by solver noise.
BinaryMask bipartition(const Eigen::VectorXd& v);

/// Flips m and negates v when more than half of the entries are set.
/// Returns true when it inverted.
bool invert_if_majority(BinaryMask& m, Eigen::VectorXd& v);

/// Restricts the foreground to one connected component of the segment
/// adjacency. `m` and `v` are indexed by position in `active`.
BinaryMask separate_components(const BinaryMask& m, const Eigen::VectorXd& v, std::span<const std::uint32_t> active,
                               const SegmentGraph& seg, Separation strategy);

/// cut(A,B)/assoc(A,V) + cut(A,B)/assoc(B,V) with B the complement of A.
double ncut_cost(const BinaryMask& in_a, const RowMatrix& w);

/// Greedy masked NCut over segment affinities (raw cosine, possibly fused).
/// Masks come out in extraction order with confidence 1/(1+iteration).
PseudoMaskSet masked_ncut(const AffinityMatrix& affinity, const SegmentGraph& seg, const NCutParams& params);
PseudoMaskSet masked_ncut(const FeatureMatrix& features, const SegmentGraph& seg, const NCutParams& params);

}  // namespace segcut
