#pragma once

// Per-element formulas shared by the serial and OpenMP kernels.

#include <algorithm>
#include <cmath>

#include "segcut/kernels.hpp"

namespace segcut::kernels::detail {

inline double edge_weight(const Vec3& nu, const Vec3& nv, const Vec3& cu, const Vec3& cv, double color_weight) {
    const double normal_term = 1.0 - (nu[0] * nv[0] + nu[1] * nv[1] + nu[2] * nv[2]);
    const double dr = cu[0] - cv[0], dg = cu[1] - cv[1], db = cu[2] - cv[2];
    const double color_term = std::sqrt(dr * dr + dg * dg + db * db) / std::sqrt(3.0);
    return (1.0 - color_weight) * std::max(0.0, normal_term) + color_weight * color_term;
}

inline double row_dot(const RowMatrix& m, Eigen::Index a, Eigen::Index b) {
    const double* x = m.data() + a * m.cols();
    const double* y = m.data() + b * m.cols();
    double s = 0.0;
    for (Eigen::Index k = 0; k < m.cols(); ++k) s += x[k] * y[k];
    return s;
}

inline double cosine(double dot, double norm_a, double norm_b, bool same_row) {
    if (same_row) return 1.0;
    if (norm_a == 0.0 || norm_b == 0.0) return 0.0;
    return std::clamp(dot / (norm_a * norm_b), -1.0, 1.0);
}

inline void accumulate_segment(const RowMatrix& rows, const std::vector<std::uint32_t>& members, double* out) {
    const auto d = rows.cols();
    for (Eigen::Index k = 0; k < d; ++k) out[k] = 0.0;
    for (auto v : members) {
        const double* r = rows.data() + static_cast<Eigen::Index>(v) * d;
        for (Eigen::Index k = 0; k < d; ++k) out[k] += r[k];
    }
    const double inv = members.empty() ? 0.0 : 1.0 / static_cast<double>(members.size());
    for (Eigen::Index k = 0; k < d; ++k) out[k] *= inv;
}

inline double row_sum(const RowMatrix& w, Eigen::Index i) {
    const double* r = w.data() + i * w.cols();
    double s = 0.0;
    for (Eigen::Index k = 0; k < w.cols(); ++k) s += r[k];
    return s;
}

}  // namespace segcut::kernels::detail
