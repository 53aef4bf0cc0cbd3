#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "segcut/overseg.hpp"

namespace segcut {

/// Which generator produced a mask. `index` is the NCut iteration or the
/// merge cycle; unused for FreeMask.
struct MaskSource {
    enum class Kind { NCut, FreeMask, Merged };
    Kind kind = Kind::NCut;
    int index = 0;

    std::string to_string() const;
    static MaskSource parse(std::string_view text);
    friend bool operator==(const MaskSource&, const MaskSource&) = default;
};

struct InstanceMask {
    /// Sorted, unique segment ids.
    std::vector<std::uint32_t> segment_ids;
    double confidence = 1.0;
    MaskSource source;

    /// Sorted vertex ids covered by the member segments.
    std::vector<std::uint32_t> vertex_ids(const SegmentGraph& seg) const;
    friend bool operator==(const InstanceMask&, const InstanceMask&) = default;
};

struct PseudoMaskSet {
    std::vector<InstanceMask> masks;
    friend bool operator==(const PseudoMaskSet&, const PseudoMaskSet&) = default;
};

/// Pseudo-mask JSON: {"params": {...}, "masks": [{"segment_ids", "confidence", "source"}]}.
std::string serialize_masks(const PseudoMaskSet& set, const nlohmann::json& params = nlohmann::json::object());
PseudoMaskSet parse_masks(std::string_view text, const std::string& source = "<memory>",
                          nlohmann::json* params_out = nullptr);

/// |a ∩ b| / |a ∪ b| over sorted id lists; 0 when both are empty.
double sorted_iou(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b);

}  // namespace segcut
