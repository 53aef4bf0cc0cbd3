#include "segcut/masks.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "segcut/error.hpp"

namespace segcut {

std::string MaskSource::to_string() const {
    switch (kind) {
        case Kind::NCut: return "ncut:" + std::to_string(index);
        case Kind::FreeMask: return "freemask";
        case Kind::Merged: return "merged:" + std::to_string(index);
    }
    return {};
}

MaskSource MaskSource::parse(std::string_view text) {
    if (text == "freemask") return {Kind::FreeMask, 0};
    auto parse_index = [&](std::string_view rest) {
        int v = 0;
        auto [p, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), v);
        if (ec != std::errc{} || p != rest.data() + rest.size() || v < 0)
            throw DataError("bad mask source '" + std::string(text) + "'");
        return v;
    };
    if (text.starts_with("ncut:")) return {Kind::NCut, parse_index(text.substr(5))};
    if (text.starts_with("merged:")) return {Kind::Merged, parse_index(text.substr(7))};
    throw DataError("bad mask source '" + std::string(text) + "'");
}

std::vector<std::uint32_t> InstanceMask::vertex_ids(const SegmentGraph& seg) const {
    std::vector<std::uint32_t> out;
    for (auto s : segment_ids) {
        if (s >= seg.segment_count()) throw DataError("mask references segment " + std::to_string(s) + " out of range");
        const auto& vs = seg.segment_vertices[s];
        out.insert(out.end(), vs.begin(), vs.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string serialize_masks(const PseudoMaskSet& set, const nlohmann::json& params) {
    nlohmann::json j;
    j["params"] = params;
    auto arr = nlohmann::json::array();
    for (const auto& m : set.masks)
        arr.push_back({{"segment_ids", m.segment_ids}, {"confidence", m.confidence}, {"source", m.source.to_string()}});
    j["masks"] = std::move(arr);
    return j.dump(1) + "\n";
}

PseudoMaskSet parse_masks(std::string_view text, const std::string& source, nlohmann::json* params_out) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(source, "byte " + std::to_string(e.byte), "invalid JSON");
    }
    if (!j.is_object() || !j.contains("masks") || !j["masks"].is_array())
        throw DataError(source + ": expected an object with a 'masks' array");
    PseudoMaskSet set;
    std::size_t idx = 0;
    for (const auto& jm : j["masks"]) {
        const std::string where = source + ": mask " + std::to_string(idx++);
        if (!jm.is_object() || !jm.contains("segment_ids") || !jm.contains("confidence"))
            throw DataError(where + " lacks segment_ids or confidence");
        InstanceMask m;
        try {
            m.segment_ids = jm["segment_ids"].get<std::vector<std::uint32_t>>();
            m.confidence = jm["confidence"].get<double>();
            m.source = jm.contains("source") ? MaskSource::parse(jm["source"].get<std::string>()) : MaskSource{};
        } catch (const nlohmann::json::exception& e) {
            throw DataError(where + ": " + e.what());
        }
        if (!std::isfinite(m.confidence)) throw DataError(where + ": non-finite confidence");
        std::sort(m.segment_ids.begin(), m.segment_ids.end());
        m.segment_ids.erase(std::unique(m.segment_ids.begin(), m.segment_ids.end()), m.segment_ids.end());
        if (m.segment_ids.empty()) throw DataError(where + ": empty segment_ids");
        set.masks.push_back(std::move(m));
    }
    if (params_out) *params_out = j.value("params", nlohmann::json::object());
    return set;
}

double sorted_iou(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
    std::size_t i = 0, j = 0, inter = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j]) ++i;
        else if (b[j] < a[i]) ++j;
        else ++inter, ++i, ++j;
    }
    const std::size_t uni = a.size() + b.size() - inter;
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace segcut
