#include "segcut/ply.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <optional>
#include <sstream>

#include "segcut/error.hpp"
#include "segcut/io.hpp"

namespace segcut {
namespace {

static_assert(std::endian::native == std::endian::little, "binary PLY I/O assumes a little-endian host");

enum class Scalar { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

std::optional<Scalar> scalar_from_name(std::string_view s) {
    if (s == "char" || s == "int8") return Scalar::Int8;
    if (s == "uchar" || s == "uint8") return Scalar::UInt8;
    if (s == "short" || s == "int16") return Scalar::Int16;
    if (s == "ushort" || s == "uint16") return Scalar::UInt16;
    if (s == "int" || s == "int32") return Scalar::Int32;
    if (s == "uint" || s == "uint32") return Scalar::UInt32;
    if (s == "float" || s == "float32") return Scalar::Float32;
    if (s == "double" || s == "float64") return Scalar::Float64;
    return std::nullopt;
}

bool is_integer(Scalar s) { return s != Scalar::Float32 && s != Scalar::Float64; }

struct Property {
    std::string name;
    Scalar type = Scalar::Float32;
    bool is_list = false;
    Scalar count_type = Scalar::UInt8;
};

struct Element {
    std::string name;
    std::size_t count = 0;
    std::vector<Property> props;
};

struct Header {
    bool binary = false;
    std::vector<Element> elements;
    std::size_t body_offset = 0;
    std::size_t body_line = 0;  // 1-based line number of the first body line
};

std::string line_loc(std::size_t line) { return "line " + std::to_string(line); }
std::string byte_loc(std::size_t byte) { return "byte " + std::to_string(byte); }

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

Header parse_header(std::string_view bytes, const std::string& src) {
    Header h;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    bool saw_format = false;
    auto next_line = [&]() -> std::optional<std::string_view> {
        if (pos >= bytes.size()) return std::nullopt;
        auto nl = bytes.find('\n', pos);
        if (nl == std::string_view::npos) nl = bytes.size();
        auto line = bytes.substr(pos, nl - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        pos = std::min(nl + 1, bytes.size());
        ++line_no;
        return line;
    };

    auto first = next_line();
    if (!first || *first != "ply") throw ParseError(src, line_loc(1), "missing 'ply' magic");
    while (true) {
        auto line = next_line();
        if (!line) throw ParseError(src, line_loc(line_no), "header not terminated by end_header");
        auto tok = split_ws(*line);
        if (tok.empty()) continue;
        if (tok[0] == "comment" || tok[0] == "obj_info") continue;
        if (tok[0] == "format") {
            if (tok.size() != 3) throw ParseError(src, line_loc(line_no), "malformed format line");
            if (tok[1] == "ascii") h.binary = false;
            else if (tok[1] == "binary_little_endian") h.binary = true;
            else if (tok[1] == "binary_big_endian")
                throw ParseError(src, line_loc(line_no), "binary_big_endian PLY is not supported");
            else throw ParseError(src, line_loc(line_no), "unknown format '" + std::string(tok[1]) + "'");
            saw_format = true;
        } else if (tok[0] == "element") {
            if (tok.size() != 3) throw ParseError(src, line_loc(line_no), "malformed element line");
            Element e;
            e.name = tok[1];
            auto [p, ec] = std::from_chars(tok[2].data(), tok[2].data() + tok[2].size(), e.count);
            if (ec != std::errc{} || p != tok[2].data() + tok[2].size())
                throw ParseError(src, line_loc(line_no), "bad element count '" + std::string(tok[2]) + "'");
            h.elements.push_back(std::move(e));
        } else if (tok[0] == "property") {
            if (h.elements.empty()) throw ParseError(src, line_loc(line_no), "property before any element");
            Property p;
            if (tok.size() == 5 && tok[1] == "list") {
                auto ct = scalar_from_name(tok[2]);
                auto it = scalar_from_name(tok[3]);
                if (!ct || !it || !is_integer(*ct))
                    throw ParseError(src, line_loc(line_no), "bad list property types");
                p.is_list = true;
                p.count_type = *ct;
                p.type = *it;
                p.name = tok[4];
            } else if (tok.size() == 3) {
                auto t = scalar_from_name(tok[1]);
                if (!t) throw ParseError(src, line_loc(line_no), "unknown property type '" + std::string(tok[1]) + "'");
                p.type = *t;
                p.name = tok[2];
            } else {
                throw ParseError(src, line_loc(line_no), "malformed property line");
            }
            h.elements.back().props.push_back(std::move(p));
        } else if (tok[0] == "end_header") {
            break;
        } else {
            throw ParseError(src, line_loc(line_no), "unexpected header keyword '" + std::string(tok[0]) + "'");
        }
    }
    if (!saw_format) throw ParseError(src, line_loc(line_no), "missing format line");
    h.body_offset = pos;
    h.body_line = line_no + 1;
    return h;
}

/// Streams scalar values from the body of either encoding.
class BodyReader {
  public:
    BodyReader(std::string_view bytes, const Header& h, std::string src)
        : bytes_(bytes), binary_(h.binary), pos_(h.body_offset), line_(h.body_line - 1), src_(std::move(src)) {}

    /// Called at the start of every element record.
    void begin_record() {
        if (binary_) return;
        // Skip blank lines; one record per line.
        while (true) {
            if (pos_ >= bytes_.size()) throw ParseError(src_, line_loc(line_ + 1), "truncated payload: expected more records");
            auto nl = bytes_.find('\n', pos_);
            if (nl == std::string_view::npos) nl = bytes_.size();
            auto line = bytes_.substr(pos_, nl - pos_);
            pos_ = std::min(nl + 1, bytes_.size());
            ++line_;
            tokens_ = split_ws(line);
            tok_idx_ = 0;
            if (!tokens_.empty()) return;
        }
    }

    void end_record() {
        if (!binary_ && tok_idx_ != tokens_.size())
            throw ParseError(src_, line_loc(line_), "unexpected extra values in record");
    }

    double read(Scalar type) {
        if (binary_) return read_binary(type);
        if (tok_idx_ >= tokens_.size()) throw ParseError(src_, line_loc(line_), "record has too few values");
        auto tok = tokens_[tok_idx_++];
        double value = 0.0;
        auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
        if (ec != std::errc{} || p != tok.data() + tok.size())
            throw ParseError(src_, line_loc(line_), "cannot parse number '" + std::string(tok) + "'");
        if (type == Scalar::Float32) value = static_cast<double>(static_cast<float>(value));
        if (is_integer(type) && value != std::floor(value))
            throw ParseError(src_, line_loc(line_), "expected integer, got '" + std::string(tok) + "'");
        return value;
    }

    std::string location() const { return binary_ ? byte_loc(pos_) : line_loc(line_); }
    const std::string& source() const { return src_; }

  private:
    template <class T>
    T take() {
        if (pos_ + sizeof(T) > bytes_.size())
            throw ParseError(src_, byte_loc(pos_), "truncated payload");
        T v;
        std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }

    double read_binary(Scalar type) {
        switch (type) {
            case Scalar::Int8: return take<std::int8_t>();
            case Scalar::UInt8: return take<std::uint8_t>();
            case Scalar::Int16: return take<std::int16_t>();
            case Scalar::UInt16: return take<std::uint16_t>();
            case Scalar::Int32: return take<std::int32_t>();
            case Scalar::UInt32: return take<std::uint32_t>();
            case Scalar::Float32: return take<float>();
            case Scalar::Float64: return take<double>();
        }
        return 0.0;
    }

    std::string_view bytes_;
    bool binary_;
    std::size_t pos_;
    std::size_t line_;
    std::string src_;
    std::vector<std::string_view> tokens_;
    std::size_t tok_idx_ = 0;
};

int find_prop(const Element& e, std::string_view name) {
    for (std::size_t i = 0; i < e.props.size(); ++i)
        if (e.props[i].name == name) return static_cast<int>(i);
    return -1;
}

}  // namespace

TriMesh parse_ply(std::string_view bytes, const std::string& source) {
    const Header h = parse_header(bytes, source);
    BodyReader in(bytes, h, source);
    TriMesh mesh;
    bool saw_vertex = false;
    bool has_normals = false;

    for (const auto& e : h.elements) {
        if (e.name == "vertex") {
            saw_vertex = true;
            const int ix = find_prop(e, "x"), iy = find_prop(e, "y"), iz = find_prop(e, "z");
            if (ix < 0 || iy < 0 || iz < 0) throw ParseError(source, "header", "vertex element lacks x/y/z");
            const int inx = find_prop(e, "nx"), iny = find_prop(e, "ny"), inz = find_prop(e, "nz");
            const int ir = find_prop(e, "red"), ig = find_prop(e, "green"), ib = find_prop(e, "blue");
            has_normals = inx >= 0 && iny >= 0 && inz >= 0;
            const bool has_colors = ir >= 0 && ig >= 0 && ib >= 0;
            mesh.positions.resize(e.count);
            mesh.colors.assign(e.count, kDefaultColor);
            if (has_normals) mesh.normals.resize(e.count);
            std::vector<double> vals(e.props.size());
            for (std::size_t i = 0; i < e.count; ++i) {
                in.begin_record();
                for (std::size_t p = 0; p < e.props.size(); ++p) {
                    const auto& prop = e.props[p];
                    if (prop.is_list) {
                        const auto n = static_cast<std::size_t>(in.read(prop.count_type));
                        for (std::size_t k = 0; k < n; ++k) in.read(prop.type);
                        vals[p] = 0.0;
                    } else {
                        vals[p] = in.read(prop.type);
                    }
                }
                in.end_record();
                mesh.positions[i] = Vec3(vals[ix], vals[iy], vals[iz]);
                if (has_normals) mesh.normals[i] = Vec3(vals[inx], vals[iny], vals[inz]);
                if (has_colors) {
                    for (int c = 0; c < 3; ++c) {
                        const int idx = c == 0 ? ir : c == 1 ? ig : ib;
                        double scale = e.props[idx].type == Scalar::UInt8 ? 255.0 : 1.0;
                        if (e.props[idx].type == Scalar::UInt16) scale = 65535.0;
                        const double v = vals[idx] / scale;
                        if (!(v >= 0.0 && v <= 1.0))
                            throw ParseError(source, in.location(), "vertex " + std::to_string(i) + " color out of range");
                        mesh.colors[i][c] = v;
                    }
                }
            }
        } else if (e.name == "face") {
            int il = find_prop(e, "vertex_indices");
            if (il < 0) il = find_prop(e, "vertex_index");
            if (il < 0 || !e.props[il].is_list) throw ParseError(source, "header", "face element lacks vertex_indices list");
            mesh.faces.resize(e.count);
            for (std::size_t f = 0; f < e.count; ++f) {
                in.begin_record();
                for (std::size_t p = 0; p < e.props.size(); ++p) {
                    const auto& prop = e.props[p];
                    if (!prop.is_list) {
                        in.read(prop.type);
                        continue;
                    }
                    const auto loc = in.location();
                    const auto n = static_cast<long long>(in.read(prop.count_type));
                    if (static_cast<int>(p) == il && n != 3)
                        throw ParseError(source, loc, "face " + std::to_string(f) + " has " + std::to_string(n) +
                                                          " vertices; only triangles are supported");
                    for (long long k = 0; k < n; ++k) {
                        const auto loc_idx = in.location();
                        const double v = in.read(prop.type);
                        if (static_cast<int>(p) != il) continue;
                        if (v < 0 || v >= static_cast<double>(mesh.positions.size()) || !saw_vertex)
                            throw ParseError(source, loc_idx, "face " + std::to_string(f) + " index " +
                                                                  std::to_string(static_cast<long long>(v)) +
                                                                  " out of range");
                        mesh.faces[f][k] = static_cast<std::uint32_t>(v);
                    }
                }
                in.end_record();
            }
        } else {
            for (std::size_t i = 0; i < e.count; ++i) {
                in.begin_record();
                for (const auto& prop : e.props) {
                    if (prop.is_list) {
                        const auto n = static_cast<std::size_t>(in.read(prop.count_type));
                        for (std::size_t k = 0; k < n; ++k) in.read(prop.type);
                    } else {
                        in.read(prop.type);
                    }
                }
                in.end_record();
            }
        }
    }
    if (!saw_vertex) throw ParseError(source, "header", "no vertex element");
    if (!has_normals) mesh.normals.clear();
    return mesh;
}

TriMesh load_ply(const std::filesystem::path& path) {
    const auto bytes = io::read_file(path);
    return parse_ply(bytes, path.string());
}

namespace {

template <class T>
void put(std::string& out, T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out.append(buf, sizeof(T));
}

std::uint8_t quantize(double c) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(c, 0.0, 1.0) * 255.0));
}

void append_number(std::string& out, double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, p);
}

}  // namespace

std::string serialize_ply(const TriMesh& mesh, PlyFormat format) {
    const bool as_float = std::all_of(mesh.positions.begin(), mesh.positions.end(), [](const Vec3& p) {
        for (int c = 0; c < 3; ++c)
            if (static_cast<double>(static_cast<float>(p[c])) != p[c]) return false;
        return true;
    });
    const bool normals = mesh.has_normals();
    const char* ptype = as_float ? "float" : "double";

    std::string out;
    out += "ply\n";
    out += format == PlyFormat::Ascii ? "format ascii 1.0\n" : "format binary_little_endian 1.0\n";
    out += "element vertex " + std::to_string(mesh.positions.size()) + "\n";
    for (const char* n : {"x", "y", "z"}) out += std::string("property ") + ptype + " " + n + "\n";
    if (normals)
        for (const char* n : {"nx", "ny", "nz"}) out += std::string("property float ") + n + "\n";
    out += "property uchar red\nproperty uchar green\nproperty uchar blue\n";
    out += "element face " + std::to_string(mesh.faces.size()) + "\n";
    out += "property list uchar int vertex_indices\n";
    out += "end_header\n";

    for (std::size_t i = 0; i < mesh.positions.size(); ++i) {
        const Vec3& p = mesh.positions[i];
        const Vec3& c = i < mesh.colors.size() ? mesh.colors[i] : kDefaultColor;
        if (format == PlyFormat::Ascii) {
            for (int k = 0; k < 3; ++k) {
                append_number(out, p[k]);
                out += ' ';
            }
            if (normals)
                for (int k = 0; k < 3; ++k) {
                    append_number(out, static_cast<float>(mesh.normals[i][k]));
                    out += ' ';
                }
            out += std::to_string(quantize(c[0])) + ' ' + std::to_string(quantize(c[1])) + ' ' +
                   std::to_string(quantize(c[2])) + '\n';
        } else {
            for (int k = 0; k < 3; ++k) {
                if (as_float) put(out, static_cast<float>(p[k]));
                else put(out, p[k]);
            }
            if (normals)
                for (int k = 0; k < 3; ++k) put(out, static_cast<float>(mesh.normals[i][k]));
            for (int k = 0; k < 3; ++k) put(out, quantize(c[k]));
        }
    }
    for (const auto& f : mesh.faces) {
        if (format == PlyFormat::Ascii) {
            out += "3 " + std::to_string(f[0]) + ' ' + std::to_string(f[1]) + ' ' + std::to_string(f[2]) + '\n';
        } else {
            put(out, std::uint8_t{3});
            for (auto idx : f) put(out, static_cast<std::int32_t>(idx));
        }
    }
    return out;
}

void save_ply(const TriMesh& mesh, const std::filesystem::path& path, PlyFormat format) {
    io::write_file_atomic(path, serialize_ply(mesh, format));
}

}  // namespace segcut
