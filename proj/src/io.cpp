#include "kspec/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace kspec::io {

namespace {

std::string position(std::string_view text, std::size_t byte) {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

double number(const json& j, const std::string& where) {
    if (!j.is_number()) throw ParseError(where + ": expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ParseError(where + ": number is not finite");
    return v;
}

const json& field(const json& j, const char* key) {
    if (!j.is_object()) throw ParseError("expected a JSON object");
    const auto it = j.find(key);
    if (it == j.end()) throw ParseError(std::string("missing field \"") + key + "\"");
    return *it;
}

cplx complex_from_json(const json& j, const std::string& where) {
    if (j.is_number()) return number(j, where);
    if (!j.is_array() || j.size() != 2) throw ParseError(where + ": expected [re, im]");
    return {number(j[0], where + " (real part)"), number(j[1], where + " (imaginary part)")};
}

std::vector<cplx> complex_list(const json& j, const std::string& name) {
    if (!j.is_array() || j.empty()) throw ParseError("\"" + name + "\" must be a non-empty array");
    std::vector<cplx> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(complex_from_json(j[i], name + " entry " + std::to_string(i)));
    return out;
}

}  // namespace

json parse_text(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
        throw ParseError("malformed JSON at " + position(text, byte));
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Matrix matrix_from_json(const json& j) {
    const json& nj = field(j, "n");
    if (!nj.is_number_integer() || nj.get<long long>() < 1) throw ParseError("\"n\" must be a positive integer");
    const auto n = static_cast<std::size_t>(nj.get<long long>());
    Matrix a(n);
    auto fill = [&](const json& part, const char* name, bool imaginary) {
        if (!part.is_array() || part.size() != n)
            throw ParseError(std::string("\"") + name + "\" must have " + std::to_string(n) + " rows");
        for (std::size_t r = 0; r < n; ++r) {
            const json& row = part[r];
            if (!row.is_array() || row.size() != n)
                throw ParseError(std::string("\"") + name + "\" row " + std::to_string(r) + " must have " +
                                 std::to_string(n) + " entries");
            for (std::size_t c = 0; c < n; ++c) {
                const double v = number(row[c], std::string("\"") + name + "\" row " + std::to_string(r) +
                                                    ", column " + std::to_string(c));
                if (imaginary)
                    a(r, c) = {a(r, c).real(), v};
                else
                    a(r, c) = {v, a(r, c).imag()};
            }
        }
    };
    fill(field(j, "re"), "re", false);
    if (j.contains("im")) fill(j["im"], "im", true);
    return a;
}

json matrix_to_json(const Matrix& a) {
    const std::size_t n = a.size();
    json re = json::array(), im = json::array();
    for (std::size_t r = 0; r < n; ++r) {
        json rr = json::array(), ir = json::array();
        for (std::size_t c = 0; c < n; ++c) {
            rr.push_back(a(r, c).real());
            ir.push_back(a(r, c).imag());
        }
        re.push_back(std::move(rr));
        im.push_back(std::move(ir));
    }
    return {{"n", n}, {"re", std::move(re)}, {"im", std::move(im)}};
}

SphereDisk disk_from_json(const json& j) {
    const json& kind = field(j, "kind");
    if (!kind.is_string()) throw ParseError("\"kind\" must be a string");
    const std::string k = kind.get<std::string>();
    if (k == "disk" || k == "codisk") {
        const cplx center = complex_from_json(field(j, "center"), "center");
        const double radius = number(field(j, "radius"), "radius");
        return k == "disk" ? SphereDisk::disk(center, radius) : SphereDisk::codisk(center, radius);
    }
    if (k == "halfplane")
        return SphereDisk::half_plane(number(field(j, "angle"), "angle"), number(field(j, "offset"), "offset"));
    throw ParseError("unknown disk kind \"" + k + "\"");
}

json disk_to_json(const SphereDisk& d) {
    switch (d.kind()) {
        case DiskKind::Disk:
            return {{"kind", "disk"}, {"center", complex_to_json(d.center())}, {"radius", d.radius()}};
        case DiskKind::Codisk:
            return {{"kind", "codisk"}, {"center", complex_to_json(d.center())}, {"radius", d.radius()}};
        case DiskKind::HalfPlane:
            break;
    }
    return {{"kind", "halfplane"}, {"angle", d.angle()}, {"offset", d.offset()}};
}

RationalFunction rational_from_json(const json& j) {
    std::vector<cplx> num = complex_list(field(j, "num"), "num");
    std::vector<cplx> den{1.0};
    if (j.contains("den") && !j["den"].is_null()) den = complex_list(j["den"], "den");
    int low = 0;
    if (j.contains("laurent_low") && !j["laurent_low"].is_null()) {
        if (!j["laurent_low"].is_number_integer()) throw ParseError("\"laurent_low\" must be an integer or null");
        low = j["laurent_low"].get<int>();
    }
    return RationalFunction(std::move(num), std::move(den), low);
}

json rational_to_json(const RationalFunction& f) {
    json num = json::array(), den = json::array();
    for (const cplx& c : f.numerator()) num.push_back(complex_to_json(c));
    for (const cplx& c : f.denominator()) den.push_back(complex_to_json(c));
    json low = f.laurent_low() == 0 ? json(nullptr) : json(f.laurent_low());
    return {{"num", std::move(num)}, {"den", std::move(den)}, {"laurent_low", std::move(low)}};
}

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

json point_to_json(const SpherePoint& p) { return p.infinite ? json("inf") : complex_to_json(p.z); }

json classification_to_json(const Classification& c) {
    json out;
    out["case"] = std::string(to_string(c.label));
    json pts = json::array();
    for (const auto& p : c.boundary_points) pts.push_back(point_to_json(p));
    out["boundary_points"] = std::move(pts);
    if (c.canonical_map) {
        const auto& m = *c.canonical_map;
        out["canonical_map"] = json::array({complex_to_json(m.m11()), complex_to_json(m.m12()),
                                            complex_to_json(m.m21()), complex_to_json(m.m22())});
    } else {
        out["canonical_map"] = nullptr;
    }
    out["canonical_R"] = c.canonical_R ? json(*c.canonical_R) : json(nullptr);
    return out;
}

std::string bounds_csv(std::span<const bounds::BoundsRow> rows) {
    std::string out = "R,lower_simple,gamma,upper_new,upper_shields,upper_min\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n", r.R, r.lower_simple, r.gamma,
                      r.upper_new, r.upper_shields, r.upper_min);
        out += buf;
    }
    return out;
}

}  // namespace kspec::io
