#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "kspec/bounds.hpp"
#include "kspec/geometry.hpp"
#include "kspec/linalg.hpp"
#include "kspec/ratfun.hpp"

namespace kspec::io {

using json = nlohmann::json;

/// Malformed or ill-shaped input text; the message carries line/column or
/// matrix row/column positions.
class ParseError : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

/// Parses JSON text, reporting syntax errors as "line L, column C".
json parse_text(std::string_view text);
std::string read_file(const std::string& path);

/// {"n": n, "re": [[...], ...], "im": [[...], ...]}; "im" may be omitted.
Matrix matrix_from_json(const json& j);
json matrix_to_json(const Matrix& a);

/// {"kind": "disk"|"codisk", "center": [re, im], "radius": r} or
/// {"kind": "halfplane", "angle": ω, "offset": d} for Re(e^{-iω}z) ≤ d.
SphereDisk disk_from_json(const json& j);
json disk_to_json(const SphereDisk& d);

/// {"num": [[re, im], ...], "den": [[re, im], ...], "laurent_low": k|null}
RationalFunction rational_from_json(const json& j);
json rational_to_json(const RationalFunction& f);

json complex_to_json(cplx z);
json point_to_json(const SpherePoint& p);
json classification_to_json(const Classification& c);

/// Header plus one row per entry, 12 significant digits.
std::string bounds_csv(std::span<const bounds::BoundsRow> rows);

}  // namespace kspec::io
