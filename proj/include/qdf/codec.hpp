#ifndef QDF_CODEC_HPP
#define QDF_CODEC_HPP

#include <optional>
#include <string>
#include <string_view>

#include "qdf/diagnostics.hpp"
#include "qdf/model.hpp"
#include "qdf/parser.hpp"

namespace qdf {

/// Canonical decimal rendering: integers without a decimal point,
/// fractional values with the fewest digits that read back exactly.
std::string format_number(double value);

/// Serializes a Document to canonical QDF/XML: the two prolog lines,
/// sections in DTD order, attributes in DTD declaration order, 4-space
/// indentation, canonical "lenght" spelling, default-valued attributes
/// (dir="U", attach="U", attach_through="no") omitted, empty elements
/// self-closed, trailing newline.
///
/// Throws QdfError (code E-MODEL-INVARIANT) when the document breaks a
/// model invariant that serialization cannot survive: empty or
/// duplicate identifiers, an empty media index or codename list, a
/// maincord without cords, or numeric fields outside their domain.
/// Findings the validator merely reports (dangling references, a loop
/// cord without loop_pos) serialize fine.
std::string serialize(const Document& doc);

struct CanonicalizeResult {
    std::optional<std::string> text;
    std::vector<Diagnostic> diagnostics;  // fatal problems only

    bool ok() const { return text.has_value(); }
};

/// parse + serialize: normalizes whitespace, attribute order and the
/// tolerated "length" spelling. Comments are not preserved. Idempotent:
/// canonical input comes back byte-for-byte.
CanonicalizeResult canonicalize(std::string_view bytes, const ParseOptions& options = {});

}  // namespace qdf

#endif
