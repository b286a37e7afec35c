#ifndef QDF_RENDER_HPP
#define QDF_RENDER_HPP

#include <string>

#include "qdf/model.hpp"

namespace qdf {

/// Indented text tree: one line per maincord and per cord (two spaces
/// per depth) with index, type, lenght+unit, pos, dir, a knot summary
/// like "3 single" and the decoded value when the cord has knots. A
/// document without maincords renders a banner plus "(no maincords)".
std::string render_text(const Document& doc);

/// SVG 1.1 structure diagram. The maincord is a horizontal line scaled
/// to its lenght (one document unit, normalized to mm, per SVG user
/// unit); cords hang vertically at their attachment positions (top
/// cords point up); knots draw as circles (single), lozenges (multiple)
/// and crosses (eight); loop cords get a dashed return arc to loop_pos;
/// material segments take their item's color_rgb, neutral gray
/// otherwise. Output is deterministic byte-for-byte.
///
/// Throws QdfError (code E-EMPTY) when the document has no maincords.
std::string render_svg(const Document& doc);

}  // namespace qdf

#endif
