#ifndef QDF_ANALYSIS_HPP
#define QDF_ANALYSIS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qdf/model.hpp"

namespace qdf {

enum class Consistency { Match, Mismatch, Unchecked };

std::string to_string(Consistency c);

/// Decoded knot value of one cord against its transcription. Unchecked
/// when either side is absent or unreadable.
struct CordValueReport {
    std::string cord_index;
    std::optional<std::uint64_t> decoded;
    std::optional<std::uint64_t> transcription;
    Consistency consistent = Consistency::Unchecked;
};

struct DocumentStats {
    std::size_t maincord_count = 0;
    std::size_t cord_count = 0;
    std::map<CordType, std::size_t> cords_by_type;
    std::size_t knot_count = 0;
    std::map<KnotKind, std::size_t> knots_by_kind;
    std::size_t material_count = 0;
    double total_cord_lenght = 0;  // cords only, in document units
};

/// Sum of the cord's own knot values; children are not rolled up.
/// 0 for a knotless cord; absent when any knot value is non-numeric.
std::optional<std::uint64_t> decode_cord_value(const Cord& cord);

/// One report per cord, in traversal order.
std::vector<CordValueReport> check_transcriptions(const Document& doc);

/// Rescales every lenght, width, pos, loop_pos, segment pos and knot
/// pos into the target unit (mm/cm factor 10, mm/in factor 25.4, cm/in
/// factor 2.54), rounding to 6 decimal places. Six keeps any
/// round-trip through inches within 1.4e-5 of the original; a coarser
/// grid could not stay inside the 1e-3 contract. Converting to the
/// current unit returns an equal document.
Document convert_units(const Document& doc, MetricUnit target);

DocumentStats stats(const Document& doc);

/// One row of rendered text per cord, in traversal order. Columns:
/// cord_index, parent, type, lenght, pos, dir, attach, material_labels
/// (';'-joined), knot_count, decoded_value, transcription.
std::vector<std::vector<std::string>> export_table(const Document& doc);

/// export_table as CSV with a header row and RFC 4180 quoting.
std::string export_csv(const Document& doc);

}  // namespace qdf

#endif
