#ifndef QDF_VALIDATOR_HPP
#define QDF_VALIDATOR_HPP

#include "qdf/diagnostics.hpp"
#include "qdf/model.hpp"
#include "qdf/parser.hpp"

namespace qdf {

/// Strict mode raises W-PROLOG, W-SEG-LEN, W-POS-RANGE and W-ATTACH-FWD
/// to errors; codes are never renamed.
enum class Strictness { Lenient, Strict };

/// Checks the DTD's structural rules: section order, required children
/// and attributes, enumeration domains, ID uniqueness and syntax, and
/// the per-cord content order (attach_pendants, media, knots, child
/// cords, transcription).
///
/// A parsed document carries its raw element tree and gets the full
/// rule set, including violations the typed model cannot represent. A
/// constructed document is checked against the model-level subset; the
/// rest holds by construction.
ValidationReport validate_structure(const Document& doc);

/// Checks the format's prose rules: loop cords carry loop_pos,
/// references resolve, mixes point backwards, attach_pendants appear
/// only on top cords, position bounds, material segment ordering and
/// coverage, transcription readability. Position-bound findings are
/// warnings because the format's own reference document exceeds them;
/// boundary equality is always valid.
ValidationReport validate_semantics(const Document& doc);

/// Union of validate_structure and validate_semantics, stably ordered
/// by document position then code.
ValidationReport validate(const Document& doc, Strictness strictness = Strictness::Lenient);

/// Everything about a parse in one report: the parser's diagnostics
/// merged with validate() of the document (when one was produced),
/// deduplicated where both stages saw the same problem.
ValidationReport combined_report(const ParseResult& parsed,
                                 Strictness strictness = Strictness::Lenient);

}  // namespace qdf

#endif
