#ifndef QDF_PARSER_HPP
#define QDF_PARSER_HPP

#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "qdf/diagnostics.hpp"
#include "qdf/model.hpp"

namespace qdf {

struct ParseOptions {
    /// Element nesting cap (stack-safety guard on hostile input).
    std::size_t max_depth = 64;
};

/// Outcome of a parse. `document` is empty only after a fatal problem
/// (bad encoding, malformed XML, wrong root, nesting cap), in which
/// case at least one error diagnostic explains why. A present document
/// may still carry error diagnostics: elements the parser could not
/// represent are reported and dropped, and parsing continues.
struct ParseResult {
    std::optional<Document> document;
    std::vector<Diagnostic> diagnostics;

    bool fatal() const { return !document.has_value(); }
};

/// Parses QDF/XML text into a Document, applying the format's default
/// values (dir="U", attach="U", attach_through="no"). Comments and the
/// DOCTYPE line are accepted and discarded; the DTD is built in and
/// never fetched. Accepts the canonical attribute spelling "lenght" and
/// tolerates "length" with an info diagnostic.
ParseResult parse(std::string_view bytes, const ParseOptions& options = {});

/// parse() over the file's bytes; diagnostics carry the file name.
ParseResult parse_file(const std::filesystem::path& path, const ParseOptions& options = {});

}  // namespace qdf

#endif
