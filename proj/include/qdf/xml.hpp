#ifndef QDF_XML_HPP
#define QDF_XML_HPP

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "qdf/diagnostics.hpp"

namespace qdf::xml {

struct Attribute {
    std::string name;
    std::string value;
    SourceLocation loc;
};

/// A parsed element. Character data is accumulated per element (QDF has
/// no mixed content: elements hold either text or children, and stray
/// text in a container is only ever reported, never interpreted).
struct Element {
    std::string name;
    SourceLocation loc;
    std::vector<Attribute> attributes;
    std::vector<std::unique_ptr<Element>> children;
    std::string text;                  // entity-decoded character data
    bool has_nonspace_text = false;    // true if any non-whitespace text
    SourceLocation nonspace_text_loc;  // first such run

    const Attribute* find_attribute(std::string_view name) const;
    const Element* first_child(std::string_view name) const;
};

struct ReadOptions {
    // Element nesting cap; protects against stack abuse on hostile
    // input. The document tree adds three levels around the cord tree.
    std::size_t max_depth = 64;
};

/// Outcome of reading one document. `root` is null after a fatal
/// problem, in which case at least one error diagnostic explains it.
struct ReadResult {
    std::unique_ptr<Element> root;
    bool had_xml_decl = false;
    bool had_doctype = false;
    std::string doctype_name;
    std::vector<Diagnostic> diagnostics;
};

/// Reads one XML document from `input`. Supports the subset QDF needs:
/// elements, attributes, comments, CDATA, processing instructions, a
/// DOCTYPE line (recorded, never fetched), the five predefined entities
/// and numeric character references. External and undeclared entities
/// are rejected. Input must be valid UTF-8.
ReadResult read(std::string_view input, const ReadOptions& options = {});

/// Escapes &, <, > (text content).
std::string escape_text(std::string_view s);

/// Escapes &, <, > and double quotes (attribute values).
std::string escape_attribute(std::string_view s);

}  // namespace qdf::xml

#endif
