#ifndef QDF_DIAGNOSTICS_HPP
#define QDF_DIAGNOSTICS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace qdf {

/// Position inside a source document. Lines and columns are 1-based;
/// columns count bytes, not code points. A default-constructed location
/// (line 0) means "unknown".
struct SourceLocation {
    std::size_t line = 0;
    std::size_t column = 0;
    std::size_t byte_offset = 0;

    bool known() const { return line > 0; }
    friend bool operator==(const SourceLocation&, const SourceLocation&) = default;
};

enum class Severity { Error, Warning, Info };

std::string to_string(Severity s);

/// One finding, identified by a stable code from the table below.
/// Codes are a compatibility contract: renaming one is a breaking change.
struct Diagnostic {
    std::string code;
    Severity severity = Severity::Error;
    std::string message;
    SourceLocation location;
    std::string subject;  // cord index, material label, or "elem@attr"
    std::string file;     // set by parse_file, empty otherwise

    friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

/// Stable diagnostic codes. The leading letter is the default severity
/// (E = error, W = warning, I = info); strict validation may raise some
/// warnings to errors without renaming them.
namespace codes {

// I/O and XML reader
inline constexpr const char* IO = "E-IO";
inline constexpr const char* UTF8 = "E-UTF8";
inline constexpr const char* XML_SYNTAX = "E-XML-SYNTAX";
inline constexpr const char* XML_ENTITY = "E-XML-ENTITY";
inline constexpr const char* ROOT = "E-ROOT";
inline constexpr const char* DEPTH = "E-DEPTH";
inline constexpr const char* PROLOG = "W-PROLOG";

// Document building
inline constexpr const char* UNKNOWN_ELEM = "E-UNKNOWN-ELEM";
inline constexpr const char* UNKNOWN_ATTR = "W-UNKNOWN-ATTR";
inline constexpr const char* ATTR_REQUIRED = "E-ATTR-REQUIRED";
inline constexpr const char* NUM = "E-NUM";
inline constexpr const char* ENUM = "E-ENUM";
inline constexpr const char* SPELLING = "I-SPELLING";

// Structural validation
inline constexpr const char* SECTION_ORDER = "E-SECTION-ORDER";
inline constexpr const char* CHILD_ORDER = "E-CHILD-ORDER";
inline constexpr const char* KNOT_ORDER = "E-KNOT-ORDER";
inline constexpr const char* CHILD_MISSING = "E-CHILD-MISSING";
inline constexpr const char* CHILD_DUP = "E-CHILD-DUP";
inline constexpr const char* CHILD_UNEXPECTED = "E-CHILD-UNEXPECTED";
inline constexpr const char* ID_SYNTAX = "E-ID-SYNTAX";
inline constexpr const char* ID_DUP = "E-ID-DUP";

// Semantic validation
inline constexpr const char* LOOPPOS = "E-LOOPPOS";
inline constexpr const char* BADREF = "E-BADREF";
inline constexpr const char* MIX_ORDER = "E-MIX-ORDER";
inline constexpr const char* ATTACH_FWD = "W-ATTACH-FWD";
inline constexpr const char* TOP_ONLY = "E-TOP-ONLY";
inline constexpr const char* POS_RANGE = "W-POS-RANGE";
inline constexpr const char* SEG_ORDER = "W-SEG-ORDER";
inline constexpr const char* SEG_LEN = "W-SEG-LEN";
inline constexpr const char* TRANSCRIPT_NONNUM = "W-TRANSCRIPT-NONNUM";
inline constexpr const char* EMPTY_MEDIA = "W-EMPTY-MEDIA";

// Serialization and rendering
inline constexpr const char* MODEL_INVARIANT = "E-MODEL-INVARIANT";
inline constexpr const char* EMPTY = "E-EMPTY";

}  // namespace codes

/// Thrown by operations whose preconditions are programmer contracts
/// (serialize on a broken model, SVG render of an empty document).
class QdfError : public std::runtime_error {
public:
    QdfError(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const { return code_; }

private:
    std::string code_;
};

/// Validation outcome: diagnostics ordered by document position, plus
/// per-severity tallies.
struct ValidationReport {
    std::vector<Diagnostic> diagnostics;
    std::size_t error_count = 0;
    std::size_t warning_count = 0;
    std::size_t info_count = 0;

    void add(Diagnostic d);
    void recount();
    bool ok() const { return error_count == 0; }
};

/// Formats "file:line:col: severity code: message [subject]".
std::string format_diagnostic(const Diagnostic& d);

}  // namespace qdf

#endif
