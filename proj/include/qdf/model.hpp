#ifndef QDF_MODEL_HPP
#define QDF_MODEL_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qdf/diagnostics.hpp"

namespace qdf {

namespace xml {
struct Element;
}

// Twist/knot direction in Urton's S/Z notation; U marks unknown and is
// the default whenever a document omits the attribute.
enum class Direction { S, Z, U };

// How a pendant's loop faces when attached to its parent cord.
enum class Attach { Verso, Recto, U };

enum class CordType { Pendant, Top, Subsidiary, Loop };

enum class Finish { Knotted, Broken, None };

enum class KnotKind { Single, Multiple, Eight };

enum class MetricUnit { Mm, Cm, In };

std::string_view to_token(Direction v);
std::string_view to_token(Attach v);
std::string_view to_token(CordType v);
std::string_view to_token(Finish v);
std::string_view to_token(KnotKind v);
std::string_view to_token(MetricUnit v);

std::optional<Direction> direction_from_token(std::string_view t);
std::optional<Attach> attach_from_token(std::string_view t);
std::optional<CordType> cord_type_from_token(std::string_view t);
std::optional<Finish> finish_from_token(std::string_view t);
std::optional<MetricUnit> metric_unit_from_token(std::string_view t);

/// HTML-style "#rrggbb" color value.
struct RgbColor {
    std::string value;

    bool valid() const;
    friend bool operator==(const RgbColor&, const RgbColor&) = default;
};

struct Author {
    std::string name;
    std::optional<std::string> institution;
    std::optional<std::string> year;
    std::optional<std::string> email;
    std::optional<std::string> address;

    friend bool operator==(const Author&, const Author&) = default;
};

struct CatalogHeader {
    std::string source;
    std::optional<std::string> dating;
    std::vector<std::string> codenames;  // at least one in a valid document
    std::optional<Author> author;
    std::optional<std::string> comment;

    friend bool operator==(const CatalogHeader&, const CatalogHeader&) = default;
};

struct MaterialItem {
    std::string label;
    std::string description;
    std::optional<RgbColor> color_rgb;
    std::optional<std::string> color_iccnbs;
    std::vector<std::string> mixes;  // labels of earlier-declared items
    SourceLocation loc;

    bool operator==(const MaterialItem& o) const;
};

/// One segment of cord material; `pos` is where the material finishes,
/// measured from the attachment end in document units.
struct MaterialSegment {
    std::string material;
    double pos = 0;
    SourceLocation loc;

    bool operator==(const MaterialSegment& o) const;
};

struct AttachRef {
    std::string pendant;  // index of the grouped cord
    SourceLocation loc;

    bool operator==(const AttachRef& o) const;
};

/// A knot on a cord. The element content is kept verbatim in
/// `raw_value`; `value` is its base-10 reading when it has one.
struct Knot {
    KnotKind kind = KnotKind::Single;
    Direction dir = Direction::U;
    double pos = 0;
    std::optional<std::uint64_t> value;
    std::string raw_value;
    SourceLocation loc;

    bool operator==(const Knot& o) const;
};

/// Make a knot with a numeric value; keeps raw_value in sync.
Knot make_knot(KnotKind kind, double pos, std::uint64_t value, Direction dir = Direction::U);

struct Cord {
    std::string index;
    double lenght = 0;  // the format spells the attribute "lenght"
    std::optional<double> width;
    double pos = 0;  // attachment position on the parent
    Direction dir = Direction::U;
    Attach attach = Attach::U;
    bool attach_through = false;
    CordType type = CordType::Pendant;
    std::optional<double> loop_pos;  // reattachment position, loop cords
    std::optional<Finish> finish;
    std::vector<AttachRef> attach_pendants;  // top cords only
    std::vector<MaterialSegment> media;
    std::vector<Knot> knots;
    std::vector<Cord> children;
    std::optional<std::string> transcription;
    SourceLocation loc;

    bool operator==(const Cord& o) const;
};

struct MainCord {
    std::optional<std::string> index;
    double lenght = 0;
    std::optional<double> width;
    Direction dir = Direction::U;
    std::optional<std::string> material;
    std::optional<Finish> finish;
    std::vector<Cord> cords;
    SourceLocation loc;

    bool operator==(const MainCord& o) const;
};

/// Parser bookkeeping carried on a Document. Not part of the document's
/// value: equality ignores it. Constructed documents keep the defaults.
struct SourceMeta {
    bool had_xml_decl = true;
    bool had_doctype = true;
    // Set when the parser dropped items it could not represent, so the
    // semantic validator can skip reference checks that would cascade.
    bool media_index_incomplete = false;
    bool cords_incomplete = false;
};

/// A parsed or constructed QDF document.
///
/// `source` is the raw element tree when the document came from the
/// parser; the validator uses it for checks the typed model cannot
/// express (section order, unknown attributes, enumeration tokens).
struct Document {
    CatalogHeader header;
    std::vector<MaterialItem> media_index;
    MetricUnit metric_unit = MetricUnit::Mm;
    std::vector<MainCord> maincords;

    SourceMeta meta;
    std::shared_ptr<const xml::Element> source;

    bool operator==(const Document& o) const;
};

/// Stable key for a maincord: its index when present, otherwise the
/// synthetic ordinal "maincord-N" (N is 1-based). Never serialized.
std::string maincord_key(const MainCord& mc, std::size_t ordinal);

/// One step of a depth-first cord traversal. Depth 1 is a cord attached
/// directly to a maincord; `parent` is the owning cord's index or the
/// maincord key.
struct CordVisit {
    const Cord* cord = nullptr;
    int depth = 0;
    std::string parent;
};

/// Depth-first pre-order walk over every maincord's cord tree, in
/// document order. Each cord appears exactly once.
std::vector<CordVisit> iterate_cords(const Document& doc);

/// The unique cord with the given index, or nullptr.
const Cord* find_cord(const Document& doc, std::string_view index);

/// True if `s` is a syntactically valid XML Name (the DTD's ID/IDREF
/// token syntax; ':' is permitted).
bool is_xml_name(std::string_view s);

}  // namespace qdf

#endif
