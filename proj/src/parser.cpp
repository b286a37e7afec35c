#include "qdf/parser.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "qdf/xml.hpp"

namespace qdf {

namespace {

constexpr std::string_view kWs = " \t\n\r";

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(kWs);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(kWs);
    return s.substr(b, e - b + 1);
}

bool is_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(),
                                     [](unsigned char c) { return c >= '0' && c <= '9'; });
}

// Non-negative decimal: digits with an optional fractional part. No
// sign, no exponent, period separator.
std::optional<double> parse_decimal(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
    if (i == 0) return std::nullopt;
    if (i < s.size()) {
        if (s[i] != '.') return std::nullopt;
        const std::size_t frac_start = ++i;
        while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
        if (i == frac_start || i != s.size()) return std::nullopt;
    }
    double value = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

std::optional<std::uint64_t> parse_unsigned(std::string_view s) {
    if (!is_digits(s)) return std::nullopt;
    std::uint64_t value = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (res.ec != std::errc()) return std::nullopt;
    return value;
}

// The element vocabulary. An element outside this set is E-UNKNOWN-ELEM;
// a known element in the wrong place is left for the validator.
bool known_element(std::string_view name) {
    static constexpr std::string_view kNames[] = {
        "quipu",       "about",      "source",        "dating",      "codename",
        "author",      "name",       "institution",   "year",        "email",
        "address",     "comment",    "media_index",   "material_item", "description",
        "color_rgb",   "color_iccnbs", "mix",         "metric_unit", "maincord",
        "cord",        "attach_pendants", "attaches", "media",       "material",
        "knots",       "single",     "multiple",      "eight",       "transcription",
    };
    return std::find(std::begin(kNames), std::end(kNames), name) != std::end(kNames);
}

class Mapper {
public:
    explicit Mapper(std::vector<Diagnostic>& diags) : diags_(diags) {}

    std::optional<Document> map(const xml::Element& root) {
        if (root.name != "quipu") {
            error(codes::ROOT, "root element is <" + root.name + ">, expected <quipu>",
                  root.loc);
            return std::nullopt;
        }
        check_attrs(root, {});
        Document doc;
        // Sections map by name in document order, first occurrence
        // wins; the validator reports misplacement and duplicates.
        bool seen_about = false, seen_media = false, seen_unit = false;
        for (const auto& child : root.children) {
            const std::string& n = child->name;
            if (n == "about") {
                if (!seen_about) doc.header = map_about(*child);
                seen_about = true;
            } else if (n == "media_index") {
                if (!seen_media) map_media_index(*child, doc);
                seen_media = true;
            } else if (n == "metric_unit") {
                if (!seen_unit) doc.metric_unit = map_metric_unit(*child);
                seen_unit = true;
            } else if (n == "maincord") {
                map_maincord(*child, doc);
            } else {
                unknown(*child);
            }
        }
        doc.meta.media_index_incomplete = !seen_media || dropped_material_;
        doc.meta.cords_incomplete = dropped_cord_;
        return doc;
    }

private:
    std::vector<Diagnostic>& diags_;
    bool dropped_material_ = false;
    bool dropped_cord_ = false;

    void emit(const char* code, Severity sev, std::string msg, SourceLocation loc,
              std::string subject = {}) {
        diags_.push_back(Diagnostic{code, sev, std::move(msg), loc, std::move(subject), {}});
    }
    void error(const char* code, std::string msg, SourceLocation loc, std::string subject = {}) {
        emit(code, Severity::Error, std::move(msg), loc, std::move(subject));
    }

    void unknown(const xml::Element& elem) {
        if (known_element(elem.name)) return;  // misplaced; the validator reports it
        error(codes::UNKNOWN_ELEM, "unknown element <" + elem.name + ">", elem.loc, elem.name);
    }

    // Flags attributes outside `allowed`; tolerates the 'length'
    // spelling when 'lenght' is allowed.
    void check_attrs(const xml::Element& elem, std::initializer_list<std::string_view> allowed) {
        const bool lenght_ok =
            std::find(allowed.begin(), allowed.end(), "lenght") != allowed.end();
        for (const auto& attr : elem.attributes) {
            if (std::find(allowed.begin(), allowed.end(), attr.name) != allowed.end()) continue;
            if (lenght_ok && attr.name == "length") {
                emit(codes::SPELLING, Severity::Info,
                     "attribute 'length' read as the canonical spelling 'lenght'", attr.loc,
                     elem.name + "@length");
                continue;
            }
            emit(codes::UNKNOWN_ATTR, Severity::Warning,
                 "unknown attribute '" + attr.name + "' on <" + elem.name + ">", attr.loc,
                 elem.name + "@" + attr.name);
        }
    }

    std::optional<std::string> attr_token(const xml::Element& elem, std::string_view name) const {
        const auto* a = elem.find_attribute(name);
        if (!a) return std::nullopt;
        return std::string(trim(a->value));
    }

    // 'lenght' with fallback to the tolerated 'length' spelling.
    std::optional<std::string> lenght_token(const xml::Element& elem) const {
        if (auto v = attr_token(elem, "lenght")) return v;
        return attr_token(elem, "length");
    }

    bool require(const xml::Element& elem, std::string_view attr,
                 const std::optional<std::string>& value) {
        if (value) return true;
        error(codes::ATTR_REQUIRED,
              "<" + elem.name + "> requires attribute '" + std::string(attr) + "'", elem.loc,
              elem.name + "@" + std::string(attr));
        return false;
    }

    enum class Domain { Positive, NonNegative };

    // Numeric attribute. nullopt means "absent or unusable"; unusable
    // values are reported and the caller skips the element.
    std::optional<double> numeric(const xml::Element& elem, std::string_view attr,
                                  const std::optional<std::string>& value, Domain domain,
                                  bool& bad) {
        if (!value) return std::nullopt;
        const auto parsed = parse_decimal(*value);
        if (!parsed) {
            error(codes::NUM,
                  "attribute '" + std::string(attr) + "' must be a non-negative decimal, got \"" +
                      *value + "\"",
                  elem.loc, elem.name + "@" + std::string(attr));
            bad = true;
            return std::nullopt;
        }
        if (domain == Domain::Positive && *parsed <= 0) {
            error(codes::NUM, "attribute '" + std::string(attr) + "' must be positive", elem.loc,
                  elem.name + "@" + std::string(attr));
            bad = true;
            return std::nullopt;
        }
        return parsed;
    }

    template <typename T>
    T enum_attr(const xml::Element& elem, std::string_view attr,
                std::optional<T> (*from_token)(std::string_view), T fallback) {
        const auto token = attr_token(elem, attr);
        if (!token) return fallback;
        if (auto v = from_token(*token)) return *v;
        error(codes::ENUM,
              "attribute '" + std::string(attr) + "' has value \"" + *token +
                  "\" outside its enumeration",
              elem.loc, elem.name + "@" + std::string(attr));
        return fallback;
    }

    std::string pcdata(const xml::Element& elem) const { return std::string(trim(elem.text)); }

    CatalogHeader map_about(const xml::Element& about) {
        check_attrs(about, {});
        CatalogHeader header;
        const xml::Element* author = nullptr;
        for (const auto& child : about.children) {
            const std::string& n = child->name;
            if (n == "source") {
                if (header.source.empty()) header.source = pcdata(*child);
            } else if (n == "dating") {
                if (!header.dating) header.dating = pcdata(*child);
            } else if (n == "codename") {
                header.codenames.push_back(pcdata(*child));
            } else if (n == "author") {
                if (!author) author = child.get();
            } else if (n == "comment") {
                if (!header.comment) header.comment = pcdata(*child);
            } else {
                unknown(*child);
            }
        }
        if (author) header.author = map_author(*author);
        return header;
    }

    Author map_author(const xml::Element& elem) {
        check_attrs(elem, {});
        Author author;
        for (const auto& child : elem.children) {
            const std::string& n = child->name;
            if (n == "name") {
                if (author.name.empty()) author.name = pcdata(*child);
            } else if (n == "institution") {
                if (!author.institution) author.institution = pcdata(*child);
            } else if (n == "year") {
                if (!author.year) author.year = pcdata(*child);
            } else if (n == "email") {
                if (!author.email) author.email = pcdata(*child);
            } else if (n == "address") {
                if (!author.address) author.address = pcdata(*child);
            } else {
                unknown(*child);
            }
        }
        return author;
    }

    void map_media_index(const xml::Element& elem, Document& doc) {
        check_attrs(elem, {});
        for (const auto& child : elem.children) {
            if (child->name == "material_item") {
                map_material_item(*child, doc);
            } else {
                unknown(*child);
            }
        }
    }

    void map_material_item(const xml::Element& elem, Document& doc) {
        check_attrs(elem, {"label"});
        const auto label = attr_token(elem, "label");
        if (!require(elem, "label", label)) {
            dropped_material_ = true;
            return;
        }
        MaterialItem item;
        item.label = *label;
        item.loc = elem.loc;
        const xml::Element* description = nullptr;
        const xml::Element* rgb = nullptr;
        const xml::Element* iccnbs = nullptr;
        for (const auto& child : elem.children) {
            const std::string& n = child->name;
            if (n == "description") {
                if (!description) description = child.get();
            } else if (n == "color_rgb") {
                if (!rgb) rgb = child.get();
            } else if (n == "color_iccnbs") {
                if (!iccnbs) iccnbs = child.get();
            } else if (n == "mix") {
                check_attrs(*child, {"id"});
                const auto id = attr_token(*child, "id");
                if (require(*child, "id", id)) item.mixes.push_back(*id);
            } else {
                unknown(*child);
            }
        }
        if (description) item.description = pcdata(*description);
        if (rgb) {
            check_attrs(*rgb, {"value"});
            const auto value = attr_token(*rgb, "value");
            if (require(*rgb, "value", value)) item.color_rgb = RgbColor{*value};
        }
        if (iccnbs) {
            check_attrs(*iccnbs, {"value"});
            const auto value = attr_token(*iccnbs, "value");
            if (require(*iccnbs, "value", value)) item.color_iccnbs = *value;
        }
        doc.media_index.push_back(std::move(item));
    }

    MetricUnit map_metric_unit(const xml::Element& elem) {
        check_attrs(elem, {"type"});
        const auto type = attr_token(elem, "type");
        if (!require(elem, "type", type)) return MetricUnit::Mm;
        if (auto unit = metric_unit_from_token(*type)) return *unit;
        error(codes::ENUM, "metric unit \"" + *type + "\" is not one of mm, cm, in", elem.loc,
              "metric_unit@type");
        return MetricUnit::Mm;
    }

    void map_maincord(const xml::Element& elem, Document& doc) {
        check_attrs(elem, {"dir", "lenght", "width", "index", "material", "finish"});
        MainCord mc;
        mc.loc = elem.loc;
        bool bad = !require(elem, "lenght", lenght_token(elem));
        const auto lenght = numeric(elem, "lenght", lenght_token(elem), Domain::Positive, bad);
        mc.width = numeric(elem, "width", attr_token(elem, "width"), Domain::Positive, bad);
        if (bad) {
            dropped_cord_ = true;
            return;
        }
        mc.lenght = *lenght;
        mc.index = attr_token(elem, "index");
        mc.material = attr_token(elem, "material");
        mc.dir = enum_attr(elem, "dir", direction_from_token, Direction::U);
        if (const auto finish = attr_token(elem, "finish")) {
            if (auto f = finish_from_token(*finish)) {
                mc.finish = f;
            } else {
                error(codes::ENUM, "finish \"" + *finish + "\" outside its enumeration", elem.loc,
                      "maincord@finish");
            }
        }
        for (const auto& child : elem.children) {
            if (child->name == "cord") {
                if (auto cord = map_cord(*child)) mc.cords.push_back(std::move(*cord));
            } else {
                unknown(*child);
            }
        }
        doc.maincords.push_back(std::move(mc));
    }

    std::optional<Cord> map_cord(const xml::Element& elem) {
        check_attrs(elem, {"index", "lenght", "width", "pos", "dir", "attach", "attach_through",
                           "type", "loop_pos", "finish"});
        Cord cord;
        cord.loc = elem.loc;

        const auto index = attr_token(elem, "index");
        const auto type_token = attr_token(elem, "type");
        bool bad = !require(elem, "index", index);
        bad |= !require(elem, "lenght", lenght_token(elem));
        bad |= !require(elem, "pos", attr_token(elem, "pos"));
        bad |= !require(elem, "type", type_token);

        const auto lenght = numeric(elem, "lenght", lenght_token(elem), Domain::Positive, bad);
        const auto pos = numeric(elem, "pos", attr_token(elem, "pos"), Domain::NonNegative, bad);
        cord.width = numeric(elem, "width", attr_token(elem, "width"), Domain::Positive, bad);
        cord.loop_pos =
            numeric(elem, "loop_pos", attr_token(elem, "loop_pos"), Domain::NonNegative, bad);

        if (type_token) {
            if (auto t = cord_type_from_token(*type_token)) {
                cord.type = *t;
            } else {
                error(codes::ENUM,
                      "cord type \"" + *type_token + "\" is not pendant, top, subsidiary or loop",
                      elem.loc, "cord@type");
                bad = true;
            }
        }
        if (bad) {
            dropped_cord_ = true;
            return std::nullopt;
        }
        cord.index = *index;
        cord.lenght = *lenght;
        cord.pos = *pos;
        cord.dir = enum_attr(elem, "dir", direction_from_token, Direction::U);
        cord.attach = enum_attr(elem, "attach", attach_from_token, Attach::U);
        if (const auto through = attr_token(elem, "attach_through")) {
            if (*through == "yes") {
                cord.attach_through = true;
            } else if (*through == "no") {
                cord.attach_through = false;
            } else {
                error(codes::ENUM, "attach_through must be \"yes\" or \"no\"", elem.loc,
                      "cord@attach_through");
            }
        }
        if (const auto finish = attr_token(elem, "finish")) {
            if (auto f = finish_from_token(*finish)) {
                cord.finish = f;
            } else {
                error(codes::ENUM, "finish \"" + *finish + "\" outside its enumeration", elem.loc,
                      "cord@finish");
            }
        }

        const xml::Element* media = nullptr;
        const xml::Element* transcription = nullptr;
        for (const auto& child : elem.children) {
            const std::string& n = child->name;
            if (n == "attach_pendants") {
                map_attach_pendants(*child, cord);
            } else if (n == "media") {
                if (!media) media = child.get();
            } else if (n == "knots") {
                map_knots(*child, cord);
            } else if (n == "cord") {
                if (auto sub = map_cord(*child)) cord.children.push_back(std::move(*sub));
            } else if (n == "transcription") {
                if (!transcription) transcription = child.get();
            } else {
                unknown(*child);
            }
        }
        if (media) map_media(*media, cord);
        if (transcription) cord.transcription = pcdata(*transcription);
        return cord;
    }

    void map_attach_pendants(const xml::Element& elem, Cord& cord) {
        check_attrs(elem, {});
        for (const auto& child : elem.children) {
            if (child->name == "attaches") {
                check_attrs(*child, {"pendant"});
                const auto pendant = attr_token(*child, "pendant");
                if (require(*child, "pendant", pendant)) {
                    cord.attach_pendants.push_back(AttachRef{*pendant, child->loc});
                }
            } else {
                unknown(*child);
            }
        }
    }

    void map_media(const xml::Element& elem, Cord& cord) {
        check_attrs(elem, {});
        for (const auto& child : elem.children) {
            if (child->name != "material") {
                unknown(*child);
                continue;
            }
            check_attrs(*child, {"id", "pos"});
            const auto id = attr_token(*child, "id");
            bool bad = !require(*child, "id", id);
            bad |= !require(*child, "pos", attr_token(*child, "pos"));
            const auto pos =
                numeric(*child, "pos", attr_token(*child, "pos"), Domain::Positive, bad);
            if (bad) continue;
            cord.media.push_back(MaterialSegment{*id, *pos, child->loc});
        }
    }

    void map_knots(const xml::Element& elem, Cord& cord) {
        check_attrs(elem, {});
        for (const auto& child : elem.children) {
            KnotKind kind;
            if (child->name == "single") {
                kind = KnotKind::Single;
            } else if (child->name == "multiple") {
                kind = KnotKind::Multiple;
            } else if (child->name == "eight") {
                kind = KnotKind::Eight;
            } else {
                unknown(*child);
                continue;
            }
            check_attrs(*child, {"dir", "pos"});
            bool bad = !require(*child, "pos", attr_token(*child, "pos"));
            const auto pos =
                numeric(*child, "pos", attr_token(*child, "pos"), Domain::NonNegative, bad);
            if (bad) continue;
            Knot knot;
            knot.kind = kind;
            knot.pos = *pos;
            knot.dir = enum_attr(*child, "dir", direction_from_token, Direction::U);
            knot.raw_value = pcdata(*child);
            knot.value = parse_unsigned(knot.raw_value);
            knot.loc = child->loc;
            cord.knots.push_back(std::move(knot));
        }
    }
};

}  // namespace

ParseResult parse(std::string_view bytes, const ParseOptions& options) {
    ParseResult result;
    xml::ReadOptions read_options;
    read_options.max_depth = options.max_depth;
    xml::ReadResult raw = xml::read(bytes, read_options);
    result.diagnostics = std::move(raw.diagnostics);

    if (!raw.had_xml_decl || !raw.had_doctype) {
        std::string missing;
        if (!raw.had_xml_decl) missing = "XML declaration";
        if (!raw.had_doctype) {
            if (!missing.empty()) missing += " and ";
            missing += "DOCTYPE";
        }
        result.diagnostics.push_back(Diagnostic{codes::PROLOG, Severity::Warning,
                                                "document prolog is missing its " + missing,
                                                SourceLocation{1, 1, 0},
                                                {},
                                                {}});
    }
    if (!raw.root) return result;

    Mapper mapper(result.diagnostics);
    result.document = mapper.map(*raw.root);
    if (result.document) {
        result.document->meta.had_xml_decl = raw.had_xml_decl;
        result.document->meta.had_doctype = raw.had_doctype;
        result.document->source = std::shared_ptr<const xml::Element>(std::move(raw.root));
    }
    return result;
}

ParseResult parse_file(const std::filesystem::path& path, const ParseOptions& options) {
    auto io_error = [&](const std::string& detail) {
        ParseResult result;
        result.diagnostics.push_back(Diagnostic{
            codes::IO, Severity::Error, detail, SourceLocation{}, {}, path.string()});
        return result;
    };

    std::error_code ec;
    if (std::filesystem::is_directory(path, ec)) {
        return io_error("'" + path.string() + "' is a directory");
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        return io_error("cannot open '" + path.string() + "' for reading");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) {
        return io_error("error while reading '" + path.string() + "'");
    }
    ParseResult result = parse(buf.str(), options);
    for (auto& d : result.diagnostics) d.file = path.string();
    return result;
}

}  // namespace qdf
