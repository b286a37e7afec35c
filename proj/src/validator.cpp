#include "qdf/validator.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <tuple>

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

// ---------------------------------------------------------------------
// The QDF 0.2 DTD, as data.

enum class Content { Sequence, Pcdata, Empty };

enum class AttrKind {
    Text,
    Number,          // non-negative decimal
    PositiveNumber,  // decimal > 0
    Id,
    IdRef,
    Dir,
    AttachWay,
    YesNo,
    CordKind,
    FinishKind,
    Unit,
    Rgb,
};

struct ChildSpec {
    std::string_view name;
    unsigned min;
    unsigned max;  // 0 = unbounded
};

struct AttrSpec {
    std::string_view name;
    AttrKind kind;
    bool required;
};

struct ElemSpec {
    Content content = Content::Pcdata;
    bool require_text = false;  // PCDATA that must be non-empty
    std::vector<ChildSpec> children;
    std::vector<AttrSpec> attrs;
};

const std::map<std::string_view, ElemSpec>& dtd() {
    static const std::map<std::string_view, ElemSpec> table = {
        {"quipu",
         {Content::Sequence,
          false,
          {{"about", 1, 1}, {"media_index", 1, 1}, {"metric_unit", 1, 1}, {"maincord", 0, 0}},
          {}}},
        {"about",
         {Content::Sequence,
          false,
          {{"source", 1, 1},
           {"dating", 0, 1},
           {"codename", 1, 0},
           {"author", 0, 1},
           {"comment", 0, 1}},
          {}}},
        {"source", {Content::Pcdata, true, {}, {}}},
        {"dating", {Content::Pcdata, false, {}, {}}},
        {"codename", {Content::Pcdata, false, {}, {}}},
        {"comment", {Content::Pcdata, false, {}, {}}},
        {"author",
         {Content::Sequence,
          false,
          {{"name", 1, 1},
           {"institution", 0, 1},
           {"year", 0, 1},
           {"email", 0, 1},
           {"address", 0, 1}},
          {}}},
        {"name", {Content::Pcdata, true, {}, {}}},
        {"institution", {Content::Pcdata, false, {}, {}}},
        {"year", {Content::Pcdata, false, {}, {}}},
        {"email", {Content::Pcdata, false, {}, {}}},
        {"address", {Content::Pcdata, false, {}, {}}},
        {"media_index", {Content::Sequence, false, {{"material_item", 1, 0}}, {}}},
        {"material_item",
         {Content::Sequence,
          false,
          {{"description", 1, 1}, {"color_rgb", 0, 1}, {"color_iccnbs", 0, 1}, {"mix", 0, 0}},
          {{"label", AttrKind::Id, true}}}},
        {"description", {Content::Pcdata, true, {}, {}}},
        {"color_rgb", {Content::Empty, false, {}, {{"value", AttrKind::Rgb, true}}}},
        {"color_iccnbs", {Content::Empty, false, {}, {{"value", AttrKind::Text, true}}}},
        {"mix", {Content::Empty, false, {}, {{"id", AttrKind::IdRef, true}}}},
        {"metric_unit", {Content::Empty, false, {}, {{"type", AttrKind::Unit, true}}}},
        {"maincord",
         {Content::Sequence,
          false,
          {{"cord", 1, 0}},
          {{"dir", AttrKind::Dir, false},
           {"lenght", AttrKind::PositiveNumber, true},
           {"width", AttrKind::PositiveNumber, false},
           {"index", AttrKind::Id, false},
           {"material", AttrKind::IdRef, false},
           {"finish", AttrKind::FinishKind, false}}}},
        {"cord",
         {Content::Sequence,
          false,
          {{"attach_pendants", 0, 0},
           {"media", 1, 1},
           {"knots", 0, 0},
           {"cord", 0, 0},
           {"transcription", 0, 1}},
          {{"index", AttrKind::Id, true},
           {"lenght", AttrKind::PositiveNumber, true},
           {"width", AttrKind::PositiveNumber, false},
           {"pos", AttrKind::Number, true},
           {"dir", AttrKind::Dir, false},
           {"attach", AttrKind::AttachWay, false},
           {"attach_through", AttrKind::YesNo, false},
           {"type", AttrKind::CordKind, true},
           {"loop_pos", AttrKind::Number, false},
           {"finish", AttrKind::FinishKind, false}}}},
        {"attach_pendants", {Content::Sequence, false, {{"attaches", 1, 0}}, {}}},
        {"attaches", {Content::Empty, false, {}, {{"pendant", AttrKind::IdRef, true}}}},
        {"media", {Content::Sequence, false, {{"material", 0, 0}}, {}}},
        {"material",
         {Content::Empty,
          false,
          {},
          {{"id", AttrKind::IdRef, true}, {"pos", AttrKind::PositiveNumber, true}}}},
        {"knots",
         {Content::Sequence,
          false,
          {{"single", 0, 0}, {"multiple", 0, 0}, {"eight", 0, 0}},
          {}}},
        {"single",
         {Content::Pcdata,
          false,
          {},
          {{"dir", AttrKind::Dir, false}, {"pos", AttrKind::Number, true}}}},
        {"multiple",
         {Content::Pcdata,
          false,
          {},
          {{"dir", AttrKind::Dir, false}, {"pos", AttrKind::Number, true}}}},
        {"eight",
         {Content::Pcdata,
          false,
          {},
          {{"dir", AttrKind::Dir, false}, {"pos", AttrKind::Number, true}}}},
        {"transcription", {Content::Pcdata, false, {}, {}}},
    };
    return table;
}

bool enum_token_ok(AttrKind kind, std::string_view v) {
    switch (kind) {
        case AttrKind::Dir: return v == "S" || v == "Z" || v == "U";
        case AttrKind::AttachWay: return v == "verso" || v == "recto" || v == "U";
        case AttrKind::YesNo: return v == "yes" || v == "no";
        case AttrKind::CordKind:
            return v == "pendant" || v == "top" || v == "subsidiary" || v == "loop";
        case AttrKind::FinishKind: return v == "knotted" || v == "broken" || v == "none";
        case AttrKind::Unit: return v == "mm" || v == "cm" || v == "in";
        default: return true;
    }
}

class Reporter {
public:
    explicit Reporter(ValidationReport& report) : report_(report) {}

    void emit(const char* code, Severity sev, std::string msg, SourceLocation loc = {},
              std::string subject = {}) {
        report_.add(Diagnostic{code, sev, std::move(msg), loc, std::move(subject), {}});
    }
    void error(const char* code, std::string msg, SourceLocation loc = {},
               std::string subject = {}) {
        emit(code, Severity::Error, std::move(msg), loc, std::move(subject));
    }
    void warning(const char* code, std::string msg, SourceLocation loc = {},
                 std::string subject = {}) {
        emit(code, Severity::Warning, std::move(msg), loc, std::move(subject));
    }

private:
    ValidationReport& report_;
};

// ---------------------------------------------------------------------
// Structural validation against the raw element tree.

class RawValidator {
public:
    RawValidator(Reporter& out) : out_(out) {}

    void run(const xml::Element& root) {
        // Iterative walk; the reader already capped nesting depth.
        std::vector<const xml::Element*> stack{&root};
        while (!stack.empty()) {
            const xml::Element* e = stack.back();
            stack.pop_back();
            visit(*e);
            for (auto it = e->children.rbegin(); it != e->children.rend(); ++it) {
                stack.push_back(it->get());
            }
        }
        report_duplicate_ids();
    }

private:
    Reporter& out_;
    // id value -> first location, for E-ID-DUP
    std::vector<std::pair<std::string, SourceLocation>> ids_;

    void visit(const xml::Element& elem) {
        const auto it = dtd().find(elem.name);
        if (it == dtd().end()) {
            out_.error(codes::UNKNOWN_ELEM, "unknown element <" + elem.name + ">", elem.loc,
                       elem.name);
            return;
        }
        const ElemSpec& spec = it->second;
        check_attributes(elem, spec);
        check_content(elem, spec);
    }

    void check_attributes(const xml::Element& elem, const ElemSpec& spec) {
        const bool lenght_allowed =
            std::any_of(spec.attrs.begin(), spec.attrs.end(),
                        [](const AttrSpec& a) { return a.name == "lenght"; });
        for (const auto& attr : elem.attributes) {
            const AttrSpec* found = nullptr;
            for (const auto& a : spec.attrs) {
                if (a.name == attr.name) {
                    found = &a;
                    break;
                }
            }
            if (!found && attr.name == "length" && lenght_allowed) {
                // tolerated spelling; the parser reports I-SPELLING
                for (const auto& a : spec.attrs) {
                    if (a.name == "lenght") found = &a;
                }
            }
            if (!found) {
                out_.warning(codes::UNKNOWN_ATTR,
                             "unknown attribute '" + attr.name + "' on <" + elem.name + ">",
                             attr.loc, elem.name + "@" + attr.name);
                continue;
            }
            check_attribute_value(elem, *found, std::string(trim(attr.value)), attr.loc);
        }
        for (const auto& a : spec.attrs) {
            if (!a.required) continue;
            const bool present = elem.find_attribute(a.name) != nullptr ||
                                 (a.name == "lenght" && elem.find_attribute("length"));
            if (!present) {
                out_.error(codes::ATTR_REQUIRED,
                           "<" + elem.name + "> requires attribute '" + std::string(a.name) + "'",
                           elem.loc, elem.name + "@" + std::string(a.name));
            }
        }
    }

    void check_attribute_value(const xml::Element& elem, const AttrSpec& spec, std::string value,
                               SourceLocation loc) {
        const std::string subject = elem.name + "@" + std::string(spec.name);
        switch (spec.kind) {
            case AttrKind::Text: break;
            case AttrKind::Number:
            case AttrKind::PositiveNumber: {
                const auto parsed = parse_decimal(value);
                if (!parsed) {
                    out_.error(codes::NUM,
                               "attribute '" + std::string(spec.name) +
                                   "' must be a non-negative decimal, got \"" + value + "\"",
                               elem.loc, subject);
                } else if (spec.kind == AttrKind::PositiveNumber && *parsed <= 0) {
                    out_.error(codes::NUM,
                               "attribute '" + std::string(spec.name) + "' must be positive",
                               elem.loc, subject);
                }
                break;
            }
            case AttrKind::Id:
                if (!is_xml_name(value)) {
                    out_.error(codes::ID_SYNTAX,
                               "identifier \"" + value + "\" is not a valid XML name token", loc,
                               subject);
                } else {
                    ids_.emplace_back(value, loc);
                }
                break;
            case AttrKind::IdRef:
                if (!is_xml_name(value)) {
                    out_.error(codes::ID_SYNTAX,
                               "reference \"" + value + "\" is not a valid XML name token", loc,
                               subject);
                }
                break;
            case AttrKind::Rgb:
                if (!RgbColor{value}.valid()) {
                    out_.error(codes::ENUM,
                               "color value \"" + value + "\" is not in #rrggbb form", loc,
                               subject);
                }
                break;
            default:
                if (!enum_token_ok(spec.kind, value)) {
                    out_.error(codes::ENUM,
                               "attribute '" + std::string(spec.name) + "' has value \"" + value +
                                   "\" outside its enumeration",
                               elem.loc, subject);
                }
        }
    }

    void check_content(const xml::Element& elem, const ElemSpec& spec) {
        switch (spec.content) {
            case Content::Pcdata:
                for (const auto& child : elem.children) {
                    if (dtd().count(child->name) == 0) continue;  // E-UNKNOWN-ELEM via walk
                    out_.error(codes::CHILD_UNEXPECTED,
                               "<" + child->name + "> not allowed inside <" + elem.name + ">",
                               child->loc, elem.name + "/" + child->name);
                }
                if (spec.require_text && trim(elem.text).empty()) {
                    out_.error(codes::CHILD_MISSING, "<" + elem.name + "> must not be empty",
                               elem.loc, elem.name);
                }
                break;
            case Content::Empty:
                for (const auto& child : elem.children) {
                    if (dtd().count(child->name) == 0) continue;
                    out_.error(codes::CHILD_UNEXPECTED,
                               "<" + child->name + "> not allowed inside the empty element <" +
                                   elem.name + ">",
                               child->loc, elem.name + "/" + child->name);
                }
                if (elem.has_nonspace_text) {
                    out_.error(codes::CHILD_UNEXPECTED,
                               "<" + elem.name + "> is declared EMPTY but has text content",
                               elem.nonspace_text_loc, elem.name);
                }
                break;
            case Content::Sequence: check_sequence(elem, spec); break;
        }
    }

    void check_sequence(const xml::Element& elem, const ElemSpec& spec) {
        if (elem.has_nonspace_text) {
            out_.error(codes::CHILD_UNEXPECTED,
                       "text content not allowed inside <" + elem.name + ">",
                       elem.nonspace_text_loc, elem.name);
        }

        auto slot_of = [&](std::string_view name) -> int {
            for (std::size_t i = 0; i < spec.children.size(); ++i) {
                if (spec.children[i].name == name) return static_cast<int>(i);
            }
            return -1;
        };

        std::vector<unsigned> counts(spec.children.size(), 0);
        std::vector<std::pair<int, const xml::Element*>> known;
        for (const auto& child : elem.children) {
            const int slot = slot_of(child->name);
            if (slot < 0) {
                if (dtd().count(child->name) != 0) {
                    out_.error(codes::CHILD_UNEXPECTED,
                               "<" + child->name + "> not allowed inside <" + elem.name + ">",
                               child->loc, elem.name + "/" + child->name);
                }
                // unknown elements are reported once by the tree walk
                continue;
            }
            ++counts[static_cast<std::size_t>(slot)];
            known.emplace_back(slot, child.get());
        }

        for (std::size_t i = 0; i < spec.children.size(); ++i) {
            const ChildSpec& c = spec.children[i];
            const std::string subject = elem.name + "/" + std::string(c.name);
            if (counts[i] < c.min) {
                out_.error(codes::CHILD_MISSING,
                           "<" + elem.name + "> requires " +
                               (c.min == 1 ? "a" : std::to_string(c.min)) + " <" +
                               std::string(c.name) + "> child",
                           elem.loc, subject);
            }
            if (c.max != 0 && counts[i] > c.max) {
                out_.error(codes::CHILD_DUP,
                           "<" + elem.name + "> allows at most " + std::to_string(c.max) + " <" +
                               std::string(c.name) + "> child",
                           elem.loc, subject);
            }
        }

        for (std::size_t i = 1; i < known.size(); ++i) {
            if (known[i].first < known[i - 1].first) {
                const xml::Element* offender = known[i].second;
                const char* code = codes::CHILD_ORDER;
                std::string msg = "<" + offender->name + "> out of order inside <" + elem.name +
                                  "> (expected before <" + known[i - 1].second->name + ">)";
                if (elem.name == "quipu") {
                    code = codes::SECTION_ORDER;
                    msg = "section <" + offender->name + "> out of order; sections go about, "
                          "media_index, metric_unit, maincord";
                } else if (elem.name == "knots") {
                    code = codes::KNOT_ORDER;
                    msg = "knots must be grouped single, multiple, eight; <" + offender->name +
                          "> appears after <" + known[i - 1].second->name + ">";
                }
                out_.error(code, msg, offender->loc, elem.name + "/" + offender->name);
                break;  // one order finding per parent avoids cascades
            }
        }
    }

    void report_duplicate_ids() {
        std::map<std::string, SourceLocation> seen;
        for (const auto& [value, loc] : ids_) {
            auto [it, inserted] = seen.emplace(value, loc);
            if (!inserted) {
                out_.error(codes::ID_DUP,
                           "identifier \"" + value + "\" already declared at line " +
                               std::to_string(it->second.line),
                           loc, value);
            }
        }
    }
};

// ---------------------------------------------------------------------
// Model-level structural checks, for documents built in code. Parsed
// documents get these facts from the raw tree instead.

class ModelValidator {
public:
    explicit ModelValidator(Reporter& out) : out_(out) {}

    void run(const Document& doc) {
        if (doc.header.source.empty()) {
            out_.error(codes::CHILD_MISSING, "<source> must not be empty", {}, "source");
        }
        if (doc.header.codenames.empty()) {
            out_.error(codes::CHILD_MISSING, "<about> requires a <codename> child", {},
                       "about/codename");
        }
        if (doc.header.author && doc.header.author->name.empty()) {
            out_.error(codes::CHILD_MISSING, "<name> must not be empty", {}, "name");
        }
        if (doc.media_index.empty()) {
            out_.error(codes::CHILD_MISSING, "<media_index> requires a <material_item> child", {},
                       "media_index/material_item");
        }
        for (const auto& item : doc.media_index) {
            check_id(item.label, "material_item@label", item.loc);
            if (item.description.empty()) {
                out_.error(codes::CHILD_MISSING, "<description> must not be empty", item.loc,
                           "description");
            }
            if (item.color_rgb && !item.color_rgb->valid()) {
                out_.error(codes::ENUM,
                           "color value \"" + item.color_rgb->value + "\" is not in #rrggbb form",
                           item.loc, "color_rgb@value");
            }
        }
        for (const auto& mc : doc.maincords) {
            if (mc.index) check_id(*mc.index, "maincord@index", mc.loc);
            check_positive(mc.lenght, "maincord@lenght", mc.loc);
            if (mc.width) check_positive(*mc.width, "maincord@width", mc.loc);
            if (mc.cords.empty()) {
                out_.error(codes::CHILD_MISSING, "<maincord> requires a <cord> child", mc.loc,
                           "maincord/cord");
            }
        }
        for (const auto& visit : iterate_cords(doc)) {
            const Cord& cord = *visit.cord;
            if (cord.index.empty()) {
                out_.error(codes::ATTR_REQUIRED, "<cord> requires attribute 'index'", cord.loc,
                           "cord@index");
            } else {
                check_id(cord.index, "cord@index", cord.loc);
            }
            check_positive(cord.lenght, "cord@lenght", cord.loc);
            if (cord.width) check_positive(*cord.width, "cord@width", cord.loc);
            check_non_negative(cord.pos, "cord@pos", cord.loc);
            if (cord.loop_pos) check_non_negative(*cord.loop_pos, "cord@loop_pos", cord.loc);
            for (const auto& seg : cord.media) {
                check_positive(seg.pos, "material@pos", seg.loc);
            }
            for (const auto& knot : cord.knots) {
                check_non_negative(knot.pos, std::string(to_token(knot.kind)) + "@pos", knot.loc);
            }
        }
        report_duplicate_ids(doc);
    }

private:
    Reporter& out_;

    void check_id(const std::string& value, std::string subject, SourceLocation loc) {
        if (!value.empty() && !is_xml_name(value)) {
            out_.error(codes::ID_SYNTAX,
                       "identifier \"" + value + "\" is not a valid XML name token", loc,
                       std::move(subject));
        }
    }
    void check_positive(double v, std::string subject, SourceLocation loc) {
        if (!(v > 0)) {
            std::string msg =
                "attribute '" + subject.substr(subject.find('@') + 1) + "' must be positive";
            out_.error(codes::NUM, std::move(msg), loc, std::move(subject));
        }
    }
    void check_non_negative(double v, std::string subject, SourceLocation loc) {
        if (!(v >= 0)) {
            std::string msg =
                "attribute '" + subject.substr(subject.find('@') + 1) + "' must be non-negative";
            out_.error(codes::NUM, std::move(msg), loc, std::move(subject));
        }
    }

    void report_duplicate_ids(const Document& doc) {
        std::map<std::string, SourceLocation> seen;
        auto record = [&](const std::string& value, SourceLocation loc) {
            if (value.empty()) return;
            auto [it, inserted] = seen.emplace(value, loc);
            if (!inserted) {
                out_.error(codes::ID_DUP, "identifier \"" + value + "\" declared more than once",
                           loc, value);
            }
        };
        for (const auto& item : doc.media_index) record(item.label, item.loc);
        for (const auto& mc : doc.maincords) {
            if (mc.index) record(*mc.index, mc.loc);
        }
        for (const auto& visit : iterate_cords(doc)) {
            record(visit.cord->index, visit.cord->loc);
        }
    }
};

// ---------------------------------------------------------------------
// Semantic (prose) rules over the typed model.

class SemanticValidator {
public:
    explicit SemanticValidator(Reporter& out) : out_(out) {}

    void run(const Document& doc) {
        // An empty media index is already a structural finding; chasing
        // every reference into it would only cascade.
        labels_unusable_ = doc.meta.media_index_incomplete || doc.media_index.empty();
        check_media_index(doc);
        build_cord_order(doc);

        std::size_t ordinal = 0;
        for (const auto& mc : doc.maincords) {
            ++ordinal;
            if (mc.material && !labels_unusable_ && !label_declared(doc, *mc.material)) {
                out_.error(codes::BADREF,
                           "maincord material \"" + *mc.material +
                               "\" is not declared in the media index",
                           mc.loc, *mc.material);
            }
            for (const auto& cord : mc.cords) check_cord(doc, cord, mc.lenght);
        }
        check_empty_media(doc);
    }

private:
    Reporter& out_;
    bool labels_unusable_ = false;
    std::map<std::string, std::size_t> cord_order_;

    static bool label_declared(const Document& doc, const std::string& label) {
        return std::any_of(doc.media_index.begin(), doc.media_index.end(),
                           [&](const MaterialItem& m) { return m.label == label; });
    }

    void build_cord_order(const Document& doc) {
        std::size_t n = 0;
        for (const auto& visit : iterate_cords(doc)) {
            cord_order_.emplace(visit.cord->index, n++);
        }
    }

    void check_media_index(const Document& doc) {
        for (std::size_t i = 0; i < doc.media_index.size(); ++i) {
            const MaterialItem& item = doc.media_index[i];
            for (const auto& mix : item.mixes) {
                if (mix == item.label) {
                    out_.error(codes::MIX_ORDER,
                               "material \"" + item.label + "\" mixes itself", item.loc, mix);
                    continue;
                }
                bool earlier = false;
                bool anywhere = false;
                for (std::size_t j = 0; j < doc.media_index.size(); ++j) {
                    if (doc.media_index[j].label == mix) {
                        anywhere = true;
                        earlier = j < i;
                        break;
                    }
                }
                if (anywhere && !earlier) {
                    out_.error(codes::MIX_ORDER,
                               "mix \"" + mix + "\" must reference a material declared earlier "
                               "in the media index",
                               item.loc, mix);
                } else if (!anywhere && !labels_unusable_) {
                    out_.error(codes::BADREF,
                               "mix \"" + mix + "\" is not declared in the media index", item.loc,
                               mix);
                }
            }
        }
    }

    // Walks cords iteratively, carrying the parent's lenght.
    void check_cord(const Document& doc, const Cord& root, double parent_lenght) {
        struct Item {
            const Cord* cord;
            double parent_lenght;
        };
        std::vector<Item> stack{{&root, parent_lenght}};
        while (!stack.empty()) {
            const auto [cord, plen] = stack.back();
            stack.pop_back();
            check_one(doc, *cord, plen);
            for (auto it = cord->children.rbegin(); it != cord->children.rend(); ++it) {
                stack.push_back({&*it, cord->lenght});
            }
        }
    }

    void check_one(const Document& doc, const Cord& cord, double parent_lenght) {
        const std::string& ix = cord.index;

        if (cord.type == CordType::Loop && !cord.loop_pos) {
            out_.error(codes::LOOPPOS, "loop cord \"" + ix + "\" has no loop_pos", cord.loc, ix);
        }
        if (cord.type != CordType::Top && !cord.attach_pendants.empty()) {
            out_.error(codes::TOP_ONLY,
                       "cord \"" + ix + "\" is not a top cord but lists attached pendants",
                       cord.loc, ix);
        }
        if (!doc.meta.cords_incomplete) {
            for (const auto& ref : cord.attach_pendants) {
                const auto it = cord_order_.find(ref.pendant);
                if (it == cord_order_.end()) {
                    out_.error(codes::BADREF,
                               "attached pendant \"" + ref.pendant + "\" does not name a cord",
                               ref.loc, ref.pendant);
                } else if (it->second > cord_order_.at(ix)) {
                    out_.warning(codes::ATTACH_FWD,
                                 "attached pendant \"" + ref.pendant +
                                     "\" is declared later in the document",
                                 ref.loc, ref.pendant);
                }
            }
        }
        if (!labels_unusable_) {
            for (const auto& seg : cord.media) {
                if (!label_declared(doc, seg.material)) {
                    out_.error(codes::BADREF,
                               "material \"" + seg.material +
                                   "\" is not declared in the media index",
                               seg.loc, seg.material);
                }
            }
        }

        // Position bounds. Boundary equality is valid.
        if (cord.pos > parent_lenght) {
            out_.warning(codes::POS_RANGE,
                         "cord \"" + ix + "\" attaches at " + std::to_string(cord.pos) +
                             " beyond its parent's lenght",
                         cord.loc, ix);
        }
        if (cord.loop_pos && *cord.loop_pos > parent_lenght) {
            out_.warning(codes::POS_RANGE,
                         "cord \"" + ix + "\" reattaches beyond its parent's lenght", cord.loc,
                         ix);
        }
        for (const auto& knot : cord.knots) {
            if (knot.pos > cord.lenght) {
                out_.warning(codes::POS_RANGE,
                             "knot at " + std::to_string(knot.pos) + " lies beyond cord \"" + ix +
                                 "\" (lenght " + std::to_string(cord.lenght) + ")",
                             knot.loc, ix);
            }
        }

        for (std::size_t i = 1; i < cord.media.size(); ++i) {
            if (cord.media[i].pos <= cord.media[i - 1].pos) {
                out_.warning(codes::SEG_ORDER,
                             "material segments of cord \"" + ix +
                                 "\" are not in strictly increasing position order",
                             cord.media[i].loc, ix);
                break;
            }
        }
        if (!cord.media.empty() && cord.media.back().pos != cord.lenght) {
            out_.warning(codes::SEG_LEN,
                         "last material segment of cord \"" + ix + "\" ends at " +
                             format_pos(cord.media.back().pos) + " but the cord's lenght is " +
                             format_pos(cord.lenght),
                         cord.media.back().loc, ix);
        }

        if (cord.transcription && !is_digits(trim(*cord.transcription))) {
            out_.warning(codes::TRANSCRIPT_NONNUM,
                         "transcription of cord \"" + ix + "\" is not an integer", cord.loc, ix);
        }
    }

    // W-EMPTY-MEDIA comes from the raw tree when there is one, so that a
    // missing <media> (a structural finding) is not double-reported.
    void check_empty_media(const Document& doc) {
        if (doc.source) {
            std::vector<const xml::Element*> stack{doc.source.get()};
            while (!stack.empty()) {
                const xml::Element* e = stack.back();
                stack.pop_back();
                if (e->name == "cord") {
                    const xml::Element* media = e->first_child("media");
                    if (media && !media->first_child("material")) {
                        const auto* ix = e->find_attribute("index");
                        out_.warning(codes::EMPTY_MEDIA,
                                     "cord has a media section with no materials", media->loc,
                                     ix ? std::string(trim(ix->value)) : std::string());
                    }
                }
                for (auto it = e->children.rbegin(); it != e->children.rend(); ++it) {
                    stack.push_back(it->get());
                }
            }
            return;
        }
        for (const auto& visit : iterate_cords(doc)) {
            if (visit.cord->media.empty()) {
                out_.warning(codes::EMPTY_MEDIA, "cord has a media section with no materials",
                             visit.cord->loc, visit.cord->index);
            }
        }
    }

    static std::string format_pos(double v) {
        std::string s = std::to_string(v);
        const auto dot = s.find('.');
        if (dot != std::string::npos) {
            auto end = s.find_last_not_of('0');
            if (end == dot) --end;
            s.erase(end + 1);
        }
        return s;
    }
};

void sort_report(ValidationReport& report) {
    std::stable_sort(report.diagnostics.begin(), report.diagnostics.end(),
                     [](const Diagnostic& a, const Diagnostic& b) {
                         return std::tie(a.location.byte_offset, a.location.line, a.code,
                                         a.subject, a.message) <
                                std::tie(b.location.byte_offset, b.location.line, b.code,
                                         b.subject, b.message);
                     });
}

bool upgradeable(const std::string& code) {
    return code == codes::PROLOG || code == codes::SEG_LEN || code == codes::POS_RANGE ||
           code == codes::ATTACH_FWD;
}

void apply_strictness(ValidationReport& report, Strictness strictness) {
    if (strictness != Strictness::Strict) return;
    for (auto& d : report.diagnostics) {
        if (d.severity == Severity::Warning && upgradeable(d.code)) {
            d.severity = Severity::Error;
        }
    }
}

}  // namespace

ValidationReport validate_structure(const Document& doc) {
    ValidationReport report;
    Reporter out(report);
    if (!doc.meta.had_xml_decl || !doc.meta.had_doctype) {
        std::string missing;
        if (!doc.meta.had_xml_decl) missing = "XML declaration";
        if (!doc.meta.had_doctype) {
            if (!missing.empty()) missing += " and ";
            missing += "DOCTYPE";
        }
        out.warning(codes::PROLOG, "document prolog is missing its " + missing,
                    SourceLocation{1, 1, 0});
    }
    if (doc.source) {
        RawValidator(out).run(*doc.source);
    } else {
        ModelValidator(out).run(doc);
    }
    sort_report(report);
    return report;
}

ValidationReport validate_semantics(const Document& doc) {
    ValidationReport report;
    Reporter out(report);
    SemanticValidator(out).run(doc);
    sort_report(report);
    return report;
}

ValidationReport validate(const Document& doc, Strictness strictness) {
    ValidationReport report = validate_structure(doc);
    ValidationReport semantic = validate_semantics(doc);
    for (auto& d : semantic.diagnostics) report.diagnostics.push_back(std::move(d));
    apply_strictness(report, strictness);
    sort_report(report);
    report.recount();
    return report;
}

ValidationReport combined_report(const ParseResult& parsed, Strictness strictness) {
    ValidationReport report;
    if (parsed.document) {
        report = validate(*parsed.document, strictness);
    }
    std::set<std::tuple<std::string, std::size_t, std::string>> keys;
    for (const auto& d : report.diagnostics) {
        keys.emplace(d.code, d.location.byte_offset, d.subject);
    }
    for (const auto& d : parsed.diagnostics) {
        if (keys.count({d.code, d.location.byte_offset, d.subject}) != 0) continue;
        report.diagnostics.push_back(d);
    }
    apply_strictness(report, strictness);
    sort_report(report);
    report.recount();
    return report;
}

}  // namespace qdf
