#include "qdf/model.hpp"

#include <algorithm>

namespace qdf {

std::string to_string(Severity s) {
    switch (s) {
        case Severity::Error: return "error";
        case Severity::Warning: return "warning";
        case Severity::Info: return "info";
    }
    return "error";
}

void ValidationReport::add(Diagnostic d) {
    switch (d.severity) {
        case Severity::Error: ++error_count; break;
        case Severity::Warning: ++warning_count; break;
        case Severity::Info: ++info_count; break;
    }
    diagnostics.push_back(std::move(d));
}

void ValidationReport::recount() {
    error_count = warning_count = info_count = 0;
    for (const auto& d : diagnostics) {
        switch (d.severity) {
            case Severity::Error: ++error_count; break;
            case Severity::Warning: ++warning_count; break;
            case Severity::Info: ++info_count; break;
        }
    }
}

std::string format_diagnostic(const Diagnostic& d) {
    std::string out;
    if (!d.file.empty()) out += d.file + ":";
    if (d.location.known()) {
        out += std::to_string(d.location.line) + ":" + std::to_string(d.location.column) + ":";
    }
    if (!out.empty()) out += " ";
    out += to_string(d.severity) + " " + d.code + ": " + d.message;
    if (!d.subject.empty()) out += " [" + d.subject + "]";
    return out;
}

std::string_view to_token(Direction v) {
    switch (v) {
        case Direction::S: return "S";
        case Direction::Z: return "Z";
        case Direction::U: return "U";
    }
    return "U";
}

std::string_view to_token(Attach v) {
    switch (v) {
        case Attach::Verso: return "verso";
        case Attach::Recto: return "recto";
        case Attach::U: return "U";
    }
    return "U";
}

std::string_view to_token(CordType v) {
    switch (v) {
        case CordType::Pendant: return "pendant";
        case CordType::Top: return "top";
        case CordType::Subsidiary: return "subsidiary";
        case CordType::Loop: return "loop";
    }
    return "pendant";
}

std::string_view to_token(Finish v) {
    switch (v) {
        case Finish::Knotted: return "knotted";
        case Finish::Broken: return "broken";
        case Finish::None: return "none";
    }
    return "none";
}

std::string_view to_token(KnotKind v) {
    switch (v) {
        case KnotKind::Single: return "single";
        case KnotKind::Multiple: return "multiple";
        case KnotKind::Eight: return "eight";
    }
    return "single";
}

std::string_view to_token(MetricUnit v) {
    switch (v) {
        case MetricUnit::Mm: return "mm";
        case MetricUnit::Cm: return "cm";
        case MetricUnit::In: return "in";
    }
    return "mm";
}

std::optional<Direction> direction_from_token(std::string_view t) {
    if (t == "S") return Direction::S;
    if (t == "Z") return Direction::Z;
    if (t == "U") return Direction::U;
    return std::nullopt;
}

std::optional<Attach> attach_from_token(std::string_view t) {
    if (t == "verso") return Attach::Verso;
    if (t == "recto") return Attach::Recto;
    if (t == "U") return Attach::U;
    return std::nullopt;
}

std::optional<CordType> cord_type_from_token(std::string_view t) {
    if (t == "pendant") return CordType::Pendant;
    if (t == "top") return CordType::Top;
    if (t == "subsidiary") return CordType::Subsidiary;
    if (t == "loop") return CordType::Loop;
    return std::nullopt;
}

std::optional<Finish> finish_from_token(std::string_view t) {
    if (t == "knotted") return Finish::Knotted;
    if (t == "broken") return Finish::Broken;
    if (t == "none") return Finish::None;
    return std::nullopt;
}

std::optional<MetricUnit> metric_unit_from_token(std::string_view t) {
    if (t == "mm") return MetricUnit::Mm;
    if (t == "cm") return MetricUnit::Cm;
    if (t == "in") return MetricUnit::In;
    return std::nullopt;
}

bool RgbColor::valid() const {
    if (value.size() != 7 || value[0] != '#') return false;
    return std::all_of(value.begin() + 1, value.end(), [](unsigned char c) {
        return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
    });
}

// Equality is over document content; source locations are bookkeeping.

bool MaterialItem::operator==(const MaterialItem& o) const {
    return label == o.label && description == o.description && color_rgb == o.color_rgb &&
           color_iccnbs == o.color_iccnbs && mixes == o.mixes;
}

bool MaterialSegment::operator==(const MaterialSegment& o) const {
    return material == o.material && pos == o.pos;
}

bool AttachRef::operator==(const AttachRef& o) const { return pendant == o.pendant; }

bool Knot::operator==(const Knot& o) const {
    return kind == o.kind && dir == o.dir && pos == o.pos && raw_value == o.raw_value;
}

Knot make_knot(KnotKind kind, double pos, std::uint64_t value, Direction dir) {
    Knot k;
    k.kind = kind;
    k.pos = pos;
    k.dir = dir;
    k.value = value;
    k.raw_value = std::to_string(value);
    return k;
}

bool Cord::operator==(const Cord& o) const {
    return index == o.index && lenght == o.lenght && width == o.width && pos == o.pos &&
           dir == o.dir && attach == o.attach && attach_through == o.attach_through &&
           type == o.type && loop_pos == o.loop_pos && finish == o.finish &&
           attach_pendants == o.attach_pendants && media == o.media && knots == o.knots &&
           children == o.children && transcription == o.transcription;
}

bool MainCord::operator==(const MainCord& o) const {
    return index == o.index && lenght == o.lenght && width == o.width && dir == o.dir &&
           material == o.material && finish == o.finish && cords == o.cords;
}

bool Document::operator==(const Document& o) const {
    return header == o.header && media_index == o.media_index && metric_unit == o.metric_unit &&
           maincords == o.maincords;
}

std::string maincord_key(const MainCord& mc, std::size_t ordinal) {
    if (mc.index && !mc.index->empty()) return *mc.index;
    return "maincord-" + std::to_string(ordinal);
}

namespace {

// Explicit stack instead of recursion: nesting depth is input-controlled.
struct Frame {
    const Cord* cord;
    int depth;
    const std::string* parent;
};

}  // namespace

std::vector<CordVisit> iterate_cords(const Document& doc) {
    std::vector<CordVisit> out;
    std::size_t ordinal = 0;
    for (const auto& mc : doc.maincords) {
        ++ordinal;
        const std::string key = maincord_key(mc, ordinal);
        // Stack of (cord, depth, parent index). Children are pushed in
        // reverse so siblings pop in document order.
        std::vector<std::pair<const Cord*, int>> stack;
        std::vector<std::string> parents;  // parallel to stack
        for (auto it = mc.cords.rbegin(); it != mc.cords.rend(); ++it) {
            stack.emplace_back(&*it, 1);
            parents.push_back(key);
        }
        while (!stack.empty()) {
            auto [cord, depth] = stack.back();
            std::string parent = std::move(parents.back());
            stack.pop_back();
            parents.pop_back();
            out.push_back(CordVisit{cord, depth, parent});
            for (auto it = cord->children.rbegin(); it != cord->children.rend(); ++it) {
                stack.emplace_back(&*it, depth + 1);
                parents.push_back(cord->index);
            }
        }
    }
    return out;
}

const Cord* find_cord(const Document& doc, std::string_view index) {
    for (const auto& visit : iterate_cords(doc)) {
        if (visit.cord->index == index) return visit.cord;
    }
    return nullptr;
}

bool is_xml_name(std::string_view s) {
    if (s.empty()) return false;
    auto start_ok = [](unsigned char c) {
        return c == ':' || c == '_' || (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
               c >= 0x80;  // multibyte UTF-8 accepted wholesale
    };
    auto part_ok = [&](unsigned char c) {
        return start_ok(c) || c == '-' || c == '.' || (c >= '0' && c <= '9');
    };
    if (!start_ok(static_cast<unsigned char>(s[0]))) return false;
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (!part_ok(static_cast<unsigned char>(s[i]))) return false;
    }
    return true;
}

}  // namespace qdf
