#include "qdf/codec.hpp"

#include <charconv>
#include <cmath>
#include <set>

#include "qdf/xml.hpp"

namespace qdf {

namespace {

class InvariantChecker {
public:
    void run(const Document& doc) {
        if (doc.media_index.empty()) fail("media_index has no material items");
        if (doc.header.codenames.empty()) fail("catalog header has no codenames");
        for (const auto& item : doc.media_index) {
            identifier(item.label, "material label");
        }
        std::size_t ordinal = 0;
        for (const auto& mc : doc.maincords) {
            ++ordinal;
            const std::string where = "maincord " + maincord_key(mc, ordinal);
            if (mc.index) identifier(*mc.index, "maincord index");
            positive(mc.lenght, where + " lenght");
            if (mc.width) positive(*mc.width, where + " width");
            if (mc.cords.empty()) fail(where + " has no cords");
        }
        for (const auto& visit : iterate_cords(doc)) {
            const Cord& c = *visit.cord;
            identifier(c.index, "cord index");
            const std::string where = "cord " + c.index;
            positive(c.lenght, where + " lenght");
            if (c.width) positive(*c.width, where + " width");
            non_negative(c.pos, where + " pos");
            if (c.loop_pos) non_negative(*c.loop_pos, where + " loop_pos");
            for (const auto& seg : c.media) positive(seg.pos, where + " material pos");
            for (const auto& k : c.knots) non_negative(k.pos, where + " knot pos");
        }
        unique_ids(doc);
    }

private:
    [[noreturn]] static void fail(const std::string& what) {
        throw QdfError(codes::MODEL_INVARIANT, "cannot serialize: " + what);
    }
    static void identifier(const std::string& value, const std::string& what) {
        if (value.empty()) fail(what + " is empty");
        if (!is_xml_name(value)) fail(what + " \"" + value + "\" is not a valid XML name");
    }
    static void positive(double v, const std::string& what) {
        if (!std::isfinite(v) || v <= 0) fail(what + " must be positive");
    }
    static void non_negative(double v, const std::string& what) {
        if (!std::isfinite(v) || v < 0) fail(what + " must be non-negative");
    }
    static void unique_ids(const Document& doc) {
        // index and label identifiers share one namespace (both are IDs)
        std::set<std::string> seen;
        auto record = [&](const std::string& id) {
            if (!seen.insert(id).second) fail("duplicate identifier \"" + id + "\"");
        };
        for (const auto& item : doc.media_index) record(item.label);
        std::size_t ordinal = 0;
        for (const auto& mc : doc.maincords) {
            ++ordinal;
            if (mc.index) record(*mc.index);
        }
        for (const auto& visit : iterate_cords(doc)) record(visit.cord->index);
    }
};

class Writer {
public:
    std::string run(const Document& doc) {
        out_ = "<?xml version=\"1.0\"?>\n<!DOCTYPE quipu SYSTEM \"qdf.dtd\">\n";
        open("quipu");
        about(doc.header);
        media_index(doc);
        line("<metric_unit type=\"" + std::string(to_token(doc.metric_unit)) + "\"/>");
        for (const auto& mc : doc.maincords) maincord(mc);
        close("quipu");
        return std::move(out_);
    }

private:
    std::string out_;
    int indent_ = 0;

    void line(const std::string& s) {
        out_.append(static_cast<std::size_t>(indent_) * 4, ' ');
        out_ += s;
        out_ += '\n';
    }
    void open(const std::string& tag) {
        line("<" + tag + ">");
        ++indent_;
    }
    void open(const std::string& name, const std::string& attrs) {
        line("<" + name + attrs + ">");
        ++indent_;
    }
    void close(const std::string& tag) {
        --indent_;
        line("</" + tag + ">");
    }
    // <name>text</name>, self-closing when the text is empty
    void pcdata(const std::string& name, const std::string& text) {
        if (text.empty()) {
            line("<" + name + "/>");
        } else {
            line("<" + name + ">" + xml::escape_text(text) + "</" + name + ">");
        }
    }

    static std::string attr(std::string_view name, std::string_view value) {
        return " " + std::string(name) + "=\"" + xml::escape_attribute(value) + "\"";
    }
    static std::string attr(std::string_view name, double value) {
        return attr(name, format_number(value));
    }

    void about(const CatalogHeader& h) {
        open("about");
        pcdata("source", h.source);
        if (h.dating) pcdata("dating", *h.dating);
        for (const auto& c : h.codenames) pcdata("codename", c);
        if (h.author) {
            open("author");
            pcdata("name", h.author->name);
            if (h.author->institution) pcdata("institution", *h.author->institution);
            if (h.author->year) pcdata("year", *h.author->year);
            if (h.author->email) pcdata("email", *h.author->email);
            if (h.author->address) pcdata("address", *h.author->address);
            close("author");
        }
        if (h.comment) pcdata("comment", *h.comment);
        close("about");
    }

    void media_index(const Document& doc) {
        open("media_index");
        for (const auto& item : doc.media_index) {
            open("material_item", attr("label", item.label));
            pcdata("description", item.description);
            if (item.color_rgb) line("<color_rgb" + attr("value", item.color_rgb->value) + "/>");
            if (item.color_iccnbs) line("<color_iccnbs" + attr("value", *item.color_iccnbs) + "/>");
            for (const auto& mix : item.mixes) line("<mix" + attr("id", mix) + "/>");
            close("material_item");
        }
        close("media_index");
    }

    // Attribute order follows the DTD's ATTLIST declarations.
    void maincord(const MainCord& mc) {
        std::string attrs;
        if (mc.dir != Direction::U) attrs += attr("dir", to_token(mc.dir));
        attrs += attr("lenght", mc.lenght);
        if (mc.width) attrs += attr("width", *mc.width);
        if (mc.index) attrs += attr("index", *mc.index);
        if (mc.material) attrs += attr("material", *mc.material);
        if (mc.finish) attrs += attr("finish", to_token(*mc.finish));
        open("maincord", attrs);
        for (const auto& c : mc.cords) cord(c);
        close("maincord");
    }

    void cord(const Cord& c) {
        std::string attrs = attr("index", c.index) + attr("lenght", c.lenght);
        if (c.width) attrs += attr("width", *c.width);
        attrs += attr("pos", c.pos);
        if (c.dir != Direction::U) attrs += attr("dir", to_token(c.dir));
        if (c.attach != Attach::U) attrs += attr("attach", to_token(c.attach));
        if (c.attach_through) attrs += attr("attach_through", "yes");
        attrs += attr("type", to_token(c.type));
        if (c.loop_pos) attrs += attr("loop_pos", *c.loop_pos);
        if (c.finish) attrs += attr("finish", to_token(*c.finish));
        open("cord", attrs);

        if (!c.attach_pendants.empty()) {
            open("attach_pendants");
            for (const auto& ref : c.attach_pendants) {
                line("<attaches" + attr("pendant", ref.pendant) + "/>");
            }
            close("attach_pendants");
        }
        if (c.media.empty()) {
            line("<media/>");
        } else {
            open("media");
            for (const auto& seg : c.media) {
                line("<material" + attr("id", seg.material) + attr("pos", seg.pos) + "/>");
            }
            close("media");
        }
        if (!c.knots.empty()) {
            open("knots");
            for (const auto& k : c.knots) {
                std::string a;
                if (k.dir != Direction::U) a += attr("dir", to_token(k.dir));
                a += attr("pos", k.pos);
                const std::string name(to_token(k.kind));
                if (k.raw_value.empty()) {
                    line("<" + name + a + "/>");
                } else {
                    line("<" + name + a + ">" + xml::escape_text(k.raw_value) + "</" + name + ">");
                }
            }
            close("knots");
        }
        for (const auto& sub : c.children) cord(sub);
        if (c.transcription) pcdata("transcription", *c.transcription);
        close("cord");
    }
};

}  // namespace

std::string format_number(double value) {
    if (value == 0) return "0";  // avoid "-0"
    if (std::isfinite(value) && value == std::floor(value) && std::abs(value) < 1e15) {
        char buf[32];
        const auto res =
            std::to_chars(buf, buf + sizeof(buf), static_cast<long long>(value));
        return std::string(buf, res.ptr);
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed);
    return std::string(buf, res.ptr);
}

std::string serialize(const Document& doc) {
    InvariantChecker().run(doc);
    return Writer().run(doc);
}

CanonicalizeResult canonicalize(std::string_view bytes, const ParseOptions& options) {
    CanonicalizeResult result;
    ParseResult parsed = parse(bytes, options);
    if (!parsed.document) {
        result.diagnostics = std::move(parsed.diagnostics);
        return result;
    }
    try {
        result.text = serialize(*parsed.document);
    } catch (const QdfError& e) {
        result.diagnostics.push_back(
            Diagnostic{e.code(), Severity::Error, e.what(), SourceLocation{}, {}, {}});
    }
    return result;
}

}  // namespace qdf
