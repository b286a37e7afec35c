#include "qdf/xml.hpp"

#include <cstdint>

namespace qdf::xml {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

bool is_name_start(unsigned char c) {
    return c == ':' || c == '_' || (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c >= 0x80;
}

bool is_name_char(unsigned char c) {
    return is_name_start(c) || c == '-' || c == '.' || (c >= '0' && c <= '9');
}

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

bool valid_xml_codepoint(std::uint32_t cp) {
    if (cp == 0x9 || cp == 0xA || cp == 0xD) return true;
    if (cp >= 0x20 && cp <= 0xD7FF) return true;
    if (cp >= 0xE000 && cp <= 0xFFFD) return true;
    return cp >= 0x10000 && cp <= 0x10FFFF;
}

struct Cursor {
    std::string_view in;
    std::size_t pos = 0;
    std::size_t line = 1;
    std::size_t col = 1;

    bool eof() const { return pos >= in.size(); }
    char peek(std::size_t ahead = 0) const {
        return pos + ahead < in.size() ? in[pos + ahead] : '\0';
    }
    bool starts_with(std::string_view s) const { return in.substr(pos, s.size()) == s; }

    SourceLocation here() const { return SourceLocation{line, col, pos}; }

    void advance() {
        if (eof()) return;
        if (in[pos] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        ++pos;
    }
    void advance(std::size_t n) {
        while (n--) advance();
    }
    void skip_ws() {
        while (!eof() && is_space(in[pos])) advance();
    }
};

class Reader {
public:
    Reader(std::string_view input, const ReadOptions& options)
        : cur_{input}, options_(options) {}

    ReadResult run() {
        if (!check_encoding()) return std::move(result_);
        skip_bom();
        prolog();
        if (fatal_) return std::move(result_);
        if (cur_.eof()) {
            fail(codes::XML_SYNTAX, "no root element", cur_.here());
            return std::move(result_);
        }
        result_.root = element_tree();
        if (fatal_) {
            result_.root.reset();
            return std::move(result_);
        }
        trailing_misc();
        if (fatal_) result_.root.reset();
        return std::move(result_);
    }

private:
    Cursor cur_;
    ReadOptions options_;
    ReadResult result_;
    bool fatal_ = false;

    void diag(const char* code, Severity sev, std::string msg, SourceLocation loc,
              std::string subject = {}) {
        result_.diagnostics.push_back(
            Diagnostic{code, sev, std::move(msg), loc, std::move(subject), {}});
    }

    void fail(const char* code, std::string msg, SourceLocation loc) {
        diag(code, Severity::Error, std::move(msg), loc);
        fatal_ = true;
    }

    // Whole-input scan: UTF-8 well-formedness plus the XML character
    // range (control bytes other than tab/newline/return are invalid).
    bool check_encoding() {
        const std::string_view in = cur_.in;
        std::size_t line = 1, col = 1;
        std::size_t i = 0;
        auto reject = [&](const char* code, const std::string& what) {
            fail(code, what, SourceLocation{line, col, i});
            return false;
        };
        while (i < in.size()) {
            const unsigned char c = static_cast<unsigned char>(in[i]);
            std::size_t len = 0;
            std::uint32_t cp = 0;
            if (c < 0x80) {
                len = 1;
                cp = c;
            } else if ((c & 0xE0) == 0xC0) {
                len = 2;
                cp = c & 0x1F;
            } else if ((c & 0xF0) == 0xE0) {
                len = 3;
                cp = c & 0x0F;
            } else if ((c & 0xF8) == 0xF0) {
                len = 4;
                cp = c & 0x07;
            } else {
                return reject(codes::UTF8, "invalid UTF-8 lead byte");
            }
            if (i + len > in.size()) return reject(codes::UTF8, "truncated UTF-8 sequence");
            for (std::size_t k = 1; k < len; ++k) {
                const unsigned char cc = static_cast<unsigned char>(in[i + k]);
                if ((cc & 0xC0) != 0x80) return reject(codes::UTF8, "invalid UTF-8 continuation");
                cp = (cp << 6) | (cc & 0x3F);
            }
            static constexpr std::uint32_t kMin[5] = {0, 0, 0x80, 0x800, 0x10000};
            if (len > 1 && cp < kMin[len]) return reject(codes::UTF8, "overlong UTF-8 sequence");
            if (cp >= 0xD800 && cp <= 0xDFFF) return reject(codes::UTF8, "UTF-8 encoded surrogate");
            if (cp > 0x10FFFF) return reject(codes::UTF8, "code point out of range");
            if (!valid_xml_codepoint(cp) && !(cp == 0xFEFF && i == 0)) {
                return reject(codes::XML_SYNTAX, "character not allowed in XML");
            }
            if (c == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            i += len;
        }
        return true;
    }

    void skip_bom() {
        if (cur_.starts_with("\xEF\xBB\xBF")) cur_.advance(3);
    }

    // <?xml ...?>, comments, PIs, one DOCTYPE, in any sensible order.
    void prolog() {
        cur_.skip_ws();
        if (cur_.starts_with("<?xml") && !is_name_char(cur_.peek(5))) {
            result_.had_xml_decl = true;
            skip_pi();
            if (fatal_) return;
        }
        while (!fatal_) {
            cur_.skip_ws();
            if (cur_.starts_with("<!--")) {
                skip_comment();
            } else if (cur_.starts_with("<?")) {
                skip_pi();
            } else if (cur_.starts_with("<!DOCTYPE")) {
                if (result_.had_doctype) {
                    fail(codes::XML_SYNTAX, "multiple DOCTYPE declarations", cur_.here());
                    return;
                }
                doctype();
            } else {
                return;
            }
        }
    }

    void skip_comment() {
        const SourceLocation start = cur_.here();
        cur_.advance(4);  // <!--
        while (!cur_.eof()) {
            if (cur_.starts_with("-->")) {
                cur_.advance(3);
                return;
            }
            cur_.advance();
        }
        fail(codes::XML_SYNTAX, "unterminated comment", start);
    }

    void skip_pi() {
        const SourceLocation start = cur_.here();
        cur_.advance(2);  // <?
        while (!cur_.eof()) {
            if (cur_.starts_with("?>")) {
                cur_.advance(2);
                return;
            }
            cur_.advance();
        }
        fail(codes::XML_SYNTAX, "unterminated processing instruction", start);
    }

    void doctype() {
        const SourceLocation start = cur_.here();
        cur_.advance(9);  // <!DOCTYPE
        cur_.skip_ws();
        std::string name = read_name();
        if (name.empty()) {
            fail(codes::XML_SYNTAX, "DOCTYPE requires a document type name", start);
            return;
        }
        result_.had_doctype = true;
        result_.doctype_name = name;
        // Skip external id literals and any internal subset; the DTD is
        // built in, never fetched.
        int bracket = 0;
        while (!cur_.eof()) {
            const char c = cur_.peek();
            if (c == '"' || c == '\'') {
                skip_literal(c);
                if (fatal_) return;
                continue;
            }
            if (c == '[') ++bracket;
            if (c == ']') --bracket;
            if (c == '>' && bracket <= 0) {
                cur_.advance();
                return;
            }
            cur_.advance();
        }
        fail(codes::XML_SYNTAX, "unterminated DOCTYPE declaration", start);
    }

    void skip_literal(char quote) {
        const SourceLocation start = cur_.here();
        cur_.advance();
        while (!cur_.eof()) {
            if (cur_.peek() == quote) {
                cur_.advance();
                return;
            }
            cur_.advance();
        }
        fail(codes::XML_SYNTAX, "unterminated literal", start);
    }

    std::string read_name() {
        if (cur_.eof() || !is_name_start(static_cast<unsigned char>(cur_.peek()))) return {};
        std::string name;
        while (!cur_.eof() && is_name_char(static_cast<unsigned char>(cur_.peek()))) {
            name.push_back(cur_.peek());
            cur_.advance();
        }
        return name;
    }

    // Decodes one reference starting at '&'. Appends to `out`; returns
    // false on a fatal syntax problem.
    bool reference(std::string& out) {
        const SourceLocation start = cur_.here();
        cur_.advance();  // &
        if (cur_.peek() == '#') {
            cur_.advance();
            std::uint32_t cp = 0;
            bool hex = false;
            if (cur_.peek() == 'x' || cur_.peek() == 'X') {
                hex = true;
                cur_.advance();
            }
            std::size_t digits = 0;
            while (!cur_.eof() && cur_.peek() != ';') {
                const char c = cur_.peek();
                std::uint32_t v;
                if (c >= '0' && c <= '9') {
                    v = static_cast<std::uint32_t>(c - '0');
                } else if (hex && c >= 'a' && c <= 'f') {
                    v = static_cast<std::uint32_t>(c - 'a' + 10);
                } else if (hex && c >= 'A' && c <= 'F') {
                    v = static_cast<std::uint32_t>(c - 'A' + 10);
                } else {
                    fail(codes::XML_SYNTAX, "malformed character reference", start);
                    return false;
                }
                cp = cp * (hex ? 16 : 10) + v;
                if (cp > 0x10FFFF) {
                    fail(codes::XML_SYNTAX, "character reference out of range", start);
                    return false;
                }
                ++digits;
                cur_.advance();
            }
            if (cur_.eof() || digits == 0 || !valid_xml_codepoint(cp)) {
                fail(codes::XML_SYNTAX, "malformed character reference", start);
                return false;
            }
            cur_.advance();  // ;
            append_utf8(out, cp);
            return true;
        }
        std::string name = read_name();
        if (name.empty() || cur_.peek() != ';') {
            fail(codes::XML_SYNTAX, "malformed entity reference", start);
            return false;
        }
        cur_.advance();  // ;
        if (name == "amp") {
            out.push_back('&');
        } else if (name == "lt") {
            out.push_back('<');
        } else if (name == "gt") {
            out.push_back('>');
        } else if (name == "quot") {
            out.push_back('"');
        } else if (name == "apos") {
            out.push_back('\'');
        } else {
            // Only the five predefined entities exist; anything else is
            // rejected (no external or parameter entity resolution).
            diag(codes::XML_ENTITY, Severity::Error,
                 "undeclared entity '&" + name + ";' (external entities are not supported)",
                 start, name);
            out += "&" + name + ";";
        }
        return true;
    }

    // One attribute value, quote-delimited; whitespace is normalized to
    // single spaces per the XML CDATA attribute rules.
    bool attribute_value(std::string& out) {
        const char quote = cur_.peek();
        if (quote != '"' && quote != '\'') {
            fail(codes::XML_SYNTAX, "attribute value must be quoted", cur_.here());
            return false;
        }
        const SourceLocation start = cur_.here();
        cur_.advance();
        while (!cur_.eof()) {
            const char c = cur_.peek();
            if (c == quote) {
                cur_.advance();
                return true;
            }
            if (c == '<') {
                fail(codes::XML_SYNTAX, "'<' not allowed in attribute value", cur_.here());
                return false;
            }
            if (c == '&') {
                if (!reference(out)) return false;
                continue;
            }
            if (c == '\t' || c == '\n' || c == '\r') {
                out.push_back(' ');
                if (c == '\r' && cur_.peek(1) == '\n') cur_.advance();
            } else {
                out.push_back(c);
            }
            cur_.advance();
        }
        fail(codes::XML_SYNTAX, "unterminated attribute value", start);
        return false;
    }

    // Parses the root element and its subtree iteratively.
    std::unique_ptr<Element> element_tree() {
        if (cur_.peek() != '<') {
            fail(codes::XML_SYNTAX, "expected element start", cur_.here());
            return nullptr;
        }
        std::unique_ptr<Element> root;
        std::vector<Element*> stack;

        while (!fatal_) {
            if (cur_.eof()) {
                fail(codes::XML_SYNTAX, "unexpected end of input inside element",
                     stack.empty() ? cur_.here() : stack.back()->loc);
                return nullptr;
            }
            if (cur_.peek() == '<') {
                if (cur_.starts_with("<!--")) {
                    skip_comment();
                    continue;
                }
                if (cur_.starts_with("<![CDATA[")) {
                    if (stack.empty()) {
                        fail(codes::XML_SYNTAX, "CDATA outside of an element", cur_.here());
                        return nullptr;
                    }
                    cdata(*stack.back());
                    continue;
                }
                if (cur_.starts_with("<?")) {
                    skip_pi();
                    continue;
                }
                if (cur_.starts_with("<!")) {
                    fail(codes::XML_SYNTAX, "unexpected markup declaration", cur_.here());
                    return nullptr;
                }
                if (cur_.peek(1) == '/') {
                    const SourceLocation loc = cur_.here();
                    cur_.advance(2);
                    std::string name = read_name();
                    cur_.skip_ws();
                    if (name.empty() || cur_.peek() != '>') {
                        fail(codes::XML_SYNTAX, "malformed closing tag", loc);
                        return nullptr;
                    }
                    cur_.advance();
                    if (stack.empty() || stack.back()->name != name) {
                        fail(codes::XML_SYNTAX,
                             "closing tag </" + name + "> does not match open element", loc);
                        return nullptr;
                    }
                    stack.pop_back();
                    if (stack.empty()) return root;
                    continue;
                }
                // Opening tag.
                const SourceLocation loc = cur_.here();
                cur_.advance();
                auto elem = std::make_unique<Element>();
                elem->loc = loc;
                elem->name = read_name();
                if (elem->name.empty()) {
                    fail(codes::XML_SYNTAX, "malformed element name", loc);
                    return nullptr;
                }
                bool self_closed = false;
                if (!open_tag_rest(*elem, self_closed)) return nullptr;

                Element* raw = elem.get();
                if (stack.empty()) {
                    if (root) {
                        fail(codes::XML_SYNTAX, "more than one root element", loc);
                        return nullptr;
                    }
                    root = std::move(elem);
                } else {
                    stack.back()->children.push_back(std::move(elem));
                }
                if (!self_closed) {
                    if (stack.size() + 1 > options_.max_depth) {
                        fail(codes::DEPTH,
                             "element nesting exceeds the configured cap of " +
                                 std::to_string(options_.max_depth),
                             loc);
                        return nullptr;
                    }
                    stack.push_back(raw);
                } else if (stack.empty()) {
                    return root;
                }
                continue;
            }
            // Character data.
            if (stack.empty()) {
                fail(codes::XML_SYNTAX, "text content outside the root element", cur_.here());
                return nullptr;
            }
            text_run(*stack.back());
        }
        return nullptr;
    }

    bool open_tag_rest(Element& elem, bool& self_closed) {
        while (true) {
            const bool had_ws = !cur_.eof() && is_space(cur_.peek());
            cur_.skip_ws();
            if (cur_.eof()) {
                fail(codes::XML_SYNTAX, "unterminated start tag", elem.loc);
                return false;
            }
            if (cur_.peek() == '>') {
                cur_.advance();
                self_closed = false;
                return true;
            }
            if (cur_.starts_with("/>")) {
                cur_.advance(2);
                self_closed = true;
                return true;
            }
            if (!had_ws) {
                fail(codes::XML_SYNTAX, "expected whitespace before attribute", cur_.here());
                return false;
            }
            Attribute attr;
            attr.loc = cur_.here();
            attr.name = read_name();
            if (attr.name.empty()) {
                fail(codes::XML_SYNTAX, "malformed attribute name", attr.loc);
                return false;
            }
            cur_.skip_ws();
            if (cur_.peek() != '=') {
                fail(codes::XML_SYNTAX, "attribute '" + attr.name + "' has no value", attr.loc);
                return false;
            }
            cur_.advance();
            cur_.skip_ws();
            if (!attribute_value(attr.value)) return false;
            for (const auto& existing : elem.attributes) {
                if (existing.name == attr.name) {
                    fail(codes::XML_SYNTAX, "duplicate attribute '" + attr.name + "'", attr.loc);
                    return false;
                }
            }
            elem.attributes.push_back(std::move(attr));
        }
    }

    void text_run(Element& elem) {
        while (!cur_.eof() && cur_.peek() != '<') {
            const char c = cur_.peek();
            if (c == '&') {
                if (!elem.has_nonspace_text) {
                    elem.has_nonspace_text = true;
                    elem.nonspace_text_loc = cur_.here();
                }
                if (!reference(elem.text)) return;
                continue;
            }
            if (cur_.starts_with("]]>")) {
                fail(codes::XML_SYNTAX, "']]>' not allowed in character data", cur_.here());
                return;
            }
            if (!is_space(c) && !elem.has_nonspace_text) {
                elem.has_nonspace_text = true;
                elem.nonspace_text_loc = cur_.here();
            }
            if (c == '\r') {
                elem.text.push_back('\n');
                if (cur_.peek(1) == '\n') cur_.advance();
            } else {
                elem.text.push_back(c);
            }
            cur_.advance();
        }
    }

    void cdata(Element& elem) {
        const SourceLocation start = cur_.here();
        cur_.advance(9);  // <![CDATA[
        while (!cur_.eof()) {
            if (cur_.starts_with("]]>")) {
                cur_.advance(3);
                return;
            }
            if (!elem.has_nonspace_text && !is_space(cur_.peek())) {
                elem.has_nonspace_text = true;
                elem.nonspace_text_loc = cur_.here();
            }
            elem.text.push_back(cur_.peek());
            cur_.advance();
        }
        fail(codes::XML_SYNTAX, "unterminated CDATA section", start);
    }

    void trailing_misc() {
        while (!fatal_) {
            cur_.skip_ws();
            if (cur_.eof()) return;
            if (cur_.starts_with("<!--")) {
                skip_comment();
            } else if (cur_.starts_with("<?")) {
                skip_pi();
            } else {
                fail(codes::XML_SYNTAX, "content after the root element", cur_.here());
                return;
            }
        }
    }
};

}  // namespace

const Attribute* Element::find_attribute(std::string_view name) const {
    for (const auto& a : attributes) {
        if (a.name == name) return &a;
    }
    return nullptr;
}

const Element* Element::first_child(std::string_view name) const {
    for (const auto& c : children) {
        if (c->name == name) return c.get();
    }
    return nullptr;
}

ReadResult read(std::string_view input, const ReadOptions& options) {
    return Reader(input, options).run();
}

std::string escape_text(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '\r': out += "&#13;"; break;  // a raw CR would re-read as LF
            default: out.push_back(c);
        }
    }
    return out;
}

std::string escape_attribute(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            // whitespace other than space would be normalized away on
            // the next read; keep it by reference
            case '\n': out += "&#10;"; break;
            case '\r': out += "&#13;"; break;
            case '\t': out += "&#9;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

}  // namespace qdf::xml
