#include <doctest.h>

#include <algorithm>
#include <regex>

#include "qdf/parser.hpp"
#include "support/builders.hpp"

using namespace qdf;

namespace {

bool has_code(const std::vector<Diagnostic>& diags, const char* code) {
    return std::any_of(diags.begin(), diags.end(),
                       [&](const Diagnostic& d) { return d.code == code; });
}

const Diagnostic* find_code(const std::vector<Diagnostic>& diags, const char* code) {
    for (const auto& d : diags) {
        if (d.code == code) return &d;
    }
    return nullptr;
}

bool no_errors(const std::vector<Diagnostic>& diags) {
    return std::none_of(diags.begin(), diags.end(),
                        [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

}  // namespace

TEST_CASE("reference document parses into the expected model") {
    const std::string bytes = test::read_file(test::fixture_path("example.qdf"));
    const ParseResult result = parse(bytes);

    REQUIRE(result.document.has_value());
    CHECK(no_errors(result.diagnostics));

    const Document& doc = *result.document;
    REQUIRE(doc.maincords.size() == 1);
    CHECK(doc.maincords[0].lenght == 600);
    CHECK(doc.maincords[0].dir == Direction::Z);
    CHECK(doc.maincords[0].material == "YB:LC");
    CHECK(doc.media_index.size() == 3);
    CHECK(doc.metric_unit == MetricUnit::Mm);
    CHECK(iterate_cords(doc).size() == 6);

    // Full structural equality against the hand-built twin.
    CHECK(doc == test::example_document());

    // Prolog was present.
    CHECK(doc.meta.had_xml_decl);
    CHECK(doc.meta.had_doctype);
    CHECK(!has_code(result.diagnostics, codes::PROLOG));
}

TEST_CASE("defaults are injected where the source omits attributes") {
    const std::string bytes = test::read_file(test::fixture_path("example.qdf"));
    const Document doc = *parse(bytes).document;

    const Cord* x2 = find_cord(doc, "X2");
    REQUIRE(x2 != nullptr);
    CHECK(x2->dir == Direction::U);
    CHECK(x2->attach == Attach::U);
    CHECK(x2->attach_through == false);
    CHECK(!x2->finish.has_value());

    const Cord* x1 = find_cord(doc, "X1");
    REQUIRE(x1 != nullptr);
    CHECK(x1->dir == Direction::S);
    CHECK(x1->finish == Finish::Knotted);
    CHECK(x1->attach == Attach::U);
}

TEST_CASE("minimal document with zero maincords is accepted") {
    const std::string bytes =
        "<?xml version=\"1.0\"?>\n"
        "<!DOCTYPE quipu SYSTEM \"qdf.dtd\">\n"
        "<quipu><about><source>here</source><codename>C1</codename></about>"
        "<media_index><material_item label=\"W\"><description>wool</description>"
        "</material_item></media_index><metric_unit type=\"cm\"/></quipu>\n";
    const ParseResult result = parse(bytes);
    REQUIRE(result.document.has_value());
    CHECK(no_errors(result.diagnostics));
    CHECK(result.document->maincords.empty());
    CHECK(result.document->metric_unit == MetricUnit::Cm);
    CHECK(result.document->header.source == "here");
}

TEST_CASE("missing required knot position is reported and the knot dropped") {
    std::string bytes = test::read_file(test::fixture_path("example.qdf"));
    const std::string needle = "<single pos=\"130\">10</single>";
    const auto at = bytes.find(needle);
    REQUIRE(at != std::string::npos);
    bytes.replace(at, needle.size(), "<single>10</single>");

    const ParseResult result = parse(bytes);
    REQUIRE(result.document.has_value());
    const Diagnostic* d = find_code(result.diagnostics, codes::ATTR_REQUIRED);
    REQUIRE(d != nullptr);
    CHECK(d->subject == "single@pos");
    CHECK(d->severity == Severity::Error);
    CHECK(d->location.line > 1);

    const Cord* x1 = find_cord(*result.document, "X1");
    REQUIRE(x1 != nullptr);
    CHECK(x1->knots.size() == 2);
}

TEST_CASE("unparsable numeric attribute skips the element") {
    std::string bytes = test::read_file(test::fixture_path("example.qdf"));
    const std::string needle = "lenght=\"415\"";
    bytes.replace(bytes.find(needle), needle.size(), "lenght=\"4x5\"");

    const ParseResult result = parse(bytes);
    REQUIRE(result.document.has_value());
    const Diagnostic* d = find_code(result.diagnostics, codes::NUM);
    REQUIRE(d != nullptr);
    CHECK(d->subject == "cord@lenght");
    // X1 and its subtree are gone; the rest survives.
    CHECK(find_cord(*result.document, "X1") == nullptr);
    CHECK(find_cord(*result.document, "X1s1") == nullptr);
    CHECK(find_cord(*result.document, "X2") != nullptr);
    CHECK(result.document->meta.cords_incomplete);
}

TEST_CASE("zero or negative lenght is rejected as a number domain error") {
    std::string bytes = test::read_file(test::fixture_path("example.qdf"));
    const std::string needle = "lenght=\"600\"";
    bytes.replace(bytes.find(needle), needle.size(), "lenght=\"0\"");
    const ParseResult result = parse(bytes);
    REQUIRE(result.document.has_value());
    const Diagnostic* d = find_code(result.diagnostics, codes::NUM);
    REQUIRE(d != nullptr);
    CHECK(d->subject == "maincord@lenght");
    CHECK(result.document->maincords.empty());
}

TEST_CASE("the tolerated 'length' spelling maps to lenght with an info note") {
    std::string bytes = test::read_file(test::fixture_path("example.qdf"));
    const std::string needle = "lenght=\"600\"";
    bytes.replace(bytes.find(needle), needle.size(), "length=\"600\"");
    const ParseResult result = parse(bytes);
    REQUIRE(result.document.has_value());
    const Diagnostic* d = find_code(result.diagnostics, codes::SPELLING);
    REQUIRE(d != nullptr);
    CHECK(d->severity == Severity::Info);
    CHECK(result.document->maincords[0].lenght == 600);
    CHECK(no_errors(result.diagnostics));
}

TEST_CASE("fatal inputs yield no document but an explanatory error") {
    SUBCASE("malformed XML") {
        const ParseResult r = parse("<quipu><about></quipu>");
        CHECK(!r.document.has_value());
        CHECK(has_code(r.diagnostics, codes::XML_SYNTAX));
    }
    SUBCASE("wrong root element") {
        const ParseResult r = parse("<khipu></khipu>");
        CHECK(!r.document.has_value());
        CHECK(has_code(r.diagnostics, codes::ROOT));
    }
    SUBCASE("invalid UTF-8") {
        std::string bytes = "<quipu><about><source>a\xC0\x80z</source></about></quipu>";
        const ParseResult r = parse(bytes);
        CHECK(!r.document.has_value());
        CHECK(has_code(r.diagnostics, codes::UTF8));
    }
    SUBCASE("nesting beyond the cap") {
        std::string bytes = "<quipu>";
        for (int i = 0; i < 80; ++i) bytes += "<maincord lenght=\"1\">";
        const ParseResult r = parse(bytes);
        CHECK(!r.document.has_value());
        CHECK(has_code(r.diagnostics, codes::DEPTH));
    }
    SUBCASE("undeclared entity") {
        const ParseResult r =
            parse("<quipu><about><source>&nbsp;</source></about></quipu>");
        CHECK(has_code(r.diagnostics, codes::XML_ENTITY));
    }
    SUBCASE("empty input") {
        const ParseResult r = parse("");
        CHECK(!r.document.has_value());
        CHECK(!no_errors(r.diagnostics));
    }
}

TEST_CASE("well-formedness corners") {
    SUBCASE("duplicate attributes are fatal") {
        const ParseResult r = parse("<quipu><maincord lenght=\"1\" lenght=\"2\"/></quipu>");
        CHECK(!r.document.has_value());
        CHECK(has_code(r.diagnostics, codes::XML_SYNTAX));
    }
    SUBCASE("an encoding declaration is accepted") {
        const ParseResult r =
            parse("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
                  "<!DOCTYPE quipu SYSTEM \"qdf.dtd\">\n<quipu></quipu>");
        REQUIRE(r.document.has_value());
        CHECK(!has_code(r.diagnostics, codes::PROLOG));
    }
    SUBCASE("internal DTD subsets are skipped, their entities stay undefined") {
        const ParseResult r =
            parse("<?xml version=\"1.0\"?>\n"
                  "<!DOCTYPE quipu SYSTEM \"qdf.dtd\" [ <!ENTITY x \"y\"> ]>\n"
                  "<quipu><about><source>&x;</source></about></quipu>");
        REQUIRE(r.document.has_value());
        CHECK(has_code(r.diagnostics, codes::XML_ENTITY));
    }
    SUBCASE("mismatched closing tag is fatal") {
        const ParseResult r = parse("<quipu><about></quipu></about>");
        CHECK(!r.document.has_value());
        CHECK(has_code(r.diagnostics, codes::XML_SYNTAX));
    }
}

TEST_CASE("nesting cap is configurable") {
    std::string bytes = "<quipu>";
    for (int i = 0; i < 20; ++i) bytes += "<maincord lenght=\"1\">";
    ParseOptions options;
    options.max_depth = 10;
    const ParseResult r = parse(bytes, options);
    CHECK(!r.document.has_value());
    CHECK(has_code(r.diagnostics, codes::DEPTH));
}

TEST_CASE("missing prolog pieces warn but do not block") {
    SUBCASE("no DOCTYPE") {
        const ParseResult r = parse("<?xml version=\"1.0\"?><quipu></quipu>");
        REQUIRE(r.document.has_value());
        const Diagnostic* d = find_code(r.diagnostics, codes::PROLOG);
        REQUIRE(d != nullptr);
        CHECK(d->severity == Severity::Warning);
        CHECK(!r.document->meta.had_doctype);
        CHECK(r.document->meta.had_xml_decl);
    }
    SUBCASE("no XML declaration") {
        const ParseResult r = parse("<!DOCTYPE quipu SYSTEM \"qdf.dtd\"><quipu></quipu>");
        REQUIRE(r.document.has_value());
        CHECK(has_code(r.diagnostics, codes::PROLOG));
        CHECK(!r.document->meta.had_xml_decl);
    }
    SUBCASE("bare root") {
        const ParseResult r = parse("<quipu></quipu>");
        REQUIRE(r.document.has_value());
        // one W-PROLOG naming both missing pieces
        CHECK(std::count_if(r.diagnostics.begin(), r.diagnostics.end(), [](const Diagnostic& d) {
                  return d.code == codes::PROLOG;
              }) == 1);
    }
}

TEST_CASE("unknown elements and attributes are reported and skipped") {
    const std::string bytes =
        "<quipu><about><source>x</source><banana/><codename>C</codename></about>"
        "<media_index><material_item label=\"W\" shade=\"dark\">"
        "<description>wool</description></material_item></media_index>"
        "<metric_unit type=\"mm\"/></quipu>";
    const ParseResult r = parse(bytes);
    REQUIRE(r.document.has_value());
    const Diagnostic* elem = find_code(r.diagnostics, codes::UNKNOWN_ELEM);
    REQUIRE(elem != nullptr);
    CHECK(elem->subject == "banana");
    const Diagnostic* attr = find_code(r.diagnostics, codes::UNKNOWN_ATTR);
    REQUIRE(attr != nullptr);
    CHECK(attr->subject == "material_item@shade");
    CHECK(attr->severity == Severity::Warning);
    CHECK(r.document->header.source == "x");
}

TEST_CASE("invalid enum tokens fall back to defaults with a diagnostic") {
    std::string bytes = test::read_file(test::fixture_path("example.qdf"));
    const std::string needle = "dir=\"Z\"";
    bytes.replace(bytes.find(needle), needle.size(), "dir=\"W\"");
    const ParseResult r = parse(bytes);
    REQUIRE(r.document.has_value());
    const Diagnostic* d = find_code(r.diagnostics, codes::ENUM);
    REQUIRE(d != nullptr);
    CHECK(d->subject == "maincord@dir");
    CHECK(r.document->maincords[0].dir == Direction::U);
}

TEST_CASE("entities and CDATA decode into text content") {
    const std::string bytes =
        "<quipu><about><source>a &amp; b &lt;c&gt; &#65;<![CDATA[ <raw> ]]></source>"
        "<codename>C</codename></about><media_index><material_item label=\"W\">"
        "<description>wool</description></material_item></media_index>"
        "<metric_unit type=\"mm\"/></quipu>";
    const ParseResult r = parse(bytes);
    REQUIRE(r.document.has_value());
    CHECK(r.document->header.source == "a & b <c> A <raw>");
}

TEST_CASE("parse is deterministic") {
    const std::string bytes = test::read_file(test::fixture_path("example.qdf"));
    const ParseResult a = parse(bytes);
    const ParseResult b = parse(bytes);
    REQUIRE(a.document.has_value());
    REQUIRE(b.document.has_value());
    CHECK(*a.document == *b.document);
    CHECK(a.diagnostics == b.diagnostics);
}

TEST_CASE("diagnostic locations stay within the input bounds") {
    // Collect diagnostics from a handful of mutations and check their
    // locations against the line structure of each input.
    std::vector<std::string> inputs;
    const std::string base = test::read_file(test::fixture_path("example.qdf"));
    inputs.push_back(base);
    for (const char* edit : {"<single>10</single>", "<banana/>", "dir=\"W\""}) {
        std::string mutated = base;
        const std::string needle = edit[1] == 's' ? "<single pos=\"130\">10</single>"
                                   : edit[1] == 'b' ? "<knots>"
                                                    : "dir=\"Z\"";
        mutated.replace(mutated.find(needle), needle.size(), edit);
        inputs.push_back(mutated);
    }
    for (const auto& input : inputs) {
        std::vector<std::size_t> line_lengths;
        std::size_t len = 0;
        for (char c : input) {
            if (c == '\n') {
                line_lengths.push_back(len);
                len = 0;
            } else {
                ++len;
            }
        }
        line_lengths.push_back(len);
        for (const auto& d : parse(input).diagnostics) {
            if (!d.location.known()) continue;
            REQUIRE(d.location.line <= line_lengths.size());
            CHECK(d.location.column <= line_lengths[d.location.line - 1] + 1);
            CHECK(d.location.byte_offset <= input.size());
        }
    }
}

TEST_CASE("comments between siblings never change the parse") {
    const std::string base = test::read_file(test::fixture_path("example.qdf"));
    const Document reference = *parse(base).document;

    // Insert a comment at every inter-element gap, one at a time.
    const std::regex gap(">\\s*<");
    std::vector<std::size_t> positions;
    for (auto it = std::sregex_iterator(base.begin(), base.end(), gap);
         it != std::sregex_iterator(); ++it) {
        positions.push_back(static_cast<std::size_t>(it->position()) + 1);
    }
    REQUIRE(positions.size() > 20);
    for (std::size_t pos : positions) {
        std::string mutated = base;
        mutated.insert(pos, "<!-- probe -->");
        const ParseResult r = parse(mutated);
        REQUIRE(r.document.has_value());
        CHECK(*r.document == reference);
    }
}

TEST_CASE("parse_file matches parse and reports I/O problems") {
    const std::string path = test::fixture_path("example.qdf");
    const ParseResult from_file = parse_file(path);
    const ParseResult from_bytes = parse(test::read_file(path));
    REQUIRE(from_file.document.has_value());
    CHECK(*from_file.document == *from_bytes.document);

    SUBCASE("nonexistent path") {
        const ParseResult r = parse_file(test::fixture_path("missing.qdf"));
        CHECK(!r.document.has_value());
        REQUIRE(r.diagnostics.size() == 1);
        CHECK(r.diagnostics[0].code == codes::IO);
        CHECK(!r.diagnostics[0].file.empty());
    }
    SUBCASE("directory path") {
        const ParseResult r = parse_file(QDF_TEST_DATA_DIR);
        CHECK(!r.document.has_value());
        CHECK(r.diagnostics[0].code == codes::IO);
    }
}

TEST_CASE("attach_pendants and attaches map into the model") {
    const std::string bytes =
        "<quipu><about><source>x</source><codename>C</codename></about>"
        "<media_index><material_item label=\"W\"><description>wool</description>"
        "</material_item></media_index><metric_unit type=\"mm\"/>"
        "<maincord lenght=\"100\">"
        "<cord index=\"T1\" lenght=\"50\" pos=\"0\" type=\"top\">"
        "<attach_pendants><attaches pendant=\"P1\"/><attaches pendant=\"P2\"/></attach_pendants>"
        "<media/></cord>"
        "<cord index=\"P1\" lenght=\"40\" pos=\"10\" type=\"pendant\"><media/></cord>"
        "<cord index=\"P2\" lenght=\"40\" pos=\"20\" type=\"pendant\"><media/></cord>"
        "</maincord></quipu>";
    const ParseResult r = parse(bytes);
    REQUIRE(r.document.has_value());
    const Cord* top = find_cord(*r.document, "T1");
    REQUIRE(top != nullptr);
    REQUIRE(top->attach_pendants.size() == 2);
    CHECK(top->attach_pendants[0].pendant == "P1");
    CHECK(top->attach_pendants[1].pendant == "P2");
    CHECK(top->media.empty());
}
