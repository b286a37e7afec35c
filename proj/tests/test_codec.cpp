#include <doctest.h>

#include <algorithm>
#include <random>
#include <tuple>

#include "qdf/codec.hpp"
#include "qdf/parser.hpp"
#include "qdf/validator.hpp"
#include "support/builders.hpp"
#include "support/generator.hpp"

using namespace qdf;

namespace {

bool no_errors(const std::vector<Diagnostic>& diags) {
    return std::none_of(diags.begin(), diags.end(),
                        [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

// Reports compare by what was found, not where: serialization moves
// every finding to a new line, and constructed documents have no
// locations at all, so the comparison is order-insensitive.
std::vector<std::tuple<std::string, Severity, std::string>> signature(
    const ValidationReport& report) {
    std::vector<std::tuple<std::string, Severity, std::string>> out;
    for (const auto& d : report.diagnostics) out.emplace_back(d.code, d.severity, d.subject);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("number formatting uses minimal digits") {
    CHECK(format_number(600) == "600");
    CHECK(format_number(0) == "0");
    CHECK(format_number(60) == "60");
    CHECK(format_number(23.622) == "23.622");
    CHECK(format_number(0.5) == "0.5");
    CHECK(format_number(1.23456) == "1.23456");
    CHECK(format_number(16.3386) == "16.3386");
    CHECK(format_number(1e6) == "1000000");
}

TEST_CASE("the reference document round-trips through serialization") {
    const std::string bytes = test::read_file(test::fixture_path("example.qdf"));
    const ParseResult first = parse(bytes);
    REQUIRE(first.document.has_value());

    const std::string text = serialize(*first.document);
    const ParseResult second = parse(text);
    REQUIRE(second.document.has_value());
    CHECK(no_errors(second.diagnostics));
    CHECK(*second.document == *first.document);

    // Serialization is already canonical: one more pass is a no-op.
    CHECK(serialize(*second.document) == text);
}

TEST_CASE("a document without maincords serializes to the three lead sections") {
    const std::string text = serialize(test::minimal_document());
    CHECK(text.find("<about>") != std::string::npos);
    CHECK(text.find("<media_index>") != std::string::npos);
    CHECK(text.find("<metric_unit type=\"mm\"/>") != std::string::npos);
    CHECK(text.find("<maincord") == std::string::npos);
    const ParseResult back = parse(text);
    REQUIRE(back.document.has_value());
    CHECK(*back.document == test::minimal_document());
}

TEST_CASE("round-trip holds for 200 generated documents") {
    std::mt19937_64 rng(20240811);
    for (int i = 0; i < 200; ++i) {
        const test::Generated g = test::generate_document(rng);
        const std::string text = serialize(g.doc);
        const ParseResult back = parse(text);
        REQUIRE(back.document.has_value());
        CHECK(no_errors(back.diagnostics));
        CHECK(*back.document == g.doc);
        // serialize(parse(serialize(d))) == serialize(d), byte for byte
        CHECK(serialize(*back.document) == text);
    }
}

TEST_CASE("serialized output omits default-valued attributes") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 40; ++i) {
        const std::string text = serialize(test::generate_document(rng).doc);
        CHECK(text.find("dir=\"U\"") == std::string::npos);
        CHECK(text.find("attach=\"U\"") == std::string::npos);
        CHECK(text.find("attach_through=\"no\"") == std::string::npos);
    }
}

TEST_CASE("markup characters in text and attributes survive the trip") {
    Document doc = test::minimal_document();
    doc.header.source = "a & b <c> \"quoted\" 'single'";
    doc.header.comment = "line&one <two>\nand a\rreturn";
    doc.media_index[0].description = "5 < 6 && 7 > 2";
    doc.media_index[0].color_iccnbs = "odd \"value\"\nwith\tbreaks";
    const std::string text = serialize(doc);
    const ParseResult back = parse(text);
    REQUIRE(back.document.has_value());
    CHECK(no_errors(back.diagnostics));
    CHECK(*back.document == doc);
}

TEST_CASE("canonicalize is idempotent and normalizes the tolerated spelling") {
    const std::string original = test::read_file(test::fixture_path("example.qdf"));

    const CanonicalizeResult once = canonicalize(original);
    REQUIRE(once.ok());
    const CanonicalizeResult twice = canonicalize(*once.text);
    REQUIRE(twice.ok());
    CHECK(*twice.text == *once.text);

    SUBCASE("shuffled attributes and 'length' spelling canonicalize identically") {
        const std::string permuted = test::read_file(test::fixture_path("example_permuted.qdf"));
        const CanonicalizeResult other = canonicalize(permuted);
        REQUIRE(other.ok());
        CHECK(*other.text == *once.text);
        CHECK(other.text->find("length=") == std::string::npos);
        CHECK(other.text->find("lenght=") != std::string::npos);
    }
    SUBCASE("generated documents reach their fixpoint in one step") {
        std::mt19937_64 rng(99);
        for (int i = 0; i < 50; ++i) {
            const std::string text = serialize(test::generate_document(rng).doc);
            const CanonicalizeResult c = canonicalize(text);
            REQUIRE(c.ok());
            CHECK(*c.text == text);
        }
    }
}

TEST_CASE("canonical output matches the committed golden file") {
    // The canonical form is a stability contract; regenerate the golden
    // file deliberately when the format changes, never by accident.
    const CanonicalizeResult c = canonicalize(test::read_file(test::fixture_path("example.qdf")));
    REQUIRE(c.ok());
    CHECK(*c.text == test::read_file(test::fixture_path("example_canonical.qdf")));
}

TEST_CASE("canonicalize propagates fatal parse errors") {
    const CanonicalizeResult bad = canonicalize("<quipu><about>");
    CHECK(!bad.ok());
    CHECK(!bad.diagnostics.empty());
    CHECK(bad.diagnostics[0].severity == Severity::Error);
}

TEST_CASE("serialize rejects documents that break model invariants") {
    SUBCASE("duplicate index") {
        Document doc = test::example_document();
        doc.maincords[0].cords[1].index = "X1";
        CHECK_THROWS_AS(serialize(doc), QdfError);
    }
    SUBCASE("empty media index") {
        Document doc = test::example_document();
        doc.media_index.clear();
        CHECK_THROWS_AS(serialize(doc), QdfError);
    }
    SUBCASE("empty codename list") {
        Document doc = test::example_document();
        doc.header.codenames.clear();
        CHECK_THROWS_AS(serialize(doc), QdfError);
    }
    SUBCASE("invalid identifier") {
        Document doc = test::example_document();
        doc.media_index[0].label = "not a name";
        CHECK_THROWS_AS(serialize(doc), QdfError);
    }
    SUBCASE("zero lenght") {
        Document doc = test::example_document();
        doc.maincords[0].lenght = 0;
        CHECK_THROWS_AS(serialize(doc), QdfError);
    }
    SUBCASE("maincord without cords") {
        Document doc = test::example_document();
        doc.maincords[0].cords.clear();
        CHECK_THROWS_AS(serialize(doc), QdfError);
    }
    SUBCASE("the error carries its code") {
        Document doc = test::example_document();
        doc.maincords[0].cords[0].pos = -1;
        try {
            serialize(doc);
            FAIL("expected QdfError");
        } catch (const QdfError& e) {
            CHECK(e.code() == codes::MODEL_INVARIANT);
        }
    }
}

TEST_CASE("a dangling reference or missing loop_pos still serializes") {
    // Those are validator findings, not serialization failures; fmt of
    // an imperfect but parseable file must stay possible.
    Document doc = test::example_document();
    doc.maincords[0].material = "UNDECLARED";
    doc.maincords[0].cords[2].loop_pos.reset();
    const std::string text = serialize(doc);
    const ParseResult back = parse(text);
    REQUIRE(back.document.has_value());
    CHECK(*back.document == doc);
}

TEST_CASE("validator coherence: reserialized documents validate identically") {
    const std::string bytes = test::read_file(test::fixture_path("example.qdf"));
    const Document original = *parse(bytes).document;
    const Document reparsed = *parse(serialize(original)).document;
    CHECK(signature(validate(reparsed)) == signature(validate(original)));

    std::mt19937_64 rng(4242);
    for (int i = 0; i < 50; ++i) {
        const test::Generated g = test::generate_document(rng);
        const Document back = *parse(serialize(g.doc)).document;
        CHECK(signature(validate(back)) == signature(validate(g.doc)));
    }
}

TEST_CASE("knot content is preserved verbatim, including unreadable values") {
    Document doc = test::example_document();
    Knot worn;
    worn.kind = KnotKind::Eight;
    worn.pos = 200;
    worn.raw_value = "worn away?";
    doc.maincords[0].cords[0].knots.push_back(worn);
    const std::string text = serialize(doc);
    CHECK(text.find("<eight pos=\"200\">worn away?</eight>") != std::string::npos);
    const ParseResult back = parse(text);
    REQUIRE(back.document.has_value());
    CHECK(*back.document == doc);
}
