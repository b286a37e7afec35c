#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "qdf/parser.hpp"
#include "qdf/validator.hpp"
#include "support/builders.hpp"
#include "support/mutations.hpp"

using namespace qdf;

namespace {

std::map<std::string, int> code_counts(const ValidationReport& report) {
    std::map<std::string, int> counts;
    for (const auto& d : report.diagnostics) ++counts[d.code];
    return counts;
}

ValidationReport pipeline(const std::string& bytes,
                          Strictness strictness = Strictness::Lenient) {
    return combined_report(parse(bytes), strictness);
}

const std::string& fixture() {
    static const std::string bytes = test::read_file(test::fixture_path("example.qdf"));
    return bytes;
}

}  // namespace

TEST_CASE("the reference document validates with exactly two segment warnings") {
    const ParseResult parsed = parse(fixture());
    REQUIRE(parsed.document.has_value());

    const ValidationReport lenient = validate(*parsed.document, Strictness::Lenient);
    CHECK(lenient.error_count == 0);
    CHECK(lenient.warning_count == 2);
    std::vector<std::string> subjects;
    for (const auto& d : lenient.diagnostics) {
        if (d.severity != Severity::Warning) continue;
        CHECK(d.code == codes::SEG_LEN);
        subjects.push_back(d.subject);
    }
    CHECK(subjects == std::vector<std::string>{"X2", "X3s1"});

    const ValidationReport strict = validate(*parsed.document, Strictness::Strict);
    CHECK(strict.error_count == 2);
    CHECK(strict.warning_count == 0);
    for (const auto& d : strict.diagnostics) CHECK(d.code == codes::SEG_LEN);
}

TEST_CASE("boundary equality of knot position and cord lenght is valid") {
    // X1s1 carries a knot at pos 425 on a 425-long cord; no warning.
    const ParseResult parsed = parse(fixture());
    const ValidationReport report = validate(*parsed.document);
    for (const auto& d : report.diagnostics) CHECK(d.code != codes::POS_RANGE);
}

TEST_CASE("a document with no maincords validates cleanly in both modes") {
    const Document doc = test::minimal_document();
    CHECK(validate(doc, Strictness::Lenient).error_count == 0);
    CHECK(validate(doc, Strictness::Strict).error_count == 0);
}

TEST_CASE("every DTD mutation triggers exactly its one expected code") {
    const auto baseline = code_counts(pipeline(fixture()));
    CHECK(baseline.at(codes::SEG_LEN) == 2);

    for (const auto& mutation : test::dtd_mutation_table()) {
        CAPTURE(mutation.name);
        const auto base_it = baseline.find(mutation.expected);
        const int base_expected = base_it == baseline.end() ? 0 : base_it->second;

        const std::string mutated = test::apply_edits(fixture(), mutation.edits);
        auto counts = code_counts(pipeline(mutated));

        // Exactly one new occurrence of the expected code...
        const auto it = counts.find(mutation.expected);
        REQUIRE_MESSAGE(it != counts.end(), mutation.name);
        CHECK_MESSAGE(it->second == base_expected + 1, mutation.name);
        // ...and nothing else appears that the baseline did not have.
        for (const auto& [code, n] : counts) {
            if (code == mutation.expected) continue;
            const auto base = baseline.find(code);
            const int allowed = base == baseline.end() ? 0 : base->second;
            CHECK_MESSAGE(n <= allowed, mutation.name, ": unexpected extra ", code);
        }
    }
}

TEST_CASE("strict mode only upgrades; every lenient error stays an error") {
    for (const auto& mutation : test::dtd_mutation_table()) {
        CAPTURE(mutation.name);
        const std::string mutated = test::apply_edits(fixture(), mutation.edits);
        const ValidationReport lenient = pipeline(mutated, Strictness::Lenient);
        const ValidationReport strict = pipeline(mutated, Strictness::Strict);

        std::set<std::string> strict_errors;
        for (const auto& d : strict.diagnostics) {
            if (d.severity == Severity::Error) {
                strict_errors.insert(d.code + "|" + std::to_string(d.location.byte_offset) + "|" +
                                     d.subject);
            }
        }
        for (const auto& d : lenient.diagnostics) {
            if (d.severity != Severity::Error) continue;
            CHECK(strict_errors.count(d.code + "|" + std::to_string(d.location.byte_offset) +
                                      "|" + d.subject) == 1);
        }
        CHECK(strict.error_count >= lenient.error_count);
    }
}

TEST_CASE("validation is idempotent and deterministic") {
    const ParseResult parsed = parse(fixture());
    const ValidationReport a = validate(*parsed.document);
    const ValidationReport b = validate(*parsed.document);
    CHECK(a.diagnostics == b.diagnostics);
    CHECK(a.error_count == b.error_count);
}

TEST_CASE("reports are ordered by document position") {
    const std::string mutated = test::apply_edits(
        fixture(), {{" loop_pos=\"67\"", ""}, {"<single pos=\"130\">", "<single>"}});
    const ValidationReport report = pipeline(mutated);
    std::size_t last_offset = 0;
    for (const auto& d : report.diagnostics) {
        CHECK(d.location.byte_offset >= last_offset);
        last_offset = d.location.byte_offset;
    }
}

TEST_CASE("model-level validation covers documents built in code") {
    SUBCASE("valid constructed document is clean") {
        const ValidationReport report = validate(test::example_document());
        CHECK(report.error_count == 0);
        CHECK(report.warning_count == 2);  // same two segment findings
    }
    SUBCASE("duplicate index") {
        Document doc = test::example_document();
        doc.maincords[0].cords[1].index = "X1";
        CHECK(code_counts(validate(doc))[codes::ID_DUP] == 1);
    }
    SUBCASE("index colliding with a label") {
        Document doc = test::example_document();
        doc.maincords[0].cords[1].index = "LC";
        CHECK(code_counts(validate(doc))[codes::ID_DUP] == 1);
    }
    SUBCASE("empty media index") {
        Document doc = test::example_document();
        doc.media_index.clear();
        auto counts = code_counts(validate(doc));
        CHECK(counts[codes::CHILD_MISSING] == 1);
        CHECK(counts.count(codes::BADREF) == 0);  // no cascade
    }
    SUBCASE("empty source and codenames") {
        Document doc = test::minimal_document();
        doc.header.source.clear();
        doc.header.codenames.clear();
        CHECK(code_counts(validate(doc))[codes::CHILD_MISSING] == 2);
    }
    SUBCASE("loop without loop_pos") {
        Document doc = test::example_document();
        doc.maincords[0].cords[2].loop_pos.reset();
        CHECK(code_counts(validate(doc))[codes::LOOPPOS] == 1);
    }
    SUBCASE("attach_pendants on a pendant") {
        Document doc = test::example_document();
        doc.maincords[0].cords[0].attach_pendants.push_back(AttachRef{"X2", {}});
        auto counts = code_counts(validate(doc));
        CHECK(counts[codes::TOP_ONLY] == 1);
        // the reference is also forward: X2 is declared after X1
        CHECK(counts[codes::ATTACH_FWD] == 1);
    }
    SUBCASE("empty media warns on constructed documents") {
        Document doc = test::example_document();
        doc.maincords[0].cords[1].children[0].media.clear();  // X2s1
        CHECK(code_counts(validate(doc))[codes::EMPTY_MEDIA] == 1);
    }
    SUBCASE("invalid rgb color") {
        Document doc = test::example_document();
        doc.media_index[0].color_rgb = RgbColor{"red"};
        CHECK(code_counts(validate(doc))[codes::ENUM] == 1);
    }
    SUBCASE("bad numeric domain") {
        Document doc = test::example_document();
        doc.maincords[0].cords[0].lenght = 0;
        CHECK(code_counts(validate(doc))[codes::NUM] == 1);
    }
    SUBCASE("mix referencing a later item") {
        Document doc = test::example_document();
        std::swap(doc.media_index[0], doc.media_index[2]);  // YB:LC first
        auto counts = code_counts(validate(doc));
        CHECK(counts[codes::MIX_ORDER] == 2);  // both BS and LC now later
    }
}

TEST_CASE("validate_structure and validate_semantics split the findings") {
    const std::string mutated = test::apply_edits(
        fixture(), {{" loop_pos=\"67\"", ""},            // semantic: E-LOOPPOS
                    {"<source>Tocogua</source>", ""}});  // structural: E-CHILD-MISSING
    const ParseResult parsed = parse(mutated);
    REQUIRE(parsed.document.has_value());

    const auto structural = code_counts(validate_structure(*parsed.document));
    CHECK(structural.count(codes::CHILD_MISSING) == 1);
    CHECK(structural.count(codes::LOOPPOS) == 0);

    const auto semantic = code_counts(validate_semantics(*parsed.document));
    CHECK(semantic.count(codes::LOOPPOS) == 1);
    CHECK(semantic.count(codes::CHILD_MISSING) == 0);
}

TEST_CASE("stray text inside an element-only container is reported") {
    const std::string mutated =
        test::apply_edits(fixture(), {{"<media_index>", "<media_index>loose words"}});
    const auto counts = code_counts(pipeline(mutated));
    CHECK(counts.at(codes::CHILD_UNEXPECTED) == 1);
}

TEST_CASE("severity counts match the diagnostics") {
    for (const auto& mutation : test::dtd_mutation_table()) {
        const ValidationReport report = pipeline(test::apply_edits(fixture(), mutation.edits));
        std::size_t errors = 0, warnings = 0, infos = 0;
        for (const auto& d : report.diagnostics) {
            switch (d.severity) {
                case Severity::Error: ++errors; break;
                case Severity::Warning: ++warnings; break;
                case Severity::Info: ++infos; break;
            }
        }
        CHECK(report.error_count == errors);
        CHECK(report.warning_count == warnings);
        CHECK(report.info_count == infos);
    }
}
