#include "qdf/cli.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qdf/analysis.hpp"
#include "qdf/codec.hpp"
#include "qdf/parser.hpp"
#include "qdf/render.hpp"
#include "qdf/validator.hpp"

namespace qdf::cli {

namespace {

constexpr int kOk = 0;
constexpr int kFindings = 1;
constexpr int kFailure = 2;

struct Input {
    std::string path;  // "-" for stdin
    std::string bytes;
    bool ok = false;
    std::string error;
};

Input read_input(const std::string& path, std::istream& in) {
    Input input;
    input.path = path;
    if (path == "-") {
        std::ostringstream buf;
        buf << in.rdbuf();
        input.bytes = buf.str();
        input.ok = true;
        return input;
    }
    std::error_code ec;
    if (std::filesystem::is_directory(path, ec)) {
        input.error = "'" + path + "' is a directory";
        return input;
    }
    std::ifstream file(path, std::ios::binary);
    if (!file) {
        input.error = "cannot open '" + path + "' for reading";
        return input;
    }
    std::ostringstream buf;
    buf << file.rdbuf();
    if (file.bad()) {
        input.error = "error while reading '" + path + "'";
        return input;
    }
    input.bytes = buf.str();
    input.ok = true;
    return input;
}

ParseResult parse_input(const Input& input) {
    ParseResult parsed = parse(input.bytes);
    if (input.path != "-") {
        for (auto& d : parsed.diagnostics) d.file = input.path;
    }
    return parsed;
}

void print_diagnostics(const std::vector<Diagnostic>& diags, std::ostream& os) {
    for (const auto& d : diags) os << format_diagnostic(d) << "\n";
}

bool write_output(const std::string& out_path, const std::string& content, std::ostream& out,
                  std::ostream& err) {
    if (out_path.empty() || out_path == "-") {
        out << content;
        return true;
    }
    std::ofstream file(out_path, std::ios::binary);
    if (!file) {
        err << "qdf: cannot open '" << out_path << "' for writing\n";
        return false;
    }
    file << content;
    file.close();
    if (file.fail()) {
        err << "qdf: error while writing '" << out_path << "'\n";
        return false;
    }
    return true;
}

nlohmann::json diagnostic_json(const Diagnostic& d) {
    nlohmann::json j;
    j["code"] = d.code;
    j["severity"] = to_string(d.severity);
    j["message"] = d.message;
    j["line"] = d.location.known() ? nlohmann::json(d.location.line) : nlohmann::json();
    j["column"] = d.location.known() ? nlohmann::json(d.location.column) : nlohmann::json();
    j["subject"] = d.subject;
    return j;
}

int cmd_validate(const Input& input, bool strict, const std::string& format, std::ostream& out,
                 std::ostream& err) {
    ParseResult parsed = parse_input(input);
    if (parsed.fatal()) {
        print_diagnostics(parsed.diagnostics, err);
        return kFailure;
    }
    ValidationReport report =
        combined_report(parsed, strict ? Strictness::Strict : Strictness::Lenient);
    if (input.path != "-") {
        for (auto& d : report.diagnostics) d.file = input.path;
    }
    if (format == "json") {
        nlohmann::json j;
        j["file"] = input.path;
        j["errors"] = report.error_count;
        j["warnings"] = report.warning_count;
        j["infos"] = report.info_count;
        j["diagnostics"] = nlohmann::json::array();
        for (const auto& d : report.diagnostics) j["diagnostics"].push_back(diagnostic_json(d));
        out << j.dump(2) << "\n";
    } else {
        print_diagnostics(report.diagnostics, out);
        out << report.error_count << " errors, " << report.warning_count << " warnings\n";
    }
    return report.error_count > 0 ? kFindings : kOk;
}

int cmd_decode(const Input& input, std::ostream& out, std::ostream& err) {
    ParseResult parsed = parse_input(input);
    if (parsed.fatal()) {
        print_diagnostics(parsed.diagnostics, err);
        return kFailure;
    }
    const auto reports = check_transcriptions(*parsed.document);
    std::size_t width = 4;
    for (const auto& r : reports) width = std::max(width, r.cord_index.size());
    out << std::left << std::setw(static_cast<int>(width) + 2) << "cord" << std::setw(9)
        << "decoded" << std::setw(15) << "transcription" << "status\n";
    bool mismatch = false;
    for (const auto& r : reports) {
        out << std::setw(static_cast<int>(width) + 2) << r.cord_index << std::setw(9)
            << (r.decoded ? std::to_string(*r.decoded) : "-") << std::setw(15)
            << (r.transcription ? std::to_string(*r.transcription) : "-")
            << to_string(r.consistent) << "\n";
        mismatch |= r.consistent == Consistency::Mismatch;
    }
    return mismatch ? kFindings : kOk;
}

int cmd_stats(const Input& input, const std::string& format, std::ostream& out,
              std::ostream& err) {
    ParseResult parsed = parse_input(input);
    if (parsed.fatal()) {
        print_diagnostics(parsed.diagnostics, err);
        return kFailure;
    }
    const DocumentStats s = stats(*parsed.document);
    if (format == "json") {
        nlohmann::json j;
        j["maincord_count"] = s.maincord_count;
        j["cord_count"] = s.cord_count;
        j["cords_by_type"] = {{"pendant", s.cords_by_type.at(CordType::Pendant)},
                              {"top", s.cords_by_type.at(CordType::Top)},
                              {"subsidiary", s.cords_by_type.at(CordType::Subsidiary)},
                              {"loop", s.cords_by_type.at(CordType::Loop)}};
        j["knot_count"] = s.knot_count;
        j["knots_by_kind"] = {{"single", s.knots_by_kind.at(KnotKind::Single)},
                              {"multiple", s.knots_by_kind.at(KnotKind::Multiple)},
                              {"eight", s.knots_by_kind.at(KnotKind::Eight)}};
        j["material_count"] = s.material_count;
        j["total_cord_lenght"] = s.total_cord_lenght;
        out << j.dump(2) << "\n";
        return kOk;
    }
    const std::string unit(to_token(parsed.document->metric_unit));
    out << "maincords: " << s.maincord_count << "\n";
    out << "cords: " << s.cord_count << " (pendant " << s.cords_by_type.at(CordType::Pendant)
        << ", top " << s.cords_by_type.at(CordType::Top) << ", subsidiary "
        << s.cords_by_type.at(CordType::Subsidiary) << ", loop "
        << s.cords_by_type.at(CordType::Loop) << "); knots: " << s.knot_count << " (single "
        << s.knots_by_kind.at(KnotKind::Single) << ", multiple "
        << s.knots_by_kind.at(KnotKind::Multiple) << ", eight "
        << s.knots_by_kind.at(KnotKind::Eight) << ")\n";
    out << "materials: " << s.material_count << "\n";
    out << "total cord lenght: " << format_number(s.total_cord_lenght) << unit << "\n";
    return kOk;
}

int cmd_convert(const Input& input, const std::string& to, const std::string& out_path,
                std::ostream& out, std::ostream& err) {
    ParseResult parsed = parse_input(input);
    if (parsed.fatal()) {
        print_diagnostics(parsed.diagnostics, err);
        return kFailure;
    }
    const auto target = metric_unit_from_token(to);
    if (!target) {
        err << "qdf: unknown unit '" << to << "' (expected mm, cm or in)\n";
        return kFailure;
    }
    try {
        const std::string text = serialize(convert_units(*parsed.document, *target));
        return write_output(out_path, text, out, err) ? kOk : kFailure;
    } catch (const QdfError& e) {
        err << "qdf: " << e.code() << ": " << e.what() << "\n";
        return kFailure;
    }
}

int cmd_export(const Input& input, const std::string& out_path, std::ostream& out,
               std::ostream& err) {
    ParseResult parsed = parse_input(input);
    if (parsed.fatal()) {
        print_diagnostics(parsed.diagnostics, err);
        return kFailure;
    }
    return write_output(out_path, export_csv(*parsed.document), out, err) ? kOk : kFailure;
}

int cmd_render(const Input& input, const std::string& format, const std::string& out_path,
               std::ostream& out, std::ostream& err) {
    ParseResult parsed = parse_input(input);
    if (parsed.fatal()) {
        print_diagnostics(parsed.diagnostics, err);
        return kFailure;
    }
    try {
        const std::string text = format == "svg" ? render_svg(*parsed.document)
                                                 : render_text(*parsed.document);
        return write_output(out_path, text, out, err) ? kOk : kFailure;
    } catch (const QdfError& e) {
        err << "qdf: " << e.code() << ": " << e.what() << "\n";
        return kFailure;
    }
}

int cmd_fmt(const Input& input, bool write, std::ostream& out, std::ostream& err) {
    if (write && input.path == "-") {
        err << "qdf: --write requires a file path, not standard input\n";
        return kFailure;
    }
    CanonicalizeResult canonical = canonicalize(input.bytes);
    if (!canonical.ok()) {
        for (auto d : canonical.diagnostics) {
            if (input.path != "-") d.file = input.path;
            err << format_diagnostic(d) << "\n";
        }
        return kFailure;
    }
    const bool changed = *canonical.text != input.bytes;
    if (write) {
        if (changed && !write_output(input.path, *canonical.text, out, err)) return kFailure;
    } else {
        out << *canonical.text;
    }
    return changed ? kFindings : kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err) {
    try {
        CLI::App app{"Toolkit for Quipu Description Format (QDF 0.2) documents"};
        app.require_subcommand(1);

        std::string path;
        bool strict = false;
        std::string format = "text";
        std::string to;
        std::string out_path;
        bool write = false;

        auto add_path = [&](CLI::App* cmd) {
            cmd->add_option("path", path, "QDF document ('-' reads standard input)")->required();
        };

        CLI::App* validate_cmd =
            app.add_subcommand("validate", "Check a document against the QDF rules");
        add_path(validate_cmd);
        validate_cmd->add_flag("--strict", strict,
                               "Treat prolog, position-bound, segment-coverage and forward "
                               "attach warnings as errors");
        validate_cmd->add_option("--format", format, "Report format")
            ->check(CLI::IsMember({"text", "json"}));

        CLI::App* decode_cmd =
            app.add_subcommand("decode", "Decode knot values and check transcriptions");
        add_path(decode_cmd);

        CLI::App* stats_cmd = app.add_subcommand("stats", "Count cords, knots and materials");
        add_path(stats_cmd);
        stats_cmd->add_option("--format", format, "Report format")
            ->check(CLI::IsMember({"text", "json"}));

        CLI::App* convert_cmd =
            app.add_subcommand("convert", "Rescale every measurement into another unit");
        add_path(convert_cmd);
        convert_cmd->add_option("--to", to, "Target unit")
            ->required()
            ->check(CLI::IsMember({"mm", "cm", "in"}));
        convert_cmd->add_option("--out", out_path, "Output file (default: standard output)");

        CLI::App* export_cmd = app.add_subcommand("export", "Write the per-cord CSV table");
        add_path(export_cmd);
        export_cmd->add_option("--out", out_path, "Output file (default: standard output)");

        CLI::App* render_cmd =
            app.add_subcommand("render", "Draw the cord structure as text or SVG");
        add_path(render_cmd);
        render_cmd->add_option("--format", format, "Output format")
            ->check(CLI::IsMember({"text", "svg"}));
        render_cmd->add_option("--out", out_path, "Output file (default: standard output)");

        CLI::App* fmt_cmd = app.add_subcommand("fmt", "Print or apply the canonical form");
        add_path(fmt_cmd);
        fmt_cmd->add_flag("--write", write, "Rewrite the file in place when not canonical");

        try {
            std::vector<std::string> reversed(args.rbegin(), args.rend());
            app.parse(reversed);
        } catch (const CLI::ParseError& e) {
            if (e.get_exit_code() == 0) {
                return app.exit(e, out, err);  // --help and friends
            }
            app.exit(e, out, err);
            return kFailure;
        }

        const Input input = read_input(path, in);
        if (!input.ok) {
            Diagnostic d{codes::IO, Severity::Error, input.error, {}, {}, path};
            err << format_diagnostic(d) << "\n";
            return kFailure;
        }

        if (validate_cmd->parsed()) return cmd_validate(input, strict, format, out, err);
        if (decode_cmd->parsed()) return cmd_decode(input, out, err);
        if (stats_cmd->parsed()) return cmd_stats(input, format, out, err);
        if (convert_cmd->parsed()) return cmd_convert(input, to, out_path, out, err);
        if (export_cmd->parsed()) return cmd_export(input, out_path, out, err);
        if (render_cmd->parsed()) return cmd_render(input, format, out_path, out, err);
        if (fmt_cmd->parsed()) return cmd_fmt(input, write, out, err);
        err << "qdf: no command given\n";
        return kFailure;
    } catch (const std::exception& e) {
        err << "qdf: internal error: " << e.what() << "\n";
        return kFailure;
    } catch (...) {
        err << "qdf: internal error\n";
        return kFailure;
    }
}

}  // namespace qdf::cli
