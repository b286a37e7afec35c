#include "qdf/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <cmath>

#include "qdf/codec.hpp"

namespace qdf {

namespace {

constexpr std::string_view kWs = " \t\n\r";

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(kWs);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(kWs);
    return s.substr(b, e - b + 1);
}

std::optional<std::uint64_t> parse_unsigned(std::string_view s) {
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) {
            return c >= '0' && c <= '9';
        })) {
        return std::nullopt;
    }
    std::uint64_t value = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (res.ec != std::errc()) return std::nullopt;
    return value;
}

double unit_in_mm(MetricUnit u) {
    switch (u) {
        case MetricUnit::Mm: return 1.0;
        case MetricUnit::Cm: return 10.0;
        case MetricUnit::In: return 25.4;
    }
    return 1.0;
}

double quantize(double v) { return std::round(v * 1e6) / 1e6; }

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

}  // namespace

std::string to_string(Consistency c) {
    switch (c) {
        case Consistency::Match: return "match";
        case Consistency::Mismatch: return "mismatch";
        case Consistency::Unchecked: return "unchecked";
    }
    return "unchecked";
}

std::optional<std::uint64_t> decode_cord_value(const Cord& cord) {
    std::uint64_t sum = 0;
    for (const auto& knot : cord.knots) {
        if (!knot.value) return std::nullopt;
        if (*knot.value > std::numeric_limits<std::uint64_t>::max() - sum) {
            return std::nullopt;  // saturating would fake a value; report none
        }
        sum += *knot.value;
    }
    return sum;
}

std::vector<CordValueReport> check_transcriptions(const Document& doc) {
    std::vector<CordValueReport> out;
    for (const auto& visit : iterate_cords(doc)) {
        const Cord& cord = *visit.cord;
        CordValueReport report;
        report.cord_index = cord.index;
        report.decoded = decode_cord_value(cord);
        if (cord.transcription) report.transcription = parse_unsigned(trim(*cord.transcription));
        if (report.decoded && report.transcription) {
            report.consistent = *report.decoded == *report.transcription
                                    ? Consistency::Match
                                    : Consistency::Mismatch;
        }
        out.push_back(std::move(report));
    }
    return out;
}

namespace {

void scale_cord(Cord& cord, double factor) {
    cord.lenght = quantize(cord.lenght * factor);
    if (cord.width) cord.width = quantize(*cord.width * factor);
    cord.pos = quantize(cord.pos * factor);
    if (cord.loop_pos) cord.loop_pos = quantize(*cord.loop_pos * factor);
    for (auto& seg : cord.media) seg.pos = quantize(seg.pos * factor);
    for (auto& knot : cord.knots) knot.pos = quantize(knot.pos * factor);
    for (auto& sub : cord.children) scale_cord(sub, factor);
}

}  // namespace

Document convert_units(const Document& doc, MetricUnit target) {
    Document out = doc;
    out.source.reset();  // the raw tree no longer reflects the values
    if (doc.metric_unit == target) return out;
    const double factor = unit_in_mm(doc.metric_unit) / unit_in_mm(target);
    out.metric_unit = target;
    for (auto& mc : out.maincords) {
        mc.lenght = quantize(mc.lenght * factor);
        if (mc.width) mc.width = quantize(*mc.width * factor);
        for (auto& cord : mc.cords) scale_cord(cord, factor);
    }
    return out;
}

DocumentStats stats(const Document& doc) {
    DocumentStats s;
    s.cords_by_type = {{CordType::Pendant, 0},
                       {CordType::Top, 0},
                       {CordType::Subsidiary, 0},
                       {CordType::Loop, 0}};
    s.knots_by_kind = {{KnotKind::Single, 0}, {KnotKind::Multiple, 0}, {KnotKind::Eight, 0}};
    s.maincord_count = doc.maincords.size();
    s.material_count = doc.media_index.size();
    for (const auto& visit : iterate_cords(doc)) {
        const Cord& cord = *visit.cord;
        ++s.cord_count;
        ++s.cords_by_type[cord.type];
        s.total_cord_lenght += cord.lenght;
        for (const auto& knot : cord.knots) {
            ++s.knot_count;
            ++s.knots_by_kind[knot.kind];
        }
    }
    return s;
}

std::vector<std::vector<std::string>> export_table(const Document& doc) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& visit : iterate_cords(doc)) {
        const Cord& cord = *visit.cord;
        std::string labels;
        for (const auto& seg : cord.media) {
            if (!labels.empty()) labels += ";";
            labels += seg.material;
        }
        const auto decoded = decode_cord_value(cord);
        rows.push_back({
            cord.index,
            visit.parent,
            std::string(to_token(cord.type)),
            format_number(cord.lenght),
            format_number(cord.pos),
            std::string(to_token(cord.dir)),
            std::string(to_token(cord.attach)),
            labels,
            std::to_string(cord.knots.size()),
            decoded ? std::to_string(*decoded) : std::string(),
            cord.transcription ? *cord.transcription : std::string(),
        });
    }
    return rows;
}

std::string export_csv(const Document& doc) {
    std::string out =
        "cord_index,parent,type,lenght,pos,dir,attach,material_labels,"
        "knot_count,decoded_value,transcription\n";
    for (const auto& row : export_table(doc)) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ",";
            out += csv_field(row[i]);
        }
        out += "\n";
    }
    return out;
}

}  // namespace qdf
