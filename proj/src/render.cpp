#include "qdf/render.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "qdf/analysis.hpp"
#include "qdf/codec.hpp"
#include "qdf/xml.hpp"

namespace qdf {

namespace {

std::string knot_summary(const Cord& cord) {
    std::size_t singles = 0, multiples = 0, eights = 0;
    for (const auto& k : cord.knots) {
        switch (k.kind) {
            case KnotKind::Single: ++singles; break;
            case KnotKind::Multiple: ++multiples; break;
            case KnotKind::Eight: ++eights; break;
        }
    }
    std::string out;
    auto add = [&](std::size_t n, const char* name) {
        if (n == 0) return;
        if (!out.empty()) out += ", ";
        out += std::to_string(n) + " " + name;
    };
    add(singles, "single");
    add(multiples, "multiple");
    add(eights, "eight");
    return out;
}

}  // namespace

std::string render_text(const Document& doc) {
    const std::string unit(to_token(doc.metric_unit));
    std::string out;
    if (doc.maincords.empty()) {
        out += "khipu: " + (doc.header.source.empty() ? "(unnamed)" : doc.header.source) + "\n";
        out += "(no maincords)\n";
        return out;
    }
    std::size_t ordinal = 0;
    auto visits = iterate_cords(doc);
    std::size_t v = 0;
    for (const auto& mc : doc.maincords) {
        ++ordinal;
        const std::string key = maincord_key(mc, ordinal);
        out += key + " maincord " + format_number(mc.lenght) + unit + " dir=" +
               std::string(to_token(mc.dir));
        if (mc.material) out += " material=" + *mc.material;
        out += "\n";
        for (; v < visits.size(); ++v) {
            // visits are grouped per maincord in order
            const CordVisit& visit = visits[v];
            if (visit.depth == 1 && visit.parent != key) break;
            const Cord& cord = *visit.cord;
            out.append(static_cast<std::size_t>(visit.depth) * 2, ' ');
            out += cord.index + " " + std::string(to_token(cord.type)) + " " +
                   format_number(cord.lenght) + unit + " pos=" + format_number(cord.pos) +
                   " dir=" + std::string(to_token(cord.dir));
            if (!cord.knots.empty()) {
                out += " " + knot_summary(cord);
                const auto decoded = decode_cord_value(cord);
                out += decoded ? " =" + std::to_string(*decoded) : " =?";
            }
            out += "\n";
        }
    }
    return out;
}

// ---------------------------------------------------------------------
// SVG rendering

namespace {

constexpr double kMinSpacing = 8.0;   // crowding threshold between siblings
constexpr double kChildOffset = 8.0;  // horizontal shift of a child spine
constexpr double kMaincordGap = 40.0;
constexpr double kStrokeMain = 3.0;
constexpr double kStrokeCord = 1.5;
constexpr const char* kNeutral = "#9e9e9e";

std::string fmt(double v) {
    const double r = std::round(v * 100.0) / 100.0;
    return format_number(r == 0 ? 0 : r);
}

class SvgBuilder {
public:
    explicit SvgBuilder(const Document& doc)
        : doc_(doc), unit_scale_(doc.metric_unit == MetricUnit::Mm   ? 1.0
                                 : doc.metric_unit == MetricUnit::Cm ? 10.0
                                                                     : 25.4) {
        for (const auto& item : doc.media_index) {
            if (item.color_rgb && item.color_rgb->valid()) {
                colors_[item.label] = item.color_rgb->value;
            } else if (item.color_iccnbs) {
                titles_[item.label] = *item.color_iccnbs;
            }
        }
    }

    std::string run() {
        double baseline = 0;
        double prev_down = 0;
        bool first = true;
        for (const auto& mc : doc_.maincords) {
            const double up = side_extent(mc, true);
            const double down = side_extent(mc, false);
            baseline += first ? up : prev_down + kMaincordGap + up;
            first = false;
            prev_down = down;
            maincord(mc, baseline);
        }
        return assemble();
    }

private:
    const Document& doc_;
    const double unit_scale_;
    std::map<std::string, std::string> colors_;  // label -> #rrggbb
    std::map<std::string, std::string> titles_;  // label -> ISCC-NBS code
    std::string body_;
    double min_x_ = 0, max_x_ = 0, min_y_ = 0, max_y_ = 0;
    bool touched_ = false;

    double scaled(double v) const { return v * unit_scale_; }

    void touch(double x, double y) {
        if (!touched_) {
            min_x_ = max_x_ = x;
            min_y_ = max_y_ = y;
            touched_ = true;
            return;
        }
        min_x_ = std::min(min_x_, x);
        max_x_ = std::max(max_x_, x);
        min_y_ = std::min(min_y_, y);
        max_y_ = std::max(max_y_, y);
    }

    // Vertical reach of one side of a maincord's cord tree (tops point
    // up, everything else down).
    double side_extent(const MainCord& mc, bool up) {
        double extent = 0;
        for (const auto& cord : mc.cords) {
            if ((cord.type == CordType::Top) == up) {
                extent = std::max(extent, subtree_extent(cord));
            }
        }
        return extent + 20;  // label headroom
    }

    double subtree_extent(const Cord& cord) {
        double extent = scaled(cord.lenght);
        for (const auto& child : cord.children) {
            const double attach = std::min(scaled(child.pos), scaled(cord.lenght));
            extent = std::max(extent, attach + subtree_extent(child));
        }
        return extent;
    }

    void line(double x1, double y1, double x2, double y2, const std::string& stroke, double width,
              bool dashed = false, const std::string& title = {}) {
        touch(x1, y1);
        touch(x2, y2);
        body_ += "  <line x1=\"" + fmt(x1) + "\" y1=\"" + fmt(y1) + "\" x2=\"" + fmt(x2) +
                 "\" y2=\"" + fmt(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"" +
                 fmt(width) + "\"";
        if (dashed) body_ += " stroke-dasharray=\"3 2\"";
        if (title.empty()) {
            body_ += "/>\n";
        } else {
            body_ += "><title>" + xml::escape_text(title) + "</title></line>\n";
        }
    }

    void label(double x, double y, const std::string& text) {
        touch(x, y);
        body_ += "  <text x=\"" + fmt(x) + "\" y=\"" + fmt(y) +
                 "\" font-size=\"8\" font-family=\"sans-serif\" fill=\"#333333\">" +
                 xml::escape_text(text) + "</text>\n";
    }

    void knot_glyph(const Knot& knot, double x, double y) {
        touch(x - 3, y - 3);
        touch(x + 3, y + 3);
        switch (knot.kind) {
            case KnotKind::Single:
                body_ += "  <circle class=\"knot knot-single\" cx=\"" + fmt(x) + "\" cy=\"" +
                         fmt(y) + "\" r=\"2.5\" fill=\"#222222\"/>\n";
                break;
            case KnotKind::Multiple:
                body_ += "  <polygon class=\"knot knot-multiple\" points=\"" + fmt(x) + "," +
                         fmt(y - 3) + " " + fmt(x + 3) + "," + fmt(y) + " " + fmt(x) + "," +
                         fmt(y + 3) + " " + fmt(x - 3) + "," + fmt(y) +
                         "\" fill=\"#222222\"/>\n";
                break;
            case KnotKind::Eight:
                body_ += "  <path class=\"knot knot-eight\" d=\"M " + fmt(x - 2.5) + " " +
                         fmt(y - 2.5) + " L " + fmt(x + 2.5) + " " + fmt(y + 2.5) + " M " +
                         fmt(x - 2.5) + " " + fmt(y + 2.5) + " L " + fmt(x + 2.5) + " " +
                         fmt(y - 2.5) + "\" stroke=\"#222222\" stroke-width=\"1.2\" fill=\"none\"/>\n";
                break;
        }
    }

    // Spread positions so siblings sit at least kMinSpacing apart.
    // Returns drawn x per cord; the caller adds a dashed leader when a
    // cord was moved.
    static std::vector<double> spread(const std::vector<double>& truth) {
        std::vector<std::size_t> order(truth.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return truth[a] < truth[b]; });
        std::vector<double> out(truth.size());
        double floor = -1e300;
        for (std::size_t i : order) {
            const double x = std::max(truth[i], floor);
            out[i] = x;
            floor = x + kMinSpacing;
        }
        return out;
    }

    void maincord(const MainCord& mc, double baseline) {
        const double x0 = 0;
        const double x1 = scaled(mc.lenght);
        const std::string color = mc.material && colors_.count(*mc.material)
                                      ? colors_.at(*mc.material)
                                      : std::string(kNeutral);
        line(x0, baseline, x1, baseline, color, kStrokeMain);

        std::vector<double> truth;
        truth.reserve(mc.cords.size());
        for (const auto& cord : mc.cords) {
            truth.push_back(std::min(scaled(cord.pos), scaled(mc.lenght)));
        }
        const std::vector<double> drawn = spread(truth);
        for (std::size_t i = 0; i < mc.cords.size(); ++i) {
            const Cord& cord = mc.cords[i];
            const int dir = cord.type == CordType::Top ? -1 : 1;
            if (drawn[i] != truth[i]) {
                line(truth[i], baseline, drawn[i], baseline + dir * 6, kNeutral, 0.8, true);
            }
            draw_cord(cord, drawn[i], baseline, dir, x0, baseline, true);
        }
    }

    // attach_x/attach_y: where this cord meets its parent.
    // parent_x/parent_y0: the parent spine, for loop return arcs.
    void draw_cord(const Cord& cord, double attach_x, double attach_y, int dir, double parent_x,
                   double parent_y0, bool parent_horizontal) {
        const double len = scaled(cord.lenght);
        const double y_end = attach_y + dir * len;
        draw_spine(cord, attach_x, attach_y, dir, len);
        label(attach_x + 2, attach_y + dir * 8, cord.index);

        for (const auto& knot : cord.knots) {
            const double along = std::min(scaled(knot.pos), len);  // clamp to the cord end
            knot_glyph(knot, attach_x, attach_y + dir * along);
        }

        if (cord.type == CordType::Loop && cord.loop_pos) {
            double rx, ry;
            if (parent_horizontal) {
                rx = parent_x + scaled(*cord.loop_pos);
                ry = parent_y0;
            } else {
                rx = parent_x;
                ry = parent_y0 + dir * scaled(*cord.loop_pos);
            }
            const double bulge_x = std::max(attach_x, rx) + 10;
            body_ += "  <path class=\"loop-return\" d=\"M " + fmt(attach_x) + " " + fmt(y_end) +
                     " Q " + fmt(bulge_x) + " " + fmt(y_end) + " " + fmt(rx) + " " + fmt(ry) +
                     "\" stroke=\"" + kNeutral +
                     "\" stroke-width=\"1\" stroke-dasharray=\"4 2\" fill=\"none\"/>\n";
            touch(bulge_x, y_end);
            touch(rx, ry);
        }

        // Children attach along this spine; crowded ones shift right.
        std::vector<std::pair<double, double>> placed;  // (pos, shift)
        for (const auto& child : cord.children) {
            const double cp = std::min(scaled(child.pos), len);
            double shift = kChildOffset;
            for (bool conflict = true; conflict;) {
                conflict = false;
                for (const auto& [p, s] : placed) {
                    if (std::abs(p - cp) < kMinSpacing && s == shift) {
                        shift += kChildOffset;
                        conflict = true;
                        break;
                    }
                }
            }
            placed.emplace_back(cp, shift);
            const double cy = attach_y + dir * cp;
            draw_cord(child, attach_x + shift, cy, dir, attach_x, attach_y, false);
        }
    }

    void draw_spine(const Cord& cord, double x, double y0, int dir, double len) {
        if (cord.media.empty()) {
            line(x, y0, x, y0 + dir * len, kNeutral, kStrokeCord);
            return;
        }
        double from = 0;
        for (const auto& seg : cord.media) {
            const double to = std::min(scaled(seg.pos), len);
            if (to <= from) continue;
            const auto color_it = colors_.find(seg.material);
            const std::string color =
                color_it != colors_.end() ? color_it->second : std::string(kNeutral);
            const auto title_it = titles_.find(seg.material);
            line(x, y0 + dir * from, x, y0 + dir * to, color, kStrokeCord, false,
                 title_it != titles_.end() ? title_it->second : std::string());
            from = to;
        }
        if (from < len) line(x, y0 + dir * from, x, y0 + dir * len, kNeutral, kStrokeCord);
    }

    std::string assemble() {
        if (!touched_) {
            min_x_ = max_x_ = min_y_ = max_y_ = 0;
        }
        const double margin = 10;
        const double x = min_x_ - margin;
        const double y = min_y_ - margin;
        const double w = (max_x_ - min_x_) + 2 * margin;
        const double h = (max_y_ - min_y_) + 2 * margin;
        std::string out = "<?xml version=\"1.0\"?>\n";
        out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"" + fmt(x) +
               " " + fmt(y) + " " + fmt(w) + " " + fmt(h) + "\" width=\"" + fmt(w) +
               "\" height=\"" + fmt(h) + "\">\n";
        out += body_;
        out += "</svg>\n";
        return out;
    }
};

}  // namespace

std::string render_svg(const Document& doc) {
    if (doc.maincords.empty()) {
        throw QdfError(codes::EMPTY, "cannot render: document has no maincords");
    }
    return SvgBuilder(doc).run();
}

}  // namespace qdf
