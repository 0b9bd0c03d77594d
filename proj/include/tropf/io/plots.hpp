#pragma once

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tropf/io/results.hpp"

namespace tropf::io {

struct Series {
    std::string label;
    std::vector<double> y;  // one value per hour
};

struct Panel {
    std::string title;
    std::string y_label;
    std::vector<Series> series;
    std::vector<double> bounds;  // horizontal reference lines
    bool step = false;           // draw as a staircase (piecewise constant per hour)
};

/// Which elements the voltage and flow figures trace. Ids missing from the
/// case are skipped; if none remain, the first few elements are used.
struct PlotOptions {
    std::vector<NodeId> voltage_nodes{6, 10, 24};
    std::vector<int> flow_lines{2, 4};
};

namespace detail {

inline std::string fixed(double v, int digits = 2) {
    if (v == 0.0) v = 0.0;
    char buf[48];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, digits);
    std::string s(buf, res.ptr);
    return s == "-0.00" || s == "-0.0" ? s.substr(1) : s;
}

inline std::string escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += ch;
        }
    }
    return out;
}

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

}  // namespace detail

/// Renders stacked line-chart panels sharing an hour axis (hours 1..T).
inline std::string render_svg(const std::string& title, const std::vector<Panel>& panels, int hours) {
    using detail::fixed;
    const double width = 780, left = 70, right = 170, top = 40, panel_h = 220, gap = 60;
    const double plot_w = width - left - right;
    const double height = top + static_cast<double>(panels.size()) * (panel_h + gap) + 10;

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(width, 0) << "\" height=\"" << fixed(height, 0)
      << "\" viewBox=\"0 0 " << fixed(width, 0) << ' ' << fixed(height, 0) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<text x=\"" << fixed(width / 2, 0) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
      << detail::escape(title) << "</text>\n";

    const double span_h = std::max(hours - 1, 1);
    auto x_of = [&](double hour) { return left + (hour - 1.0) / span_h * plot_w; };

    for (std::size_t p = 0; p < panels.size(); ++p) {
        const Panel& panel = panels[p];
        const double y0 = top + static_cast<double>(p) * (panel_h + gap) + 20;

        double lo = lp::kInf, hi = -lp::kInf;
        for (const auto& sr : panel.series)
            for (double v : sr.y) lo = std::min(lo, v), hi = std::max(hi, v);
        for (double b : panel.bounds) lo = std::min(lo, b), hi = std::max(hi, b);
        if (!(lo <= hi)) lo = 0.0, hi = 1.0;
        if (hi - lo < 1e-9) lo -= 0.5, hi += 0.5;
        const double pad = 0.06 * (hi - lo);
        lo -= pad;
        hi += pad;
        auto y_of = [&](double v) { return y0 + (hi - v) / (hi - lo) * panel_h; };

        s << "<g class=\"panel\" data-index=\"" << p << "\">\n";
        s << "<text x=\"" << fixed(left, 0) << "\" y=\"" << fixed(y0 - 6) << "\" font-size=\"12\">"
          << detail::escape(panel.title) << "</text>\n";
        s << "<rect x=\"" << fixed(left) << "\" y=\"" << fixed(y0) << "\" width=\"" << fixed(plot_w) << "\" height=\""
          << fixed(panel_h) << "\" fill=\"none\" stroke=\"black\"/>\n";

        for (int t = 0; t <= 4; ++t) {
            const double v = lo + (hi - lo) * t / 4.0;
            const double y = y_of(v);
            s << "<line x1=\"" << fixed(left - 4) << "\" y1=\"" << fixed(y) << "\" x2=\"" << fixed(left) << "\" y2=\""
              << fixed(y) << "\" stroke=\"black\"/>";
            s << "<text x=\"" << fixed(left - 6) << "\" y=\"" << fixed(y + 4) << "\" text-anchor=\"end\">"
              << fixed(v, 3) << "</text>\n";
        }
        const int stride = hours > 12 ? 2 : 1;
        for (int h = 1; h <= hours; h += stride) {
            const double x = x_of(h);
            s << "<text x=\"" << fixed(x) << "\" y=\"" << fixed(y0 + panel_h + 14) << "\" text-anchor=\"middle\">" << h
              << "</text>\n";
        }
        s << "<text x=\"" << fixed(left + plot_w / 2) << "\" y=\"" << fixed(y0 + panel_h + 30)
          << "\" text-anchor=\"middle\">hour</text>\n";
        s << "<text transform=\"translate(14," << fixed(y0 + panel_h / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
          << detail::escape(panel.y_label) << "</text>\n";

        for (double b : panel.bounds) {
            const double y = y_of(b);
            s << "<line class=\"bound\" data-value=\"" << format_value(b) << "\" x1=\"" << fixed(left) << "\" y1=\""
              << fixed(y) << "\" x2=\"" << fixed(left + plot_w) << "\" y2=\"" << fixed(y)
              << "\" stroke=\"#c00000\" stroke-dasharray=\"6 4\"/>\n";
        }

        for (std::size_t i = 0; i < panel.series.size(); ++i) {
            const Series& sr = panel.series[i];
            const char* color = detail::kPalette[i % std::size(detail::kPalette)];
            s << "<polyline class=\"series\" data-label=\"" << detail::escape(sr.label)
              << "\" fill=\"none\" stroke-width=\"1.6\" stroke=\"" << color << "\" points=\"";
            for (std::size_t h = 0; h < sr.y.size(); ++h) {
                const double hour = static_cast<double>(h) + 1.0;
                if (panel.step && h > 0) s << fixed(x_of(hour)) << ',' << fixed(y_of(sr.y[h - 1])) << ' ';
                s << fixed(x_of(hour)) << ',' << fixed(y_of(sr.y[h])) << (h + 1 < sr.y.size() ? " " : "");
            }
            s << "\"/>\n";
            const double ly = y0 + 12 + 16 * static_cast<double>(i);
            s << "<line x1=\"" << fixed(left + plot_w + 12) << "\" y1=\"" << fixed(ly) << "\" x2=\""
              << fixed(left + plot_w + 32) << "\" y2=\"" << fixed(ly) << "\" stroke=\"" << color
              << "\" stroke-width=\"2\"/>";
            s << "<text x=\"" << fixed(left + plot_w + 38) << "\" y=\"" << fixed(ly + 4) << "\">"
              << detail::escape(sr.label) << "</text>\n";
        }
        s << "</g>\n";
    }
    s << "</svg>\n";
    return s.str();
}

namespace detail {

inline std::vector<double> row_of(const Grid& g, int r) {
    auto span = g.row(r);
    return {span.begin(), span.end()};
}

inline std::vector<int> pick(const std::vector<int>& wanted, int count, int fallback, auto id_at) {
    std::vector<int> out;
    for (int id : wanted)
        for (int i = 0; i < count; ++i)
            if (id_at(i) == id) out.push_back(i);
    if (out.empty())
        for (int i = 0; i < std::min(count, fallback); ++i) out.push_back(i);
    return out;
}

inline const char* stage_title(int stage) {
    return stage == 1 ? "Stage 1: base dispatch" : stage == 2 ? "Stage 2: worst-case attack" : "Stage 3: storage response";
}

}  // namespace detail

inline std::vector<Panel> attack_panels(const NetworkCase& c, const ScenarioResult& r) {
    Panel p{"Attack status per attackable generator", "y (0 intact, 1 lost)", {}, {}, true};
    if (r.attack)
        for (std::size_t i = 0; i < r.attack->attack.generators.size(); ++i) {
            const auto& g = c.generators[static_cast<std::size_t>(r.attack->attack.generators[i])];
            p.series.push_back({"DG @ node " + std::to_string(g.node), detail::row_of(r.attack->attack.y, static_cast<int>(i))});
        }
    return {p};
}

inline std::vector<Panel> storage_panels(const NetworkCase& c, const ScenarioResult& r) {
    Panel out{"Storage output (discharge positive)", "p_ess (pu)", {}, {}, true};
    Panel soc{"State of charge", "soc (fraction of capacity)", {}, {}, false};
    std::set<double> soc_bounds;
    if (r.mitigation)
        for (std::size_t u = 0; u < c.storage.size(); ++u) {
            const std::string label = "ESS @ node " + std::to_string(c.storage[u].node);
            out.series.push_back({label, detail::row_of(r.mitigation->p_ess, static_cast<int>(u))});
            soc.series.push_back({label, detail::row_of(r.mitigation->soc, static_cast<int>(u))});
            soc_bounds.insert(c.storage[u].soc_min);
            soc_bounds.insert(c.storage[u].soc_max);
        }
    soc.bounds.assign(soc_bounds.begin(), soc_bounds.end());
    return {out, soc};
}

inline std::vector<Panel> voltage_panels(const NetworkCase& c, const ScenarioResult& r, const PlotOptions& opt = {}) {
    const auto nodes = detail::pick(opt.voltage_nodes, c.num_nodes(), 3,
                                    [&](int i) { return c.nodes[static_cast<std::size_t>(i)].id; });
    std::set<double> bounds;
    for (int i : nodes) {
        bounds.insert(c.nodes[static_cast<std::size_t>(i)].v_min);
        bounds.insert(c.nodes[static_cast<std::size_t>(i)].v_max);
    }
    std::vector<Panel> panels;
    for (int stage = 1; stage <= 3; ++stage) {
        const SystemState* s = detail::stage_state(r, stage);
        if (!s) continue;
        Panel p{detail::stage_title(stage), "voltage magnitude (pu)", {}, {bounds.begin(), bounds.end()}, false};
        for (int i : nodes) {
            std::vector<double> mag;
            for (double v : s->v.row(i)) mag.push_back(voltage_magnitude(v));
            p.series.push_back({"node " + std::to_string(c.nodes[static_cast<std::size_t>(i)].id), mag});
        }
        panels.push_back(std::move(p));
    }
    return panels;
}

inline std::vector<Panel> flow_panels(const NetworkCase& c, const ScenarioResult& r, const PlotOptions& opt = {}) {
    const auto lines = detail::pick(opt.flow_lines, c.num_lines(), 2,
                                    [&](int l) { return c.lines[static_cast<std::size_t>(l)].id; });
    std::set<double> bounds;
    for (int l : lines) {
        bounds.insert(c.lines[static_cast<std::size_t>(l)].pf_min);
        bounds.insert(c.lines[static_cast<std::size_t>(l)].pf_max);
    }
    std::vector<Panel> panels;
    for (int stage = 1; stage <= 3; ++stage) {
        const SystemState* s = detail::stage_state(r, stage);
        if (!s) continue;
        Panel p{detail::stage_title(stage), "active flow (pu)", {}, {bounds.begin(), bounds.end()}, false};
        for (int l : lines) {
            const auto& line = c.lines[static_cast<std::size_t>(l)];
            p.series.push_back({"line " + std::to_string(line.id) + " (" + std::to_string(line.from_node) + "-" +
                                    std::to_string(line.to_node) + ")",
                                detail::row_of(s->pf, l)});
        }
        panels.push_back(std::move(p));
    }
    return panels;
}

/// attack_status.svg, storage.svg, voltage.svg and flow.svg in `dir`.
inline void write_plots(const NetworkCase& c, const ScenarioResult& r, const std::filesystem::path& dir,
                        const PlotOptions& opt = {}) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ResultsError("cannot create '" + dir.string() + "': " + ec.message());
    const int T = c.horizon_hours;
    detail::write_file(dir / "attack_status.svg", render_svg("Attack status", attack_panels(c, r), T));
    detail::write_file(dir / "storage.svg", render_svg("Storage schedule", storage_panels(c, r), T));
    detail::write_file(dir / "voltage.svg", render_svg("Node voltages", voltage_panels(c, r, opt), T));
    detail::write_file(dir / "flow.svg", render_svg("Line active flows", flow_panels(c, r, opt), T));
}

}  // namespace tropf::io
