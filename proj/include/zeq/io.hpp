#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "characteristics.hpp"
#include "diagnostics.hpp"
#include "theorems.hpp"

namespace zeq {

/// %.17g, with inf / -inf / nan spelled out.
inline std::string format_number(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Short label for a parameter value in a column name.
inline std::string format_label(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open '" + path.string() + "' for writing");
    out << content;
    out.close();
    if (!out)
        throw IoError("write to '" + path.string() + "' failed");
}

inline void ensure_directory(const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir))
        throw IoError("cannot create output directory '" + dir.string() + "'"
                      + (ec ? ": " + ec.message() : std::string()));
}

// ---------------------------------------------------------------------------
// CSV

inline std::vector<std::string> csv_header(const DiagnosticsOptions& opt)
{
    std::vector<std::string> h{"t", "mean_u", "l1_u", "l1_m", "min_m", "max_m", "max_neg_ux", "h1", "h3"};
    for (double s : opt.sobolev_s)
        h.push_back("hs_" + format_label(s));
    for (const char* c : {"c1", "I_functional", "dIdt_residual", "support_lo", "support_hi", "radius_fit",
                          "radius_fit_quality"})
        h.emplace_back(c);
    for (const auto& r : opt.kato_masuda)
        h.push_back("km_sq_" + format_label(r.sigma) + "_" + format_label(r.s) + "_" + format_label(r.J));
    return h;
}

inline std::string diagnostics_csv(const DiagnosticsSeries& s)
{
    std::ostringstream out;
    const auto header = csv_header(s.options);
    for (std::size_t i = 0; i < header.size(); ++i)
        out << (i ? "," : "") << header[i];
    out << "\n";
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& r : s.records) {
        std::vector<double> row{r.t, r.mean_u, r.l1_u, r.l1_m, r.min_m, r.max_m, r.max_neg_ux, r.h1, r.h3};
        row.insert(row.end(), r.hs.begin(), r.hs.end());
        row.insert(row.end(), {r.c1, r.i_functional, r.di_dt_residual, r.support_empty ? nan : r.support_lo,
                               r.support_empty ? nan : r.support_hi, r.radius_fit, r.radius_fit_quality});
        row.insert(row.end(), r.km_sq.begin(), r.km_sq.end());
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << format_number(row[i]);
        out << "\n";
    }
    return out.str();
}

/// E_{sigma,m} norms live in their own table so the main CSV schema stays fixed.
inline std::string em_norms_csv(const DiagnosticsSeries& s)
{
    std::string out = "t";
    for (const auto& r : s.options.em)
        out += ",em_" + format_label(r.sigma) + "_" + format_label(r.m) + "_" + format_label(r.J);
    out += "\n";
    for (const auto& r : s.records) {
        out += format_number(r.t);
        for (double v : r.em)
            out += "," + format_number(v);
        out += "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// JSON with fixed 17-digit numbers

namespace detail {

inline void emit_json(const nlohmann::ordered_json& j, std::ostringstream& out, int indent)
{
    const std::string pad(2 * (indent + 1), ' ');
    const std::string close(2 * indent, ' ');
    switch (j.type()) {
    case nlohmann::json::value_t::object: {
        if (j.empty()) {
            out << "{}";
            return;
        }
        out << "{\n";
        std::size_t i = 0;
        for (const auto& [key, value] : j.items()) {
            out << pad << nlohmann::ordered_json(key).dump() << ": ";
            emit_json(value, out, indent + 1);
            out << (++i < j.size() ? ",\n" : "\n");
        }
        out << close << "}";
        return;
    }
    case nlohmann::json::value_t::array: {
        if (j.empty()) {
            out << "[]";
            return;
        }
        out << "[\n";
        for (std::size_t i = 0; i < j.size(); ++i) {
            out << pad;
            emit_json(j[i], out, indent + 1);
            out << (i + 1 < j.size() ? ",\n" : "\n");
        }
        out << close << "]";
        return;
    }
    case nlohmann::json::value_t::number_float: {
        const double v = j.get<double>();
        if (std::isfinite(v))
            out << format_number(v);
        else
            out << '"' << format_number(v) << '"';
        return;
    }
    default: out << j.dump();
    }
}

} // namespace detail

inline std::string to_json_text(const nlohmann::ordered_json& j)
{
    std::ostringstream out;
    detail::emit_json(j, out, 0);
    out << "\n";
    return out.str();
}

inline nlohmann::ordered_json report_to_json(const TheoremReport& r)
{
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    for (const auto& [name, value] : r.parameters)
        params[name] = value;
    nlohmann::ordered_json j;
    j["claim"] = r.claim;
    j["parameters"] = params;
    j["measured_name"] = r.measured_name;
    j["measured"] = r.measured;
    j["tolerance"] = r.tolerance;
    j["verdict"] = to_string(r.verdict);
    j["notes"] = r.notes;
    return j;
}

inline std::string reports_json(const std::vector<TheoremReport>& reports)
{
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (const auto& r : reports)
        a.push_back(report_to_json(r));
    return to_json_text(a);
}

// ---------------------------------------------------------------------------
// SVG line plots

struct PlotSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;
};

namespace detail {

inline std::string svg_escape(const std::string& s)
{
    std::string o;
    for (char c : s) {
        switch (c) {
        case '<': o += "&lt;"; break;
        case '>': o += "&gt;"; break;
        case '&': o += "&amp;"; break;
        default: o += c;
        }
    }
    return o;
}

inline std::string fmt_coord(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

} // namespace detail

/// Static polyline plot.  Non-finite points (and nonpositive ones on a log axis) break the line.
inline std::string svg_line_plot(const PlotSpec& spec, const std::vector<PlotSeries>& series)
{
    constexpr double W = 640, H = 400, left = 80, right = 150, top = 40, bottom = 50;
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};
    const auto ty = [&](double y) { return spec.log_y ? std::log10(y) : y; };
    const auto usable = [&](double x, double y) { return std::isfinite(x) && std::isfinite(y) && (!spec.log_y || y > 0); };

    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (const auto& s : series)
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i)
            if (usable(s.x[i], s.y[i])) {
                x0 = std::min(x0, s.x[i]);
                x1 = std::max(x1, s.x[i]);
                y0 = std::min(y0, ty(s.y[i]));
                y1 = std::max(y1, ty(s.y[i]));
            }
    if (x0 > x1) {
        x0 = 0;
        x1 = 1;
        y0 = 0;
        y1 = 1;
    }
    if (x1 == x0)
        x1 = x0 + 1;
    if (y1 == y0) {
        y0 -= 0.5 * std::max(1.0, std::abs(y0));
        y1 += 0.5 * std::max(1.0, std::abs(y1));
    }
    const double pw = W - left - right, ph = H - top - bottom;
    const auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    const auto py = [&](double y) { return top + (1.0 - (ty(y) - y0) / (y1 - y0)) * ph; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << detail::svg_escape(spec.title) << "</text>\n";
    o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double fx = x0 + (x1 - x0) * i / 4.0, fy = y0 + (y1 - y0) * i / 4.0;
        const double sx = left + pw * i / 4.0, sy = top + ph * (1.0 - i / 4.0);
        char lx[32], ly[32];
        std::snprintf(lx, sizeof lx, "%.3g", fx);
        if (spec.log_y)
            std::snprintf(ly, sizeof ly, "1e%.2g", fy);
        else
            std::snprintf(ly, sizeof ly, "%.3g", fy);
        o << "<text x=\"" << detail::fmt_coord(sx) << "\" y=\"" << H - bottom + 16 << "\" text-anchor=\"middle\">" << lx << "</text>\n";
        o << "<text x=\"" << left - 6 << "\" y=\"" << detail::fmt_coord(sy + 4) << "\" text-anchor=\"end\">" << ly << "</text>\n";
    }
    o << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << detail::svg_escape(spec.x_label) << "</text>\n";
    o << "<text x=\"16\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << top + ph / 2 << ")\">"
      << detail::svg_escape(spec.y_label + (spec.log_y ? " (log)" : "")) << "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = colors[k % std::size(colors)];
        std::string pts;
        auto flush = [&] {
            if (!pts.empty())
                o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"" << pts << "\"/>\n";
            pts.clear();
        };
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!usable(s.x[i], s.y[i])) {
                flush();
                continue;
            }
            pts += (pts.empty() ? "" : " ") + detail::fmt_coord(px(s.x[i])) + "," + detail::fmt_coord(py(s.y[i]));
        }
        flush();
        if (!s.name.empty() && k < 12) {
            const double ly = top + 14 + 16.0 * k;
            o << "<line x1=\"" << W - right + 10 << "\" y1=\"" << ly - 4 << "\" x2=\"" << W - right + 30 << "\" y2=\"" << ly - 4
              << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
            o << "<text x=\"" << W - right + 34 << "\" y=\"" << ly << "\">" << detail::svg_escape(s.name) << "</text>\n";
        }
    }
    o << "</svg>\n";
    return o.str();
}

/// |fhat(xi)| against xi >= 0.
inline PlotSeries spectrum_series(const Field& u, const std::string& name)
{
    const Spectrum S = to_spectrum(u);
    PlotSeries p{name, {}, {}};
    for (std::size_t j = 0; j <= S.size() / 2; ++j) {
        p.x.push_back(S.grid.wavenumber(j));
        p.y.push_back(std::abs(S.coeffs[j]));
    }
    return p;
}

/// Plots produced for a diagnostics run; returns file name and contents.
inline std::vector<std::pair<std::string, std::string>> run_plots(const DiagnosticsSeries& s, const Field& u_final,
                                                                  const FlowHistory* flow = nullptr)
{
    std::vector<std::pair<std::string, std::string>> files;
    PlotSeries h1{"H1", {}, {}}, h3{"H3", {}, {}}, c1{"C1", {}, {}}, lo{"support_lo", {}, {}}, hi{"support_hi", {}, {}};
    for (const auto& r : s.records) {
        h1.x.push_back(r.t);
        h1.y.push_back(r.h1);
        h3.x.push_back(r.t);
        h3.y.push_back(r.h3);
        c1.x.push_back(r.t);
        c1.y.push_back(r.c1);
        lo.x.push_back(r.t);
        lo.y.push_back(r.support_empty ? std::numeric_limits<double>::quiet_NaN() : r.support_lo);
        hi.x.push_back(r.t);
        hi.y.push_back(r.support_empty ? std::numeric_limits<double>::quiet_NaN() : r.support_hi);
    }
    files.emplace_back("norms.svg", svg_line_plot({"Norms against time", "t", "norm", true}, {h1, h3, c1}));
    files.emplace_back("support.svg", svg_line_plot({"Support interval", "t", "x", false}, {lo, hi}));
    files.emplace_back("spectrum.svg",
                       svg_line_plot({"Spectrum decay", "xi", "|u hat|", true},
                                     {spectrum_series(s.u0, "t = 0"), spectrum_series(u_final, "final")}));
    if (flow && !flow->maps.empty()) {
        const auto& seeds = flow->maps.front().seeds;
        const std::size_t every = std::max<std::size_t>(1, seeds.size() / 24);
        std::vector<PlotSeries> lines;
        for (std::size_t i = 0; i < seeds.size(); i += every) {
            PlotSeries p{"", {}, {}};
            for (const auto& m : flow->maps) {
                p.x.push_back(m.t);
                p.y.push_back(m.positions[i]);
            }
            lines.push_back(std::move(p));
        }
        files.emplace_back("flow_map.svg", svg_line_plot({"Characteristics y(t, x)", "t", "y", false}, lines));
    }
    return files;
}

} // namespace zeq
