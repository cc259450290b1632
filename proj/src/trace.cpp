#include "loewner/trace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "loewner/errors.hpp"

namespace loewner {

namespace {

std::string num17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x + 0.0);
    return buf;
}

std::string num(const char* f, double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

nlohmann::ordered_json real_json(double x) {
    if (!std::isfinite(x)) return nullptr;
    return x + 0.0;
}

double real_from_json(const nlohmann::ordered_json& j) { return j.is_null() ? NAN : j.get<double>(); }

}  // namespace

void TraceRecord::add_real(std::string name, const std::vector<double>& values) {
    TraceColumn c{std::move(name), false, {}};
    c.values.assign(values.begin(), values.end());
    columns.push_back(std::move(c));
}

void TraceRecord::add_complex(std::string name, std::vector<Complex> values) {
    columns.push_back({std::move(name), true, std::move(values)});
}

const TraceColumn* TraceRecord::column(const std::string& name) const {
    for (const auto& c : columns) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

void TraceRecord::validate() const {
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) {
            throw ValidationError("trace " + scenario + ": " + index_name + " not strictly increasing at row " +
                                  std::to_string(i));
        }
    }
    for (const auto& c : columns) {
        if (c.values.size() != times.size()) {
            throw ValidationError("trace " + scenario + ": column " + c.name + " has " +
                                  std::to_string(c.values.size()) + " values for " + std::to_string(times.size()) +
                                  " rows");
        }
    }
}

std::string TraceRecord::to_csv() const {
    validate();
    std::string out = index_name;
    for (const auto& c : columns) {
        if (c.is_complex) {
            out += "," + c.name + "_re," + c.name + "_im";
        } else {
            out += "," + c.name;
        }
    }
    out += '\n';
    for (std::size_t i = 0; i < times.size(); ++i) {
        out += num17(times[i]);
        for (const auto& c : columns) {
            out += ',' + num17(c.values[i].real());
            if (c.is_complex) out += ',' + num17(c.values[i].imag());
        }
        out += '\n';
    }
    return out;
}

nlohmann::ordered_json TraceRecord::to_json() const {
    validate();
    nlohmann::ordered_json j;
    j["scenario"] = scenario;
    j["field"] = field;
    j["index"] = index_name;
    j["params"] = params;
    auto& ts = j["times"] = nlohmann::ordered_json::array();
    for (double t : times) ts.push_back(real_json(t));
    auto& cols = j["columns"] = nlohmann::ordered_json::object();
    for (const auto& c : columns) {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& v : c.values) {
            if (c.is_complex) {
                arr.push_back({{"re", real_json(v.real())}, {"im", real_json(v.imag())}});
            } else {
                arr.push_back(real_json(v.real()));
            }
        }
        cols[c.name] = std::move(arr);
    }
    j["verdicts"] = verdicts;
    j["provenance"] = provenance;
    return j;
}

TraceRecord TraceRecord::from_json(const nlohmann::ordered_json& j) {
    TraceRecord tr;
    try {
        tr.scenario = j.at("scenario").get<std::string>();
        tr.field = j.at("field").get<std::string>();
        tr.index_name = j.value("index", std::string("t"));
        tr.params = j.value("params", nlohmann::ordered_json::object());
        tr.verdicts = j.value("verdicts", nlohmann::ordered_json::object());
        tr.provenance = j.value("provenance", nlohmann::ordered_json::object());
        for (const auto& t : j.at("times")) tr.times.push_back(real_from_json(t));
        for (const auto& [name, arr] : j.at("columns").items()) {
            TraceColumn c;
            c.name = name;
            c.is_complex = !arr.empty() && arr.front().is_object();
            for (const auto& v : arr) {
                c.values.push_back(c.is_complex ? Complex(real_from_json(v.at("re")), real_from_json(v.at("im")))
                                                : Complex(real_from_json(v)));
            }
            tr.columns.push_back(std::move(c));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("trace json: ") + e.what());
    }
    tr.validate();
    return tr;
}

PlotKind parse_plot_kind(const std::string& name) {
    if (name == "lambda") return PlotKind::lambda;
    if (name == "fan") return PlotKind::fan;
    if (name == "trajectory") return PlotKind::trajectory;
    throw ValidationError("unknown plot kind '" + name + "' (expected lambda, fan or trajectory)");
}

std::string to_string(PlotKind kind) {
    switch (kind) {
        case PlotKind::lambda: return "lambda";
        case PlotKind::fan: return "fan";
        case PlotKind::trajectory: return "trajectory";
    }
    return "?";
}

namespace {

struct Series {
    std::string label;
    const TraceColumn* col;
    bool dashed;
};

constexpr double kWidth = 800, kHeight = 600;
constexpr double kLeft = 90, kRight = 170, kTop = 50, kBottom = 70;
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string render_plot(const TraceRecord& trace, PlotKind kind) {
    if (trace.empty()) throw ValidationError("plot: trace " + trace.scenario + " is empty");
    trace.validate();

    std::vector<Series> series;
    std::string ylabel;
    auto need = [&](const std::string& name, bool dashed) {
        const auto* c = trace.column(name);
        if (!c) throw ValidationError("plot " + to_string(kind) + ": trace has no column '" + name + "'");
        series.push_back({name, c, dashed});
    };
    switch (kind) {
        case PlotKind::lambda:
            need("lambda_direct", false);
            need("lambda_integral", true);
            ylabel = "Lambda(t)";
            break;
        case PlotKind::fan:
            for (const auto& c : trace.columns) {
                if (c.name.rfind("xi_", 0) == 0 && !c.is_complex) series.push_back({c.name, &c, false});
            }
            if (series.empty()) throw ValidationError("plot fan: trace has no xi_* columns");
            if (trace.column("barrier")) need("barrier", true);
            ylabel = "xi_x(t)";
            break;
        case PlotKind::trajectory:
            need("theta", false);
            ylabel = "theta(t)";
            break;
    }

    double x0 = trace.times.front(), x1 = trace.times.back();
    double y0 = INFINITY, y1 = -INFINITY;
    for (const auto& s : series) {
        for (const auto& v : s.col->values) {
            if (std::isfinite(v.real())) {
                y0 = std::min(y0, v.real());
                y1 = std::max(y1, v.real());
            }
        }
    }
    if (!std::isfinite(y0)) throw ValidationError("plot: no finite values to draw");
    if (x1 <= x0) x1 = x0 + 1.0;
    if (y1 - y0 < 1e-12 * (1.0 + std::abs(y0))) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;

    const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    auto X = [&](double x) { return kLeft + pw * (x - x0) / (x1 - x0); };
    auto Y = [&](double y) { return kTop + ph * (1.0 - (y - y0) / (y1 - y0)); };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 600\" width=\"800\" height=\"600\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n";
    svg += "<text x=\"400\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
           escape(trace.scenario + " (" + trace.field + ", " + to_string(kind) + ")") + "</text>\n";
    svg += "<rect x=\"" + num("%.2f", kLeft) + "\" y=\"" + num("%.2f", kTop) + "\" width=\"" + num("%.2f", pw) +
           "\" height=\"" + num("%.2f", ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double xv = x0 + (x1 - x0) * i / 5.0;
        const double yv = y0 + (y1 - y0) * i / 5.0;
        svg += "<line x1=\"" + num("%.2f", X(xv)) + "\" y1=\"" + num("%.2f", kTop + ph) + "\" x2=\"" +
               num("%.2f", X(xv)) + "\" y2=\"" + num("%.2f", kTop + ph + 5) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + num("%.2f", X(xv)) + "\" y=\"" + num("%.2f", kTop + ph + 20) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" + num("%.4g", xv) +
               "</text>\n";
        svg += "<line x1=\"" + num("%.2f", kLeft - 5) + "\" y1=\"" + num("%.2f", Y(yv)) + "\" x2=\"" +
               num("%.2f", kLeft) + "\" y2=\"" + num("%.2f", Y(yv)) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + num("%.2f", kLeft - 8) + "\" y=\"" + num("%.2f", Y(yv) + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + num("%.5g", yv) +
               "</text>\n";
    }
    svg += "<text x=\"" + num("%.2f", kLeft + pw / 2) + "\" y=\"" + num("%.2f", kHeight - 20) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" + escape(trace.index_name) +
           "</text>\n";
    svg += "<text x=\"20\" y=\"" + num("%.2f", kTop + ph / 2) + "\" transform=\"rotate(-90 20 " +
           num("%.2f", kTop + ph / 2) + ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" +
           escape(ylabel) + "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* colour = s.dashed ? "black" : kPalette[k % std::size(kPalette)];
        std::string pts;
        for (std::size_t i = 0; i < trace.times.size(); ++i) {
            const double v = s.col->values[i].real();
            if (!std::isfinite(v)) continue;
            if (!pts.empty()) pts += ' ';
            pts += num("%.3f", X(trace.times[i])) + ',' + num("%.3f", Y(v));
        }
        svg += "<polyline fill=\"none\" stroke=\"" + std::string(colour) + "\" stroke-width=\"1.5\"" +
               (s.dashed ? " stroke-dasharray=\"6 4\"" : "") + " points=\"" + pts + "\"/>\n";
        const double ly = kTop + 16.0 + 18.0 * static_cast<double>(k);
        const double lx = kWidth - kRight + 12.0;
        svg += "<line x1=\"" + num("%.2f", lx) + "\" y1=\"" + num("%.2f", ly) + "\" x2=\"" + num("%.2f", lx + 24) +
               "\" y2=\"" + num("%.2f", ly) + "\" stroke=\"" + colour + "\" stroke-width=\"1.5\"" +
               (s.dashed ? " stroke-dasharray=\"6 4\"" : "") + "/>\n";
        svg += "<text x=\"" + num("%.2f", lx + 30) + "\" y=\"" + num("%.2f", ly + 4) +
               "\" font-family=\"sans-serif\" font-size=\"11\">" + escape(s.label) + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

void emit_plot(const TraceRecord& trace, PlotKind kind, const std::string& path) {
    write_text_file(path, render_plot(trace, kind));
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw LoewnerError("cannot open " + path + " for writing");
    out << text;
    if (!out) throw LoewnerError("write to " + path + " failed");
}

}  // namespace loewner
