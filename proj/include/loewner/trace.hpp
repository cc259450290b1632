#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "loewner/disc.hpp"

namespace loewner {

struct TraceColumn {
    std::string name;
    bool is_complex = false;
    std::vector<Complex> values;
};

/// Rows of named real/complex columns indexed by a strictly increasing abscissa.
class TraceRecord {
public:
    std::string scenario;
    std::string field;
    /// Name of the index column ("t" for time traces, "n" for product formula sweeps).
    std::string index_name = "t";
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    nlohmann::ordered_json verdicts = nlohmann::ordered_json::object();
    nlohmann::ordered_json provenance = nlohmann::ordered_json::object();
    std::vector<double> times;
    std::vector<TraceColumn> columns;

    void add_real(std::string name, const std::vector<double>& values);
    void add_complex(std::string name, std::vector<Complex> values);
    const TraceColumn* column(const std::string& name) const;
    bool empty() const { return times.empty(); }

    /// Throws ValidationError unless every column has one value per row and the index increases.
    void validate() const;

    /// Header row then one line per row; complex columns split into name_re, name_im; %.17g.
    std::string to_csv() const;
    nlohmann::ordered_json to_json() const;
    static TraceRecord from_json(const nlohmann::ordered_json& j);
};

enum class PlotKind { lambda, fan, trajectory };
PlotKind parse_plot_kind(const std::string& name);
std::string to_string(PlotKind kind);

/// SVG document, 800x600 viewBox.
///   lambda:     lambda_direct and lambda_integral against t
///   fan:        every xi_* column against t, with the barrier column dashed when present
///   trajectory: theta against t
/// Throws ValidationError for an empty trace or missing columns.
std::string render_plot(const TraceRecord& trace, PlotKind kind);
/// Renders first, so nothing is written when the trace does not match the kind.
void emit_plot(const TraceRecord& trace, PlotKind kind, const std::string& path);

/// Writes text to path, throwing LoewnerError on I/O failure.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace loewner
