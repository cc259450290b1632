#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "loewner/herglotz.hpp"
#include "loewner/trace.hpp"

namespace loewner {

// ---------------------------------------------------------------------------------------------
// Gallery

struct GalleryEntry {
    std::string name;       ///< prefix of the field id
    std::string params;     ///< parameter schema, e.g. "alpha in (0,2)"
    std::string example;    ///< a valid id
    std::string reference;  ///< what the field illustrates
};

const std::vector<GalleryEntry>& gallery_entries();
std::string gallery_text();
nlohmann::ordered_json gallery_json();

struct GalleryField {
    HerglotzField field;
    /// xi_*(t) bounding real-slice trajectories from above, when known.
    std::function<double(double)> barrier;
};

/// Builds a field from an id such as "hyperbolic:1", "g64:1", "brnp:0.5,sin".
/// Throws ConfigError for unknown names or malformed parameters.
GalleryField make_gallery_field(const std::string& id);

// ---------------------------------------------------------------------------------------------
// Configuration

enum class Operation { evolve, spectral, classify, chain_check, embed, product_formula };
std::string to_string(Operation op);
/// Throws ConfigError for unknown names.
Operation parse_operation(const std::string& name);

struct TimeGrid {
    double begin = 0.0;
    double end = 1.0;
    double step = 0.05;
    /// begin, begin + step, ... up to end inclusive (within 1e-9 step).
    std::vector<double> nodes() const;
    bool operator==(const TimeGrid&) const = default;
};

/// One scenario. Sections and keys of the text form:
///   [scenario]   id, operation, expected_verdict
///   [field]      id
///   [grid]       t_begin, t_end, t_step, s, points, r_max, slice, sigma, horizon, t0, v0, span, ns, lambda_shape
///   [tolerances] rtol, atol, scale, invariant
///   [output]     dir, csv, json, plot
struct ScenarioConfig {
    std::string id = "scenario";
    Operation operation = Operation::evolve;
    std::string expected_verdict;

    std::string field = "hyperbolic:1";

    TimeGrid times;
    double s = 0.0;                      ///< initial time of the flows
    std::size_t points = 50;             ///< disc grid size
    double r_max = 0.95;
    std::vector<double> slice{0.9, 0.99, 0.999};
    std::optional<double> sigma;         ///< boundary point angle
    double horizon = 0.0;                ///< classification horizon, <= 0 for the default
    double t0 = 1.0;                     ///< embedding time / product formula freeze time
    double v0 = 0.0;                     ///< parabolic translation of the embedding
    double span = 0.1;                   ///< product formula time t
    std::vector<int> ns{2, 4, 8, 16, 32};
    std::string lambda_shape = "sine";   ///< embedding prescription: sine or linear

    double rtol = 1e-10;
    double atol = 1e-12;
    double scale = 1.0;                  ///< multiplies rtol and atol
    double invariant = 1e-4;             ///< spectral discrepancy / product formula error bound

    std::string out_dir = ".";
    bool csv = true;
    bool json = true;
    std::string plot;                    ///< empty, lambda, fan or trajectory

    bool operator==(const ScenarioConfig&) const = default;
};

/// Throws ConfigError carrying "source:line:column: message" for syntax errors, unknown
/// sections or keys, duplicates and malformed values.
ScenarioConfig parse_config(std::string_view text, std::string_view source = "<config>");
ScenarioConfig load_config(const std::string& path);
/// Canonical text form; parse_config(emit_config(c)) == c.
std::string emit_config(const ScenarioConfig& config);
/// FNV-1a 64 of the canonical text, as 16 hex digits.
std::string config_hash(const ScenarioConfig& config);

/// Default scenario for an operation, matching the CLI subcommand defaults.
ScenarioConfig default_config(Operation op);

// ---------------------------------------------------------------------------------------------
// Running

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int config = 1;
inline constexpr int invariant = 2;
inline constexpr int solver = 3;
}  // namespace exit_code

struct RunOptions {
    unsigned parallel = 1;  ///< worker threads for grid sweeps
    bool write = true;      ///< write artifacts under out_dir
};

struct ScenarioResult {
    int exit_status = exit_code::ok;
    TraceRecord trace;
    std::vector<std::string> artifacts;
    std::vector<std::string> messages;
};

/// Runs the operation, writes <id>.csv, <id>.json and <id>.svg (when plot is set) and maps
/// outcomes to exit codes: 0 success, 1 configuration error, 2 invariant violation, 3 solver error.
ScenarioResult run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

/// Calls body(i) for i in [0, n) on `workers` threads; each index is visited exactly once and
/// the first exception is rethrown after all workers finish.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body);

}  // namespace loewner
