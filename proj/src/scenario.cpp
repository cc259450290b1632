#include "loewner/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "loewner/boundary.hpp"
#include "loewner/chains.hpp"
#include "loewner/errors.hpp"
#include "loewner/evolution.hpp"
#include "loewner/semigroup.hpp"

namespace loewner {

namespace {

std::string num17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string numg(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::optional<double> to_double(std::string_view s) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || p != end || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------------------------
// Gallery

const std::vector<GalleryEntry>& gallery_entries() {
    static const std::vector<GalleryEntry> entries = {
        {"rot", "none", "rot", "rotation iz; every boundary point moves along the circle"},
        {"hyperbolic", "lambda real", "hyperbolic:1",
         "autonomous hyperbolic generator (lambda/2)(1 - z^2); closed-form flow through the Cayley map"},
        {"hyperbolic-rot", "lambda real, theta angle", "hyperbolic-rot:1,0.5",
         "hyperbolic generator rotated by e^{i theta}; regular fixed points at e^{i theta} and -e^{i theta}"},
        {"g64", "alpha in (0,2)", "g64:1",
         "G_{lambda,r} with 1 - r = (2/alpha - 1)(e^{alpha t} - 1): non-integrable dilation, the fixed "
         "point 1 is lost to the interior, real-slice trajectories stay below e^{-alpha t}"},
        {"g65", "beta > 2", "g65:3",
         "G_{lambda,r} with 1 - r = beta t: non-integrable dilation at t = 0, 1 stays a boundary fixed "
         "point without being regular"},
        {"brnp", "theta angle, lambda real or 'sin'", "brnp:0,1",
         "pinned field (lambda(t)/2) conj(sigma)(z - sigma)(z + sigma) with a regular null point at "
         "sigma = e^{i theta}; 'sin' selects lambda(t) = sin t"},
    };
    return entries;
}

std::string gallery_text() {
    std::string out;
    for (const auto& e : gallery_entries()) {
        out += e.name + "\n  params:    " + e.params + "\n  example:   " + e.example + "\n  reference: " + e.reference +
               "\n";
    }
    return out;
}

nlohmann::ordered_json gallery_json() {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& e : gallery_entries()) {
        arr.push_back({{"name", e.name}, {"params", e.params}, {"example", e.example}, {"reference", e.reference}});
    }
    return arr;
}

GalleryField make_gallery_field(const std::string& id) {
    const auto colon = id.find(':');
    const std::string name = id.substr(0, colon);
    const std::vector<std::string> args =
        colon == std::string::npos ? std::vector<std::string>{} : split(id.substr(colon + 1), ',');
    auto arity = [&](std::size_t n) {
        if (args.size() != n) {
            throw ConfigError("field '" + id + "': expected " + std::to_string(n) + " parameter(s), got " +
                              std::to_string(args.size()));
        }
    };
    auto arg = [&](std::size_t i) {
        const auto v = to_double(args[i]);
        if (!v) throw ConfigError("field '" + id + "': parameter " + std::to_string(i + 1) + " '" + args[i] +
                                  "' is not a number");
        return *v;
    };

    GalleryField gf{rotation_field(), {}};
    if (name == "rot") {
        arity(0);
    } else if (name == "hyperbolic") {
        arity(1);
        gf.field = hyperbolic_field(arg(0));
    } else if (name == "hyperbolic-rot") {
        arity(2);
        gf.field = rotated_hyperbolic_field(arg(0), arg(1));
    } else if (name == "g64") {
        arity(1);
        const double alpha = arg(0);
        if (!(alpha > 0.0 && alpha < 2.0)) throw ConfigError("field '" + id + "': alpha must lie in (0,2)");
        const auto ex = example64_field(alpha);
        gf.field = ex.field();
        gf.barrier = ex.singular_solution;
    } else if (name == "g65") {
        arity(1);
        const double beta = arg(0);
        if (!(beta > 2.0)) throw ConfigError("field '" + id + "': beta must exceed 2");
        gf.field = example65_field(beta).field();
    } else if (name == "brnp") {
        arity(2);
        const double theta = arg(0);
        if (args[1] == "sin") {
            gf.field = pinned_field(BoundaryPoint(theta), TimeFunction([](double t) { return std::sin(t); }), id);
        } else {
            gf.field = pinned_field(BoundaryPoint(theta), TimeFunction::constant(arg(1)), id);
        }
    } else {
        throw ConfigError("unknown field '" + id + "' (see the gallery subcommand)");
    }
    return gf;
}

// ---------------------------------------------------------------------------------------------
// Configuration

std::string to_string(Operation op) {
    switch (op) {
        case Operation::evolve: return "evolve";
        case Operation::spectral: return "spectral";
        case Operation::classify: return "classify";
        case Operation::chain_check: return "chain-check";
        case Operation::embed: return "embed";
        case Operation::product_formula: return "product-formula";
    }
    return "?";
}

Operation parse_operation(const std::string& name) {
    for (auto op : {Operation::evolve, Operation::spectral, Operation::classify, Operation::chain_check,
                    Operation::embed, Operation::product_formula}) {
        if (to_string(op) == name) return op;
    }
    throw ConfigError("unknown operation '" + name + "'");
}

std::vector<double> TimeGrid::nodes() const {
    std::vector<double> out;
    const auto n = static_cast<long>(std::floor((end - begin) / step + 1e-9));
    for (long k = 0; k <= n; ++k) out.push_back(begin + step * static_cast<double>(k));
    return out;
}

namespace {

struct Entry {
    std::string value;
    int line;
    int column;  ///< column of the value
};

using Sections = std::map<std::string, std::map<std::string, Entry>>;

const std::map<std::string, std::vector<std::string>>& known_keys() {
    static const std::map<std::string, std::vector<std::string>> keys = {
        {"scenario", {"id", "operation", "expected_verdict"}},
        {"field", {"id"}},
        {"grid", {"t_begin", "t_end", "t_step", "s", "points", "r_max", "slice", "sigma", "horizon", "t0", "v0", "span",
                  "ns", "lambda_shape"}},
        {"tolerances", {"rtol", "atol", "scale", "invariant"}},
        {"output", {"dir", "csv", "json", "plot"}},
    };
    return keys;
}

class Reader {
public:
    Reader(const Sections& sec, std::string_view source) : sec_(sec), source_(source) {}

    [[noreturn]] void fail(const Entry& e, const std::string& msg) const {
        throw ConfigError(std::string(source_) + ":" + std::to_string(e.line) + ":" + std::to_string(e.column) + ": " +
                              msg,
                          e.line, e.column);
    }

    const Entry* find(const std::string& section, const std::string& key) const {
        const auto s = sec_.find(section);
        if (s == sec_.end()) return nullptr;
        const auto k = s->second.find(key);
        return k == s->second.end() ? nullptr : &k->second;
    }

    void str(const std::string& section, const std::string& key, std::string& out) const {
        if (const auto* e = find(section, key)) out = e->value;
    }

    void real(const std::string& section, const std::string& key, double& out) const {
        if (const auto* e = find(section, key)) {
            const auto v = to_double(e->value);
            if (!v) fail(*e, key + ": expected a finite number, got '" + e->value + "'");
            out = *v;
        }
    }

    void count(const std::string& section, const std::string& key, std::size_t& out) const {
        if (const auto* e = find(section, key)) {
            std::size_t v = 0;
            const auto* end = e->value.data() + e->value.size();
            const auto [p, ec] = std::from_chars(e->value.data(), end, v);
            if (ec != std::errc() || p != end) fail(*e, key + ": expected a non-negative integer, got '" + e->value + "'");
            out = v;
        }
    }

    void boolean(const std::string& section, const std::string& key, bool& out) const {
        if (const auto* e = find(section, key)) {
            if (e->value == "true") {
                out = true;
            } else if (e->value == "false") {
                out = false;
            } else {
                fail(*e, key + ": expected true or false, got '" + e->value + "'");
            }
        }
    }

    void reals(const std::string& section, const std::string& key, std::vector<double>& out) const {
        if (const auto* e = find(section, key)) {
            out.clear();
            for (const auto& item : split(e->value, ',')) {
                const auto v = to_double(item);
                if (!v) fail(*e, key + ": '" + item + "' is not a number");
                out.push_back(*v);
            }
        }
    }

    void ints(const std::string& section, const std::string& key, std::vector<int>& out) const {
        if (const auto* e = find(section, key)) {
            out.clear();
            for (const auto& item : split(e->value, ',')) {
                int v = 0;
                const auto* end = item.data() + item.size();
                const auto [p, ec] = std::from_chars(item.data(), end, v);
                if (ec != std::errc() || p != end || v <= 0) fail(*e, key + ": '" + item + "' is not a positive integer");
                out.push_back(v);
            }
        }
    }

    void check(const std::string& section, const std::string& key, bool ok, const std::string& msg) const {
        if (ok) return;
        if (const auto* e = find(section, key)) fail(*e, key + ": " + msg);
        throw ConfigError(std::string(source_) + ": " + section + "." + key + ": " + msg);
    }

private:
    const Sections& sec_;
    std::string_view source_;
};

}  // namespace

ScenarioConfig parse_config(std::string_view text, std::string_view source) {
    Sections sections;
    std::string current;
    int line_no = 0;
    std::size_t pos = 0;
    auto fail = [&](int col, const std::string& msg) -> void {
        throw ConfigError(std::string(source) + ":" + std::to_string(line_no) + ":" + std::to_string(col) + ": " + msg,
                          line_no, col);
    };
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        const auto first = raw.find_first_not_of(" \t\r");
        if (first == std::string_view::npos || raw[first] == '#' || raw[first] == ';') continue;
        const int col0 = static_cast<int>(first) + 1;

        if (raw[first] == '[') {
            const auto close = raw.find(']', first);
            if (close == std::string_view::npos) fail(col0, "unterminated section header");
            if (raw.find_first_not_of(" \t\r", close + 1) != std::string_view::npos) {
                fail(static_cast<int>(close) + 2, "unexpected text after section header");
            }
            current = trim(raw.substr(first + 1, close - first - 1));
            if (!known_keys().count(current)) fail(col0 + 1, "unknown section [" + current + "]");
            if (sections.count(current)) fail(col0 + 1, "duplicate section [" + current + "]");
            sections[current];
            continue;
        }

        const auto eq = raw.find('=', first);
        if (eq == std::string_view::npos) fail(col0, "expected 'key = value'");
        const std::string key = trim(raw.substr(first, eq - first));
        if (key.empty()) fail(col0, "missing key before '='");
        if (current.empty()) fail(col0, "key '" + key + "' outside of any section");
        const auto& allowed = known_keys().at(current);
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            fail(col0, "unknown key '" + key + "' in [" + current + "]");
        }
        if (sections[current].count(key)) fail(col0, "duplicate key '" + key + "' in [" + current + "]");
        const auto vfirst = raw.find_first_not_of(" \t\r", eq + 1);
        const int vcol = static_cast<int>(vfirst == std::string_view::npos ? eq + 1 : vfirst) + 1;
        sections[current][key] = Entry{trim(raw.substr(eq + 1)), line_no, vcol};
    }

    const Reader r(sections, source);
    ScenarioConfig c;
    r.str("scenario", "id", c.id);
    r.check("scenario", "id", !c.id.empty() && c.id.find_first_of("/\\ \t") == std::string::npos,
            "must be non-empty without spaces or path separators");
    if (const auto* e = r.find("scenario", "operation")) {
        try {
            c.operation = parse_operation(e->value);
        } catch (const ConfigError& err) {
            r.fail(*e, err.what());
        }
    }
    r.str("scenario", "expected_verdict", c.expected_verdict);
    if (const auto* e = r.find("scenario", "expected_verdict"); e && !c.expected_verdict.empty()) {
        bool known = false;
        for (auto v : {Verdict::regular_fixed, Verdict::fixed_nonregular, Verdict::contact_moving,
                       Verdict::lost_to_interior, Verdict::withheld}) {
            known = known || to_string(v) == c.expected_verdict;
        }
        if (!known) r.fail(*e, "unknown verdict '" + c.expected_verdict + "'");
    }

    r.str("field", "id", c.field);
    if (const auto* e = r.find("field", "id")) {
        try {
            (void)make_gallery_field(c.field);
        } catch (const LoewnerError& err) {
            r.fail(*e, err.what());
        }
    } else {
        (void)make_gallery_field(c.field);
    }

    r.real("grid", "t_begin", c.times.begin);
    r.real("grid", "t_end", c.times.end);
    r.real("grid", "t_step", c.times.step);
    r.check("grid", "t_step", c.times.step > 0.0, "must be positive");
    r.check("grid", "t_end", c.times.end >= c.times.begin, "must not precede t_begin");
    r.real("grid", "s", c.s);
    r.count("grid", "points", c.points);
    r.check("grid", "points", c.points >= 1, "must be at least 1");
    r.real("grid", "r_max", c.r_max);
    r.check("grid", "r_max", c.r_max > 0.0 && c.r_max < 1.0, "must lie in (0,1)");
    r.reals("grid", "slice", c.slice);
    for (double x : c.slice) r.check("grid", "slice", x > 0.0 && x < 1.0, "values must lie in (0,1)");
    if (const auto* e = r.find("grid", "sigma"); e && e->value != "none") {
        double v = 0.0;
        r.real("grid", "sigma", v);
        c.sigma = v;
    }
    r.real("grid", "horizon", c.horizon);
    r.real("grid", "t0", c.t0);
    r.real("grid", "v0", c.v0);
    r.real("grid", "span", c.span);
    r.check("grid", "span", c.span > 0.0, "must be positive");
    r.ints("grid", "ns", c.ns);
    r.str("grid", "lambda_shape", c.lambda_shape);
    r.check("grid", "lambda_shape", c.lambda_shape == "sine" || c.lambda_shape == "linear",
            "expected sine or linear");

    r.real("tolerances", "rtol", c.rtol);
    r.check("tolerances", "rtol", c.rtol > 0.0, "must be positive");
    r.real("tolerances", "atol", c.atol);
    r.check("tolerances", "atol", c.atol > 0.0, "must be positive");
    r.real("tolerances", "scale", c.scale);
    r.check("tolerances", "scale", c.scale > 0.0, "must be positive");
    r.real("tolerances", "invariant", c.invariant);
    r.check("tolerances", "invariant", c.invariant > 0.0, "must be positive");

    r.str("output", "dir", c.out_dir);
    r.check("output", "dir", !c.out_dir.empty(), "must not be empty");
    r.boolean("output", "csv", c.csv);
    r.boolean("output", "json", c.json);
    r.str("output", "plot", c.plot);
    r.check("output", "plot", c.plot.empty() || c.plot == "lambda" || c.plot == "fan" || c.plot == "trajectory",
            "expected lambda, fan or trajectory");
    return c;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

std::string emit_config(const ScenarioConfig& c) {
    auto join = [](const auto& v, auto fmt) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
        return s;
    };
    std::string o;
    o += "[scenario]\n";
    o += "id = " + c.id + "\n";
    o += "operation = " + to_string(c.operation) + "\n";
    if (!c.expected_verdict.empty()) o += "expected_verdict = " + c.expected_verdict + "\n";
    o += "\n[field]\n";
    o += "id = " + c.field + "\n";
    o += "\n[grid]\n";
    o += "t_begin = " + num17(c.times.begin) + "\n";
    o += "t_end = " + num17(c.times.end) + "\n";
    o += "t_step = " + num17(c.times.step) + "\n";
    o += "s = " + num17(c.s) + "\n";
    o += "points = " + std::to_string(c.points) + "\n";
    o += "r_max = " + num17(c.r_max) + "\n";
    o += "slice = " + join(c.slice, num17) + "\n";
    o += "sigma = " + (c.sigma ? num17(*c.sigma) : std::string("none")) + "\n";
    o += "horizon = " + num17(c.horizon) + "\n";
    o += "t0 = " + num17(c.t0) + "\n";
    o += "v0 = " + num17(c.v0) + "\n";
    o += "span = " + num17(c.span) + "\n";
    o += "ns = " + join(c.ns, [](int n) { return std::to_string(n); }) + "\n";
    o += "lambda_shape = " + c.lambda_shape + "\n";
    o += "\n[tolerances]\n";
    o += "rtol = " + num17(c.rtol) + "\n";
    o += "atol = " + num17(c.atol) + "\n";
    o += "scale = " + num17(c.scale) + "\n";
    o += "invariant = " + num17(c.invariant) + "\n";
    o += "\n[output]\n";
    o += "dir = " + c.out_dir + "\n";
    o += std::string("csv = ") + (c.csv ? "true" : "false") + "\n";
    o += std::string("json = ") + (c.json ? "true" : "false") + "\n";
    if (!c.plot.empty()) o += "plot = " + c.plot + "\n";
    return o;
}

std::string config_hash(const ScenarioConfig& config) {
    // Output settings do not affect the trace.
    ScenarioConfig c = config;
    c.out_dir = ".";
    c.csv = c.json = true;
    c.plot.clear();
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : emit_config(c)) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ScenarioConfig default_config(Operation op) {
    ScenarioConfig c;
    c.operation = op;
    c.id = to_string(op);
    switch (op) {
        case Operation::evolve:
            c.field = "g64:1";
            c.times = {0.0, 0.3, 0.05};
            c.points = 8;
            c.plot = "fan";
            break;
        case Operation::spectral:
            c.field = "hyperbolic:1";
            c.times = {0.0, 1.0, 0.05};
            c.plot = "lambda";
            break;
        case Operation::classify:
            c.field = "g64:1";
            break;
        case Operation::chain_check:
            c.field = "hyperbolic:1";
            c.times = {0.0, 1.0, 0.25};
            c.points = 12;
            break;
        case Operation::embed:
            c.field = "hyperbolic:1";
            c.times = {0.0, 1.0, 0.1};
            break;
        case Operation::product_formula:
            c.field = "g64:1";
            c.t0 = 0.1;
            c.span = 0.1;
            break;
    }
    return c;
}

// ---------------------------------------------------------------------------------------------
// Running

void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body) {
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::mutex m;
    std::size_t next = 0;
    std::exception_ptr first_error;
    auto work = [&] {
        for (;;) {
            std::size_t i;
            {
                std::lock_guard lock(m);
                if (next >= n || first_error) return;
                i = next++;
            }
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(m);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    const unsigned count = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    for (unsigned w = 0; w < count; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

namespace {

constexpr double kAssociationTol = 1e-8;
constexpr double kPdeTol = 1e-6;
constexpr double kEmbedTargetTol = 1e-7;
constexpr double kEmbedBoundaryTol = 1e-5;

struct Run {
    const ScenarioConfig& c;
    const RunOptions& opt;
    ScenarioResult& res;
    GalleryField gf;
    IntegratorConfig ic;

    void violation(const std::string& msg) {
        res.exit_status = exit_code::invariant;
        res.messages.push_back("invariant violated: " + msg);
    }

    std::vector<double> nodes_in_window(double lo) const {
        auto nodes = c.times.nodes();
        const auto& f = gf.field;
        for (double t : nodes) {
            if (t < lo) throw ConfigError("time grid starts at " + numg(t) + " before s = " + numg(lo));
            if (!f.in_window(t)) {
                throw ConfigError("time " + numg(t) + " outside the validity window [" + numg(f.valid_begin()) + ", " +
                                  numg(f.valid_end()) + ") of " + c.field);
            }
        }
        return nodes;
    }

    BoundaryPoint boundary_point() const {
        if (c.sigma) return BoundaryPoint(*c.sigma);
        const auto nps = gf.field.null_points();
        if (nps.empty()) throw ConfigError("field " + c.field + " declares no boundary null point; set grid.sigma");
        return nps.front().sigma;
    }

    void evolve() {
        auto& tr = res.trace;
        const auto nodes = nodes_in_window(c.s);
        tr.times = nodes;
        const auto grid = disc_grid(c.points, c.r_max);
        auto pts = nlohmann::ordered_json::array();
        for (const auto& z : grid) pts.push_back({{"re", z.real()}, {"im", z.imag()}});
        tr.params["grid"] = pts;

        // Each point restarts from s, so sequential and parallel runs agree bit for bit.
        const EvolutionFamily fam(gf.field, ic, false);
        std::vector<std::vector<Complex>> values(grid.size(), std::vector<Complex>(nodes.size()));
        parallel_for(grid.size(), opt.parallel, [&](std::size_t k) {
            for (std::size_t i = 0; i < nodes.size(); ++i) values[k][i] = fam.evolve(c.s, nodes[i], grid[k]);
        });
        double max_modulus = 0.0;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            for (const auto& v : values[k]) max_modulus = std::max(max_modulus, std::abs(v));
            tr.add_complex("phi_" + std::to_string(k), std::move(values[k]));
        }
        tr.verdicts["max_modulus"] = max_modulus;
        if (!(max_modulus < 1.0)) violation("image point outside the disc (|phi| = " + num17(max_modulus) + ")");

        if (gf.field.has_complement_form()) {
            tr.params["slice"] = c.slice;
            std::vector<std::vector<double>> fan(c.slice.size(), std::vector<double>(nodes.size()));
            parallel_for(c.slice.size(), opt.parallel, [&](std::size_t j) {
                for (std::size_t i = 0; i < nodes.size(); ++i) fan[j][i] = fam.evolve_real_slice(c.s, nodes[i], c.slice[j]);
            });
            std::vector<double> barrier;
            if (gf.barrier) {
                for (double t : nodes) barrier.push_back(gf.barrier(t));
            }
            bool below = true;
            for (std::size_t j = 0; j < c.slice.size(); ++j) {
                for (std::size_t i = 0; i < nodes.size() && !barrier.empty(); ++i) below = below && fan[j][i] < barrier[i];
                tr.add_real("xi_" + numg(c.slice[j]), fan[j]);
            }
            if (!barrier.empty()) {
                tr.add_real("barrier", barrier);
                tr.verdicts["below_barrier"] = below;
                if (!below) violation("real-slice trajectory reached the barrier");
            }
        }

        if (c.sigma) {
            try {
                const auto traj = boundary_trajectory(gf.field, BoundaryPoint(*c.sigma), nodes, ic);
                tr.add_real("theta", traj.angles);
            } catch (const TangencyError& e) {
                violation(e.what());
            }
        }
    }

    void spectral() {
        auto& tr = res.trace;
        const auto nodes = nodes_in_window(gf.field.valid_begin());
        const auto sigma = boundary_point();
        tr.params["sigma"] = sigma.angle();
        const EvolutionFamily fam(gf.field, ic);
        const auto st = spectral_trace(fam, sigma, nodes);
        tr.times = st.times;
        tr.add_real("lambda_direct", st.lambda_direct);
        tr.add_real("lambda_integral", st.lambda_integral);
        std::vector<double> disc;
        for (std::size_t i = 0; i < st.times.size(); ++i) disc.push_back(std::abs(st.lambda_direct[i] - st.lambda_integral[i]));
        tr.add_real("discrepancy", disc);
        tr.verdicts["max_discrepancy"] = st.discrepancy;
        tr.verdicts["complete"] = st.complete;
        if (!st.complete) violation("spectral trace incomplete (a route failed to converge)");
        if (!(st.discrepancy < c.invariant)) {
            violation("two-route discrepancy " + num17(st.discrepancy) + " exceeds " + num17(c.invariant));
        }
    }

    void classify() {
        auto& tr = res.trace;
        const BoundaryPoint sigma(c.sigma.value_or(0.0));
        tr.params["sigma"] = sigma.angle();
        const EvolutionFamily fam(gf.field, ic);
        ClassificationOptions o;
        o.horizon = c.horizon;
        o.spectral_tolerance = c.invariant;
        const auto rep = classify_boundary_point(fam, sigma, o);
        tr.params["horizon"] = rep.horizon;
        tr.times = {rep.horizon};
        tr.add_real("sup_modulus", {rep.sup_modulus});
        tr.add_real("max_quotient", {rep.max_quotient});
        tr.add_complex("radial_limit", {rep.radial_limit.value});
        tr.add_real("trajectory_displacement", {rep.trajectory_displacement});
        tr.add_real("spectral_discrepancy", {rep.spectral_discrepancy});
        tr.verdicts["classification"] = to_string(rep.verdict);
        tr.verdicts["null_point"] = rep.null_point;
        tr.verdicts["integrable"] = rep.integrable;
        tr.verdicts["notes"] = rep.notes;
        expect(rep.verdict);
    }

    void expect(Verdict v) {
        if (!c.expected_verdict.empty() && to_string(v) != c.expected_verdict) {
            violation("verdict " + to_string(v) + ", expected " + c.expected_verdict);
        }
    }

    void chain_check() {
        auto& tr = res.trace;
        const double T = c.times.end;
        const auto all = nodes_in_window(gf.field.valid_begin());
        const EvolutionFamily fam(gf.field, ic);
        const ChainSnapshot chain(fam, T);
        const auto grid = disc_grid(c.points, c.r_max);
        const double delta = 1e-4;
        const Complex probe(0.3, 0.1);
        std::vector<double> assoc, pde, range;
        bool inside = true;
        for (double s : all) {
            if (s - delta < chain.begin() || s + delta > T) continue;
            const double next = std::min(s + c.times.step, T);
            tr.times.push_back(s);
            assoc.push_back(association_residual(chain, s, next, grid));
            pde.push_back(std::abs(pde_residual(chain, probe, s, delta)));
            const auto rr = range_monotonicity_check(chain, s, next, grid);
            range.push_back(rr.max_residual);
            inside = inside && rr.all_inside;
        }
        tr.add_real("association", assoc);
        tr.add_real("pde_residual", pde);
        tr.add_real("range_residual", range);
        const double a = assoc.empty() ? 0.0 : *std::max_element(assoc.begin(), assoc.end());
        const double p = pde.empty() ? 0.0 : *std::max_element(pde.begin(), pde.end());
        const double q = range.empty() ? 0.0 : *std::max_element(range.begin(), range.end());
        tr.verdicts["max_association"] = a;
        tr.verdicts["max_pde_residual"] = p;
        tr.verdicts["max_range_residual"] = q;
        tr.verdicts["ranges_nested"] = inside;
        if (!(a <= kAssociationTol)) violation("association residual " + num17(a));
        if (!(p <= kPdeTol)) violation("chain equation residual " + num17(p));
        if (!inside || !(q <= kAssociationTol)) violation("ranges not nested (residual " + num17(q) + ")");

        if (c.sigma || !gf.field.null_points().empty()) {
            const auto sigma = boundary_point();
            std::vector<double> ts;
            for (double s : all) {
                if (s <= T) ts.push_back(s);
            }
            const auto cc = condition_C_check(chain, sigma, ts.front(), ts);
            tr.verdicts["condition_C"] = {{"c1", cc.c1}, {"c2", cc.c2}, {"c3", cc.c3}, {"notes", cc.notes}};
        }
    }

    void embed() {
        auto& tr = res.trace;
        const double t0 = c.t0;
        const EvolutionFamily fam(gf.field, ic);
        const BoundaryPoint one(0.0);
        const auto d = angular_derivative(anchored_flow(fam, gf.field.valid_begin(), t0, one), one, StolzSchedule(one));
        if (!d.converged) throw EvaluationError("angular derivative of the target at 1 did not converge");
        const double L = -std::log(std::abs(d.value));
        SpectralPrescription sp;
        if (c.lambda_shape == "sine") {
            const double w = std::numbers::pi / (2.0 * t0);
            sp.lambda = TimeFunction([=](double t) { return std::sin(w * t) * L; });
            sp.lambda_prime = TimeFunction([=](double t) { return w * std::cos(w * t) * L; });
        } else {
            sp.lambda = TimeFunction([=](double t) { return L * t / t0; });
            sp.lambda_prime = TimeFunction([=](double) { return L / t0; });
        }
        const auto emb = embed_map(fam, t0, sp, c.v0);
        tr.params["t0"] = t0;
        tr.params["v0"] = c.v0;
        tr.params["lambda_t0"] = L;
        tr.params["lambda_shape"] = c.lambda_shape;

        std::vector<double> lam, base;
        for (double t : nodes_in_window(gf.field.valid_begin())) {
            if (t > t0) break;
            tr.times.push_back(t);
            lam.push_back(emb.lambda(t));
            base.push_back(emb.base_lambda(t));
        }
        tr.add_real("lambda", lam);
        tr.add_real("base_lambda", base);

        const auto grid = disc_grid(c.points, c.r_max);
        const std::pair<double, double> pairs[] = {{0.0, t0}, {0.2 * t0, 0.7 * t0}, {0.5 * t0, t0}};
        const auto chk = check_embedding(emb, grid, pairs);
        tr.verdicts["target_deviation"] = chk.target_deviation;
        tr.verdicts["composition_deviation"] = chk.composition_deviation;
        tr.verdicts["fixed_point_deviation"] = chk.fixed_point_deviation;
        tr.verdicts["derivative_deviation"] = chk.derivative_deviation;
        tr.verdicts["ef2_residual"] = chk.ef2_residual;
        ClassificationOptions o;
        o.horizon = t0;
        const auto rep = classify_boundary_point(emb.induced_family(), one, o);
        tr.verdicts["classification"] = to_string(rep.verdict);
        if (!(chk.target_deviation <= kEmbedTargetTol)) violation("psi_{0,t0} differs from the target");
        if (!(chk.fixed_point_deviation <= kEmbedBoundaryTol)) violation("psi_{s,t}(1) != 1");
        if (!(chk.derivative_deviation <= kEmbedBoundaryTol)) violation("psi_{s,t}'(1) != exp(Lambda(s) - Lambda(t))");
        if (c.expected_verdict.empty()) {
            if (rep.verdict != Verdict::regular_fixed) violation("verdict " + to_string(rep.verdict) + " at 1");
        } else {
            expect(rep.verdict);
        }
    }

    void product_formula() {
        auto& tr = res.trace;
        tr.index_name = "n";
        const Complex z(0.5);
        tr.params["t0"] = c.t0;
        tr.params["t"] = c.span;
        tr.params["z"] = {{"re", z.real()}, {"im", z.imag()}};
        std::vector<int> ns = c.ns;
        const auto rep = product_formula_check(gf.field, c.t0, c.span, ns, z, ic);
        std::vector<double> err;
        for (const auto& row : rep.rows) {
            tr.times.push_back(row.n);
            err.push_back(row.error);
        }
        tr.add_real("error", err);
        tr.verdicts["non_increasing"] = rep.non_increasing;
        tr.verdicts["final_error"] = rep.final_error;
        if (!rep.non_increasing) violation("composition error increased along n");
        if (!(rep.final_error < c.invariant)) {
            violation("final composition error " + num17(rep.final_error) + " not below " + num17(c.invariant));
        }
    }
};

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig& config, const RunOptions& options) {
    ScenarioResult res;
    auto& tr = res.trace;
    tr.scenario = config.id;
    tr.field = config.field;
    tr.provenance["field"] = config.field;
    tr.provenance["operation"] = to_string(config.operation);
    tr.provenance["config_hash"] = config_hash(config);
    tr.provenance["tolerances"] = {
        {"rtol", config.rtol}, {"atol", config.atol}, {"scale", config.scale}, {"invariant", config.invariant}};
    tr.params["s"] = config.s;

    try {
        IntegratorConfig ic;
        ic.rtol = config.rtol;
        ic.atol = config.atol;
        Run run{config, options, res, make_gallery_field(config.field), ic.scaled(config.scale)};
        run.ic.validate();
        switch (config.operation) {
            case Operation::evolve: run.evolve(); break;
            case Operation::spectral: run.spectral(); break;
            case Operation::classify: run.classify(); break;
            case Operation::chain_check: run.chain_check(); break;
            case Operation::embed: run.embed(); break;
            case Operation::product_formula: run.product_formula(); break;
        }
        tr.validate();
    } catch (const ConfigError& e) {
        res.exit_status = exit_code::config;
        res.messages.push_back(std::string("config error: ") + e.what());
        return res;
    } catch (const std::exception& e) {
        res.exit_status = exit_code::solver;
        res.messages.push_back(std::string("solver error: ") + e.what());
        return res;
    }

    if (!options.write) return res;
    try {
        std::filesystem::create_directories(config.out_dir);
        const std::filesystem::path dir(config.out_dir);
        std::string svg;
        if (!config.plot.empty()) svg = render_plot(tr, parse_plot_kind(config.plot));
        if (config.csv) {
            const auto p = (dir / (config.id + ".csv")).string();
            write_text_file(p, tr.to_csv());
            res.artifacts.push_back(p);
        }
        if (config.json) {
            const auto p = (dir / (config.id + ".json")).string();
            write_text_file(p, tr.to_json().dump(2) + "\n");
            res.artifacts.push_back(p);
        }
        if (!svg.empty()) {
            const auto p = (dir / (config.id + ".svg")).string();
            write_text_file(p, svg);
            res.artifacts.push_back(p);
        }
    } catch (const ValidationError& e) {
        res.exit_status = exit_code::config;
        res.messages.push_back(std::string("output error: ") + e.what());
    } catch (const std::exception& e) {
        res.exit_status = exit_code::solver;
        res.messages.push_back(std::string("output error: ") + e.what());
    }
    return res;
}

}  // namespace loewner
