#include "loewner/extrapolation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "loewner/errors.hpp"

namespace loewner {

std::string to_string(DivergencePattern p) {
    switch (p) {
        case DivergencePattern::none: return "none";
        case DivergencePattern::monotone_blow_up: return "monotone_blow_up";
        case DivergencePattern::oscillation: return "oscillation";
        case DivergencePattern::stagnation: return "stagnation";
    }
    return "unknown";
}

namespace {

double snap_exponent(double p) {
    static constexpr std::array<double, 8> kCandidates = {0.25, 1.0 / 3.0, 0.5, 2.0 / 3.0, 1.0, 1.5, 2.0, 3.0};
    for (double c : kCandidates) {
        if (std::abs(p - c) < 0.08 * std::max(c, 0.5)) return c;
    }
    return p;
}

// Successive-difference exponent estimates; NaN where undefined.
std::vector<double> local_exponents(std::span<const double> h, std::span<const Complex> v) {
    const std::size_t n = v.size();
    std::vector<double> p(n, std::nan(""));
    for (std::size_t k = 2; k < n; ++k) {
        const double d1 = std::abs(v[k - 1] - v[k - 2]);
        const double d2 = std::abs(v[k] - v[k - 1]);
        if (d1 > 0.0 && d2 > 0.0) p[k] = std::log(d1 / d2) / std::log(h[k - 1] / h[k]);
    }
    return p;
}

}  // namespace

double fit_convergence_exponent(std::span<const double> h, std::span<const Complex> values) {
    const auto p = local_exponents(h, values);
    double best_spread = INFINITY;
    double best = 1.0;
    for (std::size_t k = 2; k + 2 < p.size(); ++k) {
        std::array<double, 3> w = {p[k], p[k + 1], p[k + 2]};
        if (std::any_of(w.begin(), w.end(), [](double x) { return std::isnan(x); })) continue;
        std::sort(w.begin(), w.end());
        const double spread = w[2] - w[0];
        if (spread < best_spread) {
            best_spread = spread;
            best = w[1];
        }
    }
    return best;
}

AngularEstimate extrapolate_limit(std::span<const double> h, std::span<const Complex> values,
                                  const ExtrapolationOptions& options) {
    const std::size_t n = values.size();
    if (n == 0 || h.size() != n) throw PreconditionError("extrapolate_limit: sample/schedule size mismatch");

    AngularEstimate est;
    for (const auto& v : values) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            throw EvaluationError("extrapolate_limit: non-finite sample");
        }
        est.max_abs_sample = std::max(est.max_abs_sample, std::abs(v));
    }
    est.value = values[n - 1];
    est.samples_used = n;
    if (n == 1) {
        est.converged = false;
        est.error_estimate = INFINITY;
        return est;
    }

    // Trailing differences already below tolerance: the sequence has settled.
    const std::size_t tail = std::min<std::size_t>(3, n - 1);
    double tail_max = 0.0;
    for (std::size_t k = n - tail; k < n; ++k) tail_max = std::max(tail_max, std::abs(values[k] - values[k - 1]));
    bool all_equal = true;
    for (std::size_t k = 1; k < n; ++k) all_equal = all_equal && values[k] == values[0];
    if (all_equal) {
        est.value = values[0];
        est.converged = true;
        est.error_estimate = 0.0;
        est.samples_used = 1;
        est.exponent = INFINITY;
        return est;
    }

    const double p = n >= 5 ? snap_exponent(fit_convergence_exponent(h, values)) : 1.0;
    est.exponent = p;

    if (!(p > 0.02)) {
        // Differences do not shrink: classify the divergence.
        int sign_changes = 0;
        bool growing = true;
        for (std::size_t k = 2; k < n; ++k) {
            const Complex d1 = values[k - 1] - values[k - 2];
            const Complex d2 = values[k] - values[k - 1];
            if (std::real(d1 * std::conj(d2)) < 0.0) ++sign_changes;
            if (std::abs(d2) < 0.5 * std::abs(d1)) growing = false;
        }
        if (sign_changes == 0 && growing) {
            est.pattern = DivergencePattern::monotone_blow_up;
        } else if (sign_changes >= static_cast<int>(n - 2) / 2) {
            est.pattern = DivergencePattern::oscillation;
        } else {
            est.pattern = DivergencePattern::stagnation;
        }
        est.converged = false;
        est.error_estimate = std::abs(values[n - 1] - values[n - 2]);
        if (tail_max < 0.01 * options.tol) {
            est.pattern = DivergencePattern::none;
            est.converged = true;
            est.error_estimate = tail_max;
        }
        return est;
    }

    // Neville tableau in x = h^p, rows added from coarse to fine.
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = std::pow(h[i], p);

    const auto cols = static_cast<std::size_t>(options.max_columns);
    std::vector<Complex> prev(1, values[0]);
    double best_err = INFINITY;
    Complex best = values[0];
    std::size_t used = 1;
    for (std::size_t i = 1; i < n; ++i) {
        const std::size_t width = std::min(i, cols) + 1;
        std::vector<Complex> row(width);
        row[0] = values[i];
        for (std::size_t j = 1; j < width; ++j) {
            const double xi = x[i];
            const double xij = x[i - j];
            row[j] = row[j - 1] + (row[j - 1] - prev[j - 1]) * (xi / (xij - xi));
            const double err = std::max(std::abs(row[j] - row[j - 1]), std::abs(row[j] - prev[j - 1]));
            if (err <= best_err) {
                best_err = err;
                best = row[j];
                used = i + 1;
            }
        }
        const std::size_t d = std::min(width, prev.size()) - 1;
        if (std::abs(row[d] - prev[d]) >= options.safe * best_err && i >= 3) break;
        prev = std::move(row);
    }

    est.value = best;
    est.error_estimate = best_err;
    est.samples_used = used;
    est.converged = best_err < options.tol;
    if (!est.converged) {
        // Report which way it failed: growth means a blow-up that the fit misread.
        est.pattern = est.max_abs_sample > 1e3 * (1.0 + std::abs(values[0])) ? DivergencePattern::monotone_blow_up
                                                                           : DivergencePattern::stagnation;
    }
    return est;
}

}  // namespace loewner
