#pragma once

#include <span>
#include <string>

#include "loewner/disc.hpp"

namespace loewner {

enum class DivergencePattern {
    none,
    monotone_blow_up,  ///< differences keep their sign and do not shrink
    oscillation,       ///< differences alternate in sign without shrinking
    stagnation,        ///< no consistent pattern (noise-dominated)
};

std::string to_string(DivergencePattern p);

/// Extrapolated boundary limit with convergence diagnostics.
struct AngularEstimate {
    Complex value{0.0};
    double error_estimate = 0.0;
    bool converged = false;
    std::size_t samples_used = 0;
    DivergencePattern pattern = DivergencePattern::none;
    /// Fitted exponent p in value(h) ~ L + c h^p (negative when diverging).
    double exponent = 0.0;
    /// Largest modulus seen along the schedule.
    double max_abs_sample = 0.0;
};

struct ExtrapolationOptions {
    double tol = 1e-8;
    /// Stop adding rows once the diagonal moves by more than safe * best error (noise floor reached).
    double safe = 2.0;
    int max_columns = 10;
};

/// Limit of values[k] as h[k] -> 0 (h strictly decreasing, positive).
///
/// The convergence exponent p is fitted from successive differences over the most consistent
/// window of the schedule and snapped to a nearby simple fraction; the limit is then taken by
/// Neville extrapolation in x = h^p (expansion in p, 2p, 3p, ...), keeping the tableau entry with
/// the smallest error estimate as in Ridders' method.
AngularEstimate extrapolate_limit(std::span<const double> h, std::span<const Complex> values,
                                  const ExtrapolationOptions& options = {});

/// Fitted exponent of the differences (exposed for diagnostics and tests).
double fit_convergence_exponent(std::span<const double> h, std::span<const Complex> values);

}  // namespace loewner
