#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstddef>
#include <string>

#include "loewner/errors.hpp"

namespace loewner {

struct IntegratorConfig {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h_init = 1e-3;
    double h_min = 1e-16;
    double h_max = 0.1;
    double containment_margin = 1e-12;
    long max_steps = 2'000'000;

    /// Throws PreconditionError unless 0 < h_min <= h_init <= h_max and rtol, atol > 0.
    void validate() const;
    /// Tolerances and containment margin multiplied by factor.
    IntegratorConfig scaled(double factor) const;
};

/// Integrator state between calls: resuming from a saved state continues the step-size sequence.
template <class T, std::size_t N>
struct OdeState {
    double t = 0.0;
    std::array<T, N> y{};
    double h = 0.0;        ///< next trial step, 0 = choose from config
    double err_old = 1e-4; ///< previous accepted error norm (PI controller memory)
};

namespace detail {

template <class T, std::size_t N>
std::array<T, N> axpy(const std::array<T, N>& y, double h, std::initializer_list<std::pair<double, const std::array<T, N>*>> terms) {
    std::array<T, N> out = y;
    for (const auto& [c, k] : terms) {
        if (c == 0.0) continue;
        for (std::size_t i = 0; i < N; ++i) out[i] += (h * c) * (*k)[i];
    }
    return out;
}

}  // namespace detail

/// Dormand-Prince 5(4) with PI step control, integrating from st.t to t1 (t1 >= st.t).
///
/// rhs(t, y) returns dy/dt. guard(y) is called on every accepted state and may throw.
/// atol is absolute, rtol relative per component; pass atol ~ 0 for pure relative control.
template <class T, std::size_t N, class Rhs, class Guard>
OdeState<T, N> dopri5(Rhs&& rhs, OdeState<T, N> st, double t1, const IntegratorConfig& cfg, double atol, double rtol,
                      Guard&& guard) {
    using State = std::array<T, N>;
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;
    static constexpr double safety = 0.9, fac_min = 0.2, fac_max = 10.0;
    static constexpr double beta = 0.04, alpha = 0.2 - 0.75 * beta;

    if (t1 < st.t) throw PreconditionError("dopri5: backward integration is not supported");
    if (t1 == st.t) return st;

    double h = st.h > 0.0 ? st.h : cfg.h_init;
    double err_old = st.err_old;
    State k1 = rhs(st.t, st.y);
    long steps = 0;
    bool last_rejected = false;

    while (st.t < t1) {
        if (++steps > cfg.max_steps) throw StiffnessError("dopri5: step budget exhausted at t = " + std::to_string(st.t));
        h = std::min(h, cfg.h_max);
        bool final_step = false;
        double hs = h;
        if (st.t + hs >= t1 || t1 - (st.t + hs) < 1e-12 * hs) {
            hs = t1 - st.t;
            final_step = true;
        }
        if (hs < cfg.h_min && !final_step) {
            char msg[96];
            std::snprintf(msg, sizeof msg, "dopri5: step size underflow (h = %.3g) at t = %.17g", hs, st.t);
            throw StiffnessError(msg);
        }
        if (st.t + hs == st.t) throw StiffnessError("dopri5: step size below time resolution at t = " + std::to_string(st.t));

        const double t = st.t;
        const State& y = st.y;
        const State k2 = rhs(t + c2 * hs, detail::axpy(y, hs, {{a21, &k1}}));
        const State k3 = rhs(t + c3 * hs, detail::axpy(y, hs, {{a31, &k1}, {a32, &k2}}));
        const State k4 = rhs(t + c4 * hs, detail::axpy(y, hs, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
        const State k5 = rhs(t + c5 * hs, detail::axpy(y, hs, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
        const double t_end = final_step ? t1 : t + hs;
        const State k6 =
            rhs(t_end, detail::axpy(y, hs, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
        const State y_new = detail::axpy(y, hs, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
        const State k7 = rhs(t_end, y_new);

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const T e = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
            const double r = std::abs(e) / sc;
            err += r * r;
        }
        err = std::sqrt(err / static_cast<double>(N));
        if (!std::isfinite(err)) {
            h = 0.1 * hs;
            last_rejected = true;
            continue;
        }

        if (err <= 1.0) {
            err = std::max(err, 1e-10);
            double fac = std::pow(err, alpha) / std::pow(err_old, beta) / safety;
            fac = std::clamp(fac, 1.0 / fac_max, 1.0 / fac_min);
            double h_next = hs / fac;
            if (last_rejected) h_next = std::min(h_next, hs);
            err_old = err;
            guard(y_new);
            st.t = t_end;
            st.y = y_new;
            k1 = k7;
            last_rejected = false;
            // Keep the controller's proposal rather than the clipped final step.
            h = final_step ? std::max(h_next, h) : h_next;
        } else {
            const double fac = std::min(1.0 / fac_min, std::pow(err, alpha) / safety);
            h = hs / fac;
            last_rejected = true;
        }
    }
    st.h = h;
    st.err_old = err_old;
    return st;
}

}  // namespace loewner
