#include "loewner/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "loewner/errors.hpp"
#include "loewner/integrator.hpp"

namespace loewner {

namespace {

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

// z_k - sigma, computed without subtracting nearly equal numbers.
Complex schedule_offset(const StolzSchedule& s, std::size_t k) {
    return -s.base().value() * s.distance(k) * std::polar(1.0, s.aperture());
}

// 1 - |z_k|
double schedule_gap(const StolzSchedule& s, std::size_t k) {
    const double h = s.distance(k);
    if (s.aperture() == 0.0) return h;
    const double a = s.aperture();
    return (2.0 * h * std::cos(a) - h * h) / (1.0 + std::abs(s.point(k)));
}

// 1 - |anchor + d| for |anchor| = 1, free of cancellation.
double unit_anchor_gap(Complex anchor, Complex d) {
    const Complex w = anchor + d;
    const double one_minus_sq = -(2.0 * std::real(std::conj(anchor) * d) + std::norm(d));
    return one_minus_sq / (1.0 + std::abs(w));
}

std::vector<double> distances(const StolzSchedule& s) {
    std::vector<double> h(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) h[k] = s.distance(k);
    return h;
}

DilatationEstimate finish_dilatation(const StolzSchedule& schedule, const std::vector<Complex>& q,
                                     const ExtrapolationOptions& options) {
    DilatationEstimate est;
    static_cast<AngularEstimate&>(est) = extrapolate_limit(distances(schedule), q, options);
    est.value = est.value.real();
    est.running_min = INFINITY;
    for (const auto& v : q) est.running_min = std::min(est.running_min, v.real());
    return est;
}

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;

}  // namespace

AnchoredMap anchored_flow(const EvolutionFamily& fam, double s, double t, const BoundaryPoint& sigma) {
    const Complex a = sigma.value();
    return {a, [fam, s, t, a](Complex z) { return fam.evolve_relative(s, t, z, a).value; }};
}

AnchoredMap anchored(DiscMap f, Complex value_at_sigma) {
    return {value_at_sigma, [f = std::move(f), value_at_sigma](Complex z) { return f(z) - value_at_sigma; }};
}

AngularEstimate angular_limit(const DiscMap& f, const BoundaryPoint& sigma, const StolzSchedule& schedule,
                              const ExtrapolationOptions& options) {
    if (std::abs(schedule.base().value() - sigma.value()) > 1e-15) {
        throw PreconditionError("angular_limit: schedule is based at a different boundary point");
    }
    std::vector<Complex> v(schedule.size());
    for (std::size_t k = 0; k < schedule.size(); ++k) v[k] = f(schedule.point(k));
    return extrapolate_limit(distances(schedule), v, options);
}

AngularEstimate angular_limit(const DiscMap& f, const BoundaryPoint& sigma) {
    return angular_limit(f, sigma, StolzSchedule(sigma));
}

AngularEstimate angular_derivative(const DiscMap& f, const BoundaryPoint& sigma, Complex f_at_sigma,
                                   const StolzSchedule& schedule, const ExtrapolationOptions& options) {
    if (!std::isfinite(f_at_sigma.real()) || !std::isfinite(f_at_sigma.imag())) {
        throw PreconditionError("angular_derivative: boundary value must be finite");
    }
    return angular_derivative(anchored(f, f_at_sigma), sigma, schedule, options);
}

AngularEstimate angular_derivative(const AnchoredMap& f, const BoundaryPoint& sigma, const StolzSchedule& schedule,
                                   const ExtrapolationOptions& options) {
    if (std::abs(schedule.base().value() - sigma.value()) > 1e-15) {
        throw PreconditionError("angular_derivative: schedule is based at a different boundary point");
    }
    std::vector<Complex> q(schedule.size());
    for (std::size_t k = 0; k < schedule.size(); ++k) q[k] = f.increment(schedule.point(k)) / schedule_offset(schedule, k);
    return extrapolate_limit(distances(schedule), q, options);
}

DilatationEstimate dilatation_coefficient(const DiscMap& f, const BoundaryPoint& sigma, const StolzSchedule& schedule,
                                          const ExtrapolationOptions& options) {
    (void)sigma;
    std::vector<Complex> q(schedule.size());
    for (std::size_t k = 0; k < schedule.size(); ++k) {
        q[k] = (1.0 - std::abs(f(schedule.point(k)))) / schedule_gap(schedule, k);
    }
    return finish_dilatation(schedule, q, options);
}

DilatationEstimate dilatation_coefficient(const AnchoredMap& f, const BoundaryPoint& sigma,
                                          const StolzSchedule& schedule, const ExtrapolationOptions& options) {
    (void)sigma;
    const bool unit = std::abs(std::abs(f.anchor) - 1.0) < 1e-15;
    std::vector<Complex> q(schedule.size());
    for (std::size_t k = 0; k < schedule.size(); ++k) {
        const Complex d = f.increment(schedule.point(k));
        const double gap = unit ? unit_anchor_gap(f.anchor, d) : 1.0 - std::abs(f.anchor + d);
        q[k] = gap / schedule_gap(schedule, k);
    }
    return finish_dilatation(schedule, q, options);
}

InequalityReport jwc_inequality_check(const DiscMap& f, const BoundaryPoint& sigma, const BoundaryPoint& omega,
                                      double A, std::span<const Complex> grid, double tolerance) {
    InequalityReport rep;
    for (const auto& z : grid) {
        const Complex w = f(z);
        const double lhs = std::norm(omega.value() - w) / (1.0 - std::norm(w));
        const double rhs = A * std::norm(sigma.value() - z) / (1.0 - std::norm(z));
        const double v = lhs - rhs;
        if (v > rep.max_violation) {
            rep.max_violation = v;
            rep.witness = z;
        }
    }
    rep.violated = rep.max_violation > tolerance;
    return rep;
}

DwLowerBoundReport dw_lower_bound_check(const DiscMap& f, Complex tau, const BoundaryPoint& sigma,
                                        const StolzSchedule& schedule) {
    DwLowerBoundReport rep;
    if (std::abs(tau - sigma.value()) < 1e-12) {
        rep.skipped = true;
        return rep;
    }
    const auto alpha = dilatation_coefficient(f, sigma, schedule);
    const auto limit = angular_limit(f, sigma, schedule);
    rep.alpha = alpha.value.real();
    rep.bound = std::norm(1.0 - std::conj(tau) * limit.value) / std::norm(1.0 - std::conj(tau) * sigma.value());
    rep.gap = rep.alpha - rep.bound;
    rep.holds = rep.gap >= -1e-6;
    return rep;
}

AngularEstimate brnp_dilation(const DiscMap& g, const BoundaryPoint& sigma, const StolzSchedule& schedule,
                              const ExtrapolationOptions& options) {
    return angular_derivative(AnchoredMap{Complex(0.0), g}, sigma, schedule, options);
}

AngularEstimate brnp_dilation(const HerglotzField& field, double t, const BoundaryPoint& sigma) {
    return brnp_dilation([&](Complex z) { return field(z, t); }, sigma, StolzSchedule(sigma));
}

bool is_null_point(const AngularEstimate& dilation) {
    return dilation.converged && std::abs(dilation.value.imag()) < 1e-6;
}

double dilation_at(const HerglotzField& field, const BoundaryPoint& sigma, double t) {
    if (const auto* np = field.null_point_at(sigma)) return np->dilation(t);
    const auto est = brnp_dilation(field, t, sigma);
    if (!is_null_point(est)) {
        throw EvaluationError("field " + field.id() + " has no boundary regular null point at angle " +
                              fmt(sigma.angle()) + ", t = " + fmt(t) + " (" + to_string(est.pattern) + ")");
    }
    return est.value.real();
}

double total_variation(std::span<const double> values) {
    double tv = 0.0;
    for (std::size_t i = 1; i < values.size(); ++i) tv += std::abs(values[i] - values[i - 1]);
    return tv;
}

SpectralTrace spectral_trace(const EvolutionFamily& fam, const BoundaryPoint& sigma, std::span<const double> times,
                             const SpectralOptions& options) {
    SpectralTrace tr;
    if (times.empty()) return tr;
    const StolzSchedule schedule = options.schedule.base().angle() == sigma.angle()
                                       ? options.schedule
                                       : StolzSchedule(sigma, std::vector<double>(options.schedule.ratios().begin(),
                                                                                  options.schedule.ratios().end()),
                                                       options.schedule.aperture());
    const double t0 = times[0];
    const auto& field = fam.field();
    double integral = 0.0;
    bool integral_ok = true;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        if (i > 0 && !(t > times[i - 1])) throw PreconditionError("spectral_trace: times must be strictly increasing");
        tr.times.push_back(t);

        if (t == t0) {
            tr.lambda_direct.push_back(0.0);
            tr.direct_converged.push_back(true);
        } else {
            try {
                const auto est = angular_derivative(anchored_flow(fam, t0, t, sigma), sigma, schedule,
                                                    options.extrapolation);
                tr.lambda_direct.push_back(-std::log(std::abs(est.value)));
                tr.direct_converged.push_back(est.converged);
            } catch (const LoewnerError&) {
                tr.lambda_direct.push_back(NAN);
                tr.direct_converged.push_back(false);
            }
        }

        if (i > 0 && integral_ok) {
            try {
                double err = 0.0;
                integral += Kronrod::integrate([&](double u) { return dilation_at(field, sigma, u); }, times[i - 1], t,
                                               15, options.quadrature_tol, &err);
            } catch (const LoewnerError&) {
                integral_ok = false;
            }
        }
        tr.lambda_integral.push_back(integral_ok ? -integral : NAN);
        tr.integral_converged.push_back(integral_ok);
    }
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        tr.complete = tr.complete && tr.direct_converged[i] && tr.integral_converged[i];
        const double d = std::abs(tr.lambda_direct[i] - tr.lambda_integral[i]);
        tr.discrepancy = std::isfinite(d) ? std::max(tr.discrepancy, d) : INFINITY;
    }
    return tr;
}

SpectralTrace moving_spectral_trace(const EvolutionFamily& fam, const BoundaryPoint& sigma0,
                                    std::span<const double> times, const SpectralOptions& options) {
    SpectralTrace tr;
    if (times.empty()) return tr;
    const auto& field = fam.field();
    const auto& cfg = fam.config();
    const double t0 = times[0];
    const bool fixed = field.null_point_at(sigma0) != nullptr;
    const StolzSchedule plain = StolzSchedule::dyadic(sigma0, 4, 20, options.schedule.aperture());
    const StolzSchedule anchored_schedule(sigma0, std::vector<double>(options.schedule.ratios().begin(),
                                                                      options.schedule.ratios().end()),
                                          options.schedule.aperture());

    const auto rhs = [&](double t, const std::array<double, 2>& y) {
        const Complex sigma = std::polar(1.0, y[0]);
        const double v = (Complex(0.0, -1.0) * std::conj(sigma) * field(sigma, t)).real();
        return std::array<double, 2>{v, -field.derivative(sigma, t).real()};
    };
    const auto no_guard = [](const std::array<double, 2>&) {};
    OdeState<double, 2> st;
    st.t = t0;
    st.y = {sigma0.angle(), 0.0};

    for (std::size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        st = dopri5<double, 2>(rhs, st, t, cfg, cfg.atol, cfg.rtol, no_guard);
        tr.times.push_back(t);
        tr.angles.push_back(st.y[0]);
        tr.lambda_integral.push_back(st.y[1]);
        tr.integral_converged.push_back(true);
        if (t == t0) {
            tr.lambda_direct.push_back(0.0);
            tr.direct_converged.push_back(true);
            continue;
        }
        try {
            const bool stays = std::abs(st.y[0] - sigma0.angle()) < 1e-14;
            const auto est = fixed && stays
                                 ? angular_derivative(anchored_flow(fam, t0, t, sigma0), sigma0, anchored_schedule,
                                                      options.extrapolation)
                                 : angular_derivative(fam.map(t0, t), sigma0, std::polar(1.0, st.y[0]), plain,
                                                      options.extrapolation);
            tr.lambda_direct.push_back(-std::log(std::abs(est.value)));
            tr.direct_converged.push_back(est.converged || est.error_estimate < 1e-6);
        } catch (const LoewnerError&) {
            tr.lambda_direct.push_back(NAN);
            tr.direct_converged.push_back(false);
        }
    }
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        tr.complete = tr.complete && tr.direct_converged[i];
        const double d = std::abs(tr.lambda_direct[i] - tr.lambda_integral[i]);
        tr.discrepancy = std::isfinite(d) ? std::max(tr.discrepancy, d) : INFINITY;
    }
    return tr;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::regular_fixed: return "regular_fixed";
        case Verdict::fixed_nonregular: return "fixed_nonregular";
        case Verdict::contact_moving: return "contact_moving";
        case Verdict::lost_to_interior: return "lost_to_interior";
        case Verdict::withheld: return "withheld";
    }
    return "withheld";
}

double default_horizon(const HerglotzField& field) {
    const double span = field.valid_end() - field.valid_begin();
    return std::isfinite(span) ? std::min(0.5 * span, 1.0) : 1.0;
}

ClassificationReport classify_boundary_point(const EvolutionFamily& fam, const BoundaryPoint& sigma,
                                             const ClassificationOptions& options) {
    ClassificationReport rep;
    const auto& field = fam.field();
    const double t0 = field.valid_begin();
    rep.horizon = options.horizon > 0.0 ? options.horizon : default_horizon(field);
    const double t1 = t0 + rep.horizon;
    if (!field.in_window(t1)) throw DomainError("classify: horizon outside the validity window of " + field.id());

    // (1) Local integrability of the dilation near the start of the window.
    try {
        (void)dilation_at(field, sigma, t0 + 0.5 * rep.horizon);
        (void)dilation_at(field, sigma, t1);
        rep.null_point = true;
    } catch (const LoewnerError& e) {
        rep.notes.push_back(std::string("no null point: ") + e.what());
    }
    if (rep.null_point) {
        try {
            for (int j : options.epsilon_exponents) {
                const double eps = std::pow(10.0, -j);
                rep.epsilons.push_back(eps);
                rep.dilation_integrals.push_back(Kronrod::integrate(
                    [&](double u) { return dilation_at(field, sigma, u); }, t0 + eps, t1, 15, 1e-12));
            }
            rep.integrable = rep.dilation_integrals.size() >= 3;
            for (std::size_t j = 2; j < rep.dilation_integrals.size(); ++j) {
                const double d0 = std::abs(rep.dilation_integrals[j - 1] - rep.dilation_integrals[j - 2]);
                const double d1 = std::abs(rep.dilation_integrals[j] - rep.dilation_integrals[j - 1]);
                if (!(d1 <= 0.5 * d0 || d1 < 1e-12)) rep.integrable = false;
            }
        } catch (const LoewnerError& e) {
            rep.integrable = false;
            rep.notes.push_back(std::string("dilation quadrature failed: ") + e.what());
        }
    }
    if (rep.integrable) {
        std::vector<double> times;
        for (int i = 0; i <= 10; ++i) times.push_back(t0 + rep.horizon * i / 10.0);
        const auto trace = spectral_trace(fam, sigma, times);
        rep.spectral_discrepancy = trace.discrepancy;
        if (trace.discrepancy < options.spectral_tolerance) {
            rep.verdict = Verdict::regular_fixed;
            return rep;
        }
        rep.notes.push_back("integrable dilation but spectral routes disagree by " + fmt(trace.discrepancy));
    }

    // (2)-(3) Radial sweep of phi_{t0,t1} towards sigma.
    const bool real_slice = sigma.angle() == 0.0 && field.has_complement_form();
    const int k_last = real_slice ? options.sweep_k_last : std::min(options.sweep_k_last, 36);
    std::vector<Complex> values;
    std::vector<double> hs;
    try {
        for (int k = options.sweep_k_first; k <= k_last; ++k) {
            const double h = std::ldexp(1.0, -k);
            double gap = 0.0;
            Complex value;
            if (real_slice) {
                gap = fam.evolve_complement(t0, t1, h);
                value = 1.0 - gap;
            } else {
                const Complex d = fam.evolve_relative(t0, t1, sigma.value() * (1.0 - h), sigma.value()).value;
                gap = unit_anchor_gap(sigma.value(), d);
                value = sigma.value() + d;
            }
            hs.push_back(h);
            values.push_back(value);
            rep.sweep_distance.push_back(h);
            rep.sweep_gap.push_back(gap);
            rep.sweep_quotient.push_back(gap / h);
        }
    } catch (const LoewnerError& e) {
        rep.notes.push_back(std::string("radial sweep truncated: ") + e.what());
    }
    if (!values.empty()) {
        rep.sup_modulus = 1.0 - *std::min_element(rep.sweep_gap.begin(), rep.sweep_gap.end());
        rep.max_quotient = *std::max_element(rep.sweep_quotient.begin(), rep.sweep_quotient.end());
        rep.radial_limit = extrapolate_limit(hs, values);
        if (1.0 - rep.sup_modulus < options.margin && rep.max_quotient > options.divergence_threshold) {
            rep.verdict = Verdict::fixed_nonregular;
            return rep;
        }
        const auto& lim = rep.radial_limit;
        if ((lim.converged || lim.error_estimate < 0.1 * options.margin) && std::abs(lim.value) < 1.0 - options.margin) {
            rep.verdict = Verdict::lost_to_interior;
            return rep;
        }
    }

    // (4) Motion of the contact point.
    try {
        const std::array<double, 2> times{t0, t1};
        const auto traj = boundary_trajectory(field, sigma, times, fam.config());
        rep.trajectory_displacement = std::abs(traj.angles.back() - traj.angles.front());
        if (rep.trajectory_displacement > 1e-8) {
            rep.verdict = Verdict::contact_moving;
            return rep;
        }
    } catch (const LoewnerError& e) {
        rep.notes.push_back(std::string("boundary trajectory failed: ") + e.what());
    }
    rep.notes.push_back("no rule fired within thresholds");
    return rep;
}

InequalityReport brnp_pde_inequality_check(const HerglotzField& field, double t, std::span<const Complex> grid,
                                           double tolerance) {
    InequalityReport rep;
    const double lambda = dilation_at(field, BoundaryPoint(0.0), t);
    for (const auto& z : grid) {
        const double v = std::real(poisson_v(z) * field(z, t)) + lambda * poisson_u(z);
        if (v > rep.max_violation) {
            rep.max_violation = v;
            rep.witness = z;
        }
    }
    rep.violated = rep.max_violation > tolerance;
    return rep;
}

BvBoundReport bv_bound_check(const EvolutionFamily& fam, const BoundaryPoint& sigma, double s, double t) {
    BvBoundReport rep;
    if (s == t) return rep;
    const auto est = angular_derivative(anchored_flow(fam, s, t, sigma), sigma, StolzSchedule(sigma));
    rep.increment = -std::log(std::abs(est.value));
    const double r = std::abs(fam.evolve(s, t, Complex(0.0)));
    rep.bound = std::log((1.0 + r) / (1.0 - r));
    rep.violated = std::max(rep.increment, 0.0) > rep.bound + 1e-6;
    return rep;
}

}  // namespace loewner
