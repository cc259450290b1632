#include "loewner/chains.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "loewner/errors.hpp"

namespace loewner {

namespace {

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

bool usable(const AngularEstimate& e, double tol) {
    return std::isfinite(e.value.real()) && std::isfinite(e.value.imag()) &&
           (e.converged || (e.pattern == DivergencePattern::none && e.error_estimate < tol));
}

}  // namespace

ChainSnapshot::ChainSnapshot(EvolutionFamily fam, double horizon) : fam_(std::move(fam)), horizon_(horizon) {
    if (!fam_.field().in_window(horizon) || !(horizon > fam_.field().valid_begin())) {
        throw DomainError("chain: horizon " + fmt(horizon) + " outside the validity window of " + fam_.field().id());
    }
}

DiscMap ChainSnapshot::at(double s) const {
    return [fam = fam_, s, T = horizon_](Complex z) { return fam.evolve(s, T, z); };
}

ChainMap ChainSnapshot::as_map() const {
    return [fam = fam_, T = horizon_](double s, Complex z) { return fam.evolve(s, T, z); };
}

ChainSnapshot chain_from_family(const EvolutionFamily& fam, double horizon) { return ChainSnapshot(fam, horizon); }

double association_residual(const ChainSnapshot& chain, double s, double t, std::span<const Complex> grid) {
    double worst = 0.0;
    for (const auto& z : grid) {
        const Complex lhs = chain(t, chain.family().evolve(s, t, z));
        worst = std::max(worst, std::abs(lhs - chain(s, z)));
    }
    return worst;
}

RangeReport range_monotonicity_check(const ChainSnapshot& chain, double s, double t, std::span<const Complex> grid) {
    RangeReport rep;
    for (const auto& z : grid) {
        const Complex w = chain(s, z);
        const Complex pre = chain.inverse(t, w);
        rep.all_inside = rep.all_inside && std::abs(pre) < 1.0;
        rep.max_residual = std::max(rep.max_residual, std::abs(chain(t, pre) - w));
    }
    return rep;
}

Complex pde_residual(const ChainSnapshot& chain, Complex z, double s, double delta) {
    const double T = chain.horizon();
    if (!(s - delta >= chain.begin() && s + delta <= T)) {
        throw PreconditionError("pde_residual: [s - delta, s + delta] must lie in [" + fmt(chain.begin()) + ", " +
                                fmt(T) + "]");
    }
    IntegratorConfig tight = chain.family().config();
    tight.rtol = std::min(tight.rtol, 1e-13);
    tight.atol = std::min(tight.atol, 1e-15);
    const EvolutionFamily fam(chain.family().field(), tight, false);
    const Complex ds = (fam.evolve(s + delta, T, z) - fam.evolve(s - delta, T, z)) / (2.0 * delta);
    const Complex fprime = fam.evolve_with_derivative(s, T, z).derivative;
    return ds + fam.field()(z, s) * fprime;
}

ConditionCReport condition_C_check(const ChainSnapshot& chain, const BoundaryPoint& sigma, double t0,
                                   std::span<const double> times, double c3_margin) {
    ConditionCReport rep;
    const bool fixed = chain.family().field().null_point_at(sigma) != nullptr;
    const Complex s_val = sigma.value();
    Complex ref_value = NAN;
    bool have_ref = false;

    for (double s : times) {
        rep.times.push_back(s);
        Complex value = NAN;
        Complex der = NAN;
        bool ok = false;
        try {
            const auto lim = angular_limit(chain.at(s), sigma, StolzSchedule::dyadic(sigma, 4, 20));
            value = lim.value;
            if (usable(lim, 1e-6)) {
                AngularEstimate d;
                if (fixed && std::abs(lim.value - s_val) < 1e-9) {
                    value = s_val;
                    const AnchoredMap f{s_val, [&chain, s, s_val](Complex z) { return chain.increment(s, z, s_val); }};
                    d = angular_derivative(f, sigma, StolzSchedule(sigma));
                } else {
                    d = angular_derivative(chain.at(s), sigma, lim.value, StolzSchedule::dyadic(sigma, 4, 16));
                }
                der = d.value;
                ok = usable(d, 1e-5) && std::abs(d.value) > 1e-12;
                if (!ok) rep.notes.push_back("s = " + fmt(s) + ": angular derivative " + to_string(d.pattern));
            } else {
                rep.notes.push_back("s = " + fmt(s) + ": no angular limit (" + to_string(lim.pattern) + ")");
            }
        } catch (const LoewnerError& e) {
            rep.notes.push_back("s = " + fmt(s) + ": " + e.what());
        }
        rep.boundary_value.push_back(value);
        rep.derivative.push_back(der);
        rep.conformal.push_back(ok);
        rep.c1 = rep.c1 && ok;
        if (s == t0) {
            ref_value = value;
            have_ref = true;
        }
    }
    if (!have_ref) throw PreconditionError("condition_C_check: t0 must be one of the grid times");

    double arg_min = INFINITY, arg_max = -INFINITY;
    for (std::size_t i = 0; i < rep.times.size(); ++i) {
        const Complex v = rep.boundary_value[i];
        if (!(std::abs(v - ref_value) < 1e-6)) rep.c2 = false;
        if (!rep.conformal[i]) continue;
        const double a = std::arg(rep.derivative[i]);
        arg_min = std::min(arg_min, a);
        arg_max = std::max(arg_max, a);
        if (i > 0 && rep.conformal[i - 1]) {
            rep.c3_max_arg = std::max(rep.c3_max_arg, std::abs(std::arg(rep.derivative[i] / rep.derivative[i - 1])));
        }
    }
    rep.c3 = rep.c3_max_arg < std::numbers::pi - c3_margin;
    rep.arg_spread = arg_max >= arg_min ? arg_max - arg_min : 0.0;
    return rep;
}

PoleData residue_at_pole(const DiscMap& f, const BoundaryPoint& sigma, const StolzSchedule& schedule) {
    PoleData pd;
    pd.sigma = sigma;
    const Complex s = sigma.value();
    std::vector<double> h(schedule.size());
    std::vector<Complex> v(schedule.size());
    for (std::size_t k = 0; k < schedule.size(); ++k) {
        h[k] = schedule.distance(k);
        const Complex offset = -s * schedule.distance(k) * std::polar(1.0, schedule.aperture());
        v[k] = offset * f(schedule.point(k));
    }
    pd.estimate = extrapolate_limit(h, v);
    pd.residue = pd.estimate.value;
    pd.converged = pd.estimate.converged;
    pd.simple_pole = pd.converged && std::abs(pd.residue) > 1e-8;
    return pd;
}

PoleData residue_at_pole(const DiscMap& f, const BoundaryPoint& sigma) {
    return residue_at_pole(f, sigma, StolzSchedule(sigma));
}

PoleTransform::PoleTransform(ChainMap chain, double horizon, Complex w0, std::span<const Complex> test_grid,
                             std::span<const double> test_times)
    : chain_(std::move(chain)), horizon_(horizon), w0_(w0) {
    for (double t : test_times) {
        for (const auto& z : test_grid) {
            const double d = std::abs(chain_(l(t), z) - w0_);
            if (!(d > 0.1)) {
                throw PreconditionError("pole_transform: w0 lies within " + fmt(d) + " of the image of f_" +
                                        fmt(l(t)));
            }
        }
    }
}

Complex PoleTransform::operator()(double t, Complex z) const { return 1.0 / (chain_(l(t), z) - w0_); }

DiscMap PoleTransform::at(double t) const {
    return [self = *this, t](Complex z) { return self(t, z); };
}

PoleRoundTrip pole_round_trip(const PoleTransform& g, const ChainMap& chain, const BoundaryPoint& sigma, double t) {
    PoleRoundTrip rt;
    rt.t = t;
    const auto gt = g.at(t);
    rt.g_value = angular_limit(gt, sigma);
    rt.g_derivative = angular_derivative(gt, sigma, Complex(0.0), StolzSchedule(sigma));
    const double lt = g.l(t);
    rt.residue = residue_at_pole([&](Complex z) { return chain(lt, z); }, sigma);
    rt.product = rt.g_derivative.value * rt.residue.residue;
    return rt;
}

HerglotzField radial_loewner_field(const CaratheodoryFunction& p, std::span<const double> check_times) {
    static constexpr double kDefaultTimes[] = {0.0};
    const auto times = check_times.empty() ? std::span<const double>(kDefaultTimes) : check_times;
    for (double t : times) {
        const Complex p0 = p(Complex(0.0), t);
        if (std::abs(p0 - 1.0) > 1e-12) {
            throw PreconditionError("radial_loewner: p(0,t) must equal 1 (got " + fmt(p0.real()) + " + " +
                                    fmt(p0.imag()) + "i at t = " + fmt(t) + ")");
        }
    }
    p.validate(times);
    return radial_field(p);
}

MapValue radial_loewner(const CaratheodoryFunction& p, double s, double t, Complex z, const IntegratorConfig& config) {
    const double times[] = {s, t};
    const EvolutionFamily fam(radial_loewner_field(p, times), config, false);
    return fam.evolve_with_derivative(s, t, z);
}

}  // namespace loewner
