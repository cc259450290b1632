#include "loewner/evolution.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <string>
#include <tuple>

#include "loewner/errors.hpp"

namespace loewner {

void IntegratorConfig::validate() const {
    if (!(rtol > 0.0 && atol > 0.0)) throw PreconditionError("IntegratorConfig: rtol and atol must be positive");
    if (!(h_min > 0.0 && h_min <= h_init && h_init <= h_max)) {
        throw PreconditionError("IntegratorConfig: need 0 < h_min <= h_init <= h_max");
    }
    if (!(containment_margin >= 0.0 && containment_margin < 0.5)) {
        throw PreconditionError("IntegratorConfig: containment_margin must lie in [0, 0.5)");
    }
}

IntegratorConfig IntegratorConfig::scaled(double factor) const {
    if (!(factor > 0.0)) throw PreconditionError("IntegratorConfig: tolerance scale must be positive");
    IntegratorConfig c = *this;
    c.rtol *= factor;
    c.atol *= factor;
    c.containment_margin *= factor;
    return c;
}

namespace {

using Checkpoint = OdeState<Complex, 2>;

// s, Re z, Im z, Re anchor, Im anchor, relative, order
using CacheKey = std::tuple<double, double, double, double, double, bool, int>;

constexpr std::size_t kCacheLimit = 400000;

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

}  // namespace

struct EvolutionFamily::Cache {
    std::mutex mutex;
    std::map<CacheKey, std::map<double, Checkpoint>> entries;
    std::size_t count = 0;
};

EvolutionFamily::EvolutionFamily(HerglotzField field, IntegratorConfig config, bool cache)
    : field_(std::move(field)), config_(config), cache_enabled_(cache), cache_(std::make_shared<Cache>()) {
    config_.validate();
}

void EvolutionFamily::clear_cache() const {
    std::lock_guard lock(cache_->mutex);
    cache_->entries.clear();
    cache_->count = 0;
}

std::size_t EvolutionFamily::cache_size() const {
    std::lock_guard lock(cache_->mutex);
    return cache_->count;
}

void EvolutionFamily::check_times(double s, double t) const {
    if (!(s <= t)) throw DomainError("evolve: need s <= t (s = " + fmt(s) + ", t = " + fmt(t) + ")");
    if (!field_.in_window(s) || (t > s && !field_.in_window(t))) {
        throw DomainError("evolve: [" + fmt(s) + ", " + fmt(t) + "] outside validity window of field " + field_.id());
    }
}

template <std::size_t N>
std::array<Complex, 2> EvolutionFamily::integrate(double s, double t, Complex z, Complex anchor, bool relative) const {
    if (!(std::abs(z) < 1.0)) throw DomainError("evolve: starting point outside the unit disc");
    check_times(s, t);

    const double limit = 1.0 - config_.containment_margin;
    const auto guard = [&](const std::array<Complex, 2>& y) {
        const Complex w = relative ? anchor + y[0] : y[0];
        if (!(std::abs(w) < limit)) {
            throw ContainmentError("trajectory of field " + field_.id() + " reached |w| = " + fmt(std::abs(w)));
        }
    };
    const auto rhs = [&](double tt, const std::array<Complex, 2>& y) {
        const Complex w = relative ? anchor + y[0] : y[0];
        std::array<Complex, 2> dy{field_(w, tt), Complex(0.0)};
        if constexpr (N == 2) dy[1] = field_.derivative(w, tt) * y[1];
        return dy;
    };

    Checkpoint st;
    st.t = s;
    st.y = {relative ? z - anchor : z, Complex(1.0)};
    guard(st.y);
    if (t == s) return {st.y[0], st.y[1]};

    const CacheKey key{s, z.real(), z.imag(), anchor.real(), anchor.imag(), relative, static_cast<int>(N)};
    if (cache_enabled_) {
        std::lock_guard lock(cache_->mutex);
        auto it = cache_->entries.find(key);
        if (it != cache_->entries.end()) {
            auto cp = it->second.upper_bound(t);
            if (cp != it->second.begin()) {
                --cp;
                st = cp->second;
                if (st.t == t) return {st.y[0], st.y[1]};
            }
        }
    }

    // Pure relative control in the shifted variable; the tiny atol only guards against 0/0.
    const double atol = relative ? 1e-300 : config_.atol;
    st = dopri5<Complex, 2>(rhs, st, t, config_, atol, config_.rtol, guard);

    if (cache_enabled_) {
        std::lock_guard lock(cache_->mutex);
        if (cache_->count >= kCacheLimit) {
            cache_->entries.clear();
            cache_->count = 0;
        }
        auto [pos, inserted] = cache_->entries[key].emplace(t, st);
        if (inserted) ++cache_->count;
    }
    return {st.y[0], st.y[1]};
}

Complex EvolutionFamily::evolve(double s, double t, Complex z) const {
    return integrate<1>(s, t, z, Complex(0.0), false)[0];
}

MapValue EvolutionFamily::evolve_with_derivative(double s, double t, Complex z) const {
    const auto y = integrate<2>(s, t, z, Complex(0.0), false);
    return {y[0], y[1]};
}

MapValue EvolutionFamily::evolve_relative(double s, double t, Complex z, Complex anchor) const {
    const auto y = integrate<2>(s, t, z, anchor, true);
    return {y[0], y[1]};
}

Complex EvolutionFamily::invert(double s, double t, Complex w, std::optional<Complex> seed) const {
    EvolutionFamily uncached(field_, config_, false);
    Complex x = seed.value_or(w);
    double residual = INFINITY;
    for (int it = 0; it < 50; ++it) {
        if (std::abs(x) >= 1.0) x *= (1.0 - 1e-6) / std::abs(x);
        const auto mv = uncached.evolve_with_derivative(s, t, x);
        const Complex r = mv.value - w;
        residual = std::abs(r);
        if (residual < 1e-12) return x;
        Complex step = r / mv.derivative;
        // Damp steps that would leave the disc.
        while (std::abs(x - step) >= 1.0) step *= 0.5;
        x -= step;
    }
    throw EvaluationError("invert: Newton iteration did not converge (residual " + fmt(residual) + ")");
}

double EvolutionFamily::evolve_complement(double s, double t, double w) const {
    if (!field_.has_complement_form()) throw PreconditionError("field " + field_.id() + " has no complement form");
    if (!(w > 0.0 && w < 1.0)) throw DomainError("evolve_complement: need 0 < w < 1");
    check_times(s, t);
    if (t == s) return w;
    IntegratorConfig cfg = config_;
    cfg.h_min = std::min(cfg.h_min, 1e-24);
    cfg.h_init = std::min(cfg.h_init, 1e-6);
    const auto rhs = [&](double tt, const std::array<double, 1>& y) {
        return std::array<double, 1>{field_.complement_rhs(y[0], tt)};
    };
    const auto guard = [&](const std::array<double, 1>& y) {
        if (!(y[0] > 0.0 && y[0] < 2.0)) {
            throw ContainmentError("real slice of field " + field_.id() + " left (-1, 1): 1 - x = " + fmt(y[0]));
        }
    };
    OdeState<double, 1> st;
    st.t = s;
    st.y = {w};
    st = dopri5<double, 1>(rhs, st, t, cfg, 1e-300, config_.rtol, guard);
    return st.y[0];
}

double EvolutionFamily::evolve_real_slice(double s, double t, double x) const {
    if (!(x > -1.0 && x < 1.0)) throw DomainError("evolve_real_slice: need -1 < x < 1");
    if (field_.has_complement_form()) return 1.0 - evolve_complement(s, t, 1.0 - x);
    return evolve(s, t, Complex(x)).real();
}

DiscMap EvolutionFamily::map(double s, double t) const {
    return [fam = *this, s, t](Complex z) { return fam.evolve(s, t, z); };
}

// ---------------------------------------------------------------------------------------------

double check_ef2(const EvolutionFamily& fam, double s, double u, double t, std::span<const Complex> grid) {
    double worst = 0.0;
    for (const auto& z : grid) {
        const Complex direct = fam.evolve(s, t, z);
        const Complex split = fam.evolve(u, t, fam.evolve(s, u, z));
        worst = std::max(worst, std::abs(direct - split));
    }
    return worst;
}

Ef3Report check_ef3(const EvolutionFamily& fam, double s, Complex z, std::span<const double> times,
                    double d_exponent) {
    Ef3Report rep;
    rep.times.assign(times.begin(), times.end());
    if (times.size() < 2) return rep;
    Complex prev = fam.evolve(s, times[0], z);
    double sum = 0.0;
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double dt = times[i] - times[i - 1];
        if (!(dt > 0.0)) throw PreconditionError("check_ef3: times must be strictly increasing");
        const Complex cur = fam.evolve(s, times[i], z);
        const double inc = std::abs(cur - prev);
        const double k = inc / dt;
        rep.increments.push_back(inc);
        rep.majorant.push_back(k);
        rep.field_bound.push_back(
            std::max(std::abs(fam.field()(prev, times[i - 1])), std::abs(fam.field()(cur, times[i]))));
        if (std::isinf(d_exponent)) {
            sum = std::max(sum, k);
        } else {
            sum += std::pow(k, d_exponent) * dt;
        }
        rep.finite = rep.finite && std::isfinite(k);
        prev = cur;
    }
    rep.ld_norm = std::isinf(d_exponent) ? sum : std::pow(sum, 1.0 / d_exponent);
    rep.finite = rep.finite && std::isfinite(rep.ld_norm);
    return rep;
}

BoundaryTrajectory boundary_trajectory(const HerglotzField& field, const BoundaryPoint& sigma0,
                                       std::span<const double> times, const IntegratorConfig& config) {
    BoundaryTrajectory traj;
    traj.sigma0 = sigma0;
    if (times.empty()) return traj;
    // Declared null points do not move; the field may only extend continuously there.
    if (field.null_point_at(sigma0) != nullptr) {
        for (double t : times) {
            traj.times.push_back(t);
            traj.angles.push_back(sigma0.angle());
            traj.velocities.push_back(0.0);
        }
        return traj;
    }

    const auto tangent = [&](double theta, double t) {
        const Complex sigma = std::polar(1.0, theta);
        const Complex q = Complex(0.0, -1.0) * std::conj(sigma) * field(sigma, t);
        if (std::abs(q.imag()) > 1e-8) {
            throw TangencyError("field " + field.id() + " is not tangent to the circle at angle " + fmt(theta) +
                                ", t = " + fmt(t) + " (normal component " + fmt(q.imag()) + ")");
        }
        return q.real();
    };
    const auto rhs = [&](double t, const std::array<double, 1>& y) {
        const Complex sigma = std::polar(1.0, y[0]);
        return std::array<double, 1>{(Complex(0.0, -1.0) * std::conj(sigma) * field(sigma, t)).real()};
    };
    const auto no_guard = [](const std::array<double, 1>&) {};

    OdeState<double, 1> st;
    st.t = times[0];
    st.y = {sigma0.angle()};
    for (double t : times) {
        st = dopri5<double, 1>(rhs, st, t, config, config.atol, config.rtol, no_guard);
        traj.times.push_back(t);
        traj.angles.push_back(st.y[0]);
        traj.velocities.push_back(tangent(st.y[0], t));
    }
    return traj;
}

SchwarzPickReport schwarz_pick_check(const EvolutionFamily& fam, double s, double t, std::span<const Complex> grid) {
    SchwarzPickReport rep;
    for (const auto& z : grid) {
        const auto mv = fam.evolve_with_derivative(s, t, z);
        const double ratio = std::abs(mv.derivative) * (1.0 - std::norm(z)) / (1.0 - std::norm(mv.value));
        if (ratio > rep.max_ratio) {
            rep.max_ratio = ratio;
            rep.witness = z;
        }
    }
    rep.violated = rep.max_ratio > 1.0 + 1e-6;
    return rep;
}

double univalence_check(const EvolutionFamily& fam, double s, double t, std::span<const Complex> grid) {
    std::vector<Complex> img;
    img.reserve(grid.size());
    for (const auto& z : grid) img.push_back(fam.evolve(s, t, z));
    double best = INFINITY;
    for (std::size_t i = 0; i < img.size(); ++i) {
        for (std::size_t j = i + 1; j < img.size(); ++j) best = std::min(best, std::abs(img[i] - img[j]));
    }
    return best;
}

}  // namespace loewner
