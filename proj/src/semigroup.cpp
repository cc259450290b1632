#include "loewner/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "loewner/errors.hpp"

namespace loewner {

namespace {

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

const std::array<Complex, 5> kDwSeeds = {Complex(0.0), Complex(0.5), Complex(-0.5), Complex(0.0, 0.5),
                                         Complex(0.0, -0.5)};

}  // namespace

// ---------------------------------------------------------------------------------------------
// Semigroups

Semigroup::Semigroup(HerglotzField generator, IntegratorConfig config) : fam_(std::move(generator), config) {
    if (!fam_.field().autonomous()) throw PreconditionError("semigroup: generator " + fam_.field().id() + " depends on t");
}

double Semigroup::law_residual(double s, double t, std::span<const Complex> grid) const {
    double worst = 0.0;
    for (const auto& z : grid) worst = std::max(worst, std::abs((*this)(s + t, z) - (*this)(t, (*this)(s, z))));
    return worst;
}

Complex semigroup_flow(const HerglotzField& generator, double t, Complex z, const IntegratorConfig& config) {
    if (!(t >= 0.0)) throw DomainError("semigroup_flow: t must be >= 0");
    return Semigroup(generator, config)(t, z);
}

std::string to_string(DwCase c) {
    switch (c) {
        case DwCase::interior_automorphism: return "interior_automorphism";
        case DwCase::interior_attracting: return "interior_attracting";
        case DwCase::boundary: return "boundary";
        case DwCase::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

DwResult dw_point(const DiscMap& phi, long max_iter, double tol) {
    DwResult res;
    std::vector<Complex> interior, boundary;
    for (const auto& seed : kDwSeeds) {
        Complex z = seed;
        for (long n = 0; n < max_iter; ++n) {
            const Complex w = phi(z);
            ++res.iterations;
            if (std::abs(w - z) < tol) {
                interior.push_back(w);
                break;
            }
            if (std::abs(w) > 1.0 - 1e-9) {
                boundary.push_back(w / std::abs(w));
                break;
            }
            z = w;
        }
    }

    const auto classify_interior = [&](Complex tau) {
        res.tau = tau;
        const double rho = 1e-3 * (1.0 - std::abs(tau));
        res.derivative_modulus = std::abs(contour_derivative(phi, tau, rho, 16));
        res.kind = res.derivative_modulus > 1.0 - 1e-8 ? DwCase::interior_automorphism : DwCase::interior_attracting;
    };

    if (!interior.empty()) {
        classify_interior(interior.front());
        for (const auto& p : interior) {
            if (std::abs(p - res.tau) > 1e-6) res.notes.push_back("seeds converged to distinct interior points");
        }
        return res;
    }
    if (!boundary.empty()) {
        const Complex tau = boundary.front();
        for (const auto& p : boundary) {
            if (std::abs(p - tau) > 1e-3) {
                res.notes.push_back("boundary iterates cluster at distinct points");
                return res;
            }
        }
        const BoundaryPoint sigma = BoundaryPoint::from_complex(tau);
        const auto alpha = dilatation_coefficient(phi, sigma, StolzSchedule::dyadic(sigma, 4, 20));
        res.tau = sigma.value();
        res.dilatation = alpha.value.real();
        if (res.dilatation <= 1.0 + 1e-6) {
            res.kind = DwCase::boundary;
        } else {
            res.notes.push_back("boundary candidate has dilatation " + fmt(res.dilatation) + " > 1");
        }
        return res;
    }

    // Iterates neither settle nor escape: look for a neutral interior fixed point.
    for (const auto& seed : kDwSeeds) {
        Complex z = seed;
        for (int it = 0; it < 50; ++it) {
            const double rho = 1e-3 * (1.0 - std::abs(z));
            const Complex f = phi(z) - z;
            if (std::abs(f) < tol) {
                classify_interior(z);
                res.notes.push_back("interior fixed point found by Newton iteration");
                return res;
            }
            const Complex d = contour_derivative(phi, z, rho, 16) - 1.0;
            if (std::abs(d) < 1e-14) break;
            z -= f / d;
            if (!(std::abs(z) < 1.0)) break;
        }
    }
    res.notes.push_back("no convergence within " + std::to_string(max_iter) + " iterations");
    return res;
}

ProductFormulaReport product_formula_check(const HerglotzField& field, double t0, double t, std::span<const int> ns,
                                           Complex z, const IntegratorConfig& config) {
    ProductFormulaReport rep;
    const EvolutionFamily frozen(field.frozen(t0), config, false);
    const EvolutionFamily fam(field, config, false);
    rep.reference = frozen.evolve(0.0, t, z);
    // Increases smaller than this are integrator noise (autonomous fields are exact for every n).
    const double noise = 100.0 * (config.atol + config.rtol * std::abs(rep.reference));
    for (int n : ns) {
        if (n < 1) throw PreconditionError("product_formula_check: n must be positive");
        Complex w = z;
        for (int i = 0; i < n; ++i) w = fam.evolve(t0, t0 + t / n, w);
        const double err = std::abs(w - rep.reference);
        if (!rep.rows.empty() && !(err <= rep.rows.back().error + noise)) rep.non_increasing = false;
        rep.rows.push_back({n, err});
    }
    if (!rep.rows.empty()) rep.final_error = rep.rows.back().error;
    return rep;
}

SemigroupBrfpReport semigroup_brfp_check(const HerglotzField& generator, const BoundaryPoint& sigma, double lambda,
                                         std::span<const double> times, double tolerance) {
    SemigroupBrfpReport rep;
    const Semigroup sg(generator);
    for (double t : times) {
        rep.times.push_back(t);
        const double expected = std::exp(lambda * t);
        double value = 1.0;
        if (t > 0.0) {
            const auto est = angular_derivative(anchored_flow(sg.family(), 0.0, t, sigma), sigma, StolzSchedule(sigma));
            value = std::abs(est.value);
            const double err = std::abs(est.value - expected);
            rep.max_error = std::max(rep.max_error, std::isfinite(err) ? err : INFINITY);
        }
        rep.derivative.push_back(value);
        rep.expected.push_back(expected);
    }
    rep.ok = rep.max_error <= tolerance;
    return rep;
}

// ---------------------------------------------------------------------------------------------
// Parabolic translations

ParabolicFamily::ParabolicFamily(double v0, double t0) : v0_(v0), t0_(t0) {
    if (!(t0 > 0.0)) throw PreconditionError("parabolic family: t0 must be positive");
}

MoebiusAutomorphism ParabolicFamily::at(double t) const {
    const Complex ia(0.0, t * v0_ / t0_);
    const Complex value = ia / (2.0 + ia);
    const Complex derivative = 4.0 / ((2.0 + ia) * (2.0 + ia));
    return MoebiusAutomorphism::from_origin_data(value, derivative);
}

Complex ParabolicFamily::time_derivative(double t, Complex z) const {
    if (v0_ == 0.0) return 0.0;
    const double c = v0_ / t0_;
    const Complex w = cayley(z) + Complex(0.0, t * c);
    return Complex(0.0, c) * 2.0 / ((w + 1.0) * (w + 1.0));
}

ParabolicFamily parabolic_translation_family(double v0, double t0) { return ParabolicFamily(v0, t0); }

// ---------------------------------------------------------------------------------------------
// Embedding

struct EmbeddingResult::Shared {
    EvolutionFamily base;
    SpectralPrescription pres;
    double t0;
    double v0;
    std::string target_id;
    ParabolicFamily ell;
    MoebiusAutomorphism ell_inverse;

    double base_dilation(double t) const { return dilation_at(base.field(), BoundaryPoint(0.0), t); }

    // Cumulative integral of the base dilation on nodes a + k h, one GK15 panel per cell.
    static constexpr double kCell = 1.0 / 32.0;
    mutable std::mutex nodes_mutex;
    mutable std::vector<double> nodes{0.0};

    double panel(double lo, double hi) const {
        using Kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;
        return Kronrod::integrate([this](double u) { return base_dilation(u); }, lo, hi, 0, 0.0);
    }

    double base_spectral(double t) const {
        const double a = base.field().valid_begin();
        if (t <= a) return 0.0;
        const auto k = static_cast<std::size_t>(std::floor((t - a) / kCell));
        double cum;
        {
            std::lock_guard lock(nodes_mutex);
            while (nodes.size() <= k) {
                const double lo = a + kCell * static_cast<double>(nodes.size() - 1);
                nodes.push_back(nodes.back() + panel(lo, lo + kCell));
            }
            cum = nodes[k];
        }
        const double lo = a + kCell * static_cast<double>(k);
        return -(cum + (t > lo ? panel(lo, t) : 0.0));
    }

    double lambda_prime(double t) const {
        if (pres.lambda_prime) return pres.lambda_prime(t);
        const double h = 1e-6;
        if (t - h < pres.lambda.begin()) return (pres.lambda(t + h) - pres.lambda(t)) / h;
        return (pres.lambda(t + h) - pres.lambda(t - h)) / (2.0 * h);
    }

    double x_of(double t) const { return std::tanh(0.5 * (pres.lambda(t) - base_spectral(t))); }

    MoebiusAutomorphism conjugator(double t) const {
        return ell_inverse.compose(ell.at(t)).compose(MoebiusAutomorphism(1.0, x_of(t)));
    }

    Complex induced(Complex w, double t) const {
        const double x = x_of(t);
        const double x_prime = 0.5 * (1.0 - x * x) * (lambda_prime(t) + base_dilation(t));
        const MoebiusAutomorphism m(1.0, x);
        const MoebiusAutomorphism lt = ell.at(t);
        const MoebiusAutomorphism A = ell_inverse.compose(lt).compose(m);
        const Complex u = A.inverse()(w);
        const Complex v = m(u);
        const Complex dm_dx = (1.0 - u * u) / ((1.0 + x * u) * (1.0 + x * u));
        const Complex dA_dt = ell_inverse.derivative(lt(v)) * (ell.time_derivative(t, v) + lt.derivative(v) * dm_dx * x_prime);
        return dA_dt + A.derivative(u) * base.field()(u, t);
    }
};

namespace {

HerglotzField make_induced_field(const std::shared_ptr<const EmbeddingResult::Shared>& d) {
    HerglotzField::Metadata meta;
    meta.id = d->target_id + "|embedded";
    meta.valid_begin = d->base.field().valid_begin();
    meta.valid_end = d->base.field().valid_end();
    meta.reference = "conjugation of an evolution family by m_t and parabolic l_t";
    // psi_{s,t}'(1) = exp(Lambda(s) - Lambda(t)), so the dilation at 1 is -Lambda'.
    meta.null_points.push_back(
        {BoundaryPoint(0.0), TimeFunction([d](double t) { return -d->lambda_prime(t); }, meta.valid_begin, meta.valid_end)});
    return HerglotzField([d](Complex w, double t) { return d->induced(w, t); }, std::move(meta));
}

}  // namespace

EmbeddingResult::EmbeddingResult(EvolutionFamily base, SpectralPrescription lambda, double t0, double v0,
                                 std::string target_id)
    : d_(std::make_shared<const Shared>(base, std::move(lambda), t0, v0, std::move(target_id),
                                               ParabolicFamily(v0, t0), ParabolicFamily(v0, t0).at(t0).inverse())),
      induced_(make_induced_field(d_), base.config()) {
    const double l0 = d_->pres.lambda(base.field().valid_begin());
    if (std::abs(l0) > 1e-12) throw PreconditionError("spectral prescription must vanish at the start, got " + fmt(l0));
}

Complex EmbeddingResult::psi(double s, double t, Complex z) const {
    const auto As = d_->conjugator(s);
    const auto At = d_->conjugator(t);
    return At(d_->base.evolve(s, t, As.inverse()(z)));
}

Complex EmbeddingResult::target(Complex z) const { return d_->base.evolve(0.0, d_->t0, d_->ell.at(d_->t0)(z)); }

MoebiusAutomorphism EmbeddingResult::conjugator(double t) const { return d_->conjugator(t); }
double EmbeddingResult::lambda(double t) const { return d_->pres.lambda(t); }
double EmbeddingResult::base_lambda(double t) const { return d_->base_spectral(t); }
double EmbeddingResult::t0() const { return d_->t0; }
double EmbeddingResult::v0() const { return d_->v0; }
const std::string& EmbeddingResult::target_id() const { return d_->target_id; }

EmbeddingResult prescribe_spectral(const EvolutionFamily& fam, const SpectralPrescription& lambda) {
    return EmbeddingResult(fam, lambda, 1.0, 0.0, fam.field().id() + "|prescribed");
}

EmbeddingResult embed_map(const EvolutionFamily& fam, double t0, const SpectralPrescription& lambda, double v0) {
    if (!(t0 > 0.0) || !fam.field().in_window(t0)) throw PreconditionError("embed_map: t0 outside the validity window");
    const BoundaryPoint one(0.0);
    const auto est = angular_derivative(anchored_flow(fam, fam.field().valid_begin(), t0, one), one, StolzSchedule(one));
    const double required = -std::log(std::abs(est.value));
    const double given = lambda.lambda(t0);
    if (std::abs(given - required) > 1e-6) {
        throw PreconditionError("embed_map: Lambda(t0) = " + fmt(given) + " is incompatible with the target; required " +
                                fmt(required) + " = -log phi'(1)");
    }
    return EmbeddingResult(fam, lambda, t0, v0, fam.field().id() + "@t0=" + fmt(t0));
}

EmbeddingCheck check_embedding(const EmbeddingResult& emb, std::span<const Complex> grid,
                               std::span<const std::pair<double, double>> pairs) {
    EmbeddingCheck chk;
    const auto& fam = emb.induced_family();
    const double t0 = emb.t0();
    const BoundaryPoint one(0.0);
    for (const auto& z : grid) {
        const Complex w = fam.evolve(0.0, t0, z);
        chk.target_deviation = std::max(chk.target_deviation, std::abs(w - emb.target(z)));
        chk.composition_deviation = std::max(chk.composition_deviation, std::abs(w - emb.psi(0.0, t0, z)));
    }
    for (const auto& [s, t] : pairs) {
        const auto lim = angular_limit([&](Complex z) { return emb.psi(s, t, z); }, one, StolzSchedule::dyadic(one, 4, 20));
        chk.fixed_point_deviation = std::max(chk.fixed_point_deviation, std::abs(lim.value - 1.0));
        const auto der = angular_derivative(anchored_flow(fam, s, t, one), one, StolzSchedule(one));
        const double expected = std::exp(emb.lambda(s) - emb.lambda(t));
        chk.derivative_deviation = std::max(chk.derivative_deviation, std::abs(der.value - expected));
        chk.ef2_residual = std::max(chk.ef2_residual, check_ef2(fam, s, 0.5 * (s + t), t, grid));
    }
    return chk;
}

}  // namespace loewner
