#include "loewner/herglotz.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "loewner/errors.hpp"

namespace loewner {

namespace {

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

}  // namespace

// ---------------------------------------------------------------------------------------------
// TimeFunction

TimeFunction::TimeFunction(std::function<double(double)> fn, double begin, double end)
    : fn_(std::move(fn)), begin_(begin), end_(end) {
    if (!(begin < end)) throw DomainError("TimeFunction: empty validity window");
}

double TimeFunction::operator()(double t) const {
    if (!contains(t)) {
        throw DomainError("time " + num(t) + " outside validity window [" + num(begin_) + ", " + num(end_) + ")");
    }
    return fn_(t);
}

// ---------------------------------------------------------------------------------------------
// CaratheodoryFunction

CaratheodoryFunction::CaratheodoryFunction(SpaceTimeFn fn) : fn_(std::move(fn)) {}

CaratheodoryFunction CaratheodoryFunction::constant(Complex value) {
    return CaratheodoryFunction([value](Complex, double) { return value; });
}

std::vector<Complex> CaratheodoryFunction::validation_grid() {
    std::vector<Complex> grid;
    for (double r : {0.5, 0.9, 0.99, 0.999}) {
        for (int k = 0; k < 64; ++k) grid.push_back(std::polar(r, kTwoPi * k / 64.0));
    }
    return grid;
}

void CaratheodoryFunction::validate(std::span<const double> times) const {
    static const auto grid = validation_grid();
    for (double t : times) {
        for (const auto& z : grid) {
            const Complex v = fn_(z, t);
            // Tolerate roundoff on functions with Re p = 0 identically (rotations).
            if (v.real() < -1e-12 * (1.0 + std::abs(v))) {
                throw ValidationError("Caratheodory function has Re p = " + num(v.real()) + " < 0 at z = (" +
                                      num(z.real()) + ", " + num(z.imag()) + "), t = " + num(t));
            }
        }
    }
}

double CaratheodoryFunction::side_condition_residual(const BoundaryPoint& sigma, double t) const {
    const auto schedule = StolzSchedule::dyadic(sigma, 16, 24);
    double worst = 0.0;
    for (std::size_t k = 0; k < schedule.size(); ++k) {
        const Complex z = schedule.point(k);
        worst = std::max(worst, std::abs((z - sigma.value()) * fn_(z, t)));
    }
    return worst;
}

// ---------------------------------------------------------------------------------------------
// HerglotzField

HerglotzField::HerglotzField(SpaceTimeFn g, Metadata meta) : g_(std::move(g)), meta_(std::move(meta)) {
    if (!(meta_.order >= 1.0)) throw DomainError("HerglotzField: order must lie in [1, inf]");
    if (!(meta_.valid_begin < meta_.valid_end)) throw DomainError("HerglotzField: empty validity window");
}

Complex HerglotzField::operator()(Complex z, double t) const {
    if (!in_window(t)) {
        throw DomainError("field " + meta_.id + ": time " + num(t) + " outside validity window [" +
                          num(meta_.valid_begin) + ", " + num(meta_.valid_end) + ")");
    }
    return g_(z, t);
}

Complex HerglotzField::derivative(Complex z, double t) const {
    if (meta_.derivative) {
        if (!in_window(t)) (void)(*this)(z, t);
        return meta_.derivative(z, t);
    }
    const double gap = 1.0 - std::abs(z);
    const double rho = gap > 0.0 ? std::min(1e-3, 0.25 * gap) : 1e-4;
    return contour_derivative([&](Complex w) { return (*this)(w, t); }, z, rho, 16);
}

double HerglotzField::complement_rhs(double w, double t) const {
    if (!meta_.complement_rhs) throw PreconditionError("field " + meta_.id + " has no real-slice complement form");
    if (!in_window(t)) (void)(*this)(Complex(0.0), t);
    return meta_.complement_rhs(w, t);
}

const NullPoint* HerglotzField::null_point_at(const BoundaryPoint& sigma) const {
    for (const auto& np : meta_.null_points) {
        if (std::abs(np.sigma.value() - sigma.value()) < 1e-12) return &np;
    }
    return nullptr;
}

HerglotzField HerglotzField::frozen(double t0) const {
    (void)(*this)(Complex(0.0), t0);
    Metadata m = meta_;
    m.id = meta_.id + "@t=" + num(t0);
    m.autonomous = true;
    m.valid_begin = 0.0;
    m.valid_end = kInfinity;
    m.order = kInfinity;
    for (auto& np : m.null_points) {
        const double lam = np.dilation(t0);
        np.dilation = TimeFunction::constant(lam);
    }
    if (meta_.dw_point) {
        const Complex tau = meta_.dw_point(t0);
        m.dw_point = [tau](double) { return tau; };
    }
    if (meta_.derivative) {
        m.derivative = [d = meta_.derivative, t0](Complex z, double) { return d(z, t0); };
    }
    if (meta_.complement_rhs) {
        m.complement_rhs = [c = meta_.complement_rhs, t0](double w, double) { return c(w, t0); };
    }
    return HerglotzField([g = g_, t0](Complex z, double) { return g(z, t0); }, std::move(m));
}

// ---------------------------------------------------------------------------------------------
// Constructors

HerglotzField berkson_porta_field(std::function<Complex(double)> tau, const CaratheodoryFunction& p, std::string id,
                                  std::span<const double> validation_times) {
    static constexpr double kDefaultTimes[] = {0.0};
    p.validate(validation_times.empty() ? std::span<const double>(kDefaultTimes) : validation_times);
    HerglotzField::Metadata meta;
    meta.id = std::move(id);
    meta.dw_point = tau;
    return HerglotzField(
        [tau, p](Complex z, double t) {
            const Complex a = tau(t);
            return (z - a) * (std::conj(a) * z - 1.0) * p(z, t);
        },
        std::move(meta));
}

HerglotzField brnp_pinned_field(const BoundaryPoint& sigma, const TimeFunction& lambda, const CaratheodoryFunction& p,
                                std::string id, SideConditionPolicy policy, std::span<const double> check_times) {
    static constexpr double kDefaultTimes[] = {0.0};
    const auto times = check_times.empty() ? std::span<const double>(kDefaultTimes) : check_times;
    p.validate(times);

    bool warning = false;
    for (double t : times) {
        const double residual = p.side_condition_residual(sigma, t);
        if (residual > 1e-6) {
            if (policy == SideConditionPolicy::reject) {
                throw ValidationError("side condition (z - sigma) p(z) -> 0 fails: residual " + num(residual));
            }
            warning = true;
        }
    }

    const Complex s = sigma.value();
    HerglotzField::Metadata meta;
    meta.id = std::move(id);
    meta.null_points.push_back({sigma, lambda});
    meta.side_condition_warning = warning;
    meta.valid_begin = lambda.begin();
    meta.valid_end = lambda.end();
    return HerglotzField(
        [s, lambda, p](Complex z, double t) {
            // (z - s)(conj(s) z - 1) = conj(s)(z - s)^2; the dilation term is simplified to avoid 0/0 at s.
            const Complex d = z - s;
            return std::conj(s) * d * d * p(z, t) + 0.5 * lambda(t) * std::conj(s) * d * (z + s);
        },
        std::move(meta));
}

HerglotzField pinned_field(const BoundaryPoint& sigma, const TimeFunction& lambda, std::string id) {
    const Complex s = sigma.value();
    HerglotzField::Metadata meta;
    meta.id = id.empty() ? "brnp:" + num(sigma.angle()) + ",?" : std::move(id);
    meta.valid_begin = lambda.begin();
    meta.valid_end = lambda.end();
    meta.null_points.push_back({sigma, lambda});
    meta.null_points.push_back(
        {BoundaryPoint(sigma.angle() + std::numbers::pi),
         TimeFunction([lambda](double t) { return -lambda(t); }, lambda.begin(), lambda.end())});
    meta.derivative = [s, lambda](Complex z, double t) { return lambda(t) * std::conj(s) * z; };
    if (sigma.angle() == 0.0) {
        meta.complement_rhs = [lambda](double w, double t) { return 0.5 * lambda(t) * w * (2.0 - w); };
    }
    meta.reference = "boundary regular null point with prescribed dilation, p = 0";
    return HerglotzField(
        [s, lambda](Complex z, double t) { return 0.5 * lambda(t) * std::conj(s) * (z - s) * (z + s); },
        std::move(meta));
}

HerglotzField rotation_field() {
    HerglotzField::Metadata meta;
    meta.id = "rot";
    meta.autonomous = true;
    meta.dw_point = [](double) { return Complex(0.0); };
    meta.derivative = [](Complex, double) { return Complex(0.0, 1.0); };
    meta.reference = "elliptic rotation semigroup, Denjoy-Wolff point 0";
    return HerglotzField([](Complex z, double) { return Complex(0.0, 1.0) * z; }, std::move(meta));
}

HerglotzField hyperbolic_field(double lambda) {
    HerglotzField::Metadata meta;
    meta.id = "hyperbolic:" + num(lambda);
    meta.autonomous = true;
    meta.null_points.push_back({BoundaryPoint(0.0), TimeFunction::constant(-lambda)});
    meta.null_points.push_back({BoundaryPoint(std::numbers::pi), TimeFunction::constant(lambda)});
    if (lambda > 0.0) meta.dw_point = [](double) { return Complex(1.0); };
    if (lambda < 0.0) meta.dw_point = [](double) { return Complex(-1.0); };
    meta.derivative = [lambda](Complex z, double) { return -lambda * z; };
    meta.complement_rhs = [lambda](double w, double) { return -0.5 * lambda * w * (2.0 - w); };
    meta.reference = "hyperbolic semigroup, flow conjugate to w -> e^{lambda t} w on the right half-plane";
    return HerglotzField([lambda](Complex z, double) { return 0.5 * lambda * (1.0 - z * z); }, std::move(meta));
}

HerglotzField rotated_hyperbolic_field(double lambda, double theta) {
    const Complex rot = std::polar(1.0, theta);
    HerglotzField::Metadata meta;
    meta.id = "hyperbolic-rot:" + num(lambda) + "," + num(theta);
    meta.autonomous = true;
    meta.null_points.push_back({BoundaryPoint(theta), TimeFunction::constant(-lambda)});
    meta.null_points.push_back({BoundaryPoint(theta + std::numbers::pi), TimeFunction::constant(lambda)});
    if (lambda > 0.0) meta.dw_point = [rot](double) { return rot; };
    if (lambda < 0.0) meta.dw_point = [rot](double) { return -rot; };
    meta.derivative = [lambda, rot](Complex z, double) { return -lambda * std::conj(rot) * z; };
    meta.reference = "hyperbolic semigroup conjugated by a rotation";
    return HerglotzField(
        [lambda, rot](Complex z, double) {
            const Complex u = std::conj(rot) * z;
            return rot * 0.5 * lambda * (1.0 - u * u);
        },
        std::move(meta));
}

HerglotzField radial_field(const CaratheodoryFunction& p, std::string id) {
    HerglotzField::Metadata meta;
    meta.id = std::move(id);
    meta.dw_point = [](double) { return Complex(0.0); };
    meta.reference = "radial Loewner equation dw/dt = -w p(w,t)";
    return HerglotzField([p](Complex z, double t) { return -z * p(z, t); }, std::move(meta));
}

// ---------------------------------------------------------------------------------------------
// ExampleFieldGLambdaR

ExampleFieldGLambdaR::ExampleFieldGLambdaR(TimeFunction lambda, TimeFunction r, TimeFunction one_minus_r,
                                           TimeFunction m, std::string id, std::string reference)
    : lambda_(std::move(lambda)),
      r_(std::move(r)),
      one_minus_r_(std::move(one_minus_r)),
      m_(std::move(m)),
      field_([](Complex, double) { return Complex(0.0); }, {}) {
    build_field(std::move(id), std::move(reference));
}

double ExampleFieldGLambdaR::one_minus_r(double t) const { return one_minus_r_ ? one_minus_r_(t) : 1.0 - r_(t); }

double ExampleFieldGLambdaR::m(double t) const { return m_ ? m_(t) : lambda_(t) * one_minus_r(t); }

Complex ExampleFieldGLambdaR::operator()(Complex z, double t) const { return field_(z, t); }

Complex ExampleFieldGLambdaR::product_form(Complex z, double t) const {
    const Complex d = 1.0 - z;
    return d * d * (0.5 * lambda_(t)) * (cayley(r_(t) * z) - cayley(z));
}

Complex ExampleFieldGLambdaR::derivative(Complex z, double t) const { return field_.derivative(z, t); }

void ExampleFieldGLambdaR::build_field(std::string id, std::string reference) {
    // Copies keep the field independent of this object's lifetime.
    const auto omr = [lam = lambda_, r = r_, o = one_minus_r_](double t) { return o ? o(t) : 1.0 - r(t); };
    const auto mm = [lam = lambda_, omr, m = m_](double t) { return m ? m(t) : lam(t) * omr(t); };
    const auto rr = r_;

    HerglotzField::Metadata meta;
    meta.id = std::move(id);
    meta.reference = std::move(reference);
    meta.order = 1.0;
    meta.valid_begin = std::max(lambda_.begin(), r_.begin());
    meta.valid_end = std::min(lambda_.end(), r_.end());
    meta.null_points.push_back({BoundaryPoint(0.0), lambda_});
    meta.dw_point = [](double) { return Complex(0.0); };
    meta.derivative = [omr, mm, rr](Complex z, double t) {
        const double r = rr(t);
        const Complex den = omr(t) * z + (1.0 - z);  // 1 - r z
        return -mm(t) * (1.0 - 2.0 * z + r * z * z) / (den * den);
    };
    meta.complement_rhs = [omr, mm, rr](double w, double t) {
        // w = 1 - x: dw/dt = M (1 - w) w / ((1 - r) + r w)
        return mm(t) * (1.0 - w) * w / (omr(t) + rr(t) * w);
    };
    field_ = HerglotzField(
        [omr, mm](Complex z, double t) {
            const Complex den = omr(t) * z + (1.0 - z);
            return -mm(t) * z * (1.0 - z) / den;
        },
        std::move(meta));
}

ExampleFieldGLambdaR example_field(const TimeFunction& lambda, const TimeFunction& r,
                                   std::span<const double> sample_times) {
    for (double t : sample_times) {
        if (!(r(t) < 1.0) || !(r(t) >= 0.0)) throw ValidationError("example_field: r(t) must lie in [0,1), t = " + num(t));
        if (!(lambda(t) >= 0.0)) throw ValidationError("example_field: lambda(t) must be >= 0, t = " + num(t));
    }
    return ExampleFieldGLambdaR(lambda, r, {}, {}, "glr",
                                "generator with prescribed nonnegative dilation at 1, |G| <= 2 lambda (1 - r)");
}

double example64_horizon(double alpha) { return std::log(2.0 / (2.0 - alpha)) / alpha; }

ExampleFieldGLambdaR example64_field(double alpha) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("example64_field: alpha must lie in (0,2)");
    const double horizon = example64_horizon(alpha);
    const double c = 2.0 / alpha - 1.0;
    TimeFunction omr([alpha, c](double t) { return c * std::expm1(alpha * t); }, 0.0, horizon);
    TimeFunction r([alpha, c](double t) { return 1.0 - c * std::expm1(alpha * t); }, 0.0, horizon);
    TimeFunction lambda([alpha, c](double t) { return 2.0 / (c * std::expm1(alpha * t)); }, 0.0, horizon);
    TimeFunction m([](double) { return 2.0; }, 0.0, horizon);
    ExampleFieldGLambdaR f(lambda, r, omr, m, "g64:" + num(alpha),
                           "non-integrable dilation at 1 with singular solution exp(-alpha t); "
                           "the point 1 is mapped into (0,1)");
    f.singular_solution = [alpha](double t) { return std::exp(-alpha * t); };
    return f;
}

double example65_horizon(double beta) { return 1.0 / (2.0 * beta); }

ExampleFieldGLambdaR example65_field(double beta) {
    if (!(beta > 2.0)) throw DomainError("example65_field: beta must be > 2");
    const double horizon = example65_horizon(beta);
    TimeFunction omr([beta](double t) { return beta * t; }, 0.0, horizon);
    TimeFunction r([beta](double t) { return 1.0 - beta * t; }, 0.0, horizon);
    TimeFunction lambda([beta](double t) { return 2.0 / (beta * t); }, 0.0, horizon);
    TimeFunction m([](double) { return 2.0; }, 0.0, horizon);
    return ExampleFieldGLambdaR(lambda, r, omr, m, "g65:" + num(beta),
                                "non-integrable dilation at 1, no singular solution; "
                                "1 stays a boundary fixed point that is not regular from s = 0");
}

// ---------------------------------------------------------------------------------------------
// Checks and transforms

GrowthBoundReport check_growth_bound(const HerglotzField& field, const NullPoint& null_point,
                                     std::span<const Complex> grid, double t) {
    GrowthBoundReport report;
    const Complex sigma = null_point.sigma.value();
    const double lam = std::abs(null_point.dilation(t));
    const double g0 = std::abs(field(Complex(0.0), t));
    const double coeff = 4.0 * (std::sqrt(2.0) * g0 + (std::sqrt(2.0) + 1.0) * lam / 2.0);
    for (const auto& z : grid) {
        const double lhs = std::abs(field(z, t));
        const double rhs = coeff * std::norm(sigma - z) / (1.0 - std::norm(z));
        const double ratio = lhs == 0.0 ? 0.0 : (rhs > 0.0 ? lhs / rhs : kInfinity);
        if (ratio > report.max_ratio) {
            report.max_ratio = ratio;
            report.witness = z;
        }
    }
    report.violated = report.max_ratio > 1.0 + 1e-9;
    return report;
}

HerglotzField negative_part_field(const HerglotzField& field, const NullPoint& null_point) {
    const TimeFunction lambda = null_point.dilation;
    const auto active = [lambda](double t) { return lambda(t) <= 0.0; };
    HerglotzField::Metadata meta = field.metadata();
    meta.id = field.id() + "|neg";
    meta.autonomous = false;
    meta.null_points = {{null_point.sigma,
                         TimeFunction([lambda](double t) { return std::min(lambda(t), 0.0); }, lambda.begin(),
                                      lambda.end())}};
    if (meta.derivative) {
        meta.derivative = [d = meta.derivative, active](Complex z, double t) {
            return active(t) ? d(z, t) : Complex(0.0);
        };
    }
    if (meta.complement_rhs) {
        meta.complement_rhs = [c = meta.complement_rhs, active](double w, double t) {
            return active(t) ? c(w, t) : 0.0;
        };
    }
    return HerglotzField([field, active](Complex z, double t) { return active(t) ? field(z, t) : Complex(0.0); },
                         std::move(meta));
}

}  // namespace loewner
