#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "loewner/disc.hpp"

namespace loewner {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Real function of time with a declared validity window [begin, end).
class TimeFunction {
public:
    TimeFunction() = default;
    TimeFunction(std::function<double(double)> fn, double begin = 0.0, double end = kInfinity);

    static TimeFunction constant(double value) {
        return TimeFunction([value](double) { return value; });
    }

    double operator()(double t) const;
    bool contains(double t) const { return t >= begin_ && t < end_; }
    double begin() const { return begin_; }
    double end() const { return end_; }
    explicit operator bool() const { return static_cast<bool>(fn_); }

private:
    std::function<double(double)> fn_;
    double begin_ = 0.0;
    double end_ = kInfinity;
};

/// Time-dependent function on the disc, z in D, t >= 0.
using SpaceTimeFn = std::function<Complex(Complex, double)>;

enum class SideConditionPolicy { warn, reject };

/// Function with nonnegative real part (class P), optionally with the angular side condition
/// (z - sigma) p(z) -> 0 declared at a boundary point.
class CaratheodoryFunction {
public:
    explicit CaratheodoryFunction(SpaceTimeFn fn);

    static CaratheodoryFunction constant(Complex value);

    Complex operator()(Complex z, double t) const { return fn_(z, t); }

    /// Throws ValidationError if Re p < 0 on the validation grid at any of the given times.
    void validate(std::span<const double> times) const;

    /// Largest |(z_k - sigma) p(z_k, t)| over the tail of a radial schedule towards sigma.
    double side_condition_residual(const BoundaryPoint& sigma, double t) const;

    /// Radii {0.5, 0.9, 0.99, 0.999} x 64 angles.
    static std::vector<Complex> validation_grid();

private:
    SpaceTimeFn fn_;
};

/// Boundary regular null point sigma with dilation lambda(t) = angular lim G(z,t) / (z - sigma).
struct NullPoint {
    BoundaryPoint sigma;
    TimeFunction dilation;
};

/// Time-dependent holomorphic vector field on the disc with declared metadata.
///
/// Evaluation outside the validity window throws DomainError. Metadata is declared by the
/// constructor: the order d of the L^d majorant, boundary null points with their dilations,
/// the Berkson-Porta point tau(t) when known, and, for fields real on (0,1) with a null point at
/// 1, the right-hand side of the real slice ODE in the complementary variable w = 1 - x.
class HerglotzField {
public:
    struct Metadata {
        std::string id;
        double order = kInfinity;
        std::vector<NullPoint> null_points;
        std::function<Complex(double)> dw_point;
        double valid_begin = 0.0;
        double valid_end = kInfinity;
        bool autonomous = false;
        /// dw/dt for w = 1 - x on the real slice, evaluated without cancellation near x = 1.
        std::function<double(double w, double t)> complement_rhs;
        /// Analytic z-derivative when the constructor knows it.
        SpaceTimeFn derivative;
        /// Set when a sampled side condition failed under SideConditionPolicy::warn.
        bool side_condition_warning = false;
        /// Human readable provenance of gallery fields.
        std::string reference;
    };

    HerglotzField(SpaceTimeFn g, Metadata meta);

    Complex operator()(Complex z, double t) const;
    /// dG/dz; analytic when declared, otherwise a contour derivative.
    Complex derivative(Complex z, double t) const;

    /// Field frozen at time t0 (autonomous).
    HerglotzField frozen(double t0) const;

    const std::string& id() const { return meta_.id; }
    double order() const { return meta_.order; }
    std::span<const NullPoint> null_points() const { return meta_.null_points; }
    const NullPoint* null_point_at(const BoundaryPoint& sigma) const;
    const Metadata& metadata() const { return meta_; }
    bool autonomous() const { return meta_.autonomous; }
    bool in_window(double t) const { return t >= meta_.valid_begin && t < meta_.valid_end; }
    double valid_begin() const { return meta_.valid_begin; }
    double valid_end() const { return meta_.valid_end; }
    bool has_complement_form() const { return static_cast<bool>(meta_.complement_rhs); }
    double complement_rhs(double w, double t) const;

    /// Raw evaluation without the window check (used for limits at window endpoints).
    Complex evaluate_unchecked(Complex z, double t) const { return g_(z, t); }

private:
    SpaceTimeFn g_;
    Metadata meta_;
};

/// G(z,t) = (z - tau(t)) (conj(tau(t)) z - 1) p(z,t).
HerglotzField berkson_porta_field(std::function<Complex(double)> tau, const CaratheodoryFunction& p,
                                  std::string id = "berkson-porta", std::span<const double> validation_times = {});

/// G(z,t) = (z - sigma)(conj(sigma) z - 1)(p(z,t) - lambda(t)/2 (sigma + z)/(sigma - z)).
HerglotzField brnp_pinned_field(const BoundaryPoint& sigma, const TimeFunction& lambda, const CaratheodoryFunction& p,
                                std::string id = "brnp",
                                SideConditionPolicy policy = SideConditionPolicy::warn,
                                std::span<const double> check_times = {});

/// G_{lambda,r}(z,t) = (1 - z)^2 (lambda/2)(p0(r z) - p0(z)) = -M z (1 - z) / (1 - r z), M = lambda (1 - r).
class ExampleFieldGLambdaR {
public:
    /// lambda >= 0, r in [0,1). one_minus_r and m are optional accurate evaluations of 1 - r and
    /// lambda (1 - r), needed when r -> 1 and lambda -> infinity at a window endpoint.
    ExampleFieldGLambdaR(TimeFunction lambda, TimeFunction r, TimeFunction one_minus_r = {}, TimeFunction m = {},
                         std::string id = "glr", std::string reference = "");

    /// Rational form -M z (1 - z)/(1 - r z).
    Complex operator()(Complex z, double t) const;
    /// Defining product form (1 - z)^2 (lambda/2)(p0(r z) - p0(z)).
    Complex product_form(Complex z, double t) const;
    Complex derivative(Complex z, double t) const;

    double lambda(double t) const { return lambda_(t); }
    double r(double t) const { return r_(t); }
    double one_minus_r(double t) const;
    double m(double t) const;

    /// Singular solution xi_*(t) of the real slice ODE when known (Example with r from alpha).
    std::function<double(double)> singular_solution;

    const HerglotzField& field() const { return field_; }
    operator const HerglotzField&() const { return field_; }  // NOLINT(google-explicit-constructor)

    double valid_begin() const { return field_.valid_begin(); }
    double valid_end() const { return field_.valid_end(); }

private:
    void build_field(std::string id, std::string reference);

    TimeFunction lambda_;
    TimeFunction r_;
    TimeFunction one_minus_r_;
    TimeFunction m_;
    HerglotzField field_;
};

/// Generic constructor; throws ValidationError if r(t) >= 1 or lambda(t) < 0 at a sampled time.
ExampleFieldGLambdaR example_field(const TimeFunction& lambda, const TimeFunction& r,
                                   std::span<const double> sample_times = {});

/// r(t) = 1 - (2/alpha - 1)(e^{alpha t} - 1), lambda = 2/(1 - r); valid on [0, ln(2/(2-alpha))/alpha).
ExampleFieldGLambdaR example64_field(double alpha);
/// Upper end of the validity window of example64_field(alpha).
double example64_horizon(double alpha);

/// r(t) = 1 - beta t, lambda = 2/(beta t); valid on [0, 1/(2 beta)) so that r > 1/2. The value
/// at t = 0 is the continuous extension G(z,0) = -2z.
ExampleFieldGLambdaR example65_field(double beta);
double example65_horizon(double beta);

/// G(z) = i z.
HerglotzField rotation_field();
/// G(z) = (lambda/2)(1 - z^2); flow p0^{-1}(e^{lambda t} p0(z)).
HerglotzField hyperbolic_field(double lambda);
/// Hyperbolic field conjugated by the rotation e^{i theta}: e^{i theta} G(e^{-i theta} z).
HerglotzField rotated_hyperbolic_field(double lambda, double theta);
/// BRNP-pinned field with p = 0: G(z,t) = (lambda(t)/2) conj(sigma) (z - sigma)(z + sigma).
HerglotzField pinned_field(const BoundaryPoint& sigma, const TimeFunction& lambda, std::string id = "");
/// Radial Loewner field -z p(z,t).
HerglotzField radial_field(const CaratheodoryFunction& p, std::string id = "radial");

/// Report of the growth bound |G(z)| <= 4 (sqrt2 |G(0)| + (sqrt2 + 1)|lambda|/2) |sigma - z|^2 / (1 - |z|^2).
struct GrowthBoundReport {
    double max_ratio = 0.0;
    Complex witness{0.0};
    bool violated = false;
};

GrowthBoundReport check_growth_bound(const HerglotzField& field, const NullPoint& null_point,
                                     std::span<const Complex> grid, double t);

/// Field equal to G when the dilation at the null point is <= 0 and zero otherwise.
HerglotzField negative_part_field(const HerglotzField& field, const NullPoint& null_point);

}  // namespace loewner
