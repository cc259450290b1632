#include "loewner/disc.hpp"

#include <cmath>
#include <string>

#include "loewner/errors.hpp"

namespace loewner {

DiscPoint::DiscPoint(Complex value) : value_(value) {
    if (!(std::abs(value) < 1.0)) {
        throw DomainError("DiscPoint requires |z| < 1, got |z| = " + std::to_string(std::abs(value)));
    }
}

BoundaryPoint::BoundaryPoint(double angle) {
    double a = std::fmod(angle, kTwoPi);
    if (a < 0.0) a += kTwoPi;
    if (a >= kTwoPi) a = 0.0;
    angle_ = a;
}

BoundaryPoint BoundaryPoint::from_complex(Complex w) {
    if (w == Complex(0.0)) throw DomainError("BoundaryPoint::from_complex: zero has no argument");
    return BoundaryPoint(std::arg(w));
}

MoebiusAutomorphism::MoebiusAutomorphism(Complex rotation, Complex center)
    : rotation_(rotation / std::abs(rotation)), center_(center) {
    if (!(std::abs(center) < 1.0)) throw DomainError("MoebiusAutomorphism: |center| must be < 1");
    if (!(std::abs(rotation) > 0.0)) throw DomainError("MoebiusAutomorphism: rotation must be nonzero");
}

MoebiusAutomorphism MoebiusAutomorphism::from_origin_data(Complex value_at_zero, Complex derivative_at_zero) {
    const double scale = 1.0 - std::norm(value_at_zero);
    if (!(scale > 0.0)) throw DomainError("from_origin_data: m(0) must lie in the disc");
    const Complex rot = derivative_at_zero / scale;
    const Complex unit = rot / std::abs(rot);
    return {unit, value_at_zero / unit};
}

Complex MoebiusAutomorphism::operator()(Complex z) const {
    return rotation_ * (z + center_) / (1.0 + std::conj(center_) * z);
}

BoundaryPoint MoebiusAutomorphism::operator()(const BoundaryPoint& sigma) const {
    return BoundaryPoint::from_complex((*this)(sigma.value()));
}

Complex MoebiusAutomorphism::derivative(Complex z) const {
    const Complex d = 1.0 + std::conj(center_) * z;
    return rotation_ * (1.0 - std::norm(center_)) / (d * d);
}

MoebiusAutomorphism MoebiusAutomorphism::compose(const MoebiusAutomorphism& inner) const {
    const Complex w0 = inner(Complex(0.0));
    return from_origin_data((*this)(w0), derivative(w0) * inner.derivative(Complex(0.0)));
}

MoebiusAutomorphism MoebiusAutomorphism::inverse() const {
    return {std::conj(rotation_), -rotation_ * center_};
}

Complex boundary_derivative_of_automorphism(const MoebiusAutomorphism& m, const BoundaryPoint& sigma) {
    return m.derivative(sigma.value());
}

StolzSchedule::StolzSchedule(BoundaryPoint base, double aperture)
    : StolzSchedule(dyadic(base, 4, 24, aperture)) {}

StolzSchedule::StolzSchedule(BoundaryPoint base, std::vector<double> ratios, double aperture)
    : base_(base), ratios_(std::move(ratios)), aperture_(aperture) {
    validate();
}

StolzSchedule StolzSchedule::dyadic(BoundaryPoint base, int k_first, int k_last, double aperture) {
    std::vector<double> r;
    for (int k = k_first; k <= k_last; ++k) r.push_back(1.0 - std::ldexp(1.0, -k));
    return {base, std::move(r), aperture};
}

void StolzSchedule::validate() const {
    if (!(aperture_ >= 0.0 && aperture_ < std::numbers::pi / 2)) {
        throw DomainError("StolzSchedule: aperture must lie in [0, pi/2)");
    }
    if (ratios_.empty()) throw DomainError("StolzSchedule: empty schedule");
    for (std::size_t k = 0; k < ratios_.size(); ++k) {
        if (!(ratios_[k] > 0.0 && ratios_[k] < 1.0)) throw DomainError("StolzSchedule: ratios must lie in (0,1)");
        if (k > 0 && !(ratios_[k] > ratios_[k - 1])) {
            throw DomainError("StolzSchedule: ratios must increase strictly towards 1");
        }
        if (!(std::abs(point(k)) < 1.0)) throw DomainError("StolzSchedule: sample point outside the disc");
    }
}

Complex StolzSchedule::point(std::size_t k) const {
    const double h = 1.0 - ratios_[k];
    if (aperture_ == 0.0) return ratios_[k] * base_.value();
    return base_.value() * (1.0 - h * std::polar(1.0, aperture_));
}

std::vector<Complex> StolzSchedule::points() const {
    std::vector<Complex> out;
    out.reserve(ratios_.size());
    for (std::size_t k = 0; k < ratios_.size(); ++k) out.push_back(point(k));
    return out;
}

StolzSchedule StolzSchedule::with_aperture(double aperture) const {
    return {base_, ratios_, aperture};
}

Complex cayley(Complex z) {
    if (z == Complex(1.0)) throw SingularityError("cayley: pole at z = 1");
    return (1.0 + z) / (1.0 - z);
}

Complex cayley_inverse(Complex w) {
    if (w == Complex(-1.0)) throw SingularityError("cayley_inverse: pole at w = -1");
    return (w - 1.0) / (w + 1.0);
}

double poisson_u(Complex z) {
    return -(1.0 - std::norm(z)) / std::norm(1.0 - z);
}

double poisson_u(const DiscPoint& z) { return poisson_u(z.value()); }

Complex poisson_v(Complex z) {
    const Complex d = 1.0 - z;
    return -2.0 / (d * d);
}

Complex poisson_v(const DiscPoint& z) { return poisson_v(z.value()); }

Complex contour_derivative(const DiscMap& f, Complex z, double rho, int points) {
    Complex acc = 0.0;
    for (int k = 0; k < points; ++k) {
        const Complex w = std::polar(1.0, kTwoPi * k / points);
        acc += f(z + rho * w) / w;
    }
    return acc / (static_cast<double>(points) * rho);
}

std::vector<Complex> disc_grid(std::size_t n, double r_max) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    std::vector<Complex> out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double r = r_max * std::sqrt((static_cast<double>(k) + 0.5) / static_cast<double>(n));
        out.push_back(std::polar(r, golden * static_cast<double>(k)));
    }
    return out;
}

std::vector<Complex> polar_grid(std::size_t n_radii, std::size_t n_angles, double r_max) {
    std::vector<Complex> out;
    out.reserve(n_radii * n_angles);
    for (std::size_t i = 1; i <= n_radii; ++i) {
        const double r = r_max * static_cast<double>(i) / static_cast<double>(n_radii);
        // Offset alternate rings so no two rings share rays.
        const double phase = (i % 2 == 0) ? 0.5 : 0.0;
        for (std::size_t j = 0; j < n_angles; ++j) {
            out.push_back(std::polar(r, kTwoPi * (static_cast<double>(j) + phase) / static_cast<double>(n_angles)));
        }
    }
    return out;
}

}  // namespace loewner
