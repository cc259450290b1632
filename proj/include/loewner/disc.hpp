#pragma once

#include <complex>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

namespace loewner {

using Complex = std::complex<double>;

/// Holomorphic map of the disc given as an evaluation capability.
using DiscMap = std::function<Complex(Complex)>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Point of the open unit disc. Construction with |value| >= 1 throws DomainError.
class DiscPoint {
public:
    explicit DiscPoint(Complex value);
    DiscPoint(double re, double im) : DiscPoint(Complex(re, im)) {}

    Complex value() const { return value_; }
    operator Complex() const { return value_; }  // NOLINT(google-explicit-constructor)

private:
    Complex value_;
};

/// Point of the unit circle stored by its angle, normalized to [0, 2pi).
class BoundaryPoint {
public:
    explicit BoundaryPoint(double angle = 0.0);

    /// Nearest boundary point to a nonzero complex number (its argument).
    static BoundaryPoint from_complex(Complex w);

    double angle() const { return angle_; }
    Complex value() const { return std::polar(1.0, angle_); }

private:
    double angle_;
};

/// Conformal automorphism z -> rotation * (z + center) / (1 + conj(center) z).
class MoebiusAutomorphism {
public:
    MoebiusAutomorphism() = default;
    MoebiusAutomorphism(Complex rotation, Complex center);

    static MoebiusAutomorphism identity() { return {}; }
    static MoebiusAutomorphism rotation_by(double angle) { return {std::polar(1.0, angle), 0.0}; }
    /// Automorphism determined by m(0) and m'(0) (m'(0) must equal rotation * (1 - |m(0)|^2)).
    static MoebiusAutomorphism from_origin_data(Complex value_at_zero, Complex derivative_at_zero);

    Complex rotation() const { return rotation_; }
    Complex center() const { return center_; }

    Complex operator()(Complex z) const;
    BoundaryPoint operator()(const BoundaryPoint& sigma) const;
    Complex derivative(Complex z) const;

    /// this o inner
    MoebiusAutomorphism compose(const MoebiusAutomorphism& inner) const;
    MoebiusAutomorphism inverse() const;

private:
    Complex rotation_{1.0, 0.0};
    Complex center_{0.0, 0.0};
};

/// Exact derivative of m at a boundary point.
Complex boundary_derivative_of_automorphism(const MoebiusAutomorphism& m, const BoundaryPoint& sigma);

/// Geometric approach schedule z_k = sigma (1 - (1 - r_k) e^{i aperture}) towards a boundary point.
class StolzSchedule {
public:
    /// Default radii r_k = 1 - 2^-k for k = 4..24, radial approach.
    explicit StolzSchedule(BoundaryPoint base, double aperture = 0.0);
    StolzSchedule(BoundaryPoint base, std::vector<double> ratios, double aperture = 0.0);

    /// r_k = 1 - 2^-k for k in [k_first, k_last].
    static StolzSchedule dyadic(BoundaryPoint base, int k_first, int k_last, double aperture = 0.0);

    const BoundaryPoint& base() const { return base_; }
    std::span<const double> ratios() const { return ratios_; }
    double aperture() const { return aperture_; }
    std::size_t size() const { return ratios_.size(); }

    /// Distance |z_k - sigma| = 1 - r_k.
    double distance(std::size_t k) const { return 1.0 - ratios_[k]; }
    Complex point(std::size_t k) const;
    std::vector<Complex> points() const;

    StolzSchedule with_aperture(double aperture) const;

private:
    void validate() const;

    BoundaryPoint base_;
    std::vector<double> ratios_;
    double aperture_;
};

/// Cayley map (1 + z) / (1 - z); z = 1 throws SingularityError.
Complex cayley(Complex z);
inline Complex cayley(const DiscPoint& z) { return cayley(z.value()); }
inline Complex cayley(const BoundaryPoint& z) { return cayley(z.value()); }

/// Inverse Cayley map (w - 1) / (w + 1); w = -1 throws SingularityError.
Complex cayley_inverse(Complex w);

/// Negative Poisson kernel -(1 - |z|^2) / |1 - z|^2.
double poisson_u(const DiscPoint& z);
double poisson_u(Complex z);

/// du/dx - i du/dy for u = poisson_u; equals -2 / (1 - z)^2 since u = -Re cayley.
Complex poisson_v(const DiscPoint& z);
Complex poisson_v(Complex z);

/// Derivative of a holomorphic map by the trapezoidal rule on a circle of radius rho around z.
/// Exact for polynomials of degree < points; free of the cancellation of one-sided differences.
Complex contour_derivative(const DiscMap& f, Complex z, double rho, int points = 8);

/// Deterministic sunflower grid of n points with |z| <= r_max.
std::vector<Complex> disc_grid(std::size_t n, double r_max = 0.95);

/// n_radii x n_angles polar grid, radii equally spaced in (0, r_max].
std::vector<Complex> polar_grid(std::size_t n_radii, std::size_t n_angles, double r_max = 0.99);

}  // namespace loewner
