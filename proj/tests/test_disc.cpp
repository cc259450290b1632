#include <doctest.h>

#include <cmath>

#include "loewner/disc.hpp"
#include "loewner/errors.hpp"
#include "loewner/extrapolation.hpp"
#include "oracles.hpp"

using namespace loewner;
using doctest::Approx;

TEST_CASE("cayley and its inverse on exact points") {
    CHECK(std::abs(cayley(Complex(0.0)) - 1.0) < 1e-15);
    CHECK(std::abs(cayley(Complex(-1.0))) < 1e-15);
    CHECK(std::abs(cayley(Complex(0.0, 1.0)) - Complex(0.0, 1.0)) < 1e-15);
    CHECK(std::abs(cayley_inverse(Complex(1.0))) < 1e-15);
    CHECK(std::abs(cayley_inverse(Complex(0.0)) + 1.0) < 1e-15);
    CHECK(std::abs(cayley_inverse(Complex(0.0, 1.0)) - Complex(0.0, 1.0)) < 1e-15);
    CHECK_THROWS_AS(cayley(Complex(1.0)), SingularityError);
    CHECK_THROWS_AS(cayley_inverse(Complex(-1.0)), SingularityError);
    for (const auto& z : oracle::scatter(20, 0.95)) CHECK(std::abs(cayley_inverse(cayley(z)) - z) < 1e-13);
}

TEST_CASE("poisson kernel terms") {
    CHECK(poisson_u(Complex(0.0)) == Approx(-1.0));
    CHECK(poisson_u(Complex(0.5)) == Approx(-3.0));
    CHECK(poisson_u(Complex(0.0, 0.5)) == Approx(-0.6));
    CHECK(std::abs(poisson_v(Complex(0.0)) - Complex(-2.0)) < 1e-14);
    CHECK(std::abs(poisson_v(Complex(0.37)).imag()) < 1e-14);

    // Central differences of u against v = du/dx - i du/dy.
    const Complex z(0.3, 0.2);
    const double h = 1e-5;
    const double ux = (poisson_u(z + h) - poisson_u(z - h)) / (2 * h);
    const double uy = (poisson_u(z + Complex(0, h)) - poisson_u(z - Complex(0, h))) / (2 * h);
    const Complex v = poisson_v(z);
    CHECK(v.real() == Approx(ux).epsilon(1e-7));
    CHECK(v.imag() == Approx(-uy).epsilon(1e-7));
}

TEST_CASE("moebius automorphisms") {
    const auto id = MoebiusAutomorphism::identity();
    CHECK(std::abs(id(Complex(0.3, -0.4)) - Complex(0.3, -0.4)) < 1e-16);
    const MoebiusAutomorphism m(1.0, 0.5);
    CHECK(std::abs(m(Complex(0.0)) - 0.5) < 1e-16);

    const MoebiusAutomorphism g(std::polar(1.0, 0.7), Complex(0.2, -0.5));
    const auto e = g.compose(g.inverse());
    for (const auto& z : oracle::scatter(20, 0.99)) CHECK(std::abs(e(z) - z) < 1e-13);

    const auto h = MoebiusAutomorphism::from_origin_data(Complex(0.1, 0.2), Complex(0.0, 1.0) * (1.0 - 0.05));
    CHECK(std::abs(h(Complex(0.0)) - Complex(0.1, 0.2)) < 1e-15);
    CHECK(std::abs(h.derivative(Complex(0.0)) - Complex(0.0, 0.95)) < 1e-14);
}

TEST_CASE("boundary derivative of automorphisms") {
    CHECK(std::abs(boundary_derivative_of_automorphism(MoebiusAutomorphism::identity(), BoundaryPoint(0.0)) - 1.0) < 1e-15);
    const MoebiusAutomorphism m(1.0, 0.5);
    CHECK(std::abs(boundary_derivative_of_automorphism(m, BoundaryPoint(0.0)) - oracle::moebius_derivative_at_one(0.5)) <
          1e-14);
    CHECK(std::abs(boundary_derivative_of_automorphism(m, BoundaryPoint(M_PI)) -
                   oracle::moebius_derivative_at_minus_one(0.5)) < 1e-14);
}

TEST_CASE("points and schedules") {
    CHECK_THROWS_AS(DiscPoint(Complex(1.0)), DomainError);
    CHECK_THROWS_AS(DiscPoint(0.8, 0.6), DomainError);
    CHECK(BoundaryPoint(-M_PI / 2).angle() == Approx(1.5 * M_PI));
    CHECK(BoundaryPoint::from_complex(Complex(0.0, -3.0)).angle() == Approx(1.5 * M_PI));

    const StolzSchedule s = StolzSchedule::dyadic(BoundaryPoint(0.0), 4, 10);
    REQUIRE(s.size() == 7);
    CHECK(s.distance(0) == Approx(1.0 / 16));
    CHECK(std::abs(s.point(6) - (1.0 - 1.0 / 1024)) < 1e-16);
    const auto tilted = s.with_aperture(0.5);
    for (std::size_t k = 0; k < tilted.size(); ++k) {
        CHECK(std::abs(tilted.point(k)) < 1.0);
        CHECK(std::abs(std::abs(tilted.point(k) - 1.0) - tilted.distance(k)) < 1e-15);
    }

    const auto grid = disc_grid(50, 0.95);
    CHECK(grid.size() == 50);
    for (const auto& z : grid) CHECK(std::abs(z) <= 0.95 + 1e-15);
    CHECK(polar_grid(10, 50).size() == 500);
}

TEST_CASE("contour derivative of a polynomial") {
    const DiscMap f = [](Complex z) { return z * z * z; };
    const Complex z(0.2, 0.1);
    CHECK(std::abs(contour_derivative(f, z, 0.05) - 3.0 * z * z) < 1e-12);
}

TEST_CASE("extrapolation of model sequences") {
    std::vector<double> h;
    std::vector<Complex> lin, root, blow, osc;
    for (int k = 4; k <= 24; ++k) {
        const double d = std::ldexp(1.0, -k);
        h.push_back(d);
        lin.push_back(2.0 + 3.0 * d - d * d);
        root.push_back(1.0 + std::sqrt(d));
        blow.push_back(1.0 / d);
        osc.push_back(k % 2 ? 1.0 : -1.0);
    }
    const auto a = extrapolate_limit(h, lin);
    CHECK(a.converged);
    CHECK(std::abs(a.value - 2.0) < 1e-10);
    CHECK(fit_convergence_exponent(h, lin) == Approx(1.0).epsilon(1e-3));

    const auto b = extrapolate_limit(h, root);
    CHECK(b.converged);
    CHECK(std::abs(b.value - 1.0) < 1e-7);

    const auto c = extrapolate_limit(h, blow);
    CHECK_FALSE(c.converged);
    CHECK(c.pattern == DivergencePattern::monotone_blow_up);

    const auto d = extrapolate_limit(h, osc);
    CHECK_FALSE(d.converged);
    CHECK(d.pattern == DivergencePattern::oscillation);
}
