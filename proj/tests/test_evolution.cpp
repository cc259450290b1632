#include <doctest.h>

#include <cmath>

#include "loewner/errors.hpp"
#include "loewner/evolution.hpp"
#include "oracles.hpp"

using namespace loewner;
using doctest::Approx;

namespace {

HerglotzField contraction() {
    return berkson_porta_field([](double) { return Complex(0.0); }, CaratheodoryFunction::constant(1.0), "contraction");
}

}  // namespace

TEST_CASE("evolve: identity, linear and hyperbolic oracles") {
    const EvolutionFamily lin(contraction());
    CHECK(std::abs(lin.evolve(0.3, 0.3, Complex(0.4, 0.2)) - Complex(0.4, 0.2)) == 0.0);
    CHECK(lin.evolve(0.0, 1.0, Complex(0.5)).real() == Approx(0.5 * std::exp(-1.0)).epsilon(1e-10));

    const EvolutionFamily hyp(hyperbolic_field(1.0));
    CHECK(hyp.evolve(0.0, 1.0, Complex(0.0)).real() == Approx(std::tanh(0.5)).epsilon(1e-10));
    CHECK(std::tanh(0.5) == Approx(0.462117).epsilon(1e-6));
    for (double lambda : {0.5, 2.0}) {
        const EvolutionFamily fam(hyperbolic_field(lambda));
        for (const auto& z : oracle::scatter(12, 0.95)) {
            CHECK(std::abs(fam.evolve(0.0, 1.0, z) - oracle::hyperbolic_flow(lambda, 1.0, z)) < 1e-8);
        }
    }
    CHECK_THROWS_AS(hyp.evolve(0.0, 1.0, Complex(1.0)), DomainError);
    CHECK_THROWS_AS(hyp.evolve(1.0, 0.5, Complex(0.1)), DomainError);
}

TEST_CASE("evolve_with_derivative matches the closed form derivative") {
    const EvolutionFamily hyp(hyperbolic_field(1.0));
    const Complex z(0.3, -0.2);
    const double h = 1e-6;
    const Complex fd = (oracle::hyperbolic_flow(1.0, 0.7, z + h) - oracle::hyperbolic_flow(1.0, 0.7, z - h)) / (2 * h);
    const auto mv = hyp.evolve_with_derivative(0.0, 0.7, z);
    CHECK(std::abs(mv.value - oracle::hyperbolic_flow(1.0, 0.7, z)) < 1e-9);
    CHECK(std::abs(mv.derivative - fd) < 1e-7);
}

TEST_CASE("cache resumes without changing results beyond tolerance") {
    const EvolutionFamily cached(example64_field(1.0).field());
    const EvolutionFamily fresh(example64_field(1.0).field(), {}, false);
    const Complex z(0.6, 0.3);
    for (double t : {0.1, 0.2, 0.4}) CHECK(std::abs(cached.evolve(0.0, t, z) - fresh.evolve(0.0, t, z)) < 1e-9);
    CHECK(cached.cache_size() > 0);
    CHECK(fresh.cache_size() == 0);
    cached.clear_cache();
    CHECK(cached.cache_size() == 0);
}

TEST_CASE("real slice of the non-integrable example stays below the barrier") {
    const EvolutionFamily fam(example64_field(1.0).field());
    double prev_99 = 0.0;
    for (int k = 1; k <= 6; ++k) {
        const double t = 0.05 * k;
        const double a = fam.evolve_real_slice(0.0, t, 0.9);
        const double b = fam.evolve_real_slice(0.0, t, 0.99);
        const double c = fam.evolve_real_slice(0.0, t, 0.999);
        CHECK(a < std::exp(-t));
        CHECK(b < std::exp(-t));
        CHECK(c < std::exp(-t));
        // Order of trajectories is preserved.
        CHECK(a < b);
        CHECK(b < c);
        if (k > 1) CHECK(b < prev_99);
        prev_99 = b;
        // Complex route agrees on the real axis.
        CHECK(std::abs(fam.evolve(0.0, t, Complex(0.9)) - a) < 1e-8);
    }
    const EvolutionFamily lin(contraction());
    CHECK(lin.evolve_real_slice(0.2, 0.7, 0.8) == Approx(0.8 * std::exp(-0.5)).epsilon(1e-10));
}

TEST_CASE("composition law of the family") {
    const auto grid = disc_grid(50, 0.95);
    const EvolutionFamily hyp(hyperbolic_field(1.0));
    CHECK(check_ef2(hyp, 0.0, 0.5, 1.0, grid) < 1e-8);
    CHECK(check_ef2(hyp, 0.0, 0.0, 1.0, grid) < 1e-12);
    CHECK(check_ef2(hyp, 0.0, 1.0, 1.0, grid) < 1e-12);
    const EvolutionFamily rot(rotation_field());
    CHECK(check_ef2(rot, 0.0, 0.4, 1.0, grid) < 1e-10);
    for (const auto& z : grid) CHECK(std::abs(rot.evolve(0.2, 1.0, z) - std::polar(1.0, 0.8) * z) < 1e-10);
}

TEST_CASE("time increments bounded by the field") {
    std::vector<double> times;
    for (int k = 0; k <= 20; ++k) times.push_back(0.05 * k);
    const EvolutionFamily lin(contraction());
    const Complex z(0.7, 0.1);
    const auto rep = check_ef3(lin, 0.0, z, times, kInfinity);
    REQUIRE(rep.increments.size() == times.size() - 1);
    for (std::size_t i = 0; i < rep.increments.size(); ++i) {
        CHECK(rep.increments[i] <= std::abs(z) * (times[i + 1] - times[i]) + 1e-12);
        CHECK(rep.increments[i] <= rep.field_bound[i] * (times[i + 1] - times[i]) + 1e-12);
    }
    CHECK(rep.finite);

    std::vector<double> late;
    for (int k = 0; k <= 10; ++k) late.push_back(0.01 + 0.015 * k);
    const EvolutionFamily g65(example65_field(3.0).field());
    const auto r65 = check_ef3(g65, 0.01, Complex(0.5, 0.2), late, kInfinity);
    CHECK(r65.finite);
    CHECK(std::isfinite(r65.ld_norm));
}

TEST_CASE("boundary trajectories") {
    std::vector<double> times{0.0, 0.25, 0.5, 1.0};
    const auto fixed = boundary_trajectory(hyperbolic_field(1.0), BoundaryPoint(0.0), times);
    for (double a : fixed.angles) CHECK(std::abs(a) < 1e-14);

    const auto rot = boundary_trajectory(rotation_field(), BoundaryPoint(0.3), times);
    for (std::size_t i = 0; i < times.size(); ++i) CHECK(rot.angles[i] == Approx(0.3 + times[i]).epsilon(1e-10));

    // Rotated hyperbolic field: boundary points move by the transported closed form.
    const double a = M_PI / 4;
    const double theta0 = a + 1.0;
    const auto tr = boundary_trajectory(rotated_hyperbolic_field(1.0, a), BoundaryPoint(theta0), times);
    for (std::size_t i = 0; i < times.size(); ++i) {
        const Complex expected = oracle::rotated_hyperbolic_flow(1.0, a, times[i], std::polar(1.0, theta0));
        CHECK(std::abs(std::polar(1.0, tr.angles[i]) - expected) < 1e-8);
    }
    CHECK_THROWS_AS(boundary_trajectory(contraction(), BoundaryPoint(0.0), times), TangencyError);
}

TEST_CASE("schwarz-pick, univalence and inversion") {
    const auto grid = disc_grid(30, 0.9);
    const EvolutionFamily fam(example64_field(1.0).field());
    const auto sp = schwarz_pick_check(fam, 0.0, 0.3, grid);
    CHECK_FALSE(sp.violated);
    CHECK(sp.max_ratio <= 1.0 + 1e-8);
    CHECK(univalence_check(fam, 0.0, 0.3, grid) > 0.0);
    const Complex z(0.2, 0.4);
    const Complex w = fam.evolve(0.05, 0.3, z);
    CHECK(std::abs(fam.invert(0.05, 0.3, w) - z) < 1e-9);
}
